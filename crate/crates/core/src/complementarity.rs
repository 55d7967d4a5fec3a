//! Concurrence, visibility, predictability and distinguishability of a
//! pure two-qubit state, and the closure relation tying them together.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// States whose norm deviates from one by at most this much are
/// renormalized; anything further off is rejected.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-6;

/// Pure state `c00|00> + c01|01> + c10|10> + c11|11>`, first slot `q_A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitPure {
    pub c00: Complex64,
    pub c01: Complex64,
    pub c10: Complex64,
    pub c11: Complex64,
}

impl TwoQubitPure {
    pub fn new(c00: Complex64, c01: Complex64, c10: Complex64, c11: Complex64) -> Result<Self> {
        let raw = Self { c00, c01, c10, c11 };
        let norm = raw.norm_sqr().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > RENORMALIZE_TOLERANCE {
            return Err(Error::Normalization {
                norm,
                tolerance: RENORMALIZE_TOLERANCE,
            });
        }
        Ok(raw.scaled(1.0 / norm))
    }

    /// Normalizes an arbitrary non-zero vector.
    pub fn normalized(
        c00: Complex64,
        c01: Complex64,
        c10: Complex64,
        c11: Complex64,
    ) -> Result<Self> {
        let raw = Self { c00, c01, c10, c11 };
        let norm = raw.norm_sqr().sqrt();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::Normalization {
                norm,
                tolerance: RENORMALIZE_TOLERANCE,
            });
        }
        Ok(raw.scaled(1.0 / norm))
    }

    pub fn amplitudes(&self) -> [Complex64; 4] {
        [self.c00, self.c01, self.c10, self.c11]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes().iter().map(|c| c.norm_sqr()).sum()
    }

    fn scaled(self, s: f64) -> Self {
        Self {
            c00: self.c00 * s,
            c01: self.c01 * s,
            c10: self.c10 * s,
            c11: self.c11 * s,
        }
    }

    /// Multiplies every amplitude by the same phase factor.
    pub fn with_global_phase(self, phase: Complex64) -> Self {
        Self {
            c00: self.c00 * phase,
            c01: self.c01 * phase,
            c10: self.c10 * phase,
            c11: self.c11 * phase,
        }
    }
}

/// `(V, P, C)` together with the closure residual `V^2 + P^2 + C^2 - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplementarityTriple {
    pub visibility: f64,
    pub predictability: f64,
    pub concurrence: f64,
    pub closure_residual: f64,
}

impl ComplementarityTriple {
    pub fn from_parts(visibility: f64, predictability: f64, concurrence: f64) -> Self {
        Self {
            visibility,
            predictability,
            concurrence,
            closure_residual: visibility * visibility
                + predictability * predictability
                + concurrence * concurrence
                - 1.0,
        }
    }

    /// Which-path distinguishability `sqrt(C^2 + P^2)`.
    pub fn distinguishability(&self) -> f64 {
        self.concurrence.hypot(self.predictability)
    }
}

/// `2 |c00 c11 - c01 c10|`
pub fn concurrence(s: &TwoQubitPure) -> f64 {
    2.0 * (s.c00 * s.c11 - s.c01 * s.c10).norm()
}

/// `2 |c00 c10* + c01 c11*|`, the coherence of `q_A`.
pub fn visibility(s: &TwoQubitPure) -> f64 {
    2.0 * (s.c00 * s.c10.conj() + s.c01 * s.c11.conj()).norm()
}

/// Population imbalance of `q_A`.
pub fn predictability(s: &TwoQubitPure) -> f64 {
    let up = s.c10.norm_sqr() + s.c11.norm_sqr();
    let down = s.c00.norm_sqr() + s.c01.norm_sqr();
    (up - down).abs()
}

pub fn distinguishability(s: &TwoQubitPure) -> f64 {
    concurrence(s).hypot(predictability(s))
}

pub fn triple(s: &TwoQubitPure) -> ComplementarityTriple {
    ComplementarityTriple::from_parts(visibility(s), predictability(s), concurrence(s))
}
