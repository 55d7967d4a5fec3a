//! Projective measurements on the ancilla register and the post-selected
//! state of `(q_A, q_B)` they leave behind.
//!
//! Ancilla `i` is described by angles `(theta_i, phi_i)` with
//! `alpha_i = cos(theta_i)` and `beta_i = exp(i phi_i) sin(theta_i)`.
//! Post-selection contracts the register with `alpha_i <0| + beta_i <1|`
//! on every ancilla, so the post-measurement state is
//!
//! ```text
//! gamma_1 |0_A 0_B> + gamma_2 |0_A 1_B> + gamma_3 |1_A 0_B>
//! ```
//!
//! up to normalization.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::complementarity::{ComplementarityTriple, TwoQubitPure};
use crate::error::{Error, Result};
use crate::excitation::{CouplingConfig, ExcitationState};

/// Post-selections whose norm factor falls below this are treated as
/// impossible outcomes.
pub const DEGENERATE_NORM: f64 = 1e-14;

/// Measurement angles for each measured ancilla, in collision order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementBasis {
    angles: Vec<(f64, f64)>,
}

impl MeasurementBasis {
    /// Canonicalizes `theta` into `[0, pi)` and `phi` into `[0, 2 pi)`.
    /// Shifting `theta` by `pi` only flips the sign of the projector's
    /// coefficients, so the post-selected state is unchanged up to phase.
    pub fn new(angles: impl IntoIterator<Item = (f64, f64)>) -> Self {
        Self {
            angles: angles
                .into_iter()
                .map(|(t, p)| (wrap(t, PI), wrap(p, TAU)))
                .collect(),
        }
    }

    /// The same `(theta, phi)` on `n` ancillas.
    pub fn uniform(theta: f64, phi: f64, n: usize) -> Self {
        Self::new(std::iter::repeat_n((theta, phi), n))
    }

    pub fn empty() -> Self {
        Self { angles: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn angles(&self) -> &[(f64, f64)] {
        &self.angles
    }

    pub fn alpha(&self, i: usize) -> f64 {
        self.angles[i].0.cos()
    }

    pub fn beta(&self, i: usize) -> Complex64 {
        let (t, p) = self.angles[i];
        Complex64::from_polar(t.sin(), p)
    }

    /// `theta_1, phi_1, theta_2, phi_2, ...`
    pub fn flattened(&self) -> Vec<f64> {
        self.angles.iter().flat_map(|&(t, p)| [t, p]).collect()
    }
}

fn wrap(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    // rem_euclid can round up to the period itself
    if r >= period {
        0.0
    } else {
        r
    }
}

/// Post-selected amplitudes and their normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaTriple {
    pub gamma1: Complex64,
    pub gamma2: Complex64,
    pub gamma3: Complex64,
    pub norm_factor: f64,
    pub outcome_probability: f64,
}

impl GammaTriple {
    /// Fails with [`Error::DegenerateOutcome`] when the outcome has
    /// vanishing probability.
    pub fn new(gamma1: Complex64, gamma2: Complex64, gamma3: Complex64) -> Result<Self> {
        let p = gamma1.norm_sqr() + gamma2.norm_sqr() + gamma3.norm_sqr();
        let norm_factor = p.sqrt();
        if norm_factor.is_nan() || norm_factor < DEGENERATE_NORM {
            return Err(Error::DegenerateOutcome {
                norm_factor,
                threshold: DEGENERATE_NORM,
            });
        }
        Ok(Self {
            gamma1,
            gamma2,
            gamma3,
            norm_factor,
            outcome_probability: p,
        })
    }

    /// The normalized `(q_A, q_B)` state, `(gamma_1, gamma_2, gamma_3, 0) / norm`.
    pub fn state(&self) -> TwoQubitPure {
        let s = 1.0 / self.norm_factor;
        TwoQubitPure {
            c00: self.gamma1 * s,
            c01: self.gamma2 * s,
            c10: self.gamma3 * s,
            c11: Complex64::new(0.0, 0.0),
        }
    }
}

/// Unnormalized `(gamma_1, gamma_2, gamma_3)` for raw angle pairs.
///
/// `gamma_1` is accumulated as `sum_i a^(i-1) beta_i prod_{j != i} alpha_j`,
/// which stays finite when some `alpha_i` vanishes.
pub(crate) fn raw_gammas(cfg: &CouplingConfig, angles: &[(f64, f64)]) -> [Complex64; 3] {
    let a = cfg.a();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut prod = 1.0;
    let mut a_pow = 1.0;
    for &(theta, phi) in angles {
        let (s, c) = theta.sin_cos();
        let beta = Complex64::from_polar(s, phi);
        sum = sum * c + beta * (a_pow * prod);
        prod *= c;
        a_pow *= a;
    }
    let h = FRAC_1_SQRT_2;
    [
        cfg.b() * sum * h,
        Complex64::new(a_pow * prod * h, 0.0),
        Complex64::new(prod * h, 0.0),
    ]
}

pub fn gamma_coefficients(
    cfg: &CouplingConfig,
    basis: &MeasurementBasis,
    n: usize,
) -> Result<GammaTriple> {
    cfg.check_collisions(n)?;
    if basis.len() != n {
        return Err(Error::BasisLength {
            expected: n,
            got: basis.len(),
        });
    }
    let [g1, g2, g3] = raw_gammas(cfg, basis.angles());
    GammaTriple::new(g1, g2, g3)
}

/// Brute-force post-selection of a global state: every register
/// configuration is contracted with the product bra explicitly.
///
/// Returns the normalized `(q_A, q_B)` state and the outcome probability.
pub fn project_oracle(
    state: &ExcitationState,
    basis: &MeasurementBasis,
) -> Result<(TwoQubitPure, f64)> {
    let n = state.n();
    if basis.len() != n {
        return Err(Error::BasisLength {
            expected: n,
            got: basis.len(),
        });
    }
    let bra: Vec<[Complex64; 2]> = (0..n)
        .map(|i| [Complex64::new(basis.alpha(i), 0.0), basis.beta(i)])
        .collect();
    // overlap of the bra with the register holding its excitation at `site`
    let overlap = |site: Option<usize>| -> Complex64 {
        bra.iter()
            .enumerate()
            .map(|(j, coeffs)| coeffs[usize::from(site == Some(j))])
            .product()
    };

    let vacuum = overlap(None);
    let zero = Complex64::new(0.0, 0.0);
    let c00: Complex64 = state
        .ancilla_amps()
        .iter()
        .enumerate()
        .map(|(i, amp)| amp * overlap(Some(i)))
        .sum();
    let c01 = state.amp_a1b() * vacuum;
    let c10 = state.amp_1a() * vacuum;

    let probability = c00.norm_sqr() + c01.norm_sqr() + c10.norm_sqr();
    if probability.is_nan() || probability.sqrt() < DEGENERATE_NORM {
        return Err(Error::DegenerateOutcome {
            norm_factor: probability.sqrt(),
            threshold: DEGENERATE_NORM,
        });
    }
    Ok((TwoQubitPure::normalized(c00, c01, c10, zero)?, probability))
}

/// Closed-form coefficients when every ancilla is measured with the same
/// `(theta, phi)`.
pub fn uniform_gamma(cfg: &CouplingConfig, theta: f64, phi: f64, n: usize) -> Result<GammaTriple> {
    cfg.check_collisions(n)?;
    let (s, alpha) = theta.sin_cos();
    let beta = Complex64::from_polar(s, phi);
    let h = FRAC_1_SQRT_2;
    let alpha_n = alpha.powi(n as i32);
    let gamma1 = if n == 0 {
        Complex64::new(0.0, 0.0)
    } else {
        // (a^n - 1) / (a - 1) * alpha^(n-1), written without dividing by alpha
        cfg.b() * beta * (cfg.geometric_sum(n) * alpha.powi(n as i32 - 1) * h)
    };
    let gamma2 = Complex64::new(alpha_n * cfg.a().powi(n as i32) * h, 0.0);
    let gamma3 = Complex64::new(alpha_n * h, 0.0);
    GammaTriple::new(gamma1, gamma2, gamma3)
}

/// Visibility, predictability and concurrence of the post-selected state.
pub fn complementarity_after(gt: &GammaTriple) -> ComplementarityTriple {
    let n2 = gt.outcome_probability;
    let (g1, g2, g3) = (gt.gamma1, gt.gamma2, gt.gamma3);
    let v = 2.0 * (g1 * g3.conj()).norm() / n2;
    let p = (g3.norm_sqr() - g1.norm_sqr() - g2.norm_sqr()).abs() / n2;
    let c = 2.0 * (g2 * g3).norm() / n2;
    ComplementarityTriple::from_parts(v, p, c)
}

/// Which-path information held by ancilla `i` (1-based), `|a^(i-1) b|^2`.
pub fn per_qubit_distinguishability(cfg: &CouplingConfig, i: usize) -> Result<f64> {
    if i == 0 || i > cfg.n_total() {
        return Err(Error::Range(format!(
            "ancilla index {i} outside 1..={}",
            cfg.n_total()
        )));
    }
    Ok((cfg.b() * cfg.a().powi(i as i32 - 1)).norm_sqr())
}

fn check_visibility(v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Domain(format!("visibility {v} outside [0, 1]")));
    }
    Ok(())
}

/// Change of the total distinguishability caused by the measurements,
/// `sqrt(1 - V^2) - 1`.
pub fn delta_d_total(v_after: f64) -> Result<f64> {
    check_visibility(v_after)?;
    Ok((1.0 - v_after * v_after).sqrt() - 1.0)
}

/// Change of the `q_A`/`q_B` distinguishability, `sqrt(1 - V^2) - a^(2n)`.
pub fn delta_d_f(cfg: &CouplingConfig, n: usize, v_after: f64) -> Result<f64> {
    check_visibility(v_after)?;
    cfg.check_collisions(n)?;
    Ok((1.0 - v_after * v_after).sqrt() - cfg.a().powi(2 * n as i32))
}
