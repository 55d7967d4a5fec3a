//! Reference post-measurement states for the six (objective, coupling)
//! combinations at `n = 1, 2, 10`, and the phase conventions used to
//! compare computed states against them.

use num_complex::Complex64;

use crate::complementarity::TwoQubitPure;
use crate::optimizer::Objective;

/// Amplitude tolerance when comparing against the two-decimal references.
pub const TABLE_TOLERANCE: f64 = 0.03;

/// Amplitudes below this are treated as zero when choosing a phase reference.
const PHASE_REFERENCE_FLOOR: f64 = 1e-6;

/// Coupling regime of a reference cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Strong,
    Weak,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Strong => "strong",
            Regime::Weak => "weak",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceCell {
    pub objective: Objective,
    pub regime: Regime,
    pub n: usize,
    /// `(c00, c01, c10)` as printed; `c11` is always zero.
    pub amplitudes: [Complex64; 3],
}

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const fn cell(
    objective: Objective,
    regime: Regime,
    n: usize,
    amplitudes: [Complex64; 3],
) -> ReferenceCell {
    ReferenceCell {
        objective,
        regime,
        n,
        amplitudes,
    }
}

use Objective::{Concurrence as C, Predictability as P, Visibility as V};
use Regime::{Strong as S, Weak as W};

pub const REFERENCE_TABLE: [ReferenceCell; 18] = [
    cell(P, S, 1, [c(-0.05, 0.99), c(0.0, 0.0), c(0.0, 0.0)]),
    cell(P, S, 2, [c(0.0, 0.0), c(0.10, 0.0), c(0.99, 0.0)]),
    cell(P, S, 10, [c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
    cell(P, W, 1, [c(-0.73, 0.68), c(0.0, 0.0), c(0.0, 0.0)]),
    cell(P, W, 2, [c(-0.45, 0.89), c(0.0, 0.0), c(0.0, 0.0)]),
    cell(P, W, 10, [c(-0.15, 0.98), c(0.0, 0.0), c(0.0, 0.0)]),
    cell(V, S, 1, [c(0.23, -0.66), c(0.21, 0.0), c(0.67, 0.0)]),
    cell(V, S, 2, [c(0.17, -0.68), c(0.06, 0.0), c(0.70, 0.0)]),
    cell(V, S, 10, [c(-0.43, 0.55), c(0.0, 0.0), c(0.70, 0.0)]),
    cell(V, W, 1, [c(0.61, -0.35), c(-0.50, 0.0), c(-0.50, 0.0)]),
    cell(V, W, 2, [c(0.47, -0.52), c(0.49, 0.0), c(0.49, 0.0)]),
    cell(V, W, 10, [c(0.40, -0.58), c(-0.49, 0.0), c(-0.50, 0.0)]),
    cell(C, S, 1, [c(0.0, 0.0), c(0.29, 0.0), c(0.95, 0.0)]),
    cell(C, S, 2, [c(0.0, 0.0), c(0.10, 0.0), c(0.99, 0.0)]),
    cell(C, S, 10, [c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
    cell(C, W, 1, [c(0.0, 0.0), c(0.71, 0.0), c(0.71, 0.0)]),
    cell(C, W, 2, [c(0.0, 0.0), c(0.70, 0.0), c(0.71, 0.0)]),
    cell(C, W, 10, [c(0.0, 0.0), c(0.69, 0.0), c(0.72, 0.0)]),
];

impl ReferenceCell {
    pub fn state(&self) -> TwoQubitPure {
        let [c00, c01, c10] = self.amplitudes;
        TwoQubitPure {
            c00,
            c01,
            c10,
            c11: Complex64::new(0.0, 0.0),
        }
    }
}

fn unit_phase(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        z / r
    }
}

/// Fixes the global phase: `c10` real and non-negative, or `c00` when
/// `c10` vanishes, or `c01` when both do.
pub fn canonicalize_phase(s: &TwoQubitPure) -> TwoQubitPure {
    let reference = [s.c10, s.c00, s.c01, s.c11]
        .into_iter()
        .find(|z| z.norm() > PHASE_REFERENCE_FLOOR)
        .unwrap_or(Complex64::new(1.0, 0.0));
    s.with_global_phase(unit_phase(reference).conj())
}

/// Phase-canonical state with `c00` additionally rotated to be real and
/// non-negative. The extra rotation is the local `z` rotation
/// `|0_A> -> e^{ix}|0_A>`, `|1_B> -> e^{-ix}|1_B>`, which leaves `c01` and
/// `c10` untouched and does not change V, P or C.
pub fn gauge_fixed(s: &TwoQubitPure) -> TwoQubitPure {
    let s = canonicalize_phase(s);
    let rot = unit_phase(s.c00).conj();
    TwoQubitPure {
        c00: s.c00 * rot,
        c11: s.c11 * rot.conj(),
        ..s
    }
}

/// Largest amplitude difference after fixing phase and gauge on both sides.
pub fn max_deviation(computed: &TwoQubitPure, reference: &TwoQubitPure) -> f64 {
    let x = gauge_fixed(computed).amplitudes();
    let y = gauge_fixed(reference).amplitudes();
    x.iter()
        .zip(y.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

/// Rounds both parts to two decimals, as the reference table is printed.
pub fn round2(z: Complex64) -> Complex64 {
    let r = |x: f64| {
        let v = (x * 100.0).round() / 100.0;
        if v == 0.0 {
            0.0
        } else {
            v
        }
    };
    Complex64::new(r(z.re), r(z.im))
}
