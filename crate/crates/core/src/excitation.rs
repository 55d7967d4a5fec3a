//! Collision dynamics of the `q_B` qubit with a register of ground-state
//! ancillas, restricted to the single-excitation sector.
//!
//! The global state after `n` collisions is stored as a dense vector of
//! `n + 2` amplitudes:
//!
//! ```text
//! [ |0_A, vac, 1_B>, |0_A, 1, 0_B>, ..., |0_A, n, 0_B>, |1_A, vac, 0_B> ]
//! ```
//!
//! where `|i>` is the ancilla register with its single excitation on
//! ancilla `i` and `vac` is the all-ground register.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Physical parameters of the collision sequence and the per-collision
/// exchange constants derived from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConfig {
    g: f64,
    total_time: f64,
    n_total: usize,
    dt: f64,
    a: f64,
    b: Complex64,
    one_minus_a: f64,
    k: f64,
}

impl CouplingConfig {
    /// Builds a configuration from the coupling `g`, the total interaction
    /// time `total_time` and the ancilla count `n_total`.
    ///
    /// Each collision lasts `dt = total_time / n_total` and the exchange
    /// angle `g * dt` must stay strictly below `pi / 2`.
    pub fn new(g: f64, total_time: f64, n_total: usize) -> Result<Self> {
        if !g.is_finite() || g < 0.0 {
            return Err(Error::Domain(format!(
                "coupling g must be finite and >= 0, got {g}"
            )));
        }
        if !total_time.is_finite() || total_time <= 0.0 {
            return Err(Error::Domain(format!(
                "total interaction time T must be finite and > 0, got {total_time}"
            )));
        }
        if n_total == 0 {
            return Err(Error::Domain("ancilla count N must be at least 1".into()));
        }
        let dt = total_time / n_total as f64;
        let angle = g * dt;
        if angle >= FRAC_PI_2 {
            return Err(Error::Domain(format!(
                "exchange angle g*dt = {angle} must be < pi/2 (g={g}, T={total_time}, N={n_total})"
            )));
        }
        let (s, c) = angle.sin_cos();
        let half = (0.5 * angle).sin();
        Ok(Self {
            g,
            total_time,
            n_total,
            dt,
            a: c,
            b: Complex64::new(0.0, -s),
            one_minus_a: 2.0 * half * half,
            k: g * g * total_time / n_total as f64,
        })
    }

    /// Strong-coupling regime `gT = 2 pi x 4` with twenty ancillas.
    pub fn strong() -> Self {
        Self::new(4.0, 2.0 * std::f64::consts::PI, 20).expect("strong preset is valid")
    }

    /// Weak-coupling regime `gT = 2 pi / 4` with twenty ancillas.
    pub fn weak() -> Self {
        Self::new(0.25, 2.0 * std::f64::consts::PI, 20).expect("weak preset is valid")
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    /// Duration of a single collision.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Amplitude for the excitation to stay in `q_B` during one collision.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Amplitude for the excitation to hop into the colliding ancilla.
    pub fn b(&self) -> Complex64 {
        self.b
    }

    /// `1 - a`, computed without cancellation.
    pub fn one_minus_a(&self) -> f64 {
        self.one_minus_a
    }

    /// Rate constant `g^2 T / N` of the reservoir limit.
    pub fn k(&self) -> f64 {
        self.k
    }

    /// `1 + a + ... + a^(n-1)`, with the `a = 1` limit handled exactly.
    pub fn geometric_sum(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        if self.one_minus_a == 0.0 {
            return n as f64;
        }
        // (1 - a^n) / (1 - a) with a^n = exp(n ln(1 - (1 - a)))
        let log_a = (-self.one_minus_a).ln_1p();
        -(n as f64 * log_a).exp_m1() / self.one_minus_a
    }

    pub(crate) fn check_collisions(&self, n: usize) -> Result<()> {
        if n > self.n_total {
            return Err(Error::Range(format!(
                "collision count n = {n} exceeds N_total = {}",
                self.n_total
            )));
        }
        Ok(())
    }
}

/// Pure global state after `n` collisions.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationState {
    amps: Vec<Complex64>,
}

impl ExcitationState {
    /// The Bell state `(|0_A 1_B> + |1_A 0_B>) / sqrt(2)` with no ancilla touched.
    pub fn initial() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self { amps: vec![h, h] }
    }

    /// Builds a state from raw amplitudes; `ancillas[i]` is the amplitude of
    /// the excitation sitting on ancilla `i + 1`.
    pub fn from_parts(amp_a1b: Complex64, ancillas: &[Complex64], amp_1a: Complex64) -> Self {
        let mut amps = Vec::with_capacity(ancillas.len() + 2);
        amps.push(amp_a1b);
        amps.extend_from_slice(ancillas);
        amps.push(amp_1a);
        Self { amps }
    }

    /// Number of collisions that produced this state.
    pub fn n(&self) -> usize {
        self.amps.len() - 2
    }

    /// Amplitude of `|0_A, vac, 1_B>`.
    pub fn amp_a1b(&self) -> Complex64 {
        self.amps[0]
    }

    /// Amplitudes of `|0_A, i, 0_B>` for `i = 1..=n`.
    pub fn ancilla_amps(&self) -> &[Complex64] {
        let n = self.amps.len();
        &self.amps[1..n - 1]
    }

    /// Amplitude of `|1_A, vac, 0_B>`.
    pub fn amp_1a(&self) -> Complex64 {
        self.amps[self.amps.len() - 1]
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Reduced density matrix of `(q_A, q_B)` in the basis
    /// `|00>, |01>, |10>, |11>` (first slot `q_A`).
    ///
    /// The vacuum register carries the coherent part
    /// `amp_a1b |01> + amp_1a |10>`; each excited-ancilla register carries an
    /// incoherent `|00>` population.
    pub fn reduced_two_qubit(&self) -> [[Complex64; 4]; 4] {
        let zero = Complex64::new(0.0, 0.0);
        let mut rho = [[zero; 4]; 4];
        let v = [zero, self.amp_a1b(), self.amp_1a(), zero];
        for (r, vr) in v.iter().enumerate() {
            for (c, vc) in v.iter().enumerate() {
                rho[r][c] = vr * vc.conj();
            }
        }
        let pop: f64 = self.ancilla_amps().iter().map(|c| c.norm_sqr()).sum();
        rho[0][0] += pop;
        rho
    }
}

/// Closed-form state after `n` collisions: `a^n/sqrt2` stays in `q_B`,
/// ancilla `i` holds `a^(i-1) b/sqrt2` and `|1_A>` keeps `1/sqrt2`.
pub fn evolve_closed_form(cfg: &CouplingConfig, n: usize) -> Result<ExcitationState> {
    cfg.check_collisions(n)?;
    let h = FRAC_1_SQRT_2;
    let mut amps = Vec::with_capacity(n + 2);
    amps.push(Complex64::new(cfg.a().powi(n as i32) * h, 0.0));
    let mut ai = 1.0;
    for _ in 0..n {
        amps.push(cfg.b() * (ai * h));
        ai *= cfg.a();
    }
    amps.push(Complex64::new(h, 0.0));
    Ok(ExcitationState { amps })
}

/// Brute-force evolution: applies the exchange rotation between `q_B` and
/// each fresh ancilla in turn.
pub fn oracle_evolve(cfg: &CouplingConfig, n: usize) -> Result<ExcitationState> {
    cfg.check_collisions(n)?;
    let a = Complex64::new(cfg.a(), 0.0);
    let b = cfg.b();
    let zero = Complex64::new(0.0, 0.0);

    let mut state = ExcitationState::initial();
    for _ in 0..n {
        // append the new ancilla in |0>, then rotate on span{|1_B 0_i>, |0_B 1_i>}
        let last = state.amps.len() - 1;
        state.amps.insert(last, zero);
        let x = state.amps[0];
        let y = state.amps[last];
        state.amps[0] = a * x + b * y;
        state.amps[last] = b * x + a * y;
    }
    Ok(state)
}

/// Which-path distinguishability between `q_A` and `q_B` before any
/// measurement, `a^(2n)`.
pub fn distinguishability_qaqb(cfg: &CouplingConfig, n: usize) -> Result<f64> {
    cfg.check_collisions(n)?;
    Ok(cfg.a().powi(2 * n as i32))
}

/// Trace distance between the `q_B` states conditioned on `q_A = 0` and
/// `q_A = 1`, each weighted by its branch probability. Evaluated numerically
/// from the reduced density matrix.
pub fn which_path_trace_distance(state: &ExcitationState) -> f64 {
    let rho = state.reduced_two_qubit();
    // <0_A| rho |0_A> - <1_A| rho |1_A> as a 2x2 Hermitian block on q_B
    let d00 = (rho[0][0] - rho[2][2]).re;
    let d11 = (rho[1][1] - rho[3][3]).re;
    let off = rho[0][1] - rho[2][3];
    hermitian_2x2_trace_norm(d00, d11, off)
}

/// Sum of absolute eigenvalues of `[[p, c], [c*, q]]`.
fn hermitian_2x2_trace_norm(p: f64, q: f64, c: Complex64) -> f64 {
    let mean = 0.5 * (p + q);
    let radius = (0.25 * (p - q) * (p - q) + c.norm_sqr()).sqrt();
    (mean + radius).abs() + (mean - radius).abs()
}

/// Concurrence between `q_A` and `q_B` after `n` collisions without any
/// measurement, `a^n`.
pub fn concurrence_unmeasured(cfg: &CouplingConfig, n: usize) -> Result<f64> {
    cfg.check_collisions(n)?;
    Ok(cfg.a().powi(n as i32))
}

/// Markovian reservoir-limit concurrence `exp(-k t / 2)`.
pub fn reservoir_limit_concurrence(k: f64, t: f64) -> f64 {
    (-0.5 * k * t).exp()
}

/// `|cos^N(sqrt(kT/N)) - exp(-kT/2)|`, the distance of a finite collision
/// sequence from its reservoir limit.
pub fn continuous_limit_gap(k: f64, total_time: f64, n: usize) -> Result<f64> {
    if k.is_nan() || k < 0.0 || total_time.is_nan() || total_time < 0.0 || n == 0 {
        return Err(Error::Domain(format!(
            "continuous limit needs k >= 0, T >= 0, N >= 1 (k={k}, T={total_time}, N={n})"
        )));
    }
    let arg = k * total_time / n as f64;
    if arg >= FRAC_PI_2 * FRAC_PI_2 {
        return Err(Error::Domain(format!(
            "kT/N = {arg} must be below (pi/2)^2 for the cosine argument to stay in range"
        )));
    }
    let finite = arg.sqrt().cos().powi(n as i32);
    Ok((finite - (-0.5 * k * total_time).exp()).abs())
}
