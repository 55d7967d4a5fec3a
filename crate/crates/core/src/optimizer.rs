//! Derivative-free maximization of a complementarity quantity over the
//! measurement angles of all measured ancillas.
//!
//! The search is a multi-start cyclic coordinate ascent. Each step
//! re-optimizes one ancilla's `(theta, phi)` pair with the others held
//! fixed: a coarse grid over the whole pair domain picks a starting cell,
//! then alternating golden-section line searches polish `theta` and `phi`.
//! A cycle over all pairs that improves the objective by less than the
//! tolerance ends the restart.
//!
//! With the other pairs fixed, the post-selected amplitudes are affine in
//! `(alpha_i, beta_i)`:
//!
//! ```text
//! sum  = alpha_i * U + beta_i * W
//! prod = alpha_i * Q
//! ```
//!
//! so each pair evaluation costs O(1) once `U`, `W` and `Q` are known.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::complementarity::{ComplementarityTriple, TwoQubitPure};
use crate::error::{Error, Result};
use crate::excitation::CouplingConfig;
use crate::measurement::{
    complementarity_after, gamma_coefficients, GammaTriple, MeasurementBasis, DEGENERATE_NORM,
};

/// Restarts whose value lies within this of the best are considered tied;
/// the lowest restart index wins.
pub const TIE_TOLERANCE: f64 = 1e-9;

const GOLDEN_TOL: f64 = 1e-10;

/// The quantity being maximized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Visibility,
    Predictability,
    Concurrence,
}

impl Objective {
    pub const ALL: [Objective; 3] = [
        Objective::Visibility,
        Objective::Predictability,
        Objective::Concurrence,
    ];

    pub fn pick(self, t: &ComplementarityTriple) -> f64 {
        match self {
            Objective::Visibility => t.visibility,
            Objective::Predictability => t.predictability,
            Objective::Concurrence => t.concurrence,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Objective::Visibility => "visibility",
            Objective::Predictability => "predictability",
            Objective::Concurrence => "concurrence",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "visibility" | "v" => Ok(Objective::Visibility),
            "predictability" | "p" => Ok(Objective::Predictability),
            "concurrence" | "c" => Ok(Objective::Concurrence),
            other => Err(format!(
                "unknown objective '{other}' (expected visibility, predictability or concurrence)"
            )),
        }
    }
}

/// How the angles of the `n` ancillas are searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    /// All `2n` angles are optimized together for the `n`-collision state.
    Joint,
    /// Ancilla `k` is optimized for the `k`-collision state with ancillas
    /// `1..k` frozen at their earlier choices.
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizerBudget {
    pub restarts: usize,
    /// Objective evaluations allowed per restart.
    pub max_evals: usize,
    pub tol: f64,
    pub seed: u64,
    pub grid_theta: usize,
    pub grid_phi: usize,
    pub mode: SearchMode,
}

impl Default for OptimizerBudget {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_evals: 200_000,
            tol: 1e-9,
            seed: 0,
            grid_theta: 12,
            grid_phi: 12,
            mode: SearchMode::Joint,
        }
    }
}

impl OptimizerBudget {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Domain("optimizer needs at least one restart".into()));
        }
        if self.max_evals == 0 {
            return Err(Error::Domain("max_evals must be positive".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Domain(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.grid_theta < 2 || self.grid_phi < 1 {
            return Err(Error::Domain(
                "coarse grid needs >= 2 theta and >= 1 phi points".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationResult {
    pub objective: Objective,
    pub n: usize,
    pub basis: MeasurementBasis,
    pub achieved: ComplementarityTriple,
    pub outcome_probability: f64,
    /// Objective evaluations summed over all restarts.
    pub evaluations: usize,
    /// Whether the winning restart met the tolerance before its budget ran out.
    pub converged: bool,
    pub seed: u64,
    /// Index of the restart that produced `basis`.
    pub restart: usize,
    /// Objective value at each restart's initial point.
    pub start_values: Vec<f64>,
}

impl OptimizationResult {
    pub fn value(&self) -> f64 {
        self.objective.pick(&self.achieved)
    }

    /// Re-evaluates the basis and returns the normalized post-measurement state.
    pub fn state(&self, cfg: &CouplingConfig) -> Result<TwoQubitPure> {
        Ok(gamma_coefficients(cfg, &self.basis, self.n)?.state())
    }
}

/// Objective value of a basis, or `-inf` for an impossible outcome.
pub fn evaluate(cfg: &CouplingConfig, objective: Objective, basis: &MeasurementBasis) -> f64 {
    match gamma_coefficients(cfg, basis, basis.len()) {
        Ok(gt) => objective.pick(&complementarity_after(&gt)),
        Err(_) => f64::NEG_INFINITY,
    }
}

fn triple_value(objective: Objective, g1: Complex64, g2: Complex64, g3: Complex64) -> f64 {
    match GammaTriple::new(g1, g2, g3) {
        Ok(gt) => objective.pick(&complementarity_after(&gt)),
        Err(_) => f64::NEG_INFINITY,
    }
}

/// The objective as a function of one pair, others frozen.
struct PairSlice {
    u: Complex64,
    w: Complex64,
    q: f64,
    a_n: f64,
    b: Complex64,
    objective: Objective,
}

impl PairSlice {
    fn new(cfg: &CouplingConfig, objective: Objective, angles: &[(f64, f64)], i: usize) -> Self {
        let a = cfg.a();
        // prefix over 0..i: partial sum A and product P
        let mut sum_pre = Complex64::new(0.0, 0.0);
        let mut prod_pre = 1.0;
        let mut a_pow = 1.0;
        for &(t, p) in &angles[..i] {
            let (s, c) = t.sin_cos();
            sum_pre = sum_pre * c + Complex64::from_polar(s, p) * (a_pow * prod_pre);
            prod_pre *= c;
            a_pow *= a;
        }
        let a_i = a_pow; // a^(i) in 0-based indexing, i.e. a^(k-1) for ancilla k = i+1
                         // suffix over i+1..n, with powers of a continuing after the pair
        let mut sum_post = Complex64::new(0.0, 0.0);
        let mut prod_post = 1.0;
        let mut a_pow = a_i * a;
        for &(t, p) in &angles[i + 1..] {
            let (s, c) = t.sin_cos();
            sum_post = sum_post * c + Complex64::from_polar(s, p) * (a_pow * prod_post);
            prod_post *= c;
            a_pow *= a;
        }
        Self {
            u: sum_pre * prod_post + sum_post * prod_pre,
            w: Complex64::new(a_i * prod_pre * prod_post, 0.0),
            q: prod_pre * prod_post,
            a_n: a.powi(angles.len() as i32),
            b: cfg.b(),
            objective,
        }
    }

    fn value(&self, theta: f64, phi: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        let sum = self.u * c + self.w * Complex64::from_polar(s, phi);
        let prod = self.q * c;
        let h = FRAC_1_SQRT_2;
        triple_value(
            self.objective,
            self.b * sum * h,
            Complex64::new(self.a_n * prod * h, 0.0),
            Complex64::new(prod * h, 0.0),
        )
    }
}

struct Counter {
    used: usize,
    limit: usize,
}

impl Counter {
    fn exhausted(&self) -> bool {
        self.used >= self.limit
    }
}

/// Golden-section search for the maximum of `f` on `[lo, hi]`.
fn golden_max(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Re-optimizes pair `i` in place; returns the new objective value.
/// The pair is left unchanged unless the objective rises by more than `tol`.
fn optimize_pair(
    cfg: &CouplingConfig,
    objective: Objective,
    budget: &OptimizerBudget,
    angles: &mut [(f64, f64)],
    i: usize,
    current: f64,
    counter: &mut Counter,
) -> f64 {
    let slice = PairSlice::new(cfg, objective, angles, i);
    let mut eval = |t: f64, p: f64| {
        counter.used += 1;
        slice.value(t, p)
    };

    let (mut bt, mut bp) = angles[i];
    let mut best = current;

    let dt = PI / budget.grid_theta as f64;
    let dp = TAU / budget.grid_phi as f64;
    for ti in 0..budget.grid_theta {
        let t = ti as f64 * dt;
        // phi is irrelevant at theta = 0
        let phis = if ti == 0 { 1 } else { budget.grid_phi };
        for pj in 0..phis {
            let p = pj as f64 * dp;
            let v = eval(t, p);
            if v > best {
                best = v;
                bt = t;
                bp = p;
            }
        }
    }

    for shrink in [1.0, 0.25] {
        let ht = dt * shrink;
        let (t, v) = golden_max(|t| eval(t, bp), bt - ht, bt + ht, GOLDEN_TOL);
        if v > best {
            best = v;
            bt = t;
        }
        let hp = dp.min(PI) * shrink;
        let (p, v) = golden_max(|p| eval(bt, p), bp - hp, bp + hp, GOLDEN_TOL);
        if v > best {
            best = v;
            bp = p;
        }
    }

    // moves below the tolerance are not taken
    if best > current + budget.tol || current == f64::NEG_INFINITY {
        angles[i] = (bt, bp);
        best
    } else {
        current
    }
}

struct RestartOutcome {
    angles: Vec<(f64, f64)>,
    start_value: f64,
    evaluations: usize,
    converged: bool,
}

fn ascend(
    cfg: &CouplingConfig,
    objective: Objective,
    budget: &OptimizerBudget,
    mut angles: Vec<(f64, f64)>,
) -> RestartOutcome {
    let mut counter = Counter {
        used: 1,
        limit: budget.max_evals,
    };
    let start_value = evaluate(
        cfg,
        objective,
        &MeasurementBasis::new(angles.iter().copied()),
    );
    let mut value = start_value;
    let mut converged = false;
    'cycles: while !counter.exhausted() {
        let cycle_start = value;
        for i in 0..angles.len() {
            value = optimize_pair(cfg, objective, budget, &mut angles, i, value, &mut counter);
            if counter.exhausted() && i + 1 < angles.len() {
                break 'cycles;
            }
        }
        if value <= cycle_start + budget.tol {
            converged = true;
            break;
        }
    }
    RestartOutcome {
        angles,
        start_value,
        evaluations: counter.used,
        converged,
    }
}

fn greedy(
    cfg: &CouplingConfig,
    objective: Objective,
    budget: &OptimizerBudget,
    n: usize,
) -> RestartOutcome {
    let mut counter = Counter {
        used: 0,
        limit: budget.max_evals,
    };
    let mut angles: Vec<(f64, f64)> = Vec::with_capacity(n);
    for k in 0..n {
        angles.push((0.0, 0.0));
        let current = evaluate(
            cfg,
            objective,
            &MeasurementBasis::new(angles.iter().copied()),
        );
        counter.used += 1;
        optimize_pair(
            cfg,
            objective,
            budget,
            &mut angles,
            k,
            current,
            &mut counter,
        );
    }
    RestartOutcome {
        start_value: evaluate(cfg, objective, &MeasurementBasis::uniform(0.0, 0.0, n)),
        angles,
        evaluations: counter.used,
        converged: !counter.exhausted(),
    }
}

/// Initial point of restart `index`: all zeros, then all `theta = pi/4`,
/// then seeded uniform draws. Each restart has its own stream so adding
/// restarts never changes earlier ones.
pub fn initial_point(n: usize, seed: u64, index: usize) -> Vec<(f64, f64)> {
    match index {
        0 => vec![(0.0, 0.0); n],
        1 => vec![(FRAC_PI_4, 0.0); n],
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            (0..n)
                .map(|_| (rng.gen_range(0.0..PI), rng.gen_range(0.0..TAU)))
                .collect()
        }
    }
}

/// Maximizes `objective` over the measurement bases of the first `n`
/// ancillas.
pub fn maximize(
    cfg: &CouplingConfig,
    n: usize,
    objective: Objective,
    budget: &OptimizerBudget,
) -> Result<OptimizationResult> {
    maximize_from(cfg, n, objective, budget, None)
}

/// Like [`maximize`], with an extra initial point tried before the
/// standard restarts.
pub fn maximize_from(
    cfg: &CouplingConfig,
    n: usize,
    objective: Objective,
    budget: &OptimizerBudget,
    warm_start: Option<&[(f64, f64)]>,
) -> Result<OptimizationResult> {
    budget.validate()?;
    cfg.check_collisions(n)?;
    if let Some(w) = warm_start {
        if w.len() != n {
            return Err(Error::BasisLength {
                expected: n,
                got: w.len(),
            });
        }
    }

    let outcomes: Vec<RestartOutcome> = match budget.mode {
        SearchMode::Greedy => vec![greedy(cfg, objective, budget, n)],
        SearchMode::Joint => {
            let mut starts: Vec<Vec<(f64, f64)>> = Vec::with_capacity(budget.restarts + 1);
            if let Some(w) = warm_start {
                starts.push(w.to_vec());
            }
            starts.extend((0..budget.restarts).map(|r| initial_point(n, budget.seed, r)));
            starts
                .into_par_iter()
                .map(|start| ascend(cfg, objective, budget, start))
                .collect()
        }
    };

    let scored: Vec<(MeasurementBasis, f64)> = outcomes
        .iter()
        .map(|o| {
            let basis = MeasurementBasis::new(o.angles.iter().copied());
            let v = evaluate(cfg, objective, &basis);
            (basis, v)
        })
        .collect();
    let best = scored
        .iter()
        .map(|(_, v)| *v)
        .fold(f64::NEG_INFINITY, f64::max);
    if best == f64::NEG_INFINITY {
        return Err(Error::DegenerateOutcome {
            norm_factor: 0.0,
            threshold: DEGENERATE_NORM,
        });
    }
    let winner = scored
        .iter()
        .position(|(_, v)| *v >= best - TIE_TOLERANCE)
        .expect("best value is attained");

    let basis = scored[winner].0.clone();
    let gt = gamma_coefficients(cfg, &basis, n)?;
    Ok(OptimizationResult {
        objective,
        n,
        achieved: complementarity_after(&gt),
        outcome_probability: gt.outcome_probability,
        basis,
        evaluations: outcomes.iter().map(|o| o.evaluations).sum(),
        converged: outcomes[winner].converged,
        seed: budget.seed,
        restart: winner,
        start_values: outcomes.iter().map(|o| o.start_value).collect(),
    })
}

/// Independent maximization for every `n` in `1..=n_max`.
pub fn curve(
    cfg: &CouplingConfig,
    objective: Objective,
    n_max: usize,
    budget: &OptimizerBudget,
) -> Result<Vec<OptimizationResult>> {
    curve_over(cfg, objective, 1..=n_max, budget, false)
}

/// Maximization over an arbitrary range of `n`. With `warm_start`, the
/// solution for `n - 1` (extended by a ground-state projection) seeds the
/// search for `n` in addition to the standard restarts.
pub fn curve_over(
    cfg: &CouplingConfig,
    objective: Objective,
    ns: impl IntoIterator<Item = usize>,
    budget: &OptimizerBudget,
    warm_start: bool,
) -> Result<Vec<OptimizationResult>> {
    let ns: Vec<usize> = ns.into_iter().collect();
    for &n in &ns {
        cfg.check_collisions(n)?;
    }
    if !warm_start {
        return ns
            .into_iter()
            .map(|n| maximize(cfg, n, objective, budget))
            .collect();
    }
    let mut out: Vec<OptimizationResult> = Vec::with_capacity(ns.len());
    for n in ns {
        let seed = out.last().filter(|prev| prev.n + 1 == n).map(|prev| {
            let mut w = prev.basis.angles().to_vec();
            w.push((0.0, 0.0));
            w
        });
        out.push(maximize_from(cfg, n, objective, budget, seed.as_deref())?);
    }
    Ok(out)
}
