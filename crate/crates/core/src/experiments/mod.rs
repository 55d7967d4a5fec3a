//! The numerical studies: optimized complementarity curves, uniform-basis
//! sweeps, which-path information profiles, distinguishability changes,
//! reference-state reproduction and the reservoir-limit convergence check.
//!
//! Every study returns plain rows; [`output`] turns them into CSV.

pub mod output;
pub mod table;

use std::ops::RangeInclusive;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::complementarity::{ComplementarityTriple, TwoQubitPure};
use crate::error::{Error, Result};
use crate::excitation::{
    continuous_limit_gap, distinguishability_qaqb, reservoir_limit_concurrence, CouplingConfig,
};
use crate::measurement::{
    complementarity_after, delta_d_f, delta_d_total, per_qubit_distinguishability, uniform_gamma,
};
use crate::optimizer::{curve_over, maximize, Objective, OptimizationResult, OptimizerBudget};

use table::{
    canonicalize_phase, max_deviation, ReferenceCell, Regime, REFERENCE_TABLE, TABLE_TOLERANCE,
};

/// One optimized-curve study.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSpec {
    pub name: String,
    #[serde(skip)]
    pub cfg: CouplingConfig,
    pub objective: Option<Objective>,
    pub n_range: RangeInclusive<usize>,
    pub budget: OptimizerBudget,
    /// Rate constant for the reservoir companion column; `g^2 T / N` when unset.
    pub k: Option<f64>,
    pub warm_start: bool,
}

impl ExperimentSpec {
    pub fn new(name: impl Into<String>, cfg: CouplingConfig, objective: Objective) -> Self {
        Self {
            name: name.into(),
            cfg,
            objective: Some(objective),
            n_range: 0..=cfg.n_total(),
            budget: OptimizerBudget::default(),
            k: None,
            warm_start: false,
        }
    }

    fn validate(&self) -> Result<Objective> {
        let objective = self.objective.ok_or_else(|| {
            Error::Domain(format!("experiment '{}' needs an objective", self.name))
        })?;
        if self.n_range.is_empty() {
            return Err(Error::Range(format!("empty n range {:?}", self.n_range)));
        }
        self.cfg.check_collisions(*self.n_range.end())?;
        Ok(objective)
    }
}

/// One row of an optimized curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRecord {
    pub n: usize,
    pub visibility: f64,
    pub predictability: f64,
    pub concurrence: f64,
    /// `exp(-k n dt / 2)`
    pub reservoir_concurrence: f64,
    pub outcome_probability: f64,
    pub closure_residual: f64,
    /// `theta_1, phi_1, ..., theta_n, phi_n`
    pub angles: Vec<f64>,
}

impl CurveRecord {
    fn from_result(cfg: &CouplingConfig, k: f64, r: &OptimizationResult) -> Self {
        Self {
            n: r.n,
            visibility: r.achieved.visibility,
            predictability: r.achieved.predictability,
            concurrence: r.achieved.concurrence,
            reservoir_concurrence: reservoir_limit_concurrence(k, r.n as f64 * cfg.dt()),
            outcome_probability: r.outcome_probability,
            closure_residual: r.achieved.closure_residual,
            angles: r.basis.flattened(),
        }
    }
}

/// Optimized results for every `n` in the spec's range.
pub fn optimize_curve(spec: &ExperimentSpec) -> Result<Vec<OptimizationResult>> {
    let objective = spec.validate()?;
    if spec.warm_start {
        return curve_over(
            &spec.cfg,
            objective,
            spec.n_range.clone(),
            &spec.budget,
            true,
        );
    }
    let ns: Vec<usize> = spec.n_range.clone().collect();
    ns.par_iter()
        .map(|&n| maximize(&spec.cfg, n, objective, &spec.budget))
        .collect()
}

/// V, P and C as functions of `n` under the spec's maximization.
pub fn run_quantity_vs_n(spec: &ExperimentSpec) -> Result<Vec<CurveRecord>> {
    let k = spec.k.unwrap_or(spec.cfg.k());
    Ok(optimize_curve(spec)?
        .iter()
        .map(|r| CurveRecord::from_result(&spec.cfg, k, r))
        .collect())
}

/// One cell of the uniform-basis sweep; `None` marks an impossible outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub n: usize,
    pub theta: f64,
    pub phi: f64,
    pub triple: Option<ComplementarityTriple>,
    pub outcome_probability: Option<f64>,
}

/// Complementarity after measuring the first `n` ancillas all at the same
/// `(theta, phi)`, for `n = 0..=n_max` and `theta_steps + 1` evenly spaced
/// `theta` in `[0, pi]`. Cells are ordered by `(n, theta)`.
pub fn run_uniform_sweep(
    cfg: &CouplingConfig,
    n_max: usize,
    theta_steps: usize,
    phi: f64,
) -> Result<Vec<SweepCell>> {
    cfg.check_collisions(n_max)?;
    if theta_steps == 0 {
        return Err(Error::Domain(
            "uniform sweep needs at least one theta step".into(),
        ));
    }
    let grid: Vec<(usize, f64)> = (0..=n_max)
        .flat_map(|n| {
            (0..=theta_steps)
                .map(move |j| (n, std::f64::consts::PI * j as f64 / theta_steps as f64))
        })
        .collect();
    grid.par_iter()
        .map(|&(n, theta)| {
            let cell = match uniform_gamma(cfg, theta, phi, n) {
                Ok(gt) => SweepCell {
                    n,
                    theta,
                    phi,
                    triple: Some(complementarity_after(&gt)),
                    outcome_probability: Some(gt.outcome_probability),
                },
                Err(Error::DegenerateOutcome { .. }) => SweepCell {
                    n,
                    theta,
                    phi,
                    triple: None,
                    outcome_probability: None,
                },
                Err(e) => return Err(e),
            };
            Ok(cell)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileRow {
    pub i: usize,
    /// Which-path information held by ancilla `i`.
    pub d_qa_qi: f64,
    /// Information left between `q_A` and `q_B` after `i` collisions.
    pub d_qa_qb: f64,
}

pub fn run_distinguishability_profile(cfg: &CouplingConfig) -> Result<Vec<ProfileRow>> {
    (1..=cfg.n_total())
        .map(|i| {
            Ok(ProfileRow {
                i,
                d_qa_qi: per_qubit_distinguishability(cfg, i)?,
                d_qa_qb: distinguishability_qaqb(cfg, i)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaDRow {
    pub n: usize,
    pub visibility: f64,
    pub delta_d_total: f64,
    pub delta_d_f: f64,
}

/// Distinguishability changes for already optimized results.
pub fn delta_d_rows(
    cfg: &CouplingConfig,
    results: &[OptimizationResult],
) -> Result<Vec<DeltaDRow>> {
    results
        .iter()
        .map(|r| {
            // V can exceed 1 by rounding only
            let v = r.achieved.visibility.clamp(0.0, 1.0);
            Ok(DeltaDRow {
                n: r.n,
                visibility: r.achieved.visibility,
                delta_d_total: delta_d_total(v)?,
                delta_d_f: delta_d_f(cfg, r.n, v)?,
            })
        })
        .collect()
}

pub fn run_delta_d(
    cfg: &CouplingConfig,
    objective: Objective,
    n_max: usize,
    budget: &OptimizerBudget,
) -> Result<Vec<DeltaDRow>> {
    let mut spec = ExperimentSpec::new("delta-d", *cfg, objective);
    spec.n_range = 1..=n_max;
    spec.budget = *budget;
    delta_d_rows(cfg, &optimize_curve(&spec)?)
}

/// A reproduced reference state.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub reference: ReferenceCell,
    /// Phase-canonical computed state.
    pub state: TwoQubitPure,
    pub achieved: ComplementarityTriple,
    pub deviation: f64,
}

impl TableRow {
    pub fn matches(&self) -> bool {
        self.deviation <= TABLE_TOLERANCE
    }

    pub fn rounded(&self) -> [Complex64; 3] {
        [self.state.c00, self.state.c01, self.state.c10].map(table::round2)
    }
}

fn regime_config(regime: Regime) -> CouplingConfig {
    match regime {
        Regime::Strong => CouplingConfig::strong(),
        Regime::Weak => CouplingConfig::weak(),
    }
}

/// Maximizes every reference cell and compares the resulting state.
pub fn run_table_states(budget: &OptimizerBudget) -> Result<Vec<TableRow>> {
    REFERENCE_TABLE
        .par_iter()
        .map(|cell| {
            let cfg = regime_config(cell.regime);
            let r = maximize(&cfg, cell.n, cell.objective, budget)?;
            let state = r.state(&cfg)?;
            Ok(TableRow {
                reference: *cell,
                state: canonicalize_phase(&state),
                achieved: r.achieved,
                deviation: max_deviation(&state, &cell.state()),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitRow {
    pub n: usize,
    pub gap: f64,
}

pub fn run_continuous_limit_convergence(
    k: f64,
    total_time: f64,
    ns: &[usize],
) -> Result<Vec<LimitRow>> {
    ns.iter()
        .map(|&n| {
            Ok(LimitRow {
                n,
                gap: continuous_limit_gap(k, total_time, n)?,
            })
        })
        .collect()
}

/// `N = start, 2 start, ...` up to and including `end`.
pub fn doubling_sequence(start: usize, end: usize) -> Vec<usize> {
    std::iter::successors(Some(start), |&n| n.checked_mul(2))
        .take_while(|&n| n <= end)
        .collect()
}
