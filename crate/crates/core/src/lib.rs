//! Post-selected complementarity in a collision model.
//!
//! Two qubits `q_A` and `q_B` start in a Bell state. `q_B` then exchanges
//! its excitation with a register of ground-state ancillas, one collision at
//! a time. Projective measurements on the ancillas, with bases chosen by a
//! derivative-free search, steer the visibility, predictability and
//! concurrence of the remaining pair.

pub mod complementarity;
pub mod error;
pub mod excitation;
pub mod experiments;
pub mod measurement;
pub mod optimizer;
pub mod run_config;
pub mod verify;

pub use complementarity::{ComplementarityTriple, TwoQubitPure};
pub use error::{Error, Result};
pub use excitation::{CouplingConfig, ExcitationState};
pub use measurement::{GammaTriple, MeasurementBasis};
pub use optimizer::{Objective, OptimizationResult, OptimizerBudget};
