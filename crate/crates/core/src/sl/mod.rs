//! Semi-Lagrangian nodal DG discretization in `x` and the DIRK stepper.
//!
//! A distribution is a [`DgField`] with one component per discrete
//! velocity. Transport along `x - v tau` is the conservative L2 remap of
//! [`remap`]; relaxation is local to each spatial node.

pub mod field;
pub mod mesh;
pub mod remap;
pub mod solver;

pub use field::{l1_error, l1_error_weighted, DgField, DgSpace};
pub use mesh::Mesh1D;
pub use remap::{advect, ShiftOperator};
pub use solver::{
    equilibrium_distance, invariant_totals, moments_field, time_step, Diagnostic, RunOptions,
    SlSolver, StageClosure, StepPlan, Trajectory,
};

use crate::butcher::TableauError;
use crate::models::ModelError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SlError {
    #[error("invalid mesh: {0}")]
    Mesh(&'static str),
    #[error("polynomial degree {0} outside the supported range 0..=4")]
    Degree(usize),
    #[error("fields do not share a discretization: {0}")]
    Mismatch(&'static str),
    #[error("invalid solver setting: {0}")]
    Config(&'static str),
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error("non-finite values at step {step}, stage {stage}")]
    NonFinite { step: usize, stage: usize },
    #[error("model failure at step {step}, stage {stage}, x = {x}: {source}")]
    Model {
        step: usize,
        stage: usize,
        x: f64,
        source: ModelError,
    },
}
