//! Semi-Lagrangian DIRK time integration for stiff hyperbolic relaxation
//! systems and the 1D1V BGK model.
//!
//! The crate is `no_std` (it needs `alloc`) and holds the numerics only:
//!
//! - [`butcher`]: SA-DIRK tableaus, validation, Shu-Osher form, tableau catalog.
//! - [`order`]: Taylor-coefficient recursions of the kinetic (f) and limiting
//!   fluid (U) schemes, order conditions and the identities linking them.
//! - [`stability`]: Fourier amplification matrices for the linear
//!   two-velocity model and spectral-radius scans.
//! - [`models`]: collision invariants, moments, equilibria and relaxation for
//!   the linear and nonlinear two-velocity models and the BGK model.
//! - [`sl`]: nodal DG fields, the conservative shift remap and the
//!   prediction-correction DIRK stepper.
//!
//! File formats, the CLI and the convergence harness live in the `sldirk`
//! crate.

#![no_std]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod butcher;
pub mod models;
pub mod order;
pub mod quadrature;
pub mod sl;
pub mod stability;

pub use butcher::{catalog, lookup, ButcherTableau, ShuOsherForm, TableauError};
pub use models::{
    Bgk, KineticModel, LinearTwoVelocity, MacroState, ModelError, NonlinearTwoVelocity, VelocitySet,
};
pub use order::{order_report, KineticCoefficients, LimitCoefficients, OrderReport};
pub use stability::{AmplificationMatrix, Amplifier, StabilityPoint};
