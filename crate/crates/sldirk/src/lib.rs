//! Command-line front end, file formats and the convergence harness for
//! the `sldirk-core` solvers.

pub mod cli;
pub mod config;
pub mod error;
pub mod harness;
pub mod keyvalue;
pub mod problems;
pub mod scan;
pub mod tableau_io;

pub use error::{Error, Result};
