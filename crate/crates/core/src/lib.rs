//! Finite-volume advection of a scalar on the periodic unit square, with
//! second- and fourth-order reconstructions, local maximum-principle slope
//! limiters and SSP Runge–Kutta time stepping.

pub mod cases;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod flux;
pub mod fv2;
pub mod fv4;
pub mod grid;
pub mod harness;
pub mod io;
pub mod limiters;
pub mod solver;
pub mod suite;
pub mod timestepping;
pub mod velocity;

pub use cases::{ExperimentSpec, InitMode, InitialCondition};
pub use diagnostics::{ErrorReport, Norm};
pub use error::{Error, Result};
pub use field::CellField;
pub use grid::Grid;
pub use limiters::LimiterKind;
pub use solver::{Scheme, Simulation};
pub use timestepping::SspScheme;
pub use velocity::StreamCase;
