//! Spherically symmetric double-null evolution of the Einstein-Maxwell-charged-scalar-field
//! system, with characteristic initial data, trapped-surface and charge diagnostics, the
//! scaling map, and a signature-calculus linter for null-frame equations.

pub mod chardata;
pub mod diagnostics;
pub mod error;
pub mod evolve;
pub mod grid;
pub mod io;
pub mod matter;
pub mod rescale;
pub mod sigcalc;

pub use error::{Error, Result};
pub use grid::{ConeData, GridSpec, PointState, RunParams};
