//! Numerical toolkit for the KWC grain-boundary model, with the orientation angle
//! prescribed on the boundary.
//!
//! The crate has two halves:
//!
//! * a dynamic part ([`regnorm`], [`model`], [`grid`], [`energy`], [`stepper`]) that
//!   integrates the coupled gradient flow for the orientation order `eta` and the
//!   orientation angle `theta` with an implicit minimizing-movements scheme on a 1D
//!   interval or a radially symmetric annulus;
//! * a steady-state part ([`steady1d`], [`bessel`], [`steadyradial`]) that builds the
//!   closed-form equilibria (cosh profiles in 1D, modified-Bessel profiles on the
//!   annulus) and evaluates their existence conditions.

pub mod bessel;
pub mod energy;
pub mod error;
pub mod grid;
pub mod model;
pub mod regnorm;
pub mod steady1d;
pub mod steadyradial;
pub mod stepper;
mod tridiag;

pub use error::{KwcError, Result};
