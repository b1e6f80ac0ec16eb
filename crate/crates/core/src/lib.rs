//! Numerical laboratory for the oscillation of solutions of
//! `f'' + A f = 0` in the unit disc.
//!
//! The crate solves the equation for a set of closed-form coefficient
//! families, locates and certifies zeros of solutions, and checks the
//! growth, separation, horodisc and Carleson-square bounds that govern
//! their zero sets. All checks are empirical: reports carry the grid and
//! search parameters they were computed with.

pub mod analytic;
pub mod error;
pub mod hypgeom;
pub mod ode;
pub mod plot;
pub mod quadrature;
pub mod series;
pub mod theorems;
pub mod zeros;

pub use error::{Error, Result};
pub use num_complex::Complex64;
