//! Characteristic roots of the modal quasipolynomials of delayed heat and wave
//! equations on `(0, pi)` with Dirichlet conditions.
//!
//! - [`symbols`]: the five quasipolynomial families and their derivatives
//! - [`lambert`]: real solvers for `x e^x = t` and `x^2 e^x = t`
//! - [`contour`]: rectangles, circles and argument-principle counting
//! - [`rootfinder`]: root isolation, Newton refinement, Rouche certification
//! - [`asymptotics`]: closed-form and leading-order root predictions
//! - [`integrator`]: method-of-steps simulation and growth-rate fitting

pub mod asymptotics;
pub mod contour;
pub mod error;
pub mod integrator;
pub mod lambert;
pub mod rootfinder;
pub mod symbols;

pub use num_complex::Complex64;

pub use contour::{Contour, Rect, Shape};
pub use error::{Error, Result};
pub use rootfinder::{Root, RootMethod};
pub use symbols::{FamilyKind, Mode, SymbolFamily};
