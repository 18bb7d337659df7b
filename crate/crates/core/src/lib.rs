//! Numerical verification of weighted Hardy, Rellich and
//! Caffarelli–Kohn–Nirenberg type inequalities on rotationally symmetric
//! Cartan–Hadamard models.

pub mod catalog;
pub mod error;
pub mod functionals;
pub mod jet;
pub mod manifold;
pub mod prober;
pub mod quadrature;
pub mod radial;

pub use error::{Error, Result};
