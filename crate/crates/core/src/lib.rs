//! Numerical harmonic analysis for the Jacobi–Cherednik operator
//! `T f(x) = f'(x) + (A'/A)(x) (f(x) - f(-x))/2 - ρ f(-x)` on the real line.
//!
//! Numerical routines are generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix `f64`.

pub mod error;
pub mod green;
pub mod heat;
pub mod markov;
pub mod operator;
pub mod params;
pub mod quadrature;
pub mod rkhs;
pub mod scalar;
pub mod specfun;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
pub use params::JacobiParams;
pub use scalar::Real;

/// Double precision parameter pair.
pub type Params = JacobiParams<f64>;
