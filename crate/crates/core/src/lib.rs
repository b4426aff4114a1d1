//! Variance, quantum Fisher information and their gap for finite-dimensional
//! quantum states: exact identities, bounds, operator averages, entropy
//! landscapes and collective-spin examples.
//!
//! Everything is generic over the real scalar (`f32` or `f64`); the aliases
//! below fix the double-precision instantiation.

pub mod averages;
pub mod bounds;
pub mod error;
pub mod hermitian;
pub mod landscape;
pub mod metrology;
pub mod scalar;
pub mod spin;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

pub type DensityMatrix64 = hermitian::DensityMatrix<f64>;
pub type Observable64 = hermitian::Observable<f64>;
pub type GeneratorBasis64 = hermitian::GeneratorBasis<f64>;
pub type CMatrix64 = hermitian::CMatrix<f64>;
pub type AverageReport64 = averages::AverageReport<f64>;

pub type DensityMatrix32 = hermitian::DensityMatrix<f32>;
pub type Observable32 = hermitian::Observable<f32>;
