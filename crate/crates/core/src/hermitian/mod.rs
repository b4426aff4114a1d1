//! Hermitian linear algebra, validated states and observables, the SU(d)
//! generator basis, and seeded random ensembles.

pub mod basis;
pub mod matrix;
pub mod observable;
pub mod random;
pub mod state;

pub use basis::{GeneratorBasis, UnitVector};
pub use matrix::{spectral_decompose, CMatrix, CVector};
pub use observable::Observable;
pub use random::{
    haar_unitary, random_decomposition, random_density_matrix, random_hermitian, random_pure_vector,
    random_unit_vector, rng_from_seed, substream, Decomposition, SeededRng,
};
pub use state::{DensityMatrix, ZERO_EIGENVALUE};
