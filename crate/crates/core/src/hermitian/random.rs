//! Seeded random ensembles: unit vectors, Ginibre states, Haar unitaries and
//! random pure-state decompositions of a given state.
//!
//! All samplers draw `f64` normals from the supplied generator and convert,
//! so the `f32` and `f64` instantiations consume identical random streams.

use nalgebra::{Complex, ComplexField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::basis::UnitVector;
use super::matrix::{max_abs, CMatrix, CVector};
use super::observable::Observable;
use super::state::{DensityMatrix, ZERO_EIGENVALUE};
use crate::error::{Error, Result};
use crate::scalar::{abs2, Real, C};

/// The generator used throughout the crate.
pub type SeededRng = ChaCha8Rng;

/// A reproducible generator for `seed`.
pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for sub-task `stream` of a seeded run.
pub fn substream(seed: u64, stream: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream.wrapping_add(1));
    rng
}

fn normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.sample::<f64, _>(StandardNormal))
}

fn complex_normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> C<T> {
    let s = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    Complex::new(normal::<T, R>(rng) * s, normal::<T, R>(rng) * s)
}

/// Complex Gaussian (Ginibre) matrix with unit-variance entries.
pub fn ginibre<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix<T> {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Uniformly distributed unit vector in `len` real dimensions.
pub fn random_unit_vector<T: Real, R: Rng + ?Sized>(len: usize, rng: &mut R) -> UnitVector<T> {
    loop {
        let v: Vec<T> = (0..len).map(|_| normal(rng)).collect();
        if let Ok(u) = UnitVector::normalize(v) {
            return u;
        }
    }
}

/// Haar-random pure state `|ψ⟩` of dimension `dim`.
pub fn random_pure_vector<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector<T> {
    let v = CVector::from_fn(dim, |_, _| complex_normal(rng));
    let n = v.norm();
    v.unscale(n)
}

/// `ρ = GG† / Tr(GG†)` with `G` a `d × rank` Ginibre matrix.
pub fn random_density_matrix<T: Real, R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix<T>> {
    if rank == 0 || rank > dim {
        return Err(Error::InvalidRank { rank, dim });
    }
    let g = ginibre::<T, R>(dim, rank, rng);
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    DensityMatrix::new(w.unscale(tr))
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix, with the
/// phases of `diag(R)` pushed into `Q`.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix<T> {
    let z = ginibre::<T, R>(dim, dim, rng);
    let qr = z.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let m = d.modulus();
        if m > T::zero() {
            let phase = d.unscale(m);
            q.column_mut(j).iter_mut().for_each(|x| *x *= phase);
        }
    }
    q
}

/// Hermitian matrix from the Gaussian unitary ensemble.
pub fn random_hermitian<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Observable<T> {
    let g = ginibre::<T, R>(dim, dim, rng);
    let half = T::lit(0.5);
    Observable::new((&g + g.adjoint()).map(|z| z.scale(half))).expect("G + G† is Hermitian")
}

/// A pure-state ensemble `{p_k, |Ψ_k⟩}` realising a mixed state.
#[derive(Debug, Clone)]
pub struct Decomposition<T: Real> {
    pub weights: Vec<T>,
    pub states: Vec<CVector<T>>,
}

impl<T: Real> Decomposition<T> {
    /// The eigen-decomposition `{λ_k, |k⟩}` restricted to the support of `rho`.
    pub fn spectral(rho: &DensityMatrix<T>) -> Self {
        let r = rho.rank();
        let iso = CMatrix::<T>::identity(r, r);
        Self::from_isometry(rho, &iso).expect("identity is an isometry")
    }

    /// Mixes the subnormalised eigenvectors `√λ_k |k⟩` with the columns of a
    /// `K × rank` isometry: `|ψ̃_i⟩ = Σ_k U_ik √λ_k |k⟩`.
    pub fn from_isometry(rho: &DensityMatrix<T>, isometry: &CMatrix<T>) -> Result<Self> {
        let r = rho.rank();
        if isometry.ncols() != r {
            return Err(Error::DimensionMismatch { expected: r, got: isometry.ncols() });
        }
        if isometry.nrows() < r {
            return Err(Error::SizeTooSmall { size: isometry.nrows(), rank: r });
        }
        let gram = isometry.adjoint() * isometry;
        let err = max_abs(&(gram - CMatrix::<T>::identity(r, r)));
        if err > T::tol(1e-10) {
            return Err(Error::InvalidParameter(format!("columns are not orthonormal (error {err:e})")));
        }
        let d = rho.dim();
        let scaled: Vec<CVector<T>> = (0..r)
            .map(|k| rho.eigenvectors().column(k).scale(rho.eigenvalues()[k].sqrt()))
            .collect();
        let cut = T::tol(ZERO_EIGENVALUE) * T::tol(ZERO_EIGENVALUE);
        let mut weights = Vec::with_capacity(isometry.nrows());
        let mut states = Vec::with_capacity(isometry.nrows());
        for i in 0..isometry.nrows() {
            let mut v = CVector::<T>::zeros(d);
            for (k, s) in scaled.iter().enumerate() {
                v.axpy(isometry[(i, k)], s, Complex::new(T::one(), T::zero()));
            }
            let p = v.iter().fold(T::zero(), |a, &z| a + abs2(z));
            if p > cut {
                states.push(v.unscale(p.sqrt()));
                weights.push(p);
            }
        }
        Ok(Self { weights, states })
    }

    /// `Σ p_k |Ψ_k⟩⟨Ψ_k|`.
    pub fn mixture(&self) -> CMatrix<T> {
        let d = self.states.first().map(|s| s.len()).unwrap_or(0);
        let mut m = CMatrix::<T>::zeros(d, d);
        for (p, s) in self.weights.iter().zip(&self.states) {
            m += (s * s.adjoint()).map(|z| z.scale(*p));
        }
        m
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Random decomposition of `rho` into `size ≥ rank(ρ)` pure states, drawn
/// through a Haar-random `size × rank` isometry.
pub fn random_decomposition<T: Real, R: Rng + ?Sized>(
    rho: &DensityMatrix<T>,
    size: usize,
    rng: &mut R,
) -> Result<Decomposition<T>> {
    let r = rho.rank();
    if size < r {
        return Err(Error::SizeTooSmall { size, rank: r });
    }
    let u = haar_unitary::<T, R>(size, rng);
    let iso = u.columns(0, r).into_owned();
    Decomposition::from_isometry(rho, &iso)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_vectors_are_reproducible_and_normalised() {
        let a: UnitVector<f64> = random_unit_vector(8, &mut rng_from_seed(3));
        let b: UnitVector<f64> = random_unit_vector(8, &mut rng_from_seed(3));
        assert_eq!(a, b);
        let n2: f64 = a.components().iter().map(|x| x * x).sum();
        assert!((n2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_one_states_are_pure() {
        let mut rng = rng_from_seed(11);
        for d in 2..6 {
            let rho: DensityMatrix<f64> = random_density_matrix(d, 1, &mut rng).unwrap();
            assert!((rho.purity() - 1.0).abs() < 1e-10);
            assert_eq!(rho.rank(), 1);
        }
    }

    #[test]
    fn full_rank_is_reproducible() {
        let a: DensityMatrix<f64> = random_density_matrix(4, 4, &mut rng_from_seed(9)).unwrap();
        let b: DensityMatrix<f64> = random_density_matrix(4, 4, &mut rng_from_seed(9)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rank(), 4);
        let s: f64 = a.eigenvalues().iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert!(a.eigenvalues().iter().all(|&l| l >= 0.0));
    }

    #[test]
    fn invalid_rank() {
        let mut rng = rng_from_seed(0);
        assert!(matches!(random_density_matrix::<f64, _>(3, 0, &mut rng), Err(Error::InvalidRank { .. })));
        assert!(matches!(random_density_matrix::<f64, _>(3, 4, &mut rng), Err(Error::InvalidRank { .. })));
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let u: CMatrix<f64> = haar_unitary(5, &mut rng_from_seed(1));
        assert!(max_abs(&(u.adjoint() * &u - CMatrix::identity(5, 5))) < 1e-12);
    }

    #[test]
    fn spectral_decomposition_reproduces_eigenpairs() {
        let rho = DensityMatrix::<f64>::diagonal(&[0.75, 0.25]).unwrap();
        let dec = Decomposition::spectral(&rho);
        assert_eq!(dec.len(), 2);
        assert!((dec.weights[0] - 0.75).abs() < 1e-15);
        assert!(max_abs(&(dec.mixture() - rho.matrix())) < 1e-15);
    }

    #[test]
    fn rank_two_into_four_components() {
        let mut rng = rng_from_seed(5);
        let rho: DensityMatrix<f64> = random_density_matrix(3, 2, &mut rng).unwrap();
        let dec = random_decomposition(&rho, 4, &mut rng).unwrap();
        assert_eq!(dec.len(), 4);
        let total: f64 = dec.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(max_abs(&(dec.mixture() - rho.matrix())) < 1e-10);
        assert!(matches!(random_decomposition(&rho, 1, &mut rng), Err(Error::SizeTooSmall { .. })));
    }
}
