use nalgebra::Complex;

use super::matrix::{
    hermiticity_defect, max_abs, projector, real_diagonal, reconstruct, spectral_decompose, symmetrize, CMatrix,
    CVector,
};
use crate::error::{Error, Result};
use crate::scalar::{abs2, Real};

/// Eigenvalues below this count as zero when deciding rank and when
/// skipping `(k, l)` terms in spectral double sums.
pub const ZERO_EIGENVALUE: f64 = 1e-10;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const CLAMP_TOL: f64 = 1e-12;

/// A validated density matrix with its cached spectral decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    matrix: CMatrix<T>,
    eigenvalues: Vec<T>,
    eigenvectors: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates `matrix` as a state: Hermitian, unit trace and positive
    /// semidefinite. Eigenvalues in `[-1e-12, 0)` are clamped to zero and the
    /// spectrum renormalised.
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        let defect = hermiticity_defect(&matrix)?;
        if defect > T::tol(HERMITIAN_TOL) {
            return Err(Error::NotHermitian(defect.as_f64()));
        }
        let matrix = symmetrize(&matrix);
        let trace = matrix.trace();
        if (trace.re - T::one()).abs() > T::tol(TRACE_TOL) {
            return Err(Error::InvalidTrace(trace.re.as_f64()));
        }
        let (mut eigenvalues, eigenvectors) = spectral_decompose(&matrix)?;
        let min = eigenvalues.iter().copied().fold(T::one(), |a, b| a.min(b));
        if min < -T::tol(CLAMP_TOL) {
            return Err(Error::NegativeEigenvalue(min.as_f64()));
        }
        if min < T::zero() {
            eigenvalues.iter_mut().for_each(|l| *l = l.max(T::zero()));
            let total = eigenvalues.iter().fold(T::zero(), |a, &b| a + b);
            eigenvalues.iter_mut().for_each(|l| *l /= total);
            let matrix = reconstruct(&eigenvalues, &eigenvectors);
            return Ok(Self { matrix, eigenvalues, eigenvectors });
        }
        Ok(Self { matrix, eigenvalues, eigenvectors })
    }

    /// Builds `Σ λ_k |k⟩⟨k|` from a probability vector and the unitary whose
    /// columns are the eigenvectors.
    pub fn from_spectrum(eigenvalues: &[T], eigenvectors: &CMatrix<T>) -> Result<Self> {
        if eigenvectors.nrows() != eigenvalues.len() || eigenvectors.ncols() != eigenvalues.len() {
            return Err(Error::DimensionMismatch { expected: eigenvalues.len(), got: eigenvectors.nrows() });
        }
        Self::new(reconstruct(eigenvalues, eigenvectors))
    }

    /// Diagonal state `diag(p_1, …, p_d)`.
    pub fn diagonal(probabilities: &[T]) -> Result<Self> {
        Self::new(real_diagonal(probabilities))
    }

    /// The completely mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        let p = vec![T::one() / T::from_count(dim); dim];
        Self::diagonal(&p).expect("I/d is a valid state")
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalised) vector.
    pub fn pure(psi: &CVector<T>) -> Result<Self> {
        let norm = psi.norm();
        if norm <= T::zero() {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        Self::new(projector(&psi.unscale(norm)))
    }

    /// Convex combination `w·self + (1−w)·other`.
    pub fn mix(&self, other: &Self, weight: T) -> Result<Self> {
        self.check_dim(other.dim())?;
        let m = self.matrix.map(|z| z.scale(weight)) + other.matrix.map(|z| z.scale(T::one() - weight));
        Self::new(m)
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, unitary: &CMatrix<T>) -> Result<Self> {
        self.check_dim(unitary.nrows())?;
        Self::new(unitary * &self.matrix * unitary.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    /// Unitary whose columns are the eigenvectors, matching [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &CMatrix<T> {
        &self.eigenvectors
    }

    /// Number of eigenvalues above [`ZERO_EIGENVALUE`].
    pub fn rank(&self) -> usize {
        let cut = T::tol(ZERO_EIGENVALUE);
        self.eigenvalues.iter().filter(|&&l| l >= cut).count()
    }

    pub fn smallest_eigenvalue(&self) -> T {
        self.eigenvalues.last().copied().unwrap_or(T::zero())
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> T {
        self.eigenvalues.iter().fold(T::zero(), |a, &l| a + l * l)
    }

    /// `1 − Tr ρ²`.
    pub fn linear_entropy(&self) -> T {
        T::one() - self.purity()
    }

    /// Matrix elements `⟨k|m|l⟩` in the eigenbasis of the state.
    pub fn in_eigenbasis(&self, m: &CMatrix<T>) -> CMatrix<T> {
        self.eigenvectors.adjoint() * m * &self.eigenvectors
    }

    /// `Re Tr(ρ m)`.
    pub fn expectation(&self, m: &CMatrix<T>) -> T {
        super::matrix::trace_product_re(&self.matrix, m)
    }

    /// `⟨ψ|ρ|ψ⟩` for a normalised vector.
    pub fn overlap(&self, psi: &CVector<T>) -> T {
        let v = &self.matrix * psi;
        psi.iter().zip(v.iter()).fold(T::zero(), |acc, (a, b)| acc + (a.conj() * b).re)
    }

    /// Largest deviation between the stored matrix and `Σ λ_k |k⟩⟨k|`.
    pub fn reconstruction_error(&self) -> T {
        max_abs(&(reconstruct(&self.eigenvalues, &self.eigenvectors) - &self.matrix))
    }

    pub(crate) fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got });
        }
        Ok(())
    }
}

/// Normalises a complex vector.
pub fn normalized<T: Real>(v: &CVector<T>) -> CVector<T> {
    v.unscale(v.norm())
}

/// Standard basis vector `|index⟩` in dimension `dim`.
pub fn basis_vector<T: Real>(dim: usize, index: usize) -> CVector<T> {
    CVector::from_fn(dim, |i, _| if i == index { Complex::new(T::one(), T::zero()) } else { Complex::new(T::zero(), T::zero()) })
}

/// `Σ |v_i|²`.
pub fn norm2<T: Real>(v: &CVector<T>) -> T {
    v.iter().fold(T::zero(), |a, &z| a + abs2(z))
}
