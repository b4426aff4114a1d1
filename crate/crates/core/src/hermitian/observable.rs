use nalgebra::Complex;

use super::matrix::{hermitian_eigenvalues, hermiticity_defect, max_abs, real_diagonal, symmetrize, CMatrix};
use crate::error::{Error, Result};
use crate::scalar::{cr, Real};

/// A Hermitian operator `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable<T: Real> {
    matrix: CMatrix<T>,
    is_traceless: bool,
    norm2: T,
}

impl<T: Real> Observable<T> {
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        let defect = hermiticity_defect(&matrix)?;
        let scale = T::one().max(max_abs(&matrix));
        if defect > T::tol(1e-12) * scale {
            return Err(Error::NotHermitian(defect.as_f64()));
        }
        let matrix = symmetrize(&matrix);
        let trace = matrix.trace().re;
        let norm2 = super::matrix::trace_product_re(&matrix, &matrix);
        Ok(Self { is_traceless: trace.abs() <= T::tol(1e-12) * scale, norm2, matrix })
    }

    /// Diagonal operator with the given real entries.
    pub fn diagonal(entries: &[T]) -> Self {
        Self::new(real_diagonal(entries)).expect("real diagonal is Hermitian")
    }

    pub fn pauli_x() -> Self {
        let (o, l) = (cr(T::zero()), cr(T::one()));
        Self::new(CMatrix::from_row_slice(2, 2, &[o, l, l, o])).expect("Pauli X")
    }

    pub fn pauli_y() -> Self {
        let o = cr(T::zero());
        let i = Complex::new(T::zero(), T::one());
        Self::new(CMatrix::from_row_slice(2, 2, &[o, -i, i, o])).expect("Pauli Y")
    }

    pub fn pauli_z() -> Self {
        Self::diagonal(&[T::one(), -T::one()])
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn is_traceless(&self) -> bool {
        self.is_traceless
    }

    /// `Tr(A²)`.
    pub fn norm2(&self) -> T {
        self.norm2
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    /// Spectrum of `A`, descending.
    pub fn eigenvalues(&self) -> Vec<T> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// `σ_max(A²)`, the largest eigenvalue of `A²`.
    pub fn max_eigenvalue_of_square(&self) -> T {
        self.eigenvalues().into_iter().fold(T::zero(), |acc, s| acc.max(s * s))
    }

    /// `A + c·I`.
    pub fn shifted(&self, c: T) -> Self {
        let n = self.dim();
        let m = &self.matrix + CMatrix::<T>::identity(n, n).map(|z| z.scale(c));
        Self::new(m).expect("shift keeps Hermiticity")
    }

    /// `c·A`.
    pub fn scaled(&self, c: T) -> Self {
        Self::new(self.matrix.map(|z| z.scale(c))).expect("real scaling keeps Hermiticity")
    }

    /// `U A U†`.
    pub fn conjugate_by(&self, unitary: &CMatrix<T>) -> Result<Self> {
        if unitary.nrows() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: unitary.nrows() });
        }
        Self::new(unitary * &self.matrix * unitary.adjoint())
    }
}
