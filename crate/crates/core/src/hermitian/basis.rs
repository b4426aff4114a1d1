use nalgebra::Complex;

use super::matrix::{trace_product_re, CMatrix};
use super::observable::Observable;
use crate::error::{Error, Result};
use crate::scalar::{cr, Real};

/// Real unit vector `n̂` on the generator sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector<T: Real> {
    components: Vec<T>,
}

impl<T: Real> UnitVector<T> {
    /// Accepts components whose squared norm is 1 within `1e-12`.
    pub fn new(components: Vec<T>) -> Result<Self> {
        let n2 = components.iter().fold(T::zero(), |a, &x| a + x * x);
        if (n2 - T::one()).abs() > T::tol(1e-12) {
            return Err(Error::InvalidParameter(format!("unit vector has squared norm {n2}")));
        }
        Ok(Self { components })
    }

    /// Rescales an arbitrary nonzero vector to unit length.
    pub fn normalize(mut components: Vec<T>) -> Result<Self> {
        let norm = components.iter().fold(T::zero(), |a, &x| a + x * x).sqrt();
        if norm <= T::zero() {
            return Err(Error::InvalidParameter("zero vector".into()));
        }
        components.iter_mut().for_each(|x| *x /= norm);
        Ok(Self { components })
    }

    /// The `index`-th standard basis vector in `len` dimensions.
    pub fn axis(len: usize, index: usize) -> Self {
        let mut c = vec![T::zero(); len];
        c[index] = T::one();
        Self { components: c }
    }

    pub fn components(&self) -> &[T] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// The `d² − 1` generalized Gell-Mann matrices, normalised to
/// `Tr(A⁽ᵏ⁾A⁽ˡ⁾) = 2δ_kl`.
///
/// Ordering: symmetric off-diagonal generators `E_kl + E_lk` for `k < l`,
/// then antisymmetric ones `−i E_kl + i E_lk`, then the diagonal ones.
/// For `d = 2` this is `(σ_x, σ_y, σ_z)`.
#[derive(Debug, Clone)]
pub struct GeneratorBasis<T: Real> {
    dim: usize,
    generators: Vec<Observable<T>>,
}

impl<T: Real> GeneratorBasis<T> {
    pub fn gell_mann(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!("generator basis needs d >= 2, got {dim}")));
        }
        let zero = || CMatrix::<T>::zeros(dim, dim);
        let mut generators = Vec::with_capacity(dim * dim - 1);
        for k in 0..dim {
            for l in (k + 1)..dim {
                let mut m = zero();
                m[(k, l)] = cr(T::one());
                m[(l, k)] = cr(T::one());
                generators.push(Observable::new(m)?);
            }
        }
        for k in 0..dim {
            for l in (k + 1)..dim {
                let mut m = zero();
                m[(k, l)] = Complex::new(T::zero(), -T::one());
                m[(l, k)] = Complex::new(T::zero(), T::one());
                generators.push(Observable::new(m)?);
            }
        }
        for j in 1..dim {
            let jf = T::from_count(j);
            let scale = (T::lit(2.0) / (jf * (jf + T::one()))).sqrt();
            let mut m = zero();
            for k in 0..j {
                m[(k, k)] = cr(scale);
            }
            m[(j, j)] = cr(-jf * scale);
            generators.push(Observable::new(m)?);
        }
        Ok(Self { dim, generators })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `N_g = d² − 1`.
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[Observable<T>] {
        &self.generators
    }

    pub fn generator(&self, index: usize) -> &Observable<T> {
        &self.generators[index]
    }

    /// `A_n̂ = Σ_m n_m A⁽ᵐ⁾`.
    pub fn observable_from_unit_vector(&self, n: &UnitVector<T>) -> Result<Observable<T>> {
        Observable::new(self.combine(n.components())?)
    }

    /// `Σ_m c_m A⁽ᵐ⁾` for arbitrary real coefficients.
    pub fn combine(&self, coefficients: &[T]) -> Result<CMatrix<T>> {
        if coefficients.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: coefficients.len() });
        }
        let mut m = CMatrix::<T>::zeros(self.dim, self.dim);
        for (g, &c) in self.generators.iter().zip(coefficients) {
            if c != T::zero() {
                m.zip_apply(g.matrix(), |acc, z| *acc += z.scale(c));
            }
        }
        Ok(m)
    }

    /// Expansion coefficients `n_m = Tr(A A⁽ᵐ⁾) / 2`.
    pub fn coefficients(&self, a: &Observable<T>) -> Result<Vec<T>> {
        if a.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: a.dim() });
        }
        let half = T::lit(0.5);
        Ok(self.generators.iter().map(|g| half * trace_product_re(a.matrix(), g.matrix())).collect())
    }
}
