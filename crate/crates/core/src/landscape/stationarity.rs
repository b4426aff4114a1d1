//! First- and second-order conditions for minimising the averaged
//! linear-family information `f(λ)` at fixed `exp S`, evaluated on the
//! white-noise family. Reduced coordinates drop `λ_d = 1 − Σ_{k<d} λ_k`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::averages::generator_count;
use crate::error::{Error, Result};
use crate::landscape::entropy::von_neumann;
use crate::landscape::white_noise::WhiteNoiseFamily;
use crate::scalar::Real;

fn prefactor<T: Real>(d: usize) -> T {
    T::lit(2.0) / T::from_count(generator_count(d))
}

/// `f(λ) = (2/N_g)(Σ_kl 2/(λ_k + λ_l) − (1/d) Σ_k 1/λ_k)` on the full
/// coordinates, without validation.
pub fn objective<T: Real>(lambdas: &[T]) -> T {
    let d = lambdas.len();
    let two = T::lit(2.0);
    let mut pairs = T::zero();
    let mut inv = T::zero();
    for &a in lambdas {
        inv += T::one() / a;
        for &b in lambdas {
            pairs += two / (a + b);
        }
    }
    prefactor::<T>(d) * (pairs - inv / T::from_count(d))
}

/// `∂f/∂λ_a = (2/N_g)(−4 Σ_l (λ_a + λ_l)⁻² + 1/(d λ_a²))`.
pub fn objective_gradient<T: Real>(lambdas: &[T]) -> Vec<T> {
    let d = lambdas.len();
    let (c, df) = (prefactor::<T>(d), T::from_count(d));
    lambdas
        .iter()
        .map(|&a| {
            let s = lambdas.iter().fold(T::zero(), |acc, &l| acc + T::one() / ((a + l) * (a + l)));
            c * (T::one() / (df * a * a) - T::lit(4.0) * s)
        })
        .collect()
}

/// Full `d × d` Hessian:
/// `(2/N_g)[8δ_ab Σ_l (λ_a+λ_l)⁻³ + 8(λ_a+λ_b)⁻³ − (2/d)δ_ab λ_a⁻³]`.
pub fn objective_hessian<T: Real>(lambdas: &[T]) -> DMatrix<T> {
    let d = lambdas.len();
    let (c, df, eight) = (prefactor::<T>(d), T::from_count(d), T::lit(8.0));
    let cube = |x: T| T::one() / (x * x * x);
    DMatrix::from_fn(d, d, |a, b| {
        let mut v = eight * cube(lambdas[a] + lambdas[b]);
        if a == b {
            let row = lambdas.iter().fold(T::zero(), |acc, &l| acc + cube(lambdas[a] + l));
            v += eight * row - T::lit(2.0) / df * cube(lambdas[a]);
        }
        c * v
    })
}

/// `∂ exp S/∂λ_a = −exp(S)(ln λ_a + 1)`.
pub fn exp_entropy_gradient<T: Real>(lambdas: &[T]) -> Vec<T> {
    let e = von_neumann(lambdas).exp();
    lambdas.iter().map(|&l| -e * (l.ln() + T::one())).collect()
}

/// `g_k − g_d`: gradient with respect to the reduced coordinates.
pub fn reduce_gradient<T: Real>(full: &[T]) -> DVector<T> {
    let last = full[full.len() - 1];
    DVector::from_iterator(full.len() - 1, full[..full.len() - 1].iter().map(|&g| g - last))
}

/// `Pᵀ F P` with `P = [I; −1ᵀ]`.
pub fn reduce_hessian<T: Real>(full: &DMatrix<T>) -> DMatrix<T> {
    let n = full.nrows() - 1;
    DMatrix::from_fn(n, n, |a, b| full[(a, b)] - full[(a, n)] - full[(n, b)] + full[(n, n)])
}

/// Lagrange condition at a white-noise point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stationarity<T: Real> {
    /// `|cos θ|` between the reduced gradients of `f` and `exp S`.
    pub grad_alignment: T,
    /// Norm of the component of `∇f` tangent to the level set of `exp S`.
    pub residual: T,
    /// `‖∇f‖` in reduced coordinates.
    pub grad_norm: T,
    /// `μ` with `∇f = μ ∇ exp S` along the normal direction.
    pub multiplier: T,
}

impl<T: Real> Stationarity<T> {
    /// `residual / ‖∇f‖`.
    pub fn relative_residual(&self) -> T {
        self.residual / self.grad_norm
    }
}

/// Gradient norms below this are treated as vanishing.
pub const DEGENERATE_GRADIENT: f64 = 1e-12;

pub fn lagrange_stationarity<T: Real>(d: usize, lambda: T) -> Result<Stationarity<T>> {
    let spectrum = WhiteNoiseFamily::new(d, lambda)?.eigenvalues();
    let gf = reduce_gradient(&objective_gradient(&spectrum));
    let ge = reduce_gradient(&exp_entropy_gradient(&spectrum));
    let (nf, ne) = (gf.norm(), ge.norm());
    let cut = T::tol(DEGENERATE_GRADIENT);
    if nf < cut || ne < cut {
        return Err(Error::DegenerateGradient(nf.min(ne).as_f64()));
    }
    let unit = ge.unscale(ne);
    let along = gf.dot(&unit);
    let residual = (&gf - unit.scale(along)).norm();
    Ok(Stationarity { grad_alignment: along.abs() / nf, residual, grad_norm: nf, multiplier: along / ne })
}

/// Reduced Hessian at a white-noise point with its finite-difference check.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianReport<T: Real> {
    pub hessian: DMatrix<T>,
    pub min_eigenvalue: T,
    /// `max |H_fd − H| / max |H|`.
    pub fd_relative_error: T,
}

/// Central second differences of `f` in reduced coordinates. The step is
/// `5e-4` times the smallest eigenvalue, which balances truncation against
/// the rounding amplified by the `1/λ` terms (worst relative deviation about
/// `6e-7` for `d ≤ 25`).
pub fn finite_difference_hessian<T: Real>(lambdas: &[T]) -> DMatrix<T> {
    let n = lambdas.len() - 1;
    let min = lambdas.iter().copied().fold(T::one(), |a, b| a.min(b));
    let h = T::lit(5e-4) * min;
    let eval = |steps: &[(usize, T)]| {
        let mut x = lambdas.to_vec();
        for &(i, s) in steps {
            x[i] += s;
            x[n] -= s;
        }
        objective(&x)
    };
    let f0 = objective(lambdas);
    let mut out = DMatrix::<T>::zeros(n, n);
    for a in 0..n {
        out[(a, a)] = (eval(&[(a, h)]) - T::lit(2.0) * f0 + eval(&[(a, -h)])) / (h * h);
        for b in (a + 1)..n {
            let v = (eval(&[(a, h), (b, h)]) - eval(&[(a, h), (b, -h)]) - eval(&[(a, -h), (b, h)])
                + eval(&[(a, -h), (b, -h)]))
                / (T::lit(4.0) * h * h);
            out[(a, b)] = v;
            out[(b, a)] = v;
        }
    }
    out
}

pub fn hessian_report<T: Real>(d: usize, lambda: T) -> Result<HessianReport<T>> {
    let spectrum = WhiteNoiseFamily::new(d, lambda)?.eigenvalues();
    let hessian = reduce_hessian(&objective_hessian(&spectrum));
    let fd = finite_difference_hessian(&spectrum);
    let scale = hessian.abs().max();
    let fd_relative_error = (&fd - &hessian).abs().max() / scale;
    let min_eigenvalue = SymmetricEigen::new(hessian.clone()).eigenvalues.iter().copied().fold(T::lit(f64::INFINITY), |a, b| a.min(b));
    Ok(HessianReport { hessian, min_eigenvalue, fd_relative_error })
}

/// Smallest eigenvalue of the reduced Hessian of `f` at the family point.
pub fn hessian_min_eig<T: Real>(d: usize, lambda: T) -> Result<T> {
    Ok(hessian_report(d, lambda)?.min_eigenvalue)
}
