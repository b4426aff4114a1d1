use crate::error::{Error, Result};
use crate::hermitian::DensityMatrix;
use crate::scalar::Real;

/// Entropy coordinates of a spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumPoint<T: Real> {
    pub lambdas: Vec<T>,
    /// `1 − Σ λ²`
    pub s_lin: T,
    /// `−Σ λ ln λ`
    pub s_vn: T,
    /// `Π λ^(−λ) = exp(S)`
    pub exp_s: T,
    /// `2 Σ_kl λ_k λ_l / (λ_k + λ_l)`
    pub h: T,
}

impl<T: Real> SpectrumPoint<T> {
    pub fn of_state(rho: &DensityMatrix<T>) -> Self {
        entropies(rho.eigenvalues()).expect("state spectra are valid")
    }
}

/// Checks that `lambdas` is a probability vector (entries `≥ −1e-12`,
/// sum `1 ± 1e-10`).
pub fn validate_spectrum<T: Real>(lambdas: &[T]) -> Result<()> {
    if lambdas.is_empty() {
        return Err(Error::InvalidSpectrum("empty spectrum".into()));
    }
    if let Some(bad) = lambdas.iter().find(|&&l| l.partial_cmp(&-T::tol(1e-12)).is_none_or(|o| o.is_lt())) {
        return Err(Error::InvalidSpectrum(format!("entry {bad} is negative or NaN")));
    }
    let total = lambdas.iter().fold(T::zero(), |a, &l| a + l);
    if (total - T::one()).abs() > T::tol(1e-10) {
        return Err(Error::InvalidSpectrum(format!("entries sum to {total}")));
    }
    Ok(())
}

/// Sum of pairwise harmonic means, `H = 2 Σ_kl λ_k λ_l / (λ_k + λ_l)`.
/// Ranges from 1 (pure) to `d` (completely mixed).
pub fn harmonic_purity<T: Real>(lambdas: &[T]) -> T {
    let two = T::lit(2.0);
    let mut acc = T::zero();
    for &a in lambdas {
        for &b in lambdas {
            let s = a + b;
            if s > T::zero() {
                acc += two * a * b / s;
            }
        }
    }
    acc
}

/// Von Neumann entropy `−Σ λ ln λ` with `0 ln 0 = 0`.
pub fn von_neumann<T: Real>(lambdas: &[T]) -> T {
    lambdas.iter().filter(|&&l| l > T::zero()).fold(T::zero(), |a, &l| a - l * l.ln())
}

/// `1 − Σ λ²`.
pub fn linear_entropy<T: Real>(lambdas: &[T]) -> T {
    T::one() - lambdas.iter().fold(T::zero(), |a, &l| a + l * l)
}

pub fn entropies<T: Real>(lambdas: &[T]) -> Result<SpectrumPoint<T>> {
    validate_spectrum(lambdas)?;
    let s_vn = von_neumann(lambdas);
    Ok(SpectrumPoint { lambdas: lambdas.to_vec(), s_lin: linear_entropy(lambdas), s_vn, exp_s: s_vn.exp(), h: harmonic_purity(lambdas) })
}

/// `H − exp(S)`.
pub fn h_exp_s_gap<T: Real>(lambdas: &[T]) -> Result<T> {
    validate_spectrum(lambdas)?;
    Ok(harmonic_purity(lambdas) - von_neumann(lambdas).exp())
}

/// `|H − exp S|` at `λ = 1/d + ε v` for each `ε`; `direction` must sum to 0.
pub fn h_exp_s_profile<T: Real>(direction: &[T], epsilons: &[T]) -> Result<Vec<(T, T)>> {
    let d = direction.len();
    let drift = direction.iter().fold(T::zero(), |a, &v| a + v);
    if drift.abs() > T::tol(1e-12) {
        return Err(Error::InvalidParameter(format!("perturbation direction sums to {drift}")));
    }
    let uniform = T::one() / T::from_count(d);
    epsilons
        .iter()
        .map(|&eps| {
            let lambdas: Vec<T> = direction.iter().map(|&v| uniform + eps * v).collect();
            Ok((eps, h_exp_s_gap(&lambdas)?.abs()))
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope<T: Real>(points: &[(T, T)]) -> T {
    let n = T::from_count(points.len());
    let (sx, sy) = points.iter().fold((T::zero(), T::zero()), |(a, b), &(x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = points.iter().fold((T::zero(), T::zero()), |(nu, de), &(x, y)| {
        let dx = x.ln() - mx;
        (nu + dx * (y.ln() - my), de + dx * dx)
    });
    num / den
}
