//! Quantum Fisher information, variance, the variance–QFI gap and the
//! generalized (monotone-mean) variance and Fisher information families.
//!
//! Every spectral double sum runs over the eigenbasis `{λ_k, |k⟩}` of the
//! state with `A_kl = ⟨k|A|l⟩`. Pairs with `λ_k + λ_l` below
//! [`ZERO_EIGENVALUE`] are skipped; for the Fisher information and the
//! harmonic-mean variance those terms vanish identically.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::hermitian::matrix::{frobenius2, CMatrix};
use crate::hermitian::{Decomposition, DensityMatrix, Observable, ZERO_EIGENVALUE};
use crate::scalar::{abs2, Real};

/// A symmetric mean `m_f(a, b)` picking one member of the generalized
/// variance / Fisher information families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MonotoneMean {
    /// `(a + b) / 2`
    Arithmetic,
    /// `2ab / (a + b)`
    Harmonic,
    /// `(a − b) / (ln a − ln b)`, with `m(a, a) = a`
    Logarithmic,
}

impl MonotoneMean {
    pub const ALL: [MonotoneMean; 3] = [Self::Arithmetic, Self::Harmonic, Self::Logarithmic];

    pub fn evaluate<T: Real>(self, a: T, b: T) -> T {
        match self {
            Self::Arithmetic => (a + b) * T::lit(0.5),
            Self::Harmonic => {
                let s = a + b;
                if s <= T::zero() {
                    T::zero()
                } else {
                    T::lit(2.0) * a * b / s
                }
            }
            Self::Logarithmic => logarithmic_mean(a, b),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Arithmetic => "arithmetic",
            Self::Harmonic => "harmonic",
            Self::Logarithmic => "logarithmic",
        }
    }
}

impl fmt::Display for MonotoneMean {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MonotoneMean {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "arithmetic" | "ari" => Ok(Self::Arithmetic),
            "harmonic" | "har" => Ok(Self::Harmonic),
            "logarithmic" | "log" | "kmb" => Ok(Self::Logarithmic),
            other => Err(Error::InvalidParameter(format!("unknown mean '{other}'"))),
        }
    }
}

/// Logarithmic mean. Close to the diagonal it is evaluated as
/// `M / (1 + u²/3 + u⁴/5 + u⁶/7)` with `M = (a+b)/2`, `u = (a−b)/(a+b)`,
/// which is the `atanh` series of `(a − b)/(ln a − ln b)`.
pub fn logarithmic_mean<T: Real>(a: T, b: T) -> T {
    if a <= T::zero() || b <= T::zero() {
        return T::zero();
    }
    if a == b {
        return a;
    }
    let s = a + b;
    let u = (a - b) / s;
    if u.abs() < T::lit(1e-4) {
        let u2 = u * u;
        let series = T::one() + u2 * (T::one() / T::lit(3.0) + u2 * (T::lit(0.2) + u2 / T::lit(7.0)));
        return s * T::lit(0.5) / series;
    }
    (a - b) / (a.ln() - b.ln())
}

/// Variance, QFI and their gap `V = (ΔA)² − F_Q/4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport<T: Real> {
    pub variance: T,
    pub qfi: T,
    pub gap: T,
}

/// Matrix elements of `a` in the eigenbasis of `rho`, after a dimension check.
pub fn eigenbasis_elements<T: Real>(rho: &DensityMatrix<T>, a: &Observable<T>) -> Result<CMatrix<T>> {
    rho.check_dim(a.dim())?;
    Ok(rho.in_eigenbasis(a.matrix()))
}

fn double_sum<T: Real>(lambdas: &[T], elements: &CMatrix<T>, mut weight: impl FnMut(T, T) -> Option<T>) -> T {
    let d = lambdas.len();
    let mut acc = T::zero();
    for k in 0..d {
        for l in 0..d {
            if let Some(w) = weight(lambdas[k], lambdas[l]) {
                acc += w * abs2(elements[(k, l)]);
            }
        }
    }
    acc
}

fn mean_in_eigenbasis<T: Real>(lambdas: &[T], elements: &CMatrix<T>) -> T {
    lambdas.iter().enumerate().fold(T::zero(), |acc, (k, &l)| acc + l * elements[(k, k)].re)
}

#[inline]
fn skip<T: Real>(a: T, b: T) -> bool {
    a + b < T::tol(ZERO_EIGENVALUE)
}

/// `(ΔA)² = Tr(ρA²) − (Tr ρA)²`, computed from the matrices directly.
pub fn variance<T: Real>(rho: &DensityMatrix<T>, a: &Observable<T>) -> Result<T> {
    rho.check_dim(a.dim())?;
    let a2 = a.matrix() * a.matrix();
    let m = rho.expectation(a.matrix());
    Ok(rho.expectation(&a2) - m * m)
}

/// `F_Q[ρ, A] = 2 Σ_kl (λ_k − λ_l)²/(λ_k + λ_l) |A_kl|²`.
pub fn qfi<T: Real>(rho: &DensityMatrix<T>, a: &Observable<T>) -> Result<T> {
    let e = eigenbasis_elements(rho, a)?;
    Ok(qfi_from_elements(rho.eigenvalues(), &e))
}

pub(crate) fn qfi_from_elements<T: Real>(lambdas: &[T], e: &CMatrix<T>) -> T {
    let two = T::lit(2.0);
    two * double_sum(lambdas, e, |a, b| {
        if skip(a, b) {
            None
        } else {
            Some((a - b) * (a - b) / (a + b))
        }
    })
}

/// `F_Q = 4⟨A²⟩ − 8 Σ_kl λ_k λ_l/(λ_k + λ_l) |A_kl|²`.
pub fn qfi_rearranged<T: Real>(rho: &DensityMatrix<T>, a: &Observable<T>) -> Result<T> {
    let e = eigenbasis_elements(rho, a)?;
    let second = rho.expectation(&(a.matrix() * a.matrix()));
    let h = harmonic_sum(rho.eigenvalues(), &e);
    Ok(T::lit(4.0) * second - T::lit(4.0) * h)
}

/// `2 Σ_kl λ_k λ_l/(λ_k + λ_l) |A_kl|²`.
fn harmonic_sum<T: Real>(lambdas: &[T], e: &CMatrix<T>) -> T {
    double_sum(lambdas, e, |a, b| {
        if skip(a, b) {
            None
        } else {
            Some(T::lit(2.0) * a * b / (a + b))
        }
    })
}

/// `V'(ρ, A) = Tr(ρA²) − F_Q/4 = 2 Σ_kl λ_k λ_l/(λ_k + λ_l) |A_kl|²`.
pub fn gap_prime<T: Real>(rho: &DensityMatrix<T>, a: &Observable<T>) -> Result<T> {
    let e = eigenbasis_elements(rho, a)?;
    Ok(harmonic_sum(rho.eigenvalues(), &e))
}

/// `V(ρ, A)`, evaluated both as `(ΔA)² − F_Q/4` and through the spectral
/// closed form `2 Σ λ_kλ_l/(λ_k+λ_l)|A_kl|² − (Σ λ_k A_kk)²`; the two must
/// agree to `1e-8` (relative to `Tr A²`).
pub fn gap<T: Real>(rho: &DensityMatrix<T>, a: &Observable<T>) -> Result<GapReport<T>> {
    let e = eigenbasis_elements(rho, a)?;
    let lambdas = rho.eigenvalues();
    let var = variance(rho, a)?;
    let f = qfi_from_elements(lambdas, &e);
    let direct = var - f * T::lit(0.25);
    let mean = mean_in_eigenbasis(lambdas, &e);
    let closed = harmonic_sum(lambdas, &e) - mean * mean;
    let scale = T::one().max(frobenius2(&e));
    let diff = (direct - closed).abs();
    if diff > T::tol(1e-8) * scale {
        return Err(Error::InternalMismatch { what: "variance - F_Q/4 vs spectral form", difference: diff.as_f64() });
    }
    Ok(GapReport { variance: var, qfi: f, gap: direct })
}

/// `var^f_ρ(A) = Σ_kl m_f(λ_k, λ_l) |A_kl|² − (Σ_k λ_k A_kk)²`.
pub fn generalized_variance<T: Real>(rho: &DensityMatrix<T>, a: &Observable<T>, mean: MonotoneMean) -> Result<T> {
    let e = eigenbasis_elements(rho, a)?;
    let lambdas = rho.eigenvalues();
    let m = mean_in_eigenbasis(lambdas, &e);
    let s = double_sum(lambdas, &e, |x, y| if skip(x, y) { None } else { Some(mean.evaluate(x, y)) });
    Ok(s - m * m)
}

fn require_full_rank<T: Real>(rho: &DensityMatrix<T>) -> Result<()> {
    let min = rho.smallest_eigenvalue();
    if min < T::tol(ZERO_EIGENVALUE) {
        return Err(Error::SingularState(min.as_f64()));
    }
    Ok(())
}

/// `F_Q(ρ; A) = 2 Σ_kl |A_kl|²/(λ_k + λ_l)`, the Fisher information of the
/// linear family `ρ + φA`. Requires a full-rank state.
pub fn qfi_math<T: Real>(rho: &DensityMatrix<T>, a: &Observable<T>) -> Result<T> {
    require_full_rank(rho)?;
    let e = eigenbasis_elements(rho, a)?;
    Ok(T::lit(2.0) * double_sum(rho.eigenvalues(), &e, |x, y| Some(T::one() / (x + y))))
}

/// `F^f_Q(ρ; A) = Σ_kl |A_kl|² / m_f(λ_k, λ_l)`. The logarithmic mean gives
/// the Kubo–Mori–Bogoliubov information. Requires a full-rank state.
pub fn qfi_generalized<T: Real>(rho: &DensityMatrix<T>, a: &Observable<T>, mean: MonotoneMean) -> Result<T> {
    require_full_rank(rho)?;
    let e = eigenbasis_elements(rho, a)?;
    Ok(double_sum(rho.eigenvalues(), &e, |x, y| Some(T::one() / mean.evaluate(x, y))))
}

/// Values bracketing a decomposition's average pure-state variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sandwich<T: Real> {
    /// `F_Q / 4`
    pub lower: T,
    /// `Σ p_k (ΔA)²_{Ψ_k}`
    pub mixture_value: T,
    /// `(ΔA)²_ρ`
    pub upper: T,
    /// `Σ p_k (⟨A⟩ − ⟨A⟩_k)²`
    pub classical_part: T,
}

/// Pure-state variance `⟨ψ|A²|ψ⟩ − ⟨ψ|A|ψ⟩²` and mean `⟨ψ|A|ψ⟩`.
pub fn pure_moments<T: Real>(psi: &crate::hermitian::CVector<T>, a: &CMatrix<T>) -> (T, T) {
    let av = a * psi;
    let mean = psi.dotc(&av).re;
    let second = av.dotc(&av).re;
    (second - mean * mean, mean)
}

/// Evaluates `F_Q/4 ≤ Σ p_k (ΔA)²_k ≤ (ΔA)²` for a decomposition of `rho`,
/// and checks that the variance splits into the pure-state ("quantum") part
/// plus the spread of the component means ("classical" part).
pub fn decomposition_sandwich<T: Real>(
    rho: &DensityMatrix<T>,
    a: &Observable<T>,
    decomposition: &Decomposition<T>,
) -> Result<Sandwich<T>> {
    rho.check_dim(a.dim())?;
    if decomposition.is_empty() || decomposition.states[0].len() != rho.dim() {
        return Err(Error::BadDecomposition(f64::INFINITY));
    }
    let err = crate::hermitian::matrix::max_abs(&(decomposition.mixture() - rho.matrix()));
    if err > T::tol(1e-9) {
        return Err(Error::BadDecomposition(err.as_f64()));
    }
    let report = gap(rho, a)?;
    let mean = rho.expectation(a.matrix());
    let mut quantum = T::zero();
    let mut classical = T::zero();
    for (p, psi) in decomposition.weights.iter().zip(&decomposition.states) {
        let (v, m) = pure_moments(psi, a.matrix());
        quantum += *p * v;
        classical += *p * (mean - m) * (mean - m);
    }
    let split = (quantum + classical - report.variance).abs();
    if split > T::tol(1e-9) * T::one().max(a.norm2()) {
        return Err(Error::InternalMismatch { what: "variance split", difference: split.as_f64() });
    }
    Ok(Sandwich { lower: report.qfi * T::lit(0.25), mixture_value: quantum, upper: report.variance, classical_part: classical })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::{random_decomposition, random_density_matrix, random_hermitian, rng_from_seed};

    fn qubit() -> DensityMatrix<f64> {
        DensityMatrix::diagonal(&[0.75, 0.25]).unwrap()
    }

    #[test]
    fn means_basic_properties() {
        for m in MonotoneMean::ALL {
            assert!((m.evaluate(0.3f64, 0.3) - 0.3).abs() < 1e-15, "{m}");
            let v = m.evaluate(0.2f64, 0.7);
            assert!((v - m.evaluate(0.7f64, 0.2)).abs() < 1e-15);
            assert!((0.2..=0.7).contains(&v));
        }
        assert!((MonotoneMean::Harmonic.evaluate(0.75f64, 0.25) - 0.375).abs() < 1e-15);
        let l = logarithmic_mean(0.75f64, 0.25);
        assert!((l - 0.5 / 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn logarithmic_mean_is_smooth_across_series_switch() {
        let a = 0.4f64;
        for rel in [1e-3, 2e-4, 1.0001e-4, 0.9999e-4, 1e-6, 1e-9, 1e-13] {
            let b = a * (1.0 - rel);
            let exact = {
                // independent evaluation through the integral representation
                // ∫₀¹ a^t b^(1−t) dt, Simpson with many panels
                let n = 2000;
                let h = 1.0 / n as f64;
                let f = |t: f64| a.powf(t) * b.powf(1.0 - t);
                let mut s = f(0.0) + f(1.0);
                for i in 1..n {
                    s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
                }
                s * h / 3.0
            };
            let got = logarithmic_mean(a, b);
            assert!(((got - exact) / exact).abs() < 1e-12, "rel={rel} got={got} exact={exact}");
        }
        assert_eq!(logarithmic_mean(0.0f64, 0.5), 0.0);
    }

    #[test]
    fn variance_examples() {
        let x = Observable::<f64>::pauli_x();
        assert!((variance(&DensityMatrix::maximally_mixed(2), &x).unwrap() - 1.0).abs() < 1e-15);
        assert!((variance(&qubit(), &x).unwrap() - 1.0).abs() < 1e-15);
        let up = DensityMatrix::<f64>::diagonal(&[1.0, 0.0]).unwrap();
        assert!(variance(&up, &Observable::pauli_z()).unwrap().abs() < 1e-15);
    }

    #[test]
    fn qfi_examples() {
        let x = Observable::<f64>::pauli_x();
        assert!(qfi(&DensityMatrix::maximally_mixed(2), &x).unwrap().abs() < 1e-15);
        // 4(2p − 1)² at p = 0.75
        assert!((qfi(&qubit(), &x).unwrap() - 1.0).abs() < 1e-14);
        assert!((qfi_rearranged(&qubit(), &x).unwrap() - 1.0).abs() < 1e-14);
        assert!(qfi_rearranged(&DensityMatrix::<f64>::maximally_mixed(2), &Observable::pauli_z()).unwrap().abs() < 1e-15);
    }

    #[test]
    fn pure_state_qfi_is_four_variances() {
        let mut rng = rng_from_seed(1);
        let rho: DensityMatrix<f64> = random_density_matrix(4, 1, &mut rng).unwrap();
        let a = random_hermitian(4, &mut rng);
        let v = variance(&rho, &a).unwrap();
        assert!((qfi(&rho, &a).unwrap() - 4.0 * v).abs() < 1e-10);
        assert!((qfi_rearranged(&rho, &a).unwrap() - 4.0 * v).abs() < 1e-10);
        assert!(gap(&rho, &a).unwrap().gap.abs() < 1e-10);
    }

    #[test]
    fn gap_examples() {
        let g = gap(&DensityMatrix::maximally_mixed(2), &Observable::<f64>::pauli_z()).unwrap();
        assert!((g.gap - 1.0).abs() < 1e-15);
        // 4p(1 − p) at p = 0.75
        let g = gap(&qubit(), &Observable::pauli_x()).unwrap();
        assert!((g.gap - 0.75).abs() < 1e-14);
        assert!(matches!(gap(&qubit(), &Observable::diagonal(&[1.0, 2.0, 3.0])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn generalized_variance_members() {
        let x = Observable::<f64>::pauli_x();
        let arith = generalized_variance(&qubit(), &x, MonotoneMean::Arithmetic).unwrap();
        assert!((arith - variance(&qubit(), &x).unwrap()).abs() < 1e-14);
        let har = generalized_variance(&qubit(), &x, MonotoneMean::Harmonic).unwrap();
        assert!((har - 0.75).abs() < 1e-14);
        let pure = DensityMatrix::<f64>::diagonal(&[1.0, 0.0]).unwrap();
        assert!(generalized_variance(&pure, &x, MonotoneMean::Logarithmic).unwrap().abs() < 1e-15);
    }

    #[test]
    fn linear_family_fisher_information() {
        // Direct summation 2 Σ |A_kl|²/(λ_k+λ_l): two off-diagonal unit entries over λ_k+λ_l = 1.
        let mixed = DensityMatrix::<f64>::maximally_mixed(2);
        let x = Observable::pauli_x();
        assert!((qfi_math(&mixed, &x).unwrap() - 4.0).abs() < 1e-14);
        assert!((qfi_generalized(&mixed, &x, MonotoneMean::Logarithmic).unwrap() - 4.0).abs() < 1e-14);

        let z = Observable::pauli_z();
        let expected = 1.0 / 0.75 + 1.0 / 0.25;
        assert!((qfi_math(&qubit(), &z).unwrap() - expected).abs() < 1e-13);
        for m in MonotoneMean::ALL {
            assert!((qfi_generalized(&qubit(), &z, m).unwrap() - expected).abs() < 1e-13);
        }
        assert!((qfi_generalized(&qubit(), &x, MonotoneMean::Arithmetic).unwrap() - qfi_math(&qubit(), &x).unwrap()).abs() < 1e-14);

        let pure = DensityMatrix::<f64>::diagonal(&[1.0, 0.0]).unwrap();
        assert!(matches!(qfi_math(&pure, &x), Err(Error::SingularState(_))));
        assert!(matches!(qfi_generalized(&pure, &x, MonotoneMean::Logarithmic), Err(Error::SingularState(_))));
    }

    #[test]
    fn sandwich_cases() {
        let z = Observable::<f64>::pauli_z();
        let s = decomposition_sandwich(&qubit(), &z, &Decomposition::spectral(&qubit())).unwrap();
        assert!(s.lower.abs() < 1e-15 && s.mixture_value.abs() < 1e-15);
        assert!((s.upper - 0.75).abs() < 1e-15);

        let mut rng = rng_from_seed(4);
        let pure: DensityMatrix<f64> = random_density_matrix(3, 1, &mut rng).unwrap();
        let a = random_hermitian(3, &mut rng);
        let s = decomposition_sandwich(&pure, &a, &Decomposition::spectral(&pure)).unwrap();
        assert!((s.lower - s.mixture_value).abs() < 1e-10 && (s.upper - s.mixture_value).abs() < 1e-10);

        let rho: DensityMatrix<f64> = random_density_matrix(3, 3, &mut rng).unwrap();
        let dec = random_decomposition(&rho, 5, &mut rng).unwrap();
        let s = decomposition_sandwich(&rho, &a, &dec).unwrap();
        assert!(s.lower <= s.mixture_value + 1e-9 && s.mixture_value <= s.upper + 1e-9);

        let wrong = Decomposition::spectral(&qubit());
        assert!(matches!(decomposition_sandwich(&DensityMatrix::maximally_mixed(2), &z, &wrong), Err(Error::BadDecomposition(_))));
    }
}
