//! Averages of variance, QFI and the gap over the generator sphere
//! `A_n̂ = Σ n_m A⁽ᵐ⁾`, `|n̂| = 1`, with Monte-Carlo oracles.
//!
//! Sampling is split into fixed blocks of [`BLOCK`] draws, block `b` using
//! [`substream`]`(seed, b)`. Per-sample values are reduced with pairwise
//! summation in sample order, so results do not depend on the thread count.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hermitian::{random_unit_vector, substream, DensityMatrix, GeneratorBasis, Observable, ZERO_EIGENVALUE};
use crate::landscape::entropy::harmonic_purity;
use crate::metrology::{gap, qfi, qfi_generalized, qfi_math, variance, MonotoneMean};
use crate::scalar::{pairwise_sum, Real};

/// Default number of Monte-Carlo samples.
pub const DEFAULT_SAMPLES: usize = 100_000;

/// Draws per seeded block.
pub const BLOCK: usize = 1024;

/// Analytic average next to its Monte-Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AverageReport<T: Real> {
    pub analytic: T,
    pub monte_carlo_mean: T,
    pub monte_carlo_stderr: T,
    pub samples: usize,
}

impl<T: Real> AverageReport<T> {
    /// `|analytic − MC mean|`.
    pub fn deviation(&self) -> T {
        (self.analytic - self.monte_carlo_mean).abs()
    }

    /// Whether the deviation is within `k` standard errors. A floor of
    /// `1e-10 · max(1, |analytic|)` covers integrands that are constant on
    /// the sphere, where the standard error is zero up to rounding.
    pub fn agrees_within(&self, k: f64) -> bool {
        let floor = T::tol(1e-10) * T::one().max(self.analytic.abs());
        self.deviation() <= T::lit(k) * self.monte_carlo_stderr + floor
    }
}

/// `N_g = d² − 1`.
pub fn generator_count(d: usize) -> usize {
    d * d - 1
}

fn weight<T: Real>(d: usize) -> T {
    T::lit(2.0) / T::from_count(generator_count(d))
}

/// `(2/N_g)(S_lin + d − 1)`.
pub fn avg_variance_analytic<T: Real>(lambdas: &[T]) -> T {
    let d = lambdas.len();
    let s_lin = crate::landscape::entropy::linear_entropy(lambdas);
    weight::<T>(d) * (s_lin + T::from_count(d) - T::one())
}

/// `(8/N_g)(d − H)`.
pub fn avg_qfi_analytic<T: Real>(lambdas: &[T]) -> T {
    let d = lambdas.len();
    T::lit(4.0) * weight::<T>(d) * (T::from_count(d) - harmonic_purity(lambdas))
}

/// `(2/N_g)(S_lin + H − 1)`.
pub fn avg_gap_analytic<T: Real>(lambdas: &[T]) -> T {
    let d = lambdas.len();
    let s_lin = crate::landscape::entropy::linear_entropy(lambdas);
    weight::<T>(d) * (s_lin + harmonic_purity(lambdas) - T::one())
}

fn require_positive<T: Real>(lambdas: &[T]) -> Result<()> {
    let min = lambdas.iter().copied().fold(T::one(), |a, b| a.min(b));
    if min < T::tol(ZERO_EIGENVALUE) {
        return Err(Error::SingularState(min.as_f64()));
    }
    Ok(())
}

/// `(2/N_g)(Σ_kl 1/m(λ_k, λ_l) − (1/d) Σ_k 1/λ_k)` for a monotone mean `m`.
pub fn avg_fisher_analytic<T: Real>(lambdas: &[T], mean: MonotoneMean) -> Result<T> {
    require_positive(lambdas)?;
    let d = lambdas.len();
    let mut pairs = T::zero();
    for &a in lambdas {
        for &b in lambdas {
            pairs += T::one() / mean.evaluate(a, b);
        }
    }
    let inv = lambdas.iter().fold(T::zero(), |acc, &l| acc + T::one() / l);
    Ok(weight::<T>(d) * (pairs - inv / T::from_count(d)))
}

/// `(2/N_g)(Σ_kl 2/(λ_k + λ_l) − (1/d) Σ_k 1/λ_k)`.
pub fn avg_qfi_math_analytic<T: Real>(lambdas: &[T]) -> Result<T> {
    avg_fisher_analytic(lambdas, MonotoneMean::Arithmetic)
}

/// Logarithmic-mean counterpart of [`avg_qfi_math_analytic`].
pub fn avg_qfi_kmb_analytic<T: Real>(lambdas: &[T]) -> Result<T> {
    avg_fisher_analytic(lambdas, MonotoneMean::Logarithmic)
}

/// Mean and standard error of the mean.
fn estimate<T: Real>(values: &[T]) -> (T, T) {
    let n = T::from_count(values.len());
    let mean = pairwise_sum(values) / n;
    let dev: Vec<T> = values.iter().map(|&v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&dev) / (n - T::one());
    (mean, (var / n).sqrt())
}

/// Evaluates `f` on `samples` random observables `A_n̂`. `f` writes one value
/// per tracked quantity into its output slice; the result holds one column
/// of samples per quantity.
pub fn sample_sphere<T, F>(basis: &GeneratorBasis<T>, samples: usize, seed: u64, width: usize, f: F) -> Result<Vec<Vec<T>>>
where
    T: Real,
    F: Fn(&Observable<T>, &mut [T]) -> Result<()> + Sync,
{
    if samples < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 samples, got {samples}")));
    }
    let blocks = samples.div_ceil(BLOCK);
    let per_block: Vec<Result<Vec<T>>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = substream(seed, b as u64);
            let count = BLOCK.min(samples - b * BLOCK);
            let mut out = vec![T::zero(); count * width];
            for row in out.chunks_mut(width) {
                let n = random_unit_vector::<T, _>(basis.len(), &mut rng);
                let a = basis.observable_from_unit_vector(&n)?;
                f(&a, row)?;
            }
            Ok(out)
        })
        .collect();
    let mut columns = vec![Vec::with_capacity(samples); width];
    for block in per_block {
        for row in block?.chunks(width) {
            for (c, &v) in columns.iter_mut().zip(row) {
                c.push(v);
            }
        }
    }
    Ok(columns)
}

fn report<T: Real>(analytic: T, values: &[T]) -> AverageReport<T> {
    let (mean, stderr) = estimate(values);
    AverageReport { analytic, monte_carlo_mean: mean, monte_carlo_stderr: stderr, samples: values.len() }
}

fn single<T: Real>(
    rho: &DensityMatrix<T>,
    samples: usize,
    seed: u64,
    analytic: T,
    f: impl Fn(&DensityMatrix<T>, &Observable<T>) -> Result<T> + Sync,
) -> Result<AverageReport<T>> {
    let basis = GeneratorBasis::gell_mann(rho.dim())?;
    let cols = sample_sphere(&basis, samples, seed, 1, |a, out| {
        out[0] = f(rho, a)?;
        Ok(())
    })?;
    Ok(report(analytic, &cols[0]))
}

pub fn avg_variance<T: Real>(rho: &DensityMatrix<T>, samples: usize, seed: u64) -> Result<AverageReport<T>> {
    single(rho, samples, seed, avg_variance_analytic(rho.eigenvalues()), variance)
}

pub fn avg_qfi<T: Real>(rho: &DensityMatrix<T>, samples: usize, seed: u64) -> Result<AverageReport<T>> {
    single(rho, samples, seed, avg_qfi_analytic(rho.eigenvalues()), qfi)
}

pub fn avg_gap<T: Real>(rho: &DensityMatrix<T>, samples: usize, seed: u64) -> Result<AverageReport<T>> {
    single(rho, samples, seed, avg_gap_analytic(rho.eigenvalues()), |r, a| Ok(gap(r, a)?.gap))
}

pub fn avg_qfi_math<T: Real>(rho: &DensityMatrix<T>, samples: usize, seed: u64) -> Result<AverageReport<T>> {
    let analytic = avg_qfi_math_analytic(rho.eigenvalues())?;
    single(rho, samples, seed, analytic, qfi_math)
}

pub fn avg_qfi_kmb<T: Real>(rho: &DensityMatrix<T>, samples: usize, seed: u64) -> Result<AverageReport<T>> {
    let analytic = avg_qfi_kmb_analytic(rho.eigenvalues())?;
    single(rho, samples, seed, analytic, |r, a| qfi_generalized(r, a, MonotoneMean::Logarithmic))
}

/// All five averages from one shared set of sampled observables. The two
/// linear-family informations are `None` for singular states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllAverages<T: Real> {
    pub variance: AverageReport<T>,
    pub qfi: AverageReport<T>,
    pub gap: AverageReport<T>,
    pub qfi_math: Option<AverageReport<T>>,
    pub qfi_kmb: Option<AverageReport<T>>,
}

pub fn average_all<T: Real>(rho: &DensityMatrix<T>, samples: usize, seed: u64) -> Result<AllAverages<T>> {
    let lambdas = rho.eigenvalues();
    let math = avg_qfi_math_analytic(lambdas).ok();
    let kmb = avg_qfi_kmb_analytic(lambdas).ok();
    let full = math.is_some();
    let basis = GeneratorBasis::gell_mann(rho.dim())?;
    let width = if full { 5 } else { 3 };
    let cols = sample_sphere(&basis, samples, seed, width, |a, out| {
        let g = gap(rho, a)?;
        out[0] = g.variance;
        out[1] = g.qfi;
        out[2] = g.gap;
        if full {
            out[3] = qfi_math(rho, a)?;
            out[4] = qfi_generalized(rho, a, MonotoneMean::Logarithmic)?;
        }
        Ok(())
    })?;
    Ok(AllAverages {
        variance: report(avg_variance_analytic(lambdas), &cols[0]),
        qfi: report(avg_qfi_analytic(lambdas), &cols[1]),
        gap: report(avg_gap_analytic(lambdas), &cols[2]),
        qfi_math: math.map(|v| report(v, &cols[3])),
        qfi_kmb: kmb.map(|v| report(v, &cols[4])),
    })
}

/// Monte-Carlo averages of squared matrix elements of `A_n̂` in the
/// computational basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementAverages<T: Real> {
    /// `avg |A_12|²`, target `2/N_g`.
    pub offdiag_12: AverageReport<T>,
    /// `avg |A_13|²` (`d ≥ 3`).
    pub offdiag_13: Option<AverageReport<T>>,
    /// `avg |A_11|²`, target `(2/N_g)(1 − 1/d)`.
    pub diag_11: AverageReport<T>,
    pub diag_22: AverageReport<T>,
    /// `d |A_11|² + d(d − 1) |A_12|²` per sample, target `Tr A² = 2`.
    pub aggregate: AverageReport<T>,
}

pub fn element_averages<T: Real>(basis: &GeneratorBasis<T>, samples: usize, seed: u64) -> Result<ElementAverages<T>> {
    let d = basis.dim();
    let df = T::from_count(d);
    let cols = sample_sphere(basis, samples, seed, 5, |a, out| {
        let m = a.matrix();
        out[0] = m[(0, 1)].norm_sqr();
        out[1] = if d >= 3 { m[(0, 2)].norm_sqr() } else { T::zero() };
        out[2] = m[(0, 0)].norm_sqr();
        out[3] = m[(1, 1)].norm_sqr();
        out[4] = df * out[2] + df * (df - T::one()) * out[0];
        Ok(())
    })?;
    let off = weight::<T>(d);
    let diag = off * (T::one() - T::one() / df);
    Ok(ElementAverages {
        offdiag_12: report(off, &cols[0]),
        offdiag_13: (d >= 3).then(|| report(off, &cols[1])),
        diag_11: report(diag, &cols[2]),
        diag_22: report(diag, &cols[3]),
        aggregate: report(T::lit(2.0), &cols[4]),
    })
}

/// `C_mn = ½⟨{A⁽ᵐ⁾, A⁽ⁿ⁾}⟩ − ⟨A⁽ᵐ⁾⟩⟨A⁽ⁿ⁾⟩`.
pub fn covariance_matrix<T: Real>(rho: &DensityMatrix<T>, basis: &GeneratorBasis<T>) -> Result<DMatrix<T>> {
    rho.check_dim(basis.dim())?;
    let n = basis.len();
    let products: Vec<_> = basis.generators().iter().map(|g| rho.matrix() * g.matrix()).collect();
    let means: Vec<T> = products.iter().map(|p| p.trace().re).collect();
    let mut c = DMatrix::<T>::zeros(n, n);
    for m in 0..n {
        for k in m..n {
            let second = crate::hermitian::matrix::trace_product_re(&products[m], basis.generator(k).matrix());
            let v = second - means[m] * means[k];
            c[(m, k)] = v;
            c[(k, m)] = v;
        }
    }
    Ok(c)
}

/// `F_mn = 2 Σ_kl (λ_k − λ_l)²/(λ_k + λ_l) Re(A⁽ᵐ⁾_kl A⁽ⁿ⁾_lk)`.
pub fn fisher_matrix<T: Real>(rho: &DensityMatrix<T>, basis: &GeneratorBasis<T>) -> Result<DMatrix<T>> {
    rho.check_dim(basis.dim())?;
    let d = rho.dim();
    let n = basis.len();
    let lambdas = rho.eigenvalues();
    let cut = T::tol(ZERO_EIGENVALUE);
    let mut w = DMatrix::<T>::zeros(d, d);
    for k in 0..d {
        for l in 0..d {
            let s = lambdas[k] + lambdas[l];
            if s >= cut {
                let diff = lambdas[k] - lambdas[l];
                w[(k, l)] = T::lit(2.0) * diff * diff / s;
            }
        }
    }
    let elements: Vec<_> = basis.generators().iter().map(|g| rho.in_eigenbasis(g.matrix())).collect();
    let mut f = DMatrix::<T>::zeros(n, n);
    for m in 0..n {
        for q in m..n {
            let mut acc = T::zero();
            for k in 0..d {
                for l in 0..d {
                    acc += w[(k, l)] * (elements[m][(k, l)] * elements[q][(k, l)].conj()).re;
                }
            }
            f[(m, q)] = acc;
            f[(q, m)] = acc;
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::{random_density_matrix, rng_from_seed, UnitVector};

    fn qubit() -> DensityMatrix<f64> {
        DensityMatrix::diagonal(&[0.75, 0.25]).unwrap()
    }

    #[test]
    fn analytic_examples() {
        let pure = [1.0f64, 0.0];
        assert!((avg_variance_analytic(&pure) - 2.0 / 3.0).abs() < 1e-15);
        assert!((avg_qfi_analytic(&pure) - 8.0 / 3.0).abs() < 1e-15);
        assert!(avg_gap_analytic(&pure).abs() < 1e-15);

        let half = [0.5f64, 0.5];
        assert!((avg_variance_analytic(&half) - 1.0).abs() < 1e-15);
        assert!(avg_qfi_analytic(&half).abs() < 1e-15);
        assert!((avg_gap_analytic(&half) - 1.0).abs() < 1e-15);

        let q = [0.75f64, 0.25];
        assert!((avg_qfi_analytic(&q) - 2.0 / 3.0).abs() < 1e-15);
        assert!((avg_gap_analytic(&q) - 0.75).abs() < 1e-15);
        assert!((avg_qfi_math_analytic(&q).unwrap() - 40.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn completely_mixed_endpoints() {
        for d in 2..8 {
            let u = vec![1.0 / d as f64; d];
            assert!((avg_qfi_math_analytic(&u).unwrap() - 2.0 * d as f64).abs() < 1e-10);
            assert!((avg_qfi_kmb_analytic(&u).unwrap() - 2.0 * d as f64).abs() < 1e-10);
        }
        assert!(matches!(avg_qfi_math_analytic(&[1.0f64, 0.0]), Err(Error::SingularState(_))));
    }

    #[test]
    fn kmb_average_against_term_by_term_sum() {
        // Direct summation with the difference quotient of logs off the diagonal.
        let l = [0.75f64, 0.25];
        let off = (l[0].ln() - l[1].ln()) / (l[0] - l[1]);
        let pairs = 1.0 / l[0] + 1.0 / l[1] + 2.0 * off;
        let expected = (2.0 / 3.0) * (pairs - 0.5 * (1.0 / l[0] + 1.0 / l[1]));
        assert!((avg_qfi_kmb_analytic(&l).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn consistency_triangle() {
        let mut rng = rng_from_seed(8);
        for d in 2..6 {
            let rho: DensityMatrix<f64> = random_density_matrix(d, d, &mut rng).unwrap();
            let l = rho.eigenvalues();
            let lhs = avg_variance_analytic(l) - avg_qfi_analytic(l) / 4.0;
            assert!((lhs - avg_gap_analytic(l)).abs() < 1e-12);
        }
    }

    #[test]
    fn isotropic_gap_is_constant() {
        let r = avg_gap(&DensityMatrix::<f64>::maximally_mixed(2), 2000, 1).unwrap();
        assert!((r.monte_carlo_mean - 1.0).abs() < 1e-12);
        assert!(r.agrees_within(5.0));
    }

    #[test]
    fn monte_carlo_matches_qubit() {
        let all = average_all(&qubit(), 20_000, 3).unwrap();
        for r in [all.variance, all.qfi, all.gap, all.qfi_math.unwrap(), all.qfi_kmb.unwrap()] {
            assert!(r.agrees_within(5.0), "{r:?}");
        }
        let pure = DensityMatrix::<f64>::diagonal(&[1.0, 0.0]).unwrap();
        let all = average_all(&pure, 2000, 3).unwrap();
        assert!(all.qfi_math.is_none() && all.qfi_kmb.is_none());
        assert!(all.gap.monte_carlo_mean.abs() < 1e-12);
    }

    #[test]
    fn sampling_is_independent_of_thread_count() {
        let rho: DensityMatrix<f64> = random_density_matrix(3, 3, &mut rng_from_seed(2)).unwrap();
        let a = avg_qfi(&rho, 5000, 9).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| avg_qfi(&rho, 5000, 9).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn covariance_and_fisher_examples() {
        let basis = GeneratorBasis::<f64>::gell_mann(2).unwrap();
        let c = covariance_matrix(&DensityMatrix::maximally_mixed(2), &basis).unwrap();
        assert!((c - DMatrix::identity(3, 3)).abs().max() < 1e-15);

        let f = fisher_matrix(&qubit(), &basis).unwrap();
        let expected = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 0.0]));
        assert!((f - expected).abs().max() < 1e-14);

        let f = fisher_matrix(&DensityMatrix::<f64>::maximally_mixed(3), &GeneratorBasis::gell_mann(3).unwrap()).unwrap();
        assert!(f.abs().max() < 1e-15);
    }

    #[test]
    fn quadratic_forms_reproduce_variance_and_qfi() {
        let mut rng = rng_from_seed(21);
        for d in [2usize, 3, 4] {
            let basis = GeneratorBasis::<f64>::gell_mann(d).unwrap();
            let rho: DensityMatrix<f64> = random_density_matrix(d, d, &mut rng).unwrap();
            let c = covariance_matrix(&rho, &basis).unwrap();
            let f = fisher_matrix(&rho, &basis).unwrap();
            assert!((c.trace() - basis.len() as f64 * avg_variance_analytic(rho.eigenvalues())).abs() < 1e-10);
            assert!((f.trace() - basis.len() as f64 * avg_qfi_analytic(rho.eigenvalues())).abs() < 1e-10);
            for _ in 0..10 {
                let n: UnitVector<f64> = random_unit_vector(basis.len(), &mut rng);
                let v = nalgebra::DVector::from_column_slice(n.components());
                let a = basis.observable_from_unit_vector(&n).unwrap();
                assert!(((v.transpose() * &c * &v)[0] - variance(&rho, &a).unwrap()).abs() < 1e-9);
                assert!(((v.transpose() * &f * &v)[0] - qfi(&rho, &a).unwrap()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn element_average_targets() {
        let e = element_averages(&GeneratorBasis::<f64>::gell_mann(3).unwrap(), 20_000, 5).unwrap();
        assert!((e.offdiag_12.analytic - 0.25).abs() < 1e-15);
        assert!((e.diag_11.analytic - 1.0 / 6.0).abs() < 1e-15);
        for r in [e.offdiag_12, e.offdiag_13.unwrap(), e.diag_11, e.diag_22, e.aggregate] {
            assert!(r.agrees_within(5.0), "{r:?}");
        }
    }
}
