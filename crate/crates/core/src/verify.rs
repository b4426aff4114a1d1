//! Seeded identity and bound sweeps grouped into suites. Each check records
//! the worst value it observed next to the tolerance it was held to.

use std::fmt;
use std::str::FromStr;

use nalgebra::SymmetricEigen;
use rand::Rng;
use rayon::prelude::*;

use crate::averages::{
    average_all, avg_gap_analytic, avg_qfi_analytic, avg_qfi_math_analytic, avg_variance_analytic, covariance_matrix,
    element_averages, fisher_matrix, generator_count, AverageReport,
};
use crate::bounds::{
    bound_h_times_sigma, bound_linear_entropy, max_gap_over_spectrum, max_vprime_over_spectrum, rank2_gap_identity,
    unitary_orbit_check, vprime_maximizer,
};
use crate::error::{Error, Result};
use crate::hermitian::matrix::max_abs;
use crate::hermitian::{
    haar_unitary, random_decomposition, random_density_matrix, random_hermitian, substream, DensityMatrix,
    GeneratorBasis, Observable, SeededRng,
};
use crate::landscape::{
    h_exp_s_profile, harmonic_purity, hessian_report, interior_grid, kmb_second_derivative_check,
    lagrange_stationarity, lambda_for_exp_entropy, loglog_slope, relative_entropy, WhiteNoiseFamily,
};
use crate::landscape::entropy::von_neumann;
use crate::landscape::optimize::global_min_probe;
use crate::metrology::{
    decomposition_sandwich, gap, gap_prime, generalized_variance, qfi, qfi_generalized, qfi_math, qfi_rearranged,
    variance, MonotoneMean,
};
use crate::spin::{
    collective_operator, fidelity_bound, ghz_purity_relation, ghz_vector, noisy_ghz_rhs, plus_product,
    random_product_mixture, shot_noise_check, Axis, GhzSubspaceState,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Core,
    Bounds,
    Averages,
    Landscape,
    Spin,
    All,
}

impl Suite {
    pub const EACH: [Suite; 5] = [Suite::Core, Suite::Bounds, Suite::Averages, Suite::Landscape, Suite::Spin];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Core => "core",
            Suite::Bounds => "bounds",
            Suite::Averages => "averages",
            Suite::Landscape => "landscape",
            Suite::Spin => "spin",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Overrides each suite's default dimensions.
    pub dims: Option<Vec<usize>>,
    /// Random cases per dimension in the sweeps.
    pub cases: usize,
    /// States per dimension in the Monte-Carlo gates.
    pub states: usize,
    /// Monte-Carlo draws per average.
    pub samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { seed: 42, dims: None, cases: 500, states: 5, samples: crate::averages::DEFAULT_SAMPLES }
    }
}

impl VerifyConfig {
    fn dims_or(&self, default: &[usize]) -> Vec<usize> {
        self.dims.clone().unwrap_or_else(|| default.to_vec())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Criterion {
    AtMost(f64),
    AtLeast(f64),
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Criterion::AtMost(t) => write!(f, "<= {t:e}"),
            Criterion::AtLeast(t) => write!(f, ">= {t:e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: Suite,
    pub name: &'static str,
    pub cases: usize,
    /// Worst error (for `AtMost`) or smallest value (for `AtLeast`).
    pub observed: f64,
    pub criterion: Criterion,
}

impl Check {
    pub fn passed(&self) -> bool {
        match self.criterion {
            Criterion::AtMost(t) => self.observed <= t,
            Criterion::AtLeast(t) => self.observed >= t,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] {}: observed {:.3e} ({} cases, required {})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.observed,
            self.cases,
            self.criterion
        )
    }
}

/// Runs one suite, or every suite for [`Suite::All`].
pub fn run(suite: Suite, cfg: &VerifyConfig) -> Result<Vec<Check>> {
    match suite {
        Suite::All => {
            let mut out = Vec::new();
            for s in Suite::EACH {
                out.extend(run(s, cfg)?);
            }
            Ok(out)
        }
        Suite::Core => core_suite(cfg),
        Suite::Bounds => bounds_suite(cfg),
        Suite::Averages => averages_suite(cfg),
        Suite::Landscape => landscape_suite(cfg),
        Suite::Spin => spin_suite(cfg),
    }
}

struct Recorder {
    suite: Suite,
    checks: Vec<Check>,
}

impl Recorder {
    fn new(suite: Suite) -> Self {
        Self { suite, checks: Vec::new() }
    }

    fn at_most(&mut self, name: &'static str, (cases, observed): (usize, f64), tol: f64) {
        self.checks.push(Check { suite: self.suite, name, cases, observed, criterion: Criterion::AtMost(tol) });
    }

    fn at_least(&mut self, name: &'static str, (cases, observed): (usize, f64), min: f64) {
        self.checks.push(Check { suite: self.suite, name, cases, observed, criterion: Criterion::AtLeast(min) });
    }
}

/// Independent generator for case `i` of the sweep tagged `tag`.
fn case_rng(seed: u64, tag: u64, i: u64) -> SeededRng {
    substream(seed ^ (tag << 40), i)
}

/// Evaluates `f` on `cases` seeded cases per dimension and returns the
/// number of cases with the largest value.
fn sweep<F>(seed: u64, tag: u64, dims: &[usize], cases: usize, f: F) -> Result<(usize, f64)>
where
    F: Fn(usize, &mut SeededRng) -> Result<f64> + Sync,
{
    let jobs: Vec<(usize, usize)> = dims.iter().flat_map(|&d| (0..cases).map(move |i| (d, i))).collect();
    let worst = jobs
        .par_iter()
        .map(|&(d, i)| f(d, &mut case_rng(seed, tag, (d * 1_000_003 + i) as u64)))
        .try_reduce(|| f64::NEG_INFINITY, |a, b| Ok(a.nan_max(b)))?;
    Ok((jobs.len(), worst))
}

fn state(d: usize, rank: usize, rng: &mut SeededRng) -> Result<DensityMatrix<f64>> {
    random_density_matrix(d, rank, rng)
}

fn random_state(d: usize, rng: &mut SeededRng) -> Result<DensityMatrix<f64>> {
    let rank = rng.gen_range(1..=d);
    state(d, rank, rng)
}

fn traceless(a: Observable<f64>) -> Observable<f64> {
    let t = a.trace() / a.dim() as f64;
    a.shifted(-t)
}

/// `max`/`min` that keep a NaN instead of dropping it, so a broken case
/// fails its check rather than vanishing from the worst value.
trait NanAware {
    fn nan_max(self, other: f64) -> f64;
    fn nan_min(self, other: f64) -> f64;
}

impl NanAware for f64 {
    fn nan_max(self, other: f64) -> f64 {
        if self.is_nan() || other.is_nan() {
            f64::NAN
        } else {
            self.max(other)
        }
    }

    fn nan_min(self, other: f64) -> f64 {
        if self.is_nan() || other.is_nan() {
            f64::NAN
        } else {
            self.min(other)
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// Excess of the Monte-Carlo deviation over the rounding floor, in standard
/// errors.
fn z_score(r: &AverageReport<f64>) -> f64 {
    let floor = 1e-10 * r.analytic.abs().max(1.0);
    let excess = (r.deviation() - floor).max(0.0);
    if excess == 0.0 {
        0.0
    } else {
        excess / r.monte_carlo_stderr
    }
}

fn core_suite(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let dims = cfg.dims_or(&[2, 3, 4, 5, 6]);
    let (seed, n) = (cfg.seed, cfg.cases);
    let mut r = Recorder::new(Suite::Core);

    r.at_most("spectral decomposition reconstructs the state", sweep(seed, 1, &dims, n, |d, g| {
        Ok(random_state(d, g)?.reconstruction_error())
    })?, 1e-10);
    r.at_most("generators satisfy Tr(A_k A_l) = 2 delta_kl", sweep(seed, 2, &dims, 1, |d, _| {
        let b = GeneratorBasis::<f64>::gell_mann(d)?;
        let mut worst = 0.0f64;
        for (k, x) in b.generators().iter().enumerate() {
            for (l, y) in b.generators().iter().enumerate() {
                let t = (x.matrix() * y.matrix()).trace();
                let want = if k == l { 2.0 } else { 0.0 };
                worst = worst.nan_max((t.re - want).abs()).nan_max(t.im.abs());
            }
        }
        Ok(worst)
    })?, 1e-12);
    r.at_most("traceless operators expand in the generator basis", sweep(seed, 3, &dims, n, |d, g| {
        let a = traceless(random_hermitian(d, g));
        let b = GeneratorBasis::gell_mann(d)?;
        Ok(max_abs(&(b.combine(&b.coefficients(&a)?)? - a.matrix())))
    })?, 1e-10);
    r.at_most("QFI spectral sum equals 4<A^2> minus harmonic sum", sweep(seed, 4, &dims, n, |d, g| {
        let (rho, a) = (random_state(d, g)?, random_hermitian(d, g));
        Ok(rel(qfi(&rho, &a)?, qfi_rearranged(&rho, &a)?))
    })?, 1e-9);
    r.at_most("gap equals variance minus QFI/4", sweep(seed, 5, &dims, n, |d, g| {
        let (rho, a) = (random_state(d, g)?, random_hermitian(d, g));
        let rep = gap(&rho, &a)?;
        Ok(rel(rep.gap, variance(&rho, &a)? - qfi(&rho, &a)? / 4.0))
    })?, 1e-9);
    r.at_most("gap equals V' minus squared mean", sweep(seed, 6, &dims, n, |d, g| {
        let (rho, a) = (random_state(d, g)?, random_hermitian(d, g));
        let m = rho.expectation(a.matrix());
        Ok(rel(gap(&rho, &a)?.gap, gap_prime(&rho, &a)? - m * m))
    })?, 1e-9);
    r.at_most("harmonic-mean variance equals the gap", sweep(seed, 7, &dims, n, |d, g| {
        let (rho, a) = (random_state(d, g)?, random_hermitian(d, g));
        Ok((generalized_variance(&rho, &a, MonotoneMean::Harmonic)? - gap(&rho, &a)?.gap).abs())
    })?, 1e-9);
    r.at_most("arithmetic-mean variance equals the variance", sweep(seed, 8, &dims, n, |d, g| {
        let (rho, a) = (random_state(d, g)?, random_hermitian(d, g));
        Ok(rel(generalized_variance(&rho, &a, MonotoneMean::Arithmetic)?, variance(&rho, &a)?))
    })?, 1e-9);
    r.at_most("gap is non-negative (max of -gap)", sweep(seed, 9, &dims, n, |d, g| {
        let (rho, a) = (random_state(d, g)?, random_hermitian(d, g));
        Ok(-gap(&rho, &a)?.gap)
    })?, 1e-9);
    r.at_most("pure states have QFI = 4 variance", sweep(seed, 10, &dims, n, |d, g| {
        let rho = state(d, 1, g)?;
        let a = random_hermitian(d, g);
        Ok(rel(qfi(&rho, &a)?, 4.0 * variance(&rho, &a)?))
    })?, 1e-9);
    let sandwich = |tag: u64, pick: fn(&crate::metrology::Sandwich<f64>) -> f64| {
        sweep(seed, tag, &dims, n, move |d, g| {
            let (rho, a) = (random_state(d, g)?, random_hermitian(d, g));
            let size = rho.rank() + g.gen_range(0..=d);
            let dec = random_decomposition(&rho, size, g)?;
            Ok(pick(&decomposition_sandwich(&rho, &a, &dec)?))
        })
    };
    r.at_most("QFI/4 <= decomposition average variance", sandwich(11, |s| s.lower - s.mixture_value)?, 1e-9);
    r.at_most("decomposition average variance <= variance", sandwich(12, |s| s.mixture_value - s.upper)?, 1e-9);
    r.at_most("variance splits into quantum and classical parts", sandwich(13, |s| {
        (s.mixture_value + s.classical_part - s.upper).abs()
    })?, 1e-9);
    r.at_most("QFI is convex in the state", sweep(seed, 14, &dims, n, |d, g| {
        let (x, y, a) = (random_state(d, g)?, random_state(d, g)?, random_hermitian(d, g));
        let p: f64 = g.gen();
        Ok(qfi(&x.mix(&y, p)?, &a)? - p * qfi(&x, &a)? - (1.0 - p) * qfi(&y, &a)?)
    })?, 1e-9);
    r.at_most("gap is invariant under joint unitary conjugation", sweep(seed, 15, &dims, n, |d, g| {
        let (rho, a) = (random_state(d, g)?, random_hermitian(d, g));
        let u = haar_unitary(d, g);
        Ok(rel(gap(&rho.conjugate_by(&u)?, &a.conjugate_by(&u)?)?.gap, gap(&rho, &a)?.gap))
    })?, 1e-9);
    r.at_most("variance, QFI and gap ignore shifts A + cI", sweep(seed, 16, &dims, n, |d, g| {
        let (rho, a) = (random_state(d, g)?, random_hermitian(d, g));
        let (x, y) = (gap(&rho, &a)?, gap(&rho, &a.shifted(g.gen_range(-3.0..3.0)))?);
        Ok(rel(x.variance, y.variance).nan_max(rel(x.qfi, y.qfi)).nan_max(rel(x.gap, y.gap)))
    })?, 1e-9);
    r.at_most("linear-family informations ordered arithmetic <= log <= harmonic", sweep(seed, 17, &dims, n, |d, g| {
        let (rho, a) = (state(d, d, g)?, random_hermitian(d, g));
        let ari = qfi_generalized(&rho, &a, MonotoneMean::Arithmetic)?;
        let log = qfi_generalized(&rho, &a, MonotoneMean::Logarithmic)?;
        let har = qfi_generalized(&rho, &a, MonotoneMean::Harmonic)?;
        Ok(((ari - log) / log).nan_max((log - har) / har))
    })?, 1e-12);
    r.at_most("arithmetic-mean information is twice the sum over 1/(l_k + l_l)", sweep(seed, 18, &dims, n, |d, g| {
        let (rho, a) = (state(d, d, g)?, random_hermitian(d, g));
        Ok(rel(qfi_math(&rho, &a)?, qfi_generalized(&rho, &a, MonotoneMean::Arithmetic)?))
    })?, 1e-12);
    Ok(r.checks)
}

fn bounds_suite(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let dims = cfg.dims_or(&[2, 3, 4, 5, 6]);
    let (seed, n) = (cfg.seed, cfg.cases);
    let mut r = Recorder::new(Suite::Bounds);

    r.at_most("rank-2 gap equals (1/2) S_lin (s1 - s2)^2", sweep(seed, 101, &dims, n, |d, g| {
        let (rho, a) = (state(d, 2, g)?, random_hermitian(d, g));
        Ok((gap(&rho, &a)?.gap - rank2_gap_identity(&rho, &a)?.formula).abs())
    })?, 1e-9);
    r.at_most("rank-2 gap within (1/2) S_lin (max - min eigenvalue)^2", sweep(seed, 102, &dims, n, |d, g| {
        let (rho, a) = (state(d, 2, g)?, random_hermitian(d, g));
        let ev = a.eigenvalues();
        let spread = ev[0] - ev[d - 1];
        Ok(gap(&rho, &a)?.gap - 0.5 * rho.linear_entropy() * spread * spread)
    })?, 1e-9);
    r.at_most("gap <= 2 S_lin sigma_max(A^2)", sweep(seed, 103, &dims, n, |d, g| {
        let b = bound_linear_entropy(&random_state(d, g)?, &random_hermitian(d, g))?;
        Ok(b.gap - b.bound)
    })?, 1e-9);
    r.at_most("gap <= H sigma_max(A^2)", sweep(seed, 104, &dims, n, |d, g| {
        let b = bound_h_times_sigma(&random_state(d, g)?, &random_hermitian(d, g))?;
        Ok(b.gap - b.bound)
    })?, 1e-9);
    let mixed = bound_linear_entropy(&DensityMatrix::<f64>::maximally_mixed(2), &Observable::pauli_z())?;
    r.at_most("completely mixed qubit with sigma_z saturates the linear bound", (1, (mixed.gap - mixed.bound).abs()), 1e-12);
    r.at_most("unitary orbit stays below the permutation maximum", sweep(seed, 105, &dims, n / 10 + 1, |d, g| {
        let rho = state(d, d, g)?;
        let sigmas = random_hermitian(d, g).eigenvalues();
        let o = unitary_orbit_check(rho.eigenvalues(), &sigmas, 20, g)?;
        Ok(o.max_sampled - o.permutation_max)
    })?, 1e-9);
    r.at_most("permutation maximum <= 2 S_lin sigma_max^2", sweep(seed, 106, &dims, n / 10 + 1, |d, g| {
        let rho = state(d, d, g)?;
        let a = random_hermitian(d, g);
        let best = max_gap_over_spectrum(rho.eigenvalues(), &a.eigenvalues())?;
        Ok(best.value - 2.0 * rho.linear_entropy() * a.max_eigenvalue_of_square())
    })?, 1e-9);
    r.at_most("sorted pairing maximises V' over the orbit", sweep(seed, 107, &dims, n / 10 + 1, |d, g| {
        let rho = state(d, d, g)?;
        let sigmas = random_hermitian(d, g).eigenvalues();
        let perm = vprime_maximizer(rho.eigenvalues(), &sigmas);
        let paired: Vec<f64> = perm.iter().map(|&i| sigmas[i]).collect();
        let diag = DensityMatrix::diagonal(rho.eigenvalues())?;
        let direct = gap_prime(&diag, &Observable::diagonal(&paired))?;
        Ok(rel(max_vprime_over_spectrum(rho.eigenvalues(), &sigmas)?, direct))
    })?, 1e-12);
    Ok(r.checks)
}

fn averages_suite(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let dims = cfg.dims_or(&[2, 3, 5]);
    let (seed, n) = (cfg.seed, cfg.cases);
    let mut r = Recorder::new(Suite::Averages);

    let jobs: Vec<(usize, usize)> = dims.iter().flat_map(|&d| (0..cfg.states).map(move |i| (d, i))).collect();
    let reports: Vec<_> = jobs
        .iter()
        .map(|&(d, i)| {
            let mut g = case_rng(seed, 201, (d * 1_000_003 + i) as u64);
            let rank = d - i % d;
            let rho = state(d, rank, &mut g)?;
            average_all(&rho, cfg.samples, seed.wrapping_add((d * 1_000_003 + i) as u64))
        })
        .collect::<Result<_>>()?;
    let worst = |pick: fn(&crate::averages::AllAverages<f64>) -> Option<AverageReport<f64>>| {
        let zs: Vec<f64> = reports.iter().filter_map(|a| pick(a).map(|x| z_score(&x))).collect();
        (zs.len(), zs.into_iter().fold(0.0, f64::max))
    };
    r.at_most("avg variance: analytic vs Monte Carlo (standard errors)", worst(|a| Some(a.variance)), 5.0);
    r.at_most("avg QFI: analytic vs Monte Carlo (standard errors)", worst(|a| Some(a.qfi)), 5.0);
    r.at_most("avg gap: analytic vs Monte Carlo (standard errors)", worst(|a| Some(a.gap)), 5.0);
    r.at_most("avg arithmetic-mean information: analytic vs Monte Carlo", worst(|a| a.qfi_math), 5.0);
    r.at_most("avg KMB information: analytic vs Monte Carlo", worst(|a| a.qfi_kmb), 5.0);

    let elements = dims
        .iter()
        .map(|&d| element_averages(&GeneratorBasis::<f64>::gell_mann(d)?, cfg.samples, seed.wrapping_add(d as u64)))
        .collect::<Result<Vec<_>>>()?;
    let worst_el = |pick: fn(&crate::averages::ElementAverages<f64>) -> Option<AverageReport<f64>>| {
        let zs: Vec<f64> = elements.iter().filter_map(|e| pick(e).map(|x| z_score(&x))).collect();
        (zs.len(), zs.into_iter().fold(0.0, f64::max))
    };
    r.at_most("avg |A_12|^2 = 2/N_g", worst_el(|e| Some(e.offdiag_12)), 5.0);
    r.at_most("avg |A_13|^2 = 2/N_g", worst_el(|e| e.offdiag_13), 5.0);
    r.at_most("avg |A_11|^2 = (2/N_g)(1 - 1/d)", worst_el(|e| Some(e.diag_11)), 5.0);
    r.at_most("avg |A_22|^2 = (2/N_g)(1 - 1/d)", worst_el(|e| Some(e.diag_22)), 5.0);
    r.at_most("d|A_11|^2 + d(d-1)|A_12|^2 averages to Tr A^2", worst_el(|e| Some(e.aggregate)), 5.0);

    r.at_most("avg variance = avg QFI/4 + avg gap", sweep(seed, 202, &dims, n, |d, g| {
        let l = random_state(d, g)?.eigenvalues().to_vec();
        Ok((avg_variance_analytic(&l) - avg_qfi_analytic(&l) / 4.0 - avg_gap_analytic(&l)).abs())
    })?, 1e-12);
    r.at_most("Tr C / N_g equals the analytic avg variance", sweep(seed, 203, &dims, n / 10 + 1, |d, g| {
        let rho = random_state(d, g)?;
        let c = covariance_matrix(&rho, &GeneratorBasis::gell_mann(d)?)?;
        Ok(rel(c.trace() / generator_count(d) as f64, avg_variance_analytic(rho.eigenvalues())))
    })?, 1e-10);
    r.at_most("Tr F / N_g equals the analytic avg QFI", sweep(seed, 204, &dims, n / 10 + 1, |d, g| {
        let rho = random_state(d, g)?;
        let f = fisher_matrix(&rho, &GeneratorBasis::gell_mann(d)?)?;
        Ok(rel(f.trace() / generator_count(d) as f64, avg_qfi_analytic(rho.eigenvalues())))
    })?, 1e-10);
    r.at_most("4C - F is positive semidefinite (max of -eigenvalue)", sweep(seed, 205, &dims, n / 10 + 1, |d, g| {
        let rho = random_state(d, g)?;
        let b = GeneratorBasis::gell_mann(d)?;
        let m = covariance_matrix(&rho, &b)? * 4.0 - fisher_matrix(&rho, &b)?;
        Ok(-SymmetricEigen::new(m).eigenvalues.min())
    })?, 1e-10);
    r.at_most("completely mixed state: avg arithmetic-mean information = 2d", sweep(seed, 206, &dims, 1, |d, _| {
        Ok((avg_qfi_math_analytic(&vec![1.0 / d as f64; d])? - 2.0 * d as f64).abs())
    })?, 1e-10);
    r.at_most("completely mixed state: avg KMB information = 2d", sweep(seed, 207, &dims, 1, |d, _| {
        let l = vec![1.0 / d as f64; d];
        Ok((crate::averages::avg_qfi_kmb_analytic(&l)? - 2.0 * d as f64).abs())
    })?, 1e-10);
    Ok(r.checks)
}

fn landscape_suite(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let seed = cfg.seed;
    let small = cfg.dims_or(&[2, 3, 4]);
    let family: Vec<usize> = cfg.dims.clone().unwrap_or_else(|| (3..=25).collect()).into_iter().filter(|&d| d >= 3).collect();
    let mut r = Recorder::new(Suite::Landscape);

    r.at_most("1 <= H <= d and 1 <= exp S <= d", sweep(seed, 301, &small, cfg.cases, |d, g| {
        let l = random_state(d, g)?.eigenvalues().to_vec();
        let (h, e) = (harmonic_purity(&l), von_neumann(&l).exp());
        let df = d as f64;
        Ok((1.0 - h).nan_max(h - df).nan_max(1.0 - e).nan_max(e - df))
    })?, 1e-12);
    r.at_least("log-log slope of |H - exp S| near the uniform spectrum", sweep(seed, 302, &[3, 10], 1, |d, g| {
        let mut v: Vec<f64> = (0..d).map(|_| g.gen_range(-1.0..1.0)).collect();
        let mean = v.iter().sum::<f64>() / d as f64;
        v.iter_mut().for_each(|x| *x -= mean);
        let eps: Vec<f64> = (0..6).map(|i| 0.2 / d as f64 * 0.5f64.powi(i)).collect();
        Ok(-loglog_slope(&h_exp_s_profile(&v, &eps)?))
    }).map(|(c, w)| (c, -w))?, 2.5);

    let grid_errors = |mean: MonotoneMean| {
        sweep(seed, 303, &family, 1, move |d, _| {
            let mut worst = 0.0f64;
            for l in interior_grid::<f64>(d, 50).into_iter().chain([1.0 / d as f64]) {
                let fam = WhiteNoiseFamily::new(d, l)?;
                let direct = crate::averages::avg_fisher_analytic(&fam.eigenvalues(), mean)?;
                worst = worst.nan_max(rel(fam.avg_fisher(mean), direct));
            }
            Ok(worst)
        })
    };
    r.at_most("white-noise closed form (arithmetic mean) vs spectral sum", grid_errors(MonotoneMean::Arithmetic)?, 1e-8);
    r.at_most("white-noise closed form (logarithmic mean) vs spectral sum", grid_errors(MonotoneMean::Logarithmic)?, 1e-8);
    r.at_most("white-noise curve ends at (d, 2d)", sweep(seed, 304, &family, 1, |d, _| {
        let fam = WhiteNoiseFamily::new(d, 1.0 / d as f64)?;
        let df = d as f64;
        Ok((fam.exp_entropy() - df).abs().nan_max((fam.avg_fisher(MonotoneMean::Arithmetic) - 2.0 * df).abs()))
    })?, 1e-10);

    let hessians = family
        .par_iter()
        .map(|&d| {
            interior_grid::<f64>(d, 50)
                .into_iter()
                .map(|l| Ok((hessian_report(d, l)?, lagrange_stationarity(d, l)?)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let all: Vec<_> = hessians.iter().flatten().collect();
    let count = all.len();
    r.at_least("reduced Hessian minimum eigenvalue on the white-noise family", (count, all.iter().map(|h| h.0.min_eigenvalue).fold(f64::INFINITY, f64::nan_min)), -1e-8);
    r.at_most("analytic vs finite-difference Hessian (relative)", (count, all.iter().map(|h| h.0.fd_relative_error).fold(0.0, f64::max)), 1e-5);
    r.at_most("Lagrange tangent residual (relative)", (count, all.iter().map(|h| h.1.relative_residual()).fold(0.0, f64::max)), 1e-8);

    let kmb = kmb_sweep(seed, &small, cfg.cases.min(100))?;
    r.at_most("relative-entropy second derivative vs KMB information", (kmb.cases, kmb.worst_error), 1e-4);
    r.at_most("halving the step divides the summed error by 4 (|ratio - 4|)", (kmb.cases, kmb.worst_ratio_deviation), 0.5);
    r.at_most("relative entropy is non-negative and vanishes on the diagonal", sweep(seed, 305, &small, cfg.cases, |d, g| {
        let (x, y) = (state(d, d, g)?, state(d, d, g)?);
        Ok((-relative_entropy(&x, &y)?).nan_max(relative_entropy(&x, &x)?.abs()))
    })?, 1e-12);
    r.at_most("random spectra stay above the white-noise curve at equal exp S", sweep(seed, 306, &small, cfg.cases, |d, g| {
        let l = state(d, d, g)?.eigenvalues().to_vec();
        let e = von_neumann(&l).exp();
        if e <= 1.0 + 1e-9 {
            return Ok(f64::NEG_INFINITY);
        }
        let fam = WhiteNoiseFamily::new(d, lambda_for_exp_entropy(d, e)?)?;
        let floor = fam.avg_fisher(MonotoneMean::Arithmetic);
        Ok((floor - avg_qfi_math_analytic(&l)?) / floor)
    })?, 1e-9);
    let probes = [(3usize, 2.0f64), (4, 2.5), (5, 3.0)]
        .iter()
        .enumerate()
        .map(|(i, &(d, t))| Ok(global_min_probe(d, t, 20, seed.wrapping_add(i as u64))?.margin()))
        .collect::<Result<Vec<f64>>>()?;
    r.at_least("multi-start search does not beat the white-noise value", (probes.len(), probes.iter().copied().fold(f64::INFINITY, f64::nan_min)), -1e-6);
    Ok(r.checks)
}

/// Worst accuracy and step-halving behaviour of the finite-difference KMB
/// check.
pub struct KmbSweep {
    pub cases: usize,
    pub worst_error: f64,
    /// Worst `|Σ err(h) / Σ err(h/2) − 4|` over dimensions.
    pub worst_ratio_deviation: f64,
    /// Pairs whose own ratio is off by more than 0.5, and their largest
    /// error at `h`. These are pairs whose `h²` coefficient nearly cancels,
    /// leaving an error far below the typical one.
    pub off_ratio_pairs: usize,
    pub off_ratio_max_error: f64,
}

/// Step used for the KMB check: `1e-2 · λ_min / ‖A‖`.
pub fn kmb_step(rho: &DensityMatrix<f64>, a: &Observable<f64>) -> f64 {
    1e-2 * rho.smallest_eigenvalue() / a.max_eigenvalue_of_square().sqrt()
}

/// `cases` random full-rank pairs per dimension, each evaluated at `h` and
/// `h/2`. The halving ratio is taken on the summed errors per dimension:
/// a pair whose leading coefficient nearly cancels has an error at the
/// rounding floor and a meaningless ratio of its own.
pub fn kmb_sweep(seed: u64, dims: &[usize], cases: usize) -> Result<KmbSweep> {
    let mut worst_error = 0.0f64;
    let mut worst_ratio_deviation = 0.0f64;
    let (mut off_ratio_pairs, mut off_ratio_max_error) = (0, 0.0f64);
    for &d in dims {
        let pairs = (0..cases)
            .into_par_iter()
            .map(|i| {
                let mut g = case_rng(seed, 350, (d * 1_000_003 + i) as u64);
                let rho = state(d, d, &mut g)?;
                let a = traceless(random_hermitian(d, &mut g));
                let h = kmb_step(&rho, &a);
                let full = kmb_second_derivative_check(&rho, &a, h)?.relative_error();
                let half = kmb_second_derivative_check(&rho, &a, h / 2.0)?.relative_error();
                Ok((full, half))
            })
            .collect::<Result<Vec<_>>>()?;
        let (mut sf, mut sh) = (0.0, 0.0);
        for (full, half) in pairs {
            worst_error = worst_error.nan_max(full);
            (sf, sh) = (sf + full, sh + half);
            if (full / half - 4.0).abs() > 0.5 {
                off_ratio_pairs += 1;
                off_ratio_max_error = off_ratio_max_error.nan_max(full);
            }
        }
        worst_ratio_deviation = worst_ratio_deviation.nan_max((sf / sh - 4.0).abs());
    }
    Ok(KmbSweep { cases: dims.len() * cases, worst_error, worst_ratio_deviation, off_ratio_pairs, off_ratio_max_error })
}

fn spin_suite(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let (seed, n) = (cfg.seed, cfg.cases);
    let registers: Vec<usize> = (2..=8).collect();
    let mut r = Recorder::new(Suite::Spin);

    r.at_most("noisy GHZ: F_Q/N^2 = 2 Tr rho^2 - 1", sweep(seed, 401, &registers, 1, |q, _| {
        let mut worst = 0.0f64;
        for k in 0..=20 {
            let s = GhzSubspaceState::noisy_ghz(q, k as f64 / 20.0)?;
            let rel_ = ghz_purity_relation(&s)?;
            worst = worst.nan_max((rel_.lhs - noisy_ghz_rhs(s.purity())).abs()).nan_max((rel_.lhs - rel_.rhs).abs());
        }
        Ok(worst)
    })?, 1e-9);
    r.at_most("GHZ-subspace states: F_Q/N^2 = 2[Tr rho^2 - P0^2 - P1^2]", sweep(seed, 402, &[2, 3, 4, 5], n / 10 + 1, |q, g| {
        let rank = g.gen_range(1..=2);
        let s = GhzSubspaceState::new(q, state(2, rank, g)?)?;
        let rel_ = ghz_purity_relation(&s)?;
        Ok((rel_.lhs - rel_.rhs).abs())
    })?, 1e-9);
    r.at_most("GHZ-subspace states saturate the linear-entropy bound with J_z", sweep(seed, 403, &[2, 3, 4, 5], n / 10 + 1, |q, g| {
        let rank = g.gen_range(1..=2);
        let s = GhzSubspaceState::new(q, state(2, rank, g)?)?;
        let b = ghz_purity_relation(&s)?.linear_bound;
        Ok((b.gap - b.bound).abs())
    })?, 1e-9);
    r.at_most("fidelity bound N^2 (1 - 2F)^2 <= F_Q", sweep(seed, 404, &[2, 3, 4], n, |q, g| {
        let dim = 1 << q;
        let noise = state(dim, g.gen_range(1..=dim), g)?;
        let ghz = DensityMatrix::pure(&ghz_vector(q)?)?;
        let rho = ghz.mix(&noise, g.gen())?;
        let f = fidelity_bound(&rho, q)?;
        Ok(f.bound - f.qfi)
    })?, 1e-9);
    r.at_most("separable states: F_Q <= N", sweep(seed, 405, &[2, 3, 4, 5, 6], n, |q, g| {
        let terms = g.gen_range(1..=4);
        let axis = Axis::ALL[g.gen_range(0..3)];
        let rep = shot_noise_check(&random_product_mixture::<f64, _>(q, terms, g), axis)?;
        Ok(rep.qfi - q as f64)
    })?, 1e-9);
    r.at_most("|+>^N with J_z has F_Q = N", sweep(seed, 406, &registers, 1, |q, _| {
        Ok((shot_noise_check(&plus_product::<f64>(q), Axis::Z)?.qfi - q as f64).abs())
    })?, 1e-9);
    r.at_most("pure GHZ with J_z has F_Q = N^2", sweep(seed, 407, &registers, 1, |q, _| {
        let rho = DensityMatrix::pure(&ghz_vector(q)?)?;
        let j = collective_operator::<f64>(q, Axis::Z)?.operator;
        Ok((qfi(&rho, &j)? - (q * q) as f64).abs())
    })?, 1e-9);
    r.at_most("Heisenberg limit F_Q <= N^2 on random register states", sweep(seed, 408, &[2, 3, 4], n / 5 + 1, |q, g| {
        let dim = 1 << q;
        let rho = state(dim, g.gen_range(1..=dim), g)?;
        let j = collective_operator::<f64>(q, Axis::ALL[g.gen_range(0..3)])?.operator;
        Ok(qfi(&rho, &j)? - (q * q) as f64)
    })?, 1e-9);
    Ok(r.checks)
}
