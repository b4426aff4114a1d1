//! Exact rank-two identity and upper bounds on the variance–QFI gap, plus
//! the permutation characterisation of the gap maximum over a unitary orbit.

use nalgebra::Complex;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hermitian::{haar_unitary, CMatrix, CVector, DensityMatrix, Observable};
use crate::landscape::entropy::{harmonic_purity, validate_spectrum};
use crate::metrology::gap;
use crate::scalar::{abs2, Real};

/// Largest `d` accepted by the exhaustive permutation searches.
pub const MAX_PERMUTATION_DIM: usize = 8;

/// Relative tolerance used to flag a bound as saturated.
pub const SATURATION_TOL: f64 = 1e-7;

/// Slack allowed when deciding that a bound holds.
pub const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rank2Identity<T: Real> {
    /// `½ (1 − Tr ρ²)(σ̃₁ − σ̃₂)²`
    pub formula: T,
    /// Eigenvalues of `A` restricted to the range of `ρ`, descending.
    pub sigma_tilde: (T, T),
}

/// Eigenvalues of a 2×2 Hermitian block, descending.
fn eig2<T: Real>(a00: T, a11: T, a01: Complex<T>) -> (T, T) {
    let half = T::lit(0.5);
    let disc = ((a00 - a11) * (a00 - a11) + T::lit(4.0) * abs2(a01)).sqrt();
    ((a00 + a11 + disc) * half, (a00 + a11 - disc) * half)
}

/// For a rank-two state the gap is `½ (1 − Tr ρ²)(σ̃₁ − σ̃₂)²`.
pub fn rank2_gap_identity<T: Real>(rho: &DensityMatrix<T>, a: &Observable<T>) -> Result<Rank2Identity<T>> {
    let rank = rho.rank();
    if rank != 2 {
        return Err(Error::NotRankTwo(rank));
    }
    rho.check_dim(a.dim())?;
    let e = rho.in_eigenbasis(a.matrix());
    let sigma_tilde = eig2(e[(0, 0)].re, e[(1, 1)].re, e[(0, 1)]);
    let spread = sigma_tilde.0 - sigma_tilde.1;
    Ok(Rank2Identity { formula: T::lit(0.5) * rho.linear_entropy() * spread * spread, sigma_tilde })
}

/// `λ|a₁⟩⟨a₁| + (1 − λ)|a₂⟩⟨a₂|`, where `|a_i⟩` are the eigenvectors of `A`
/// restricted to the span of the two orthonormal columns of `subspace`.
pub fn rank2_saturating_state<T: Real>(a: &Observable<T>, subspace: &CMatrix<T>, lambda: T) -> Result<DensityMatrix<T>> {
    let d = a.dim();
    if subspace.nrows() != d || subspace.ncols() != 2 {
        return Err(Error::DimensionMismatch { expected: d, got: subspace.nrows() });
    }
    if !(lambda >= T::zero() && lambda <= T::one()) {
        return Err(Error::InvalidParameter(format!("weight {lambda} outside [0, 1]")));
    }
    let gram = subspace.adjoint() * subspace;
    let err = crate::hermitian::matrix::max_abs(&(gram - CMatrix::<T>::identity(2, 2)));
    if err > T::tol(1e-10) {
        return Err(Error::InvalidParameter(format!("subspace columns are not orthonormal (error {err:e})")));
    }
    let block = subspace.adjoint() * a.matrix() * subspace;
    let (_, vectors) = crate::hermitian::spectral_decompose(&block)?;
    let lifted = subspace * vectors;
    let one = Complex::new(T::one(), T::zero());
    let mut m = CMatrix::<T>::zeros(d, d);
    for (w, j) in [(lambda, 0), (T::one() - lambda, 1)] {
        let v: CVector<T> = lifted.column(j).into_owned();
        m += (&v * v.adjoint()).map(|z| z * one.scale(w));
    }
    DensityMatrix::new(m)
}

/// A gap upper bound and its status.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport<T: Real> {
    pub gap: T,
    pub bound: T,
    /// `gap ≤ bound + 1e-9`
    pub holds: bool,
    /// `|gap − bound| ≤ 1e-7 · max(bound, 1)`
    pub saturated: bool,
}

impl<T: Real> BoundReport<T> {
    fn new(gap: T, bound: T) -> Self {
        let holds = gap <= bound + T::tol(BOUND_SLACK);
        let saturated = (gap - bound).abs() <= T::tol(SATURATION_TOL) * bound.abs().max(T::one());
        Self { gap, bound, holds, saturated }
    }
}

/// `V ≤ σ_max(A²) · H(ρ)`.
pub fn bound_h_times_sigma<T: Real>(rho: &DensityMatrix<T>, a: &Observable<T>) -> Result<BoundReport<T>> {
    let v = gap(rho, a)?.gap;
    Ok(BoundReport::new(v, a.max_eigenvalue_of_square() * harmonic_purity(rho.eigenvalues())))
}

/// `V ≤ 2 S_lin(ρ) σ_max(A²)`.
pub fn bound_linear_entropy<T: Real>(rho: &DensityMatrix<T>, a: &Observable<T>) -> Result<BoundReport<T>> {
    let v = gap(rho, a)?.gap;
    Ok(BoundReport::new(v, T::lit(2.0) * rho.linear_entropy() * a.max_eigenvalue_of_square()))
}

/// Best value of a permutation search and the permutation achieving it;
/// `permutation[k]` is the index of the `σ` paired with `λ_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationMax<T: Real> {
    pub value: T,
    pub permutation: Vec<usize>,
}

fn check_pair<T: Real>(lambdas: &[T], sigmas: &[T]) -> Result<()> {
    validate_spectrum(lambdas)?;
    if sigmas.len() != lambdas.len() {
        return Err(Error::DimensionMismatch { expected: lambdas.len(), got: sigmas.len() });
    }
    if lambdas.len() > MAX_PERMUTATION_DIM {
        return Err(Error::TooLarge(lambdas.len(), MAX_PERMUTATION_DIM));
    }
    Ok(())
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Decodes `index ∈ [0, n!)` into a permutation of `0..n` through the
/// factorial number system, so index order is lexicographic order.
fn nth_permutation(n: usize, mut index: usize, out: &mut Vec<usize>) {
    let mut pool: Vec<usize> = (0..n).collect();
    out.clear();
    for i in (0..n).rev() {
        let f = factorial(i);
        out.push(pool.remove(index / f));
        index %= f;
    }
}

/// `Σ λ_k σ_{i_k}² − (Σ λ_k σ_{i_k})²`.
fn permuted_gap<T: Real>(lambdas: &[T], sigmas: &[T], perm: &[usize]) -> T {
    let (mut second, mut first) = (T::zero(), T::zero());
    for (&l, &i) in lambdas.iter().zip(perm) {
        let s = sigmas[i];
        second += l * s * s;
        first += l * s;
    }
    second - first * first
}

fn better<T: Real>(a: (T, usize), b: (T, usize)) -> (T, usize) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

fn exhaustive<T: Real>(lambdas: &[T], sigmas: &[T], objective: fn(&[T], &[T], &[usize]) -> T) -> PermutationMax<T> {
    let n = lambdas.len();
    let total = factorial(n);
    let chunk = 720usize;
    let chunks = total.div_ceil(chunk);
    let (value, index) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut perm = Vec::with_capacity(n);
            let mut best = (T::lit(f64::NEG_INFINITY), usize::MAX);
            for idx in c * chunk..((c + 1) * chunk).min(total) {
                nth_permutation(n, idx, &mut perm);
                best = better(best, (objective(lambdas, sigmas, &perm), idx));
            }
            best
        })
        .reduce(|| (T::lit(f64::NEG_INFINITY), usize::MAX), better);
    let mut permutation = Vec::with_capacity(n);
    nth_permutation(n, index, &mut permutation);
    PermutationMax { value, permutation }
}

/// `max_π Σ λ_k σ_{π(k)}² − (Σ λ_k σ_{π(k)})²` by exhaustive search over
/// all `d!` permutations (`d ≤ 8`). Ties resolve to the lexicographically
/// smallest permutation.
pub fn max_gap_over_spectrum<T: Real>(lambdas: &[T], sigmas: &[T]) -> Result<PermutationMax<T>> {
    check_pair(lambdas, sigmas)?;
    Ok(exhaustive(lambdas, sigmas, permuted_gap))
}

fn permuted_second_moment<T: Real>(lambdas: &[T], sigmas: &[T], perm: &[usize]) -> T {
    lambdas.iter().zip(perm).fold(T::zero(), |acc, (&l, &i)| acc + l * sigmas[i] * sigmas[i])
}

/// Permutation pairing the largest `λ` with the largest `σ²`.
pub fn vprime_maximizer<T: Real>(lambdas: &[T], sigmas: &[T]) -> Vec<usize> {
    let desc = |v: &[T]| {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[b].partial_cmp(&v[a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
        idx
    };
    let squares: Vec<T> = sigmas.iter().map(|&s| s * s).collect();
    let (lo, so) = (desc(lambdas), desc(&squares));
    let mut perm = vec![0; lambdas.len()];
    for (&k, &i) in lo.iter().zip(&so) {
        perm[k] = i;
    }
    perm
}

/// `max_π Σ λ_k σ_{π(k)}²`, attained by the sorted pairing; the exhaustive
/// search is run as a cross-check.
pub fn max_vprime_over_spectrum<T: Real>(lambdas: &[T], sigmas: &[T]) -> Result<T> {
    check_pair(lambdas, sigmas)?;
    let sorted = permuted_second_moment(lambdas, sigmas, &vprime_maximizer(lambdas, sigmas));
    let brute = exhaustive(lambdas, sigmas, permuted_second_moment).value;
    let scale = sigmas.iter().fold(T::one(), |a, &s| a.max(s * s));
    let diff = (sorted - brute).abs();
    if diff > T::tol(1e-12) * scale {
        return Err(Error::InternalMismatch { what: "sorted pairing vs exhaustive search", difference: diff.as_f64() });
    }
    Ok(sorted)
}

/// Haar sampling of the unitary orbit `UΣU†` against the permutation maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitCheck<T: Real> {
    pub permutation_max: T,
    pub max_sampled: T,
    pub samples: usize,
    /// Every sampled gap stayed below the permutation maximum plus `1e-9`.
    pub holds: bool,
}

/// Samples `gap(diag(λ), U diag(σ) U†)` over Haar-random `U`.
pub fn unitary_orbit_check<T: Real, R: Rng + ?Sized>(
    lambdas: &[T],
    sigmas: &[T],
    samples: usize,
    rng: &mut R,
) -> Result<OrbitCheck<T>> {
    let best = max_gap_over_spectrum(lambdas, sigmas)?;
    let rho = DensityMatrix::diagonal(lambdas)?;
    let sigma = Observable::diagonal(sigmas);
    let mut max_sampled = T::lit(f64::NEG_INFINITY);
    for _ in 0..samples {
        let u = haar_unitary::<T, R>(lambdas.len(), rng);
        max_sampled = max_sampled.max(gap(&rho, &sigma.conjugate_by(&u)?)?.gap);
    }
    Ok(OrbitCheck {
        permutation_max: best.value,
        max_sampled,
        samples,
        holds: max_sampled <= best.value + T::tol(BOUND_SLACK),
    })
}
