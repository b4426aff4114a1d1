//! Collective spin operators of `N ≤ 8` qubits in the dense `2^N`
//! representation, GHZ-subspace identities and shot-noise checks.

use std::fmt;
use std::str::FromStr;

use nalgebra::Complex;
use rand::Rng;

use crate::bounds::{bound_linear_entropy, BoundReport, BOUND_SLACK};
use crate::error::{Error, Result};
use crate::hermitian::matrix::{kron, projector};
use crate::hermitian::{random_pure_vector, CMatrix, CVector, DensityMatrix, Observable};
use crate::metrology::{gap, qfi};
use crate::scalar::{abs2, Real};

/// Largest register handled densely.
pub const MAX_QUBITS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    fn pauli<T: Real>(self) -> Observable<T> {
        match self {
            Axis::X => Observable::pauli_x(),
            Axis::Y => Observable::pauli_y(),
            Axis::Z => Observable::pauli_z(),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(Error::InvalidParameter(format!("unknown axis {other:?}"))),
        }
    }
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one qubit".into()));
    }
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits(n, MAX_QUBITS));
    }
    Ok(())
}

/// `J_l = ½ Σ_n σ_l⁽ⁿ⁾` on `N` qubits.
#[derive(Debug, Clone)]
pub struct CollectiveSpin<T: Real> {
    pub n_qubits: usize,
    pub axis: Axis,
    pub operator: Observable<T>,
}

pub fn collective_operator<T: Real>(n: usize, axis: Axis) -> Result<CollectiveSpin<T>> {
    check_qubits(n)?;
    let sigma = axis.pauli::<T>().matrix().map(|z| z.scale(T::lit(0.5)));
    let dim = 1usize << n;
    let mut total = CMatrix::<T>::zeros(dim, dim);
    for site in 0..n {
        let mut term = CMatrix::<T>::identity(1, 1);
        for k in 0..n {
            term = if k == site { kron(&term, &sigma) } else { kron(&term, &CMatrix::identity(2, 2)) };
        }
        total += term;
    }
    Ok(CollectiveSpin { n_qubits: n, axis, operator: Observable::new(total)? })
}

/// `(|0…0⟩ + |1…1⟩)/√2`.
pub fn ghz_vector<T: Real>(n: usize) -> Result<CVector<T>> {
    check_qubits(n)?;
    let dim = 1usize << n;
    let amp = Complex::new(T::lit(std::f64::consts::FRAC_1_SQRT_2), T::zero());
    let mut v = CVector::<T>::zeros(dim);
    v[0] = amp;
    v[dim - 1] = amp;
    Ok(v)
}

/// A state on `span{|0…0⟩, |1…1⟩}` stored as its 2×2 block.
#[derive(Debug, Clone, PartialEq)]
pub struct GhzSubspaceState<T: Real> {
    n_qubits: usize,
    block: DensityMatrix<T>,
}

impl<T: Real> GhzSubspaceState<T> {
    pub fn new(n_qubits: usize, block: DensityMatrix<T>) -> Result<Self> {
        check_qubits(n_qubits)?;
        if block.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: block.dim() });
        }
        Ok(Self { n_qubits, block })
    }

    /// `p (P_{0…0} + P_{1…1})/2 + (1 − p)|GHZ⟩⟨GHZ|`.
    pub fn noisy_ghz(n_qubits: usize, p: T) -> Result<Self> {
        if !(p >= T::zero() && p <= T::one()) {
            return Err(Error::InvalidParameter(format!("noise weight {p} outside [0, 1]")));
        }
        let half = T::lit(0.5);
        let c = Complex::new(half * (T::one() - p), T::zero());
        let d = Complex::new(half, T::zero());
        Self::new(n_qubits, DensityMatrix::new(CMatrix::from_row_slice(2, 2, &[d, c, c, d]))?)
    }

    /// Extracts the block from a full-register state, which must have no
    /// weight outside the subspace (`1e-10`).
    pub fn from_register(n_qubits: usize, rho: &DensityMatrix<T>) -> Result<Self> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        rho.check_dim(dim)?;
        let ends = [0, dim - 1];
        let m = rho.matrix();
        let mut outside = T::zero();
        for i in 0..dim {
            for j in 0..dim {
                if !(ends.contains(&i) && ends.contains(&j)) {
                    outside = outside.max(m[(i, j)].norm_sqr().sqrt());
                }
            }
        }
        if outside > T::tol(1e-10) {
            return Err(Error::NotInSubspace(outside.as_f64()));
        }
        let block = CMatrix::from_fn(2, 2, |i, j| m[(ends[i], ends[j])]);
        Self::new(n_qubits, DensityMatrix::new(block)?)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn block(&self) -> &DensityMatrix<T> {
        &self.block
    }

    /// The state on the full `2^N` register.
    pub fn embed(&self) -> DensityMatrix<T> {
        let dim = 1usize << self.n_qubits;
        let ends = [0, dim - 1];
        let b = self.block.matrix();
        let mut m = CMatrix::<T>::zeros(dim, dim);
        for i in 0..2 {
            for j in 0..2 {
                m[(ends[i], ends[j])] = b[(i, j)];
            }
        }
        DensityMatrix::new(m).expect("embedding preserves validity")
    }

    pub fn purity(&self) -> T {
        self.block.purity()
    }

    /// `⟨P_{0…0}⟩` and `⟨P_{1…1}⟩`.
    pub fn populations(&self) -> (T, T) {
        let b = self.block.matrix();
        (b[(0, 0)].re, b[(1, 1)].re)
    }
}

/// Full-register noisy GHZ state.
pub fn noisy_ghz<T: Real>(n: usize, p: T) -> Result<DensityMatrix<T>> {
    Ok(GhzSubspaceState::noisy_ghz(n, p)?.embed())
}

/// `F_Q[ρ, J_z]/N²` against `2[Tr ρ² − ⟨P_{0…0}⟩² − ⟨P_{1…1}⟩²]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhzRelation<T: Real> {
    /// From the QFI on the full register.
    pub lhs: T,
    /// From the 2×2 block entries.
    pub rhs: T,
    /// `|lhs − rhs| ≤ 1e-9`
    pub holds: bool,
    /// Linear-entropy bound with `A = J_z`, on the full register.
    pub linear_bound: BoundReport<T>,
}

pub fn ghz_purity_relation<T: Real>(state: &GhzSubspaceState<T>) -> Result<GhzRelation<T>> {
    let n = state.n_qubits();
    let jz = collective_operator::<T>(n, Axis::Z)?.operator;
    let rho = state.embed();
    let n2 = T::from_count(n * n);
    let lhs = qfi(&rho, &jz)? / n2;
    let (p0, p1) = state.populations();
    let rhs = T::lit(2.0) * (state.purity() - p0 * p0 - p1 * p1);
    Ok(GhzRelation { lhs, rhs, holds: (lhs - rhs).abs() <= T::tol(1e-9), linear_bound: bound_linear_entropy(&rho, &jz)? })
}

/// `2 Tr ρ² − 1`: the relation above along the noisy-GHZ family, where both
/// populations equal ½.
pub fn noisy_ghz_rhs<T: Real>(purity: T) -> T {
    T::lit(2.0) * purity - T::one()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityBound<T: Real> {
    /// `⟨GHZ|ρ|GHZ⟩`
    pub fidelity: T,
    /// `N²(1 − 2F)²` when `F > ½`, else 0.
    pub bound: T,
    pub qfi: T,
    /// `F_Q[ρ, J_z] ≥ bound − 1e-9`
    pub holds: bool,
}

pub fn fidelity_bound<T: Real>(rho: &DensityMatrix<T>, n: usize) -> Result<FidelityBound<T>> {
    let psi = ghz_vector::<T>(n)?;
    rho.check_dim(psi.len())?;
    let fidelity = rho.overlap(&psi);
    let half = T::lit(0.5);
    let bound = if fidelity > half {
        let x = T::one() - T::lit(2.0) * fidelity;
        T::from_count(n * n) * x * x
    } else {
        T::zero()
    };
    let q = qfi(rho, &collective_operator::<T>(n, Axis::Z)?.operator)?;
    Ok(FidelityBound { fidelity, bound, qfi: q, holds: q >= bound - T::tol(BOUND_SLACK) })
}

/// `Σ_k p_k ⊗_n |ψ_kn⟩⟨ψ_kn|`: an explicit separable state.
#[derive(Debug, Clone)]
pub struct ProductMixture<T: Real> {
    pub weights: Vec<T>,
    /// One list of single-qubit vectors per component.
    pub components: Vec<Vec<CVector<T>>>,
}

impl<T: Real> ProductMixture<T> {
    pub fn n_qubits(&self) -> usize {
        self.components.first().map_or(0, |c| c.len())
    }

    pub fn to_density_matrix(&self) -> Result<DensityMatrix<T>> {
        let n = self.n_qubits();
        check_qubits(n)?;
        if self.weights.len() != self.components.len() {
            return Err(Error::DimensionMismatch { expected: self.components.len(), got: self.weights.len() });
        }
        let total = self.weights.iter().fold(T::zero(), |a, &w| a + w);
        let dim = 1usize << n;
        let mut m = CMatrix::<T>::zeros(dim, dim);
        for (&w, comp) in self.weights.iter().zip(&self.components) {
            if comp.len() != n || comp.iter().any(|v| v.len() != 2) {
                return Err(Error::InvalidParameter("component is not a product of qubit states".into()));
            }
            let mut term = CMatrix::<T>::identity(1, 1);
            for v in comp {
                let nv = v.iter().fold(T::zero(), |a, &z| a + abs2(z)).sqrt();
                term = kron(&term, &projector(&v.unscale(nv)));
            }
            m += term.map(|z| z.scale(w / total));
        }
        DensityMatrix::new(m)
    }
}

/// `|+⟩^⊗N`.
pub fn plus_product<T: Real>(n: usize) -> ProductMixture<T> {
    let a = Complex::new(T::lit(std::f64::consts::FRAC_1_SQRT_2), T::zero());
    ProductMixture { weights: vec![T::one()], components: vec![vec![CVector::from_vec(vec![a, a]); n]] }
}

/// Random mixture of `terms` Haar-random product states with flat-Dirichlet
/// weights.
pub fn random_product_mixture<T: Real, R: Rng + ?Sized>(n: usize, terms: usize, rng: &mut R) -> ProductMixture<T> {
    let raw: Vec<f64> = (0..terms).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = raw.iter().sum();
    let components = (0..terms).map(|_| (0..n).map(|_| random_pure_vector::<T, R>(2, rng)).collect()).collect();
    ProductMixture { weights: raw.iter().map(|&w| T::lit(w / s)).collect(), components }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotNoiseReport<T: Real> {
    pub qfi: T,
    pub n_qubits: usize,
    /// `F_Q ≤ N + 1e-9`
    pub separable_bound_holds: bool,
    /// `F_Q ≤ N² + 1e-9`
    pub heisenberg_bound_holds: bool,
}

impl<T: Real> ShotNoiseReport<T> {
    pub fn holds(&self) -> bool {
        self.separable_bound_holds && self.heisenberg_bound_holds
    }
}

pub fn shot_noise_check<T: Real>(state: &ProductMixture<T>, axis: Axis) -> Result<ShotNoiseReport<T>> {
    let n = state.n_qubits();
    let rho = state.to_density_matrix()?;
    let q = qfi(&rho, &collective_operator::<T>(n, axis)?.operator)?;
    let slack = T::tol(BOUND_SLACK);
    Ok(ShotNoiseReport {
        qfi: q,
        n_qubits: n,
        separable_bound_holds: q <= T::from_count(n) + slack,
        heisenberg_bound_holds: q <= T::from_count(n * n) + slack,
    })
}

/// Heisenberg limit `F_Q[ρ, J_l] ≤ N²` for an arbitrary register state.
pub fn heisenberg_limit_holds<T: Real>(rho: &DensityMatrix<T>, n: usize, axis: Axis) -> Result<bool> {
    let q = qfi(rho, &collective_operator::<T>(n, axis)?.operator)?;
    Ok(q <= T::from_count(n * n) + T::tol(BOUND_SLACK))
}

/// One register size in a scaling check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow<T: Real> {
    pub n_qubits: usize,
    pub s_lin: T,
    pub variance: T,
    pub qfi: T,
    /// `Var − F_Q/4 ≤ 2s · N²/4`
    pub gap_bound_holds: bool,
    /// `S_lin ≤ s`
    pub within_budget: bool,
    pub qfi_per_n2: T,
    /// `4 Var/N² − 2s`, from `F_Q/4 ≥ Var − s N²/2`.
    pub qfi_per_n2_lower_bound: T,
}

/// Checks the linear-entropy specialisation `Var(J_l) − F_Q/4 ≤ s N²/2`
/// and reports the implied lower bound on `F_Q/N²` for each state.
pub fn heisenberg_scaling_condition<T: Real>(
    family: &[(usize, DensityMatrix<T>)],
    s: T,
    axis: Axis,
) -> Result<Vec<ScalingRow<T>>> {
    family
        .iter()
        .map(|(n, rho)| {
            let j = collective_operator::<T>(*n, axis)?.operator;
            let g = gap(rho, &j)?;
            let n2 = T::from_count(n * n);
            let s_lin = rho.linear_entropy();
            let slack = T::tol(BOUND_SLACK);
            Ok(ScalingRow {
                n_qubits: *n,
                s_lin,
                variance: g.variance,
                qfi: g.qfi,
                gap_bound_holds: g.gap <= T::lit(2.0) * s * n2 * T::lit(0.25) + slack,
                within_budget: s_lin <= s + slack,
                qfi_per_n2: g.qfi / n2,
                qfi_per_n2_lower_bound: T::lit(4.0) * g.variance / n2 - T::lit(2.0) * s,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::matrix::max_abs;
    use crate::hermitian::rng_from_seed;

    #[test]
    fn collective_operator_examples() {
        let j = collective_operator::<f64>(1, Axis::Z).unwrap();
        assert!(max_abs(&(j.operator.matrix() - Observable::<f64>::pauli_z().matrix().map(|z| z * 0.5))) < 1e-15);
        let j = collective_operator::<f64>(2, Axis::Z).unwrap();
        let expected = Observable::<f64>::diagonal(&[1.0, 0.0, 0.0, -1.0]);
        assert!(max_abs(&(j.operator.matrix() - expected.matrix())) < 1e-15);
        let j = collective_operator::<f64>(4, Axis::Z).unwrap();
        assert!((j.operator.max_eigenvalue_of_square() - 4.0).abs() < 1e-12);
        let ev = collective_operator::<f64>(3, Axis::X).unwrap().operator.eigenvalues();
        assert!((ev[0] - 1.5).abs() < 1e-12 && (ev[7] + 1.5).abs() < 1e-12);
        assert!(matches!(collective_operator::<f64>(9, Axis::Z), Err(Error::TooManyQubits(9, 8))));
    }

    #[test]
    fn noisy_ghz_endpoints() {
        let jz = collective_operator::<f64>(4, Axis::Z).unwrap().operator;
        assert!((qfi(&noisy_ghz(4, 0.0f64).unwrap(), &jz).unwrap() - 16.0).abs() < 1e-9);
        assert!(qfi(&noisy_ghz(4, 1.0f64).unwrap(), &jz).unwrap().abs() < 1e-9);
        let s = GhzSubspaceState::noisy_ghz(4, 0.5f64).unwrap();
        let r = ghz_purity_relation(&s).unwrap();
        assert!(r.holds && (r.lhs - noisy_ghz_rhs(s.purity())).abs() < 1e-9);
        assert!((r.lhs - 0.25).abs() < 1e-9);
    }

    #[test]
    fn pure_ghz_relation_and_saturation() {
        let r = ghz_purity_relation(&GhzSubspaceState::noisy_ghz(3, 0.0f64).unwrap()).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-9 && (r.rhs - 1.0).abs() < 1e-12);
        let mut rng = rng_from_seed(3);
        for _ in 0..10 {
            let block: DensityMatrix<f64> = crate::hermitian::random_density_matrix(2, 2, &mut rng).unwrap();
            let s = GhzSubspaceState::new(3, block).unwrap();
            let r = ghz_purity_relation(&s).unwrap();
            assert!(r.holds, "{r:?}");
            assert!(r.linear_bound.saturated, "{r:?}");
            let back = GhzSubspaceState::from_register(3, &s.embed()).unwrap();
            assert!(max_abs(&(back.block().matrix() - s.block().matrix())) < 1e-15);
        }
        let outside = DensityMatrix::<f64>::maximally_mixed(8);
        assert!(matches!(GhzSubspaceState::from_register(3, &outside), Err(Error::NotInSubspace(_))));
    }

    #[test]
    fn fidelity_examples() {
        let f = fidelity_bound(&noisy_ghz(3, 0.0f64).unwrap(), 3).unwrap();
        assert!((f.fidelity - 1.0).abs() < 1e-12 && (f.bound - 9.0).abs() < 1e-10 && f.holds);
        let f = fidelity_bound(&DensityMatrix::<f64>::maximally_mixed(8), 3).unwrap();
        assert_eq!(f.bound, 0.0);
        assert!(f.holds);
    }

    #[test]
    fn shot_noise_examples() {
        for n in 1..5 {
            let r = shot_noise_check(&plus_product::<f64>(n), Axis::Z).unwrap();
            assert!((r.qfi - n as f64).abs() < 1e-9 && r.holds());
        }
        let mut rng = rng_from_seed(12);
        for _ in 0..20 {
            let m = random_product_mixture::<f64, _>(3, 3, &mut rng);
            assert!(shot_noise_check(&m, Axis::X).unwrap().holds());
        }
        assert!(heisenberg_limit_holds(&noisy_ghz(5, 0.0f64).unwrap(), 5, Axis::Z).unwrap());
    }

    #[test]
    fn scaling_rows() {
        let p = 0.3f64;
        let family: Vec<_> = (2..6).map(|n| (n, noisy_ghz(n, p).unwrap())).collect();
        let s = family.iter().map(|(_, r)| r.linear_entropy()).fold(0.0, f64::max);
        let rows = heisenberg_scaling_condition(&family, s, Axis::Z).unwrap();
        for r in &rows {
            assert!(r.gap_bound_holds && r.within_budget);
            assert!((r.qfi_per_n2 - (1.0 - p) * (1.0 - p)).abs() < 1e-9);
            assert!(r.qfi_per_n2 >= r.qfi_per_n2_lower_bound - 1e-9);
        }
        let pure = vec![(4, noisy_ghz(4, 0.0f64).unwrap())];
        let rows = heisenberg_scaling_condition(&pure, 0.0, Axis::Z).unwrap();
        assert!((rows[0].qfi_per_n2 - 1.0).abs() < 1e-9 && (rows[0].qfi_per_n2_lower_bound - 1.0).abs() < 1e-9);
    }
}
