use crate::averages::{avg_fisher_analytic, generator_count};
use crate::error::{Error, Result};
use crate::landscape::entropy::von_neumann;
use crate::metrology::MonotoneMean;
use crate::scalar::Real;

/// Spectrum `(1 − (d−1)Λ, Λ, …, Λ)`: a pure state mixed with white noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhiteNoiseFamily<T: Real> {
    d: usize,
    lambda: T,
}

impl<T: Real> WhiteNoiseFamily<T> {
    /// Accepts `d ≥ 2` and `Λ ∈ (0, 1/d]`.
    pub fn new(d: usize, lambda: T) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!("white-noise family needs d >= 2, got {d}")));
        }
        let top = T::one() / T::from_count(d);
        if !(lambda > T::zero() && lambda <= top + T::tol(1e-15)) {
            return Err(Error::InvalidParameter(format!("Lambda = {lambda} outside (0, 1/{d}]")));
        }
        Ok(Self { d, lambda: lambda.min(top) })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    /// `1 − (d − 1)Λ`.
    pub fn top(&self) -> T {
        T::one() - T::from_count(self.d - 1) * self.lambda
    }

    /// Descending spectrum.
    pub fn eigenvalues(&self) -> Vec<T> {
        let mut v = vec![self.lambda; self.d];
        v[0] = self.top();
        v
    }

    /// `exp S = λ₁^(−λ₁) Λ^(−(d−1)Λ)`.
    pub fn exp_entropy(&self) -> T {
        let (l1, l) = (self.top(), self.lambda);
        let k = T::from_count(self.d - 1);
        let head = if l1 > T::zero() { l1.powf(-l1) } else { T::one() };
        head * l.powf(-k * l)
    }

    /// Closed form of the averaged Fisher information for mean `m`:
    /// `(2/N_g)[2(d−1)/m(Λ, λ₁) + (d−1)(d−2)/Λ + ((d−1)/d)/λ₁ + (d−1)²/(dΛ)]`.
    pub fn avg_fisher(&self, mean: MonotoneMean) -> T {
        let d = T::from_count(self.d);
        let k = d - T::one();
        let (l1, l) = (self.top(), self.lambda);
        let bracket = T::lit(2.0) * k / mean.evaluate(l, l1)
            + k * (d - T::lit(2.0)) / l
            + (k / d) / l1
            + k * k / (d * l);
        T::lit(2.0) / T::from_count(generator_count(self.d)) * bracket
    }
}

/// One point of the white-noise boundary curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhiteNoisePoint<T: Real> {
    pub lambda: T,
    pub exp_s: T,
    pub avg_qfi_math: T,
    pub avg_qfi_kmb: T,
}

/// Relative agreement required between the closed forms and the direct
/// spectral sums.
pub const CURVE_TOL: f64 = 1e-8;

fn cross_check<T: Real>(what: &'static str, closed: T, direct: T) -> Result<()> {
    let diff = (closed - direct).abs();
    if diff > T::tol(CURVE_TOL) * T::one().max(direct.abs()) {
        return Err(Error::InternalMismatch { what, difference: diff.as_f64() });
    }
    Ok(())
}

/// Evaluates the family on a grid of `Λ`, checking every closed form
/// against the spectral sums on the explicit eigenvalues.
pub fn white_noise_curve<T: Real>(d: usize, grid: &[T]) -> Result<Vec<WhiteNoisePoint<T>>> {
    grid.iter()
        .map(|&lambda| {
            let fam = WhiteNoiseFamily::new(d, lambda)?;
            let spectrum = fam.eigenvalues();
            let point = WhiteNoisePoint {
                lambda: fam.lambda(),
                exp_s: fam.exp_entropy(),
                avg_qfi_math: fam.avg_fisher(MonotoneMean::Arithmetic),
                avg_qfi_kmb: fam.avg_fisher(MonotoneMean::Logarithmic),
            };
            cross_check("exp S closed form", point.exp_s, von_neumann(&spectrum).exp())?;
            cross_check("avg F_Q^math closed form", point.avg_qfi_math, avg_fisher_analytic(&spectrum, MonotoneMean::Arithmetic)?)?;
            cross_check("avg F_Q^KMB closed form", point.avg_qfi_kmb, avg_fisher_analytic(&spectrum, MonotoneMean::Logarithmic)?)?;
            Ok(point)
        })
        .collect()
}

/// `n` evenly spaced values `Λ_i = i / ((n + 1) d)`, `i = 1..n`, strictly
/// inside `(0, 1/d)`.
pub fn interior_grid<T: Real>(d: usize, n: usize) -> Vec<T> {
    let den = T::from_count((n + 1) * d);
    (1..=n).map(|i| T::from_count(i) / den).collect()
}

/// The `Λ` whose family member has `exp S = target`, by bisection
/// (`exp S` increases monotonically on `(0, 1/d]`).
pub fn lambda_for_exp_entropy<T: Real>(d: usize, target: T) -> Result<T> {
    let max = T::from_count(d);
    if d < 2 || !(target > T::one() && target <= max) {
        return Err(Error::TargetOutOfRange { target: target.as_f64(), max: max.as_f64() });
    }
    let mut lo = T::zero();
    let mut hi = T::one() / max;
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if WhiteNoiseFamily::new(d, mid)?.exp_entropy() < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}
