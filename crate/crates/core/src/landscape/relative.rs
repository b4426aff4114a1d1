use crate::error::{Error, Result};
use crate::hermitian::{DensityMatrix, Observable, ZERO_EIGENVALUE};
use crate::metrology::{qfi_generalized, MonotoneMean};
use crate::scalar::Real;

/// `S(ρ‖σ) = Tr ρ(ln ρ − ln σ)`, with `0 ln 0 = 0`. Fails when `ρ` has weight
/// on the kernel of `σ`.
///
/// Evaluated as `Σ_jk |⟨r_j|s_k⟩|² D(r_j, s_k)` with the non-negative
/// `D(x, y) = x ln(x/y) − x + y`, so nearby states do not lose their
/// `O(‖ρ − σ‖²)` value to cancellation between the two logarithms.
pub fn relative_entropy<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    rho.check_dim(sigma.dim())?;
    let cut = T::tol(ZERO_EIGENVALUE);
    let overlaps = rho.eigenvectors().adjoint() * sigma.eigenvectors();
    let r = rho.eigenvalues();
    let mut total = T::zero();
    for (k, &s) in sigma.eigenvalues().iter().enumerate() {
        let p = |j: usize| overlaps[(j, k)].norm_sqr();
        if s < cut {
            let w = (0..r.len()).fold(T::zero(), |a, j| a + p(j) * r[j]);
            if w > cut {
                return Err(Error::SupportViolation);
            }
            // kernel directions keep their share of Tr ρ ln ρ
            let own = (0..r.len()).filter(|&j| r[j] > T::zero()).fold(T::zero(), |a, j| a + p(j) * r[j] * r[j].ln());
            total += own + s - w;
        } else {
            total += (0..r.len()).fold(T::zero(), |a, j| a + p(j) * bregman(r[j], s));
        }
    }
    Ok(total)
}

/// `x ln(x/y) − x + y` for `y > 0`, accurate when `y ≈ x`.
fn bregman<T: Real>(x: T, y: T) -> T {
    if x <= T::zero() {
        return y;
    }
    let u = (y - x) / x;
    if u.abs() < T::lit(0.1) {
        // u − ln(1 + u) = Σ_{n≥2} (−1)^n uⁿ / n
        let (mut term, mut sum) = (u, T::zero());
        for n in 2..=18 {
            term *= -u;
            sum += term / T::from_count(n);
        }
        x * -sum
    } else {
        x * (x / y).ln() - x + y
    }
}

/// Central second difference of `t ↦ S(ρ‖ρ + tA)` against the KMB information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KmbCheck<T: Real> {
    pub fd_second_derivative: T,
    pub kmb_value: T,
}

impl<T: Real> KmbCheck<T> {
    pub fn relative_error(&self) -> T {
        (self.fd_second_derivative - self.kmb_value).abs() / self.kmb_value.abs()
    }
}

/// `[S(ρ‖ρ+hA) + S(ρ‖ρ−hA)] / h²` next to `F^log(ρ; A)`. Requires a full-rank
/// `ρ`, traceless `A` and a step small enough that `ρ ± hA` stays positive
/// definite. The truncation error is `O(h²)` relative to `λ_min`, so `h`
/// should be chosen as a small multiple of `λ_min / ‖A‖`.
pub fn kmb_second_derivative_check<T: Real>(rho: &DensityMatrix<T>, a: &Observable<T>, h: T) -> Result<KmbCheck<T>> {
    rho.check_dim(a.dim())?;
    if !a.is_traceless() {
        return Err(Error::InvalidParameter(format!("observable has trace {}", a.trace())));
    }
    if h.partial_cmp(&T::zero()).is_none_or(|o| o.is_le()) {
        return Err(Error::InvalidParameter(format!("step {h} must be positive")));
    }
    let kmb_value = qfi_generalized(rho, a, MonotoneMean::Logarithmic)?;
    let shifted = |sign: T| -> Result<DensityMatrix<T>> {
        let m = rho.matrix() + a.matrix().map(|z| z.scale(sign * h));
        match DensityMatrix::new(m) {
            Ok(s) if s.smallest_eigenvalue() >= T::tol(ZERO_EIGENVALUE) => Ok(s),
            Ok(_) | Err(Error::NegativeEigenvalue(_)) => Err(Error::StepTooLarge(h.as_f64())),
            Err(e) => Err(e),
        }
    };
    let (plus, minus) = (shifted(T::one())?, shifted(-T::one())?);
    let fd = (relative_entropy(rho, &plus)? + relative_entropy(rho, &minus)?) / (h * h);
    Ok(KmbCheck { fd_second_derivative: fd, kmb_value })
}
