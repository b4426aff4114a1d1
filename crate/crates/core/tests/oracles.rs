//! Spectral formulas against routes that never diagonalise the state:
//! a Lyapunov solve for the symmetric logarithmic derivative and a
//! resolvent integral for the KMB information.

use nalgebra::{Complex, DMatrix};
use qfi_lab::hermitian::{random_density_matrix, random_hermitian, substream, CMatrix, DensityMatrix, Observable};
use qfi_lab::metrology::{qfi, qfi_generalized, qfi_math, MonotoneMean};

type C = Complex<f64>;

/// Solves `ρX + Xρ = 2Y` through the Kronecker form of the equation.
fn lyapunov(rho: &CMatrix<f64>, y: &CMatrix<f64>) -> CMatrix<f64> {
    let d = rho.nrows();
    let mut sys = DMatrix::<C>::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let row = i * d + j;
            for k in 0..d {
                sys[(row, k * d + j)] += rho[(i, k)];
                sys[(row, i * d + k)] += rho[(k, j)];
            }
        }
    }
    let rhs = DMatrix::<C>::from_fn(d * d, 1, |r, _| y[(r / d, r % d)] * C::new(2.0, 0.0));
    let x = sys.lu().solve(&rhs).expect("full-rank state");
    CMatrix::from_fn(d, d, |i, j| x[(i * d + j, 0)])
}

/// `Tr ρ L²` with `ρL + Lρ = 2 i[ρ, A]`.
fn sld_qfi(rho: &CMatrix<f64>, a: &CMatrix<f64>) -> f64 {
    let i = C::new(0.0, 1.0);
    let dr = (rho * a - a * rho) * i;
    let l = lyapunov(rho, &dr);
    (rho * &l * &l).trace().re
}

/// `Tr A X` with `ρX + Xρ = 2A`.
fn sld_linear(rho: &CMatrix<f64>, a: &CMatrix<f64>) -> f64 {
    (a * lyapunov(rho, a)).trace().re
}

/// `∫₀^∞ Tr[A (ρ+s)⁻¹ A (ρ+s)⁻¹] ds`, with `s = eᵘ` and the trapezoid rule,
/// which converges geometrically for this smooth, doubly decaying integrand.
fn kmb_integral(rho: &CMatrix<f64>, a: &CMatrix<f64>) -> f64 {
    let d = rho.nrows();
    let h = 0.02;
    let mut total = 0.0;
    let mut u: f64 = -45.0;
    while u <= 45.0 {
        let s = u.exp();
        let shifted = rho + CMatrix::<f64>::identity(d, d) * C::new(s, 0.0);
        let r = shifted.try_inverse().unwrap();
        total += (a * &r * a * &r).trace().re * s * h;
        u += h;
    }
    total
}

fn pair(d: usize, i: u64) -> (DensityMatrix<f64>, Observable<f64>) {
    let mut g = substream(7, d as u64 * 1000 + i);
    let rho = random_density_matrix::<f64, _>(d, d, &mut g).unwrap();
    let a = random_hermitian::<f64, _>(d, &mut g);
    (rho, a)
}

fn traceless(a: &Observable<f64>) -> Observable<f64> {
    a.shifted(-a.trace() / a.dim() as f64)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn qfi_matches_the_symmetric_logarithmic_derivative() {
    for d in 2..=5 {
        for i in 0..20 {
            let (rho, a) = pair(d, i);
            if rho.smallest_eigenvalue() < 1e-4 {
                continue;
            }
            let want = sld_qfi(rho.matrix(), a.matrix());
            assert!(rel(qfi(&rho, &a).unwrap(), want) < 1e-8, "d={d} i={i}");
        }
    }
}

#[test]
fn arithmetic_information_matches_the_lyapunov_solution() {
    for d in 2..=5 {
        for i in 0..20 {
            let (rho, a) = pair(d, i);
            if rho.smallest_eigenvalue() < 1e-4 {
                continue;
            }
            let a = traceless(&a);
            let want = sld_linear(rho.matrix(), a.matrix());
            assert!(rel(qfi_math(&rho, &a).unwrap(), want) < 1e-8, "d={d} i={i}");
            let generic = qfi_generalized(&rho, &a, MonotoneMean::Arithmetic).unwrap();
            assert!(rel(generic, want) < 1e-8);
        }
    }
}

#[test]
fn kmb_information_matches_the_resolvent_integral() {
    for d in 2..=4 {
        for i in 0..6 {
            let (rho, a) = pair(d, i);
            if rho.smallest_eigenvalue() < 1e-3 {
                continue;
            }
            let a = traceless(&a);
            let want = kmb_integral(rho.matrix(), a.matrix());
            let got = qfi_generalized(&rho, &a, MonotoneMean::Logarithmic).unwrap();
            assert!(rel(got, want) < 1e-7, "d={d} i={i}: {got} vs {want}");
        }
    }
}

#[test]
fn ordering_of_the_monotone_family() {
    // a larger mean gives a smaller information
    for d in 2..=5 {
        for i in 0..20 {
            let (rho, a) = pair(d, i);
            if rho.smallest_eigenvalue() < 1e-6 {
                continue;
            }
            let f = |m| qfi_generalized(&rho, &a, m).unwrap();
            let (ari, log, har) = (f(MonotoneMean::Arithmetic), f(MonotoneMean::Logarithmic), f(MonotoneMean::Harmonic));
            assert!(ari <= log * (1.0 + 1e-12) && log <= har * (1.0 + 1e-12));
        }
    }
}

#[test]
fn qubit_closed_forms() {
    // Bloch vector r along z, A = σ_x: F_Q = 4r², zero for the mixed state
    let x = Observable::<f64>::pauli_x();
    for r in [0.0, 0.3, 0.9] {
        let rho = DensityMatrix::diagonal(&[(1.0 + r) / 2.0, (1.0 - r) / 2.0]).unwrap();
        assert!((qfi(&rho, &x).unwrap() - 4.0 * r * r).abs() < 1e-12);
        // linear family: 2 Σ |A_kl|²/(λ_k + λ_l) = 2·2·1/1 = 4
        assert!((qfi_math(&rho, &x).unwrap() - 4.0).abs() < 1e-12);
    }
}
