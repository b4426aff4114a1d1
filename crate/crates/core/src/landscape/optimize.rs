//! Multi-start search for the minimum of the averaged linear-family
//! information over spectra with a prescribed `exp S`.
//!
//! Each restart starts from a flat-Dirichlet spectrum, pulls it onto the
//! constraint surface, then runs projected gradient descent: the gradient
//! is projected onto the tangent space of `{Σλ = 1, S = S₀}`, steps are
//! backtracked to keep every `λ ≥ 1e-8`, and each trial point is pulled
//! back onto the entropy level by bisection along a segment. This is a
//! probe, not a certificate.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hermitian::substream;
use crate::landscape::entropy::von_neumann;
use crate::landscape::stationarity::{objective, objective_gradient};
use crate::landscape::white_noise::{lambda_for_exp_entropy, WhiteNoiseFamily};
use crate::metrology::MonotoneMean;
use crate::scalar::Real;

/// Interior barrier: no eigenvalue may fall below this.
pub const BARRIER: f64 = 1e-8;

const MAX_ITERATIONS: usize = 5000;

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport<T: Real> {
    pub best_value: T,
    /// Descending.
    pub best_spectrum: Vec<T>,
    /// Value on the white-noise family at the same `exp S`.
    pub family_value: T,
    pub family_lambda: T,
    /// Final value of every restart, in restart order.
    pub restart_values: Vec<T>,
}

impl<T: Real> ProbeReport<T> {
    /// `best_value − family_value`.
    pub fn margin(&self) -> T {
        self.best_value - self.family_value
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

fn segment<T: Real>(from: &[T], to: &[T], t: T) -> Vec<T> {
    from.iter().zip(to).map(|(&a, &b)| a + t * (b - a)).collect()
}

/// Moves `lambdas` along a segment until `S = s0`. Towards the uniform point
/// when the entropy is too low, towards a near-vertex when too high; `S` is
/// concave on the segment, so the crossing is unique.
fn retract<T: Real>(lambdas: &[T], s0: T) -> Option<Vec<T>> {
    let d = lambdas.len();
    let s = von_neumann(lambdas);
    if (s - s0).abs() <= T::tol(1e-15) {
        return Some(lambdas.to_vec());
    }
    let target: Vec<T> = if s < s0 {
        vec![T::one() / T::from_count(d); d]
    } else {
        let eps = T::lit(BARRIER);
        let top = (0..d).fold(0, |best, i| if lambdas[i] > lambdas[best] { i } else { best });
        let mut v = vec![eps; d];
        v[top] = T::one() - T::from_count(d - 1) * eps;
        if von_neumann(&v) >= s0 {
            return None;
        }
        v
    };
    let rising = s < s0;
    let (mut lo, mut hi) = (T::zero(), T::one());
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        let below = von_neumann(&segment(lambdas, &target, mid)) < s0;
        if below == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(segment(lambdas, &target, hi))
}

/// Gradient of `f` projected onto the tangent space of the constraints.
fn projected_gradient<T: Real>(lambdas: &[T]) -> Vec<T> {
    let d = lambdas.len();
    let mut g = objective_gradient(lambdas);
    let u = vec![T::one() / T::from_count(d).sqrt(); d];
    let mut n: Vec<T> = lambdas.iter().map(|&l| -(l.ln() + T::one())).collect();
    let c = dot(&n, &u);
    n.iter_mut().zip(&u).for_each(|(x, &y)| *x -= c * y);
    let nn = dot(&n, &n).sqrt();
    for basis in [u, n.iter().map(|&x| x / nn).collect::<Vec<T>>()] {
        if basis.iter().all(|x| x.is_finite()) {
            let c = dot(&g, &basis);
            g.iter_mut().zip(&basis).for_each(|(x, &y)| *x -= c * y);
        }
    }
    g
}

fn descend<T: Real>(start: Vec<T>, s0: T) -> (T, Vec<T>) {
    let floor = T::lit(BARRIER);
    let mut x = start;
    let mut fx = objective(&x);
    let mut step = T::lit(1e-3);
    for _ in 0..MAX_ITERATIONS {
        let p = projected_gradient(&x);
        let pn = dot(&p, &p);
        if pn.sqrt() <= T::lit(1e-12) * T::one().max(fx) {
            break;
        }
        let mut accepted = false;
        while step > T::lit(1e-20) {
            let trial: Vec<T> = x.iter().zip(&p).map(|(&a, &g)| a - step * g).collect();
            if trial.iter().all(|&l| l >= floor) {
                if let Some(y) = retract(&trial, s0) {
                    let fy = objective(&y);
                    if fy <= fx - T::lit(1e-4) * step * pn {
                        x = y;
                        fx = fy;
                        accepted = true;
                        break;
                    }
                }
            }
            step *= T::lit(0.5);
        }
        if !accepted {
            break;
        }
        step *= T::lit(2.0);
    }
    (fx, x)
}

fn dirichlet<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<T> {
    let e: Vec<f64> = (0..d).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    let floor = 10.0 * BARRIER;
    let clipped: Vec<f64> = e.iter().map(|&x| (x / s).max(floor)).collect();
    let s: f64 = clipped.iter().sum();
    clipped.iter().map(|&x| T::lit(x / s)).collect()
}

/// Minimises `avg F_Q(ρ; A)` over spectra with `exp S = target` from
/// `restarts` random starting points and compares with the white-noise
/// family. `target ∈ (1, d]`; at `target = d` the only feasible point is
/// uniform.
pub fn global_min_probe<T: Real>(d: usize, target: T, restarts: usize, seed: u64) -> Result<ProbeReport<T>> {
    let family_lambda = lambda_for_exp_entropy(d, target)?;
    let family_value = WhiteNoiseFamily::new(d, family_lambda)?.avg_fisher(MonotoneMean::Arithmetic);
    if restarts == 0 {
        return Err(Error::InvalidParameter("need at least one restart".into()));
    }
    let s0 = target.ln();
    let runs: Vec<(T, Vec<T>)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream(seed, r as u64);
            loop {
                if let Some(x) = retract(&dirichlet::<T, _>(d, &mut rng), s0) {
                    if x.iter().all(|&l| l >= T::lit(BARRIER)) {
                        return descend(x, s0);
                    }
                }
            }
        })
        .collect();
    let restart_values: Vec<T> = runs.iter().map(|r| r.0).collect();
    let best = runs
        .iter()
        .enumerate()
        .fold(0, |b, (i, r)| if r.0 < runs[b].0 { i } else { b });
    let mut best_spectrum = runs[best].1.clone();
    best_spectrum.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok(ProbeReport { best_value: runs[best].0, best_spectrum, family_value, family_lambda, restart_values })
}
