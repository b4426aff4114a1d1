use rayon::prelude::*;

use crate::averages::{
    average_all, avg_gap_analytic, avg_qfi_analytic, avg_qfi_kmb_analytic, avg_qfi_math_analytic, avg_variance_analytic,
    AllAverages,
};
use crate::error::{Error, Result};
use crate::hermitian::{random_density_matrix, substream, DensityMatrix};
use crate::landscape::entropy::SpectrumPoint;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordKind {
    Random,
    /// Marker at `(exp S, H) = (1, 1)`.
    Pure,
    /// Marker at `(d, d)`.
    CompletelyMixed,
}

impl RecordKind {
    pub fn name(self) -> &'static str {
        match self {
            RecordKind::Random => "random",
            RecordKind::Pure => "pure",
            RecordKind::CompletelyMixed => "mixed",
        }
    }
}

/// Entropy coordinates and analytic averages of one state.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRecord<T: Real> {
    pub kind: RecordKind,
    pub rank: usize,
    pub point: SpectrumPoint<T>,
    pub avg_variance: T,
    pub avg_qfi: T,
    pub avg_gap: T,
    /// `None` for singular states.
    pub avg_qfi_math: Option<T>,
    pub avg_qfi_kmb: Option<T>,
    /// Monte-Carlo estimates, present when sampling was requested.
    pub monte_carlo: Option<AllAverages<T>>,
}

impl<T: Real> ScanRecord<T> {
    pub fn of_state(kind: RecordKind, rho: &DensityMatrix<T>, samples: usize, seed: u64) -> Result<Self> {
        let l = rho.eigenvalues();
        Ok(Self {
            kind,
            rank: rho.rank(),
            point: SpectrumPoint::of_state(rho),
            avg_variance: avg_variance_analytic(l),
            avg_qfi: avg_qfi_analytic(l),
            avg_gap: avg_gap_analytic(l),
            avg_qfi_math: avg_qfi_math_analytic(l).ok(),
            avg_qfi_kmb: avg_qfi_kmb_analytic(l).ok(),
            monte_carlo: if samples > 0 { Some(average_all(rho, samples, seed)?) } else { None },
        })
    }
}

/// `n_states` Ginibre states of dimension `d`, state `i` having rank
/// `ranks[i mod len]` and drawn from stream `i` of `seed`, followed by the
/// pure and completely mixed markers. With `samples > 0` each record also
/// carries Monte-Carlo averages.
pub fn region_scan<T: Real>(d: usize, n_states: usize, ranks: &[usize], seed: u64, samples: usize) -> Result<Vec<ScanRecord<T>>> {
    if ranks.is_empty() {
        return Err(Error::InvalidParameter("no ranks given".into()));
    }
    if let Some(&r) = ranks.iter().find(|&&r| r == 0 || r > d) {
        return Err(Error::InvalidRank { rank: r, dim: d });
    }
    let total = n_states as u64;
    let mut records: Vec<ScanRecord<T>> = (0..n_states)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let rho = random_density_matrix::<T, _>(d, ranks[i % ranks.len()], &mut rng)?;
            ScanRecord::of_state(RecordKind::Random, &rho, samples, seed.wrapping_add(i as u64 + 1))
        })
        .collect::<Result<_>>()?;
    let mut pure = vec![T::zero(); d];
    pure[0] = T::one();
    records.push(ScanRecord::of_state(RecordKind::Pure, &DensityMatrix::diagonal(&pure)?, samples, seed.wrapping_add(total + 1))?);
    records.push(ScanRecord::of_state(
        RecordKind::CompletelyMixed,
        &DensityMatrix::maximally_mixed(d),
        samples,
        seed.wrapping_add(total + 2),
    )?);
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_stay_in_the_box() {
        let recs = region_scan::<f64>(3, 40, &[1, 2, 3], 7, 0).unwrap();
        assert_eq!(recs.len(), 42);
        for r in &recs {
            assert!(r.point.h >= 1.0 - 1e-12 && r.point.h <= 3.0 + 1e-12);
            assert!(r.point.exp_s >= 1.0 - 1e-12 && r.point.exp_s <= 3.0 + 1e-12);
            assert_eq!(r.avg_qfi_math.is_some(), r.rank == 3);
        }
        let pure = &recs[40];
        assert_eq!(pure.kind, RecordKind::Pure);
        assert!((pure.point.exp_s - 1.0).abs() < 1e-15 && (pure.point.h - 1.0).abs() < 1e-15);
        let mixed = &recs[41];
        assert!((mixed.point.exp_s - 3.0).abs() < 1e-12 && (mixed.point.h - 3.0).abs() < 1e-12);
        assert!((mixed.avg_qfi_math.unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn scan_is_deterministic() {
        let a = region_scan::<f64>(3, 10, &[2, 3], 5, 200).unwrap();
        let b = region_scan::<f64>(3, 10, &[2, 3], 5, 200).unwrap();
        assert_eq!(a, b);
        assert!(a[0].monte_carlo.is_some());
        assert!(region_scan::<f64>(3, 10, &[4], 5, 0).is_err());
    }
}
