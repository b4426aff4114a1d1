//! Entropy coordinates of spectra, the white-noise boundary family, and the
//! first/second-order checks of the `exp S`-constrained minimisation.

pub mod entropy;
pub mod optimize;
pub mod relative;
pub mod scan;
pub mod stationarity;
pub mod white_noise;

pub use entropy::{entropies, h_exp_s_gap, h_exp_s_profile, harmonic_purity, loglog_slope, SpectrumPoint};
pub use optimize::{global_min_probe, ProbeReport};
pub use relative::{kmb_second_derivative_check, relative_entropy, KmbCheck};
pub use scan::{region_scan, RecordKind, ScanRecord};
pub use stationarity::{hessian_min_eig, hessian_report, lagrange_stationarity, HessianReport, Stationarity};
pub use white_noise::{interior_grid, lambda_for_exp_entropy, white_noise_curve, WhiteNoiseFamily, WhiteNoisePoint};
