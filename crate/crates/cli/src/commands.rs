use std::path::Path;

use qfi_lab::averages::{average_all, AverageReport};
use qfi_lab::bounds::{bound_h_times_sigma, bound_linear_entropy, rank2_gap_identity, BoundReport};
use qfi_lab::hermitian::DensityMatrix;
use qfi_lab::landscape::{
    hessian_report, interior_grid, lagrange_stationarity, region_scan, ScanRecord, WhiteNoiseFamily,
};
use qfi_lab::landscape::entropy::harmonic_purity;
use qfi_lab::metrology::{gap, MonotoneMean};
use qfi_lab::spin::{fidelity_bound, ghz_purity_relation, noisy_ghz_rhs, GhzSubspaceState};
use qfi_lab::verify::{self, Criterion, Suite, VerifyConfig};
use rayon::prelude::*;
use serde_json::json;

use crate::inputs::{parse_op, parse_state};
use crate::output::{num, write_atomic, Csv};
use crate::{CliError, Figure};

pub const MAX_SCATTER_DIM: usize = 10;
pub const MAX_HESSIAN_DIM: usize = 25;

pub struct VerifyArgs {
    pub suite: String,
    pub seed: u64,
    pub dims: Option<Vec<usize>>,
    pub samples: usize,
    pub cases: usize,
    pub states: usize,
    pub out: Option<String>,
}

pub fn verify(args: VerifyArgs, command_line: &str) -> Result<(), CliError> {
    let suite: Suite = args.suite.parse()?;
    let cfg = VerifyConfig { seed: args.seed, dims: args.dims, cases: args.cases, states: args.states, samples: args.samples };
    let checks = verify::run(suite, &cfg)?;
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    println!("{} identities checked, {} failed", checks.len(), failed);
    if let Some(path) = args.out {
        let mut csv = Csv::new(command_line, args.seed, &["suite", "identity", "cases", "observed", "relation", "tolerance", "passed"]);
        for c in &checks {
            let (rel, tol) = match c.criterion {
                Criterion::AtMost(t) => ("<=", t),
                Criterion::AtLeast(t) => (">=", t),
            };
            csv.row(&[
                c.suite.to_string(),
                format!("\"{}\"", c.name),
                c.cases.to_string(),
                num(c.observed),
                rel.into(),
                num(tol),
                c.passed().to_string(),
            ]);
        }
        write_atomic(Path::new(&path), &csv.into_string())?;
    }
    if failed > 0 {
        return Err(CliError::Verification(format!("{failed} of {} identities failed", checks.len())));
    }
    Ok(())
}

pub struct ScanArgs {
    pub figure: Figure,
    pub dims: Vec<usize>,
    pub seed: u64,
    pub n_states: usize,
    pub ranks: Option<Vec<usize>>,
    pub samples: usize,
    pub lambda_grid: usize,
    pub out: String,
}

/// Seed of the per-dimension scan, so adding a dimension does not change
/// the others.
fn dim_seed(seed: u64, d: usize) -> u64 {
    seed.wrapping_add((d as u64) << 32)
}

fn mc_fields(r: &AverageReport<f64>) -> [String; 3] {
    [num(r.analytic), num(r.monte_carlo_mean), num(r.monte_carlo_stderr)]
}

pub fn scan(args: ScanArgs, command_line: &str) -> Result<(), CliError> {
    let limit = if args.figure == Figure::Hessian { MAX_HESSIAN_DIM } else { MAX_SCATTER_DIM };
    if let Some(&d) = args.dims.iter().find(|&&d| d < 2 || d > limit) {
        return Err(CliError::Usage(format!("dimension {d} outside 2..={limit} for {}", args.figure.name())));
    }
    let averaged = matches!(args.figure, Figure::AvgvExps | Figure::FqmathExps | Figure::FqkmbExps);
    if averaged && args.samples < 2 {
        return Err(CliError::Usage("averages need --samples >= 2 for their Monte-Carlo estimate".into()));
    }
    if args.lambda_grid == 0 {
        return Err(CliError::Usage("--lambda-grid must be positive".into()));
    }
    let csv = match args.figure {
        Figure::Hessian => hessian_csv(&args, command_line)?,
        _ => scatter_csv(&args, command_line)?,
    };
    write_atomic(Path::new(&args.out), &csv)
}

fn records(args: &ScanArgs, d: usize, samples: usize, default_ranks: Vec<usize>) -> Result<Vec<ScanRecord<f64>>, CliError> {
    let ranks = args.ranks.clone().unwrap_or(default_ranks);
    Ok(region_scan::<f64>(d, args.n_states, &ranks, dim_seed(args.seed, d), samples)?)
}

fn scatter_csv(args: &ScanArgs, command_line: &str) -> Result<String, CliError> {
    let columns: &[&str] = match args.figure {
        Figure::HExps => &["d", "kind", "rank", "exp_s", "h", "s_vn", "s_lin"],
        Figure::AvgvExps => &[
            "d", "kind", "rank", "exp_s", "h", "s_lin", "avg_variance", "avg_variance_mc", "avg_variance_stderr", "avg_qfi",
            "avg_qfi_mc", "avg_qfi_stderr", "avg_gap", "avg_gap_mc", "avg_gap_stderr",
        ],
        _ => &["d", "kind", "rank", "lambda", "exp_s", "avg", "avg_mc", "avg_stderr"],
    };
    let mut csv = Csv::new(command_line, args.seed, columns);
    for &d in &args.dims {
        let head = |r: &ScanRecord<f64>| vec![d.to_string(), r.kind.name().to_string(), r.rank.to_string()];
        match args.figure {
            Figure::HExps => {
                for r in records(args, d, 0, (1..=d).collect())? {
                    let mut row = head(&r);
                    row.extend([num(r.point.exp_s), num(r.point.h), num(r.point.s_vn), num(r.point.s_lin)]);
                    csv.row(&row);
                }
            }
            Figure::AvgvExps => {
                for r in records(args, d, args.samples, (1..=d).collect())? {
                    let mc = r.monte_carlo.expect("sampling was requested");
                    let mut row = head(&r);
                    row.extend([num(r.point.exp_s), num(r.point.h), num(r.point.s_lin)]);
                    row.extend(mc_fields(&mc.variance));
                    row.extend(mc_fields(&mc.qfi));
                    row.extend(mc_fields(&mc.gap));
                    csv.row(&row);
                }
            }
            Figure::FqmathExps | Figure::FqkmbExps => {
                let kmb = args.figure == Figure::FqkmbExps;
                for r in records(args, d, args.samples, vec![d])? {
                    let Some(mc) = r.monte_carlo.and_then(|m| if kmb { m.qfi_kmb } else { m.qfi_math }) else {
                        continue;
                    };
                    let mut row = head(&r);
                    row.extend([String::new(), num(r.point.exp_s)]);
                    row.extend(mc_fields(&mc));
                    csv.row(&row);
                }
                for row in boundary_rows(args, d, kmb)? {
                    csv.row(&row);
                }
            }
            Figure::Hessian => unreachable!(),
        }
    }
    Ok(csv.into_string())
}

/// White-noise family on the interior grid plus the `Λ = 1/d` endpoint.
fn boundary_rows(args: &ScanArgs, d: usize, kmb: bool) -> Result<Vec<Vec<String>>, CliError> {
    let mut grid = interior_grid::<f64>(d, args.lambda_grid);
    grid.push(1.0 / d as f64);
    let base = dim_seed(args.seed, d).wrapping_add(1 << 31);
    grid.into_par_iter()
        .enumerate()
        .map(|(i, l)| {
            let fam = WhiteNoiseFamily::new(d, l)?;
            let rho = DensityMatrix::diagonal(&fam.eigenvalues())?;
            let all = average_all(&rho, args.samples, base.wrapping_add(i as u64))?;
            let mut mc = if kmb { all.qfi_kmb } else { all.qfi_math }.expect("family members are full rank");
            // the closed form is the reported analytic value
            mc.analytic = fam.avg_fisher(if kmb { MonotoneMean::Logarithmic } else { MonotoneMean::Arithmetic });
            let mut row = vec![d.to_string(), "boundary".to_string(), d.to_string(), num(fam.lambda()), num(fam.exp_entropy())];
            row.extend(mc_fields(&mc));
            Ok(row)
        })
        .collect()
}

fn hessian_csv(args: &ScanArgs, command_line: &str) -> Result<String, CliError> {
    let mut csv = Csv::new(
        command_line,
        args.seed,
        &["d", "lambda", "exp_s", "min_eigenvalue", "fd_relative_error", "lagrange_relative_residual"],
    );
    let blocks = args
        .dims
        .par_iter()
        .map(|&d| {
            interior_grid::<f64>(d, args.lambda_grid)
                .into_iter()
                .map(|l| {
                    let h = hessian_report(d, l)?;
                    let s = lagrange_stationarity(d, l)?;
                    let e = WhiteNoiseFamily::new(d, l)?.exp_entropy();
                    Ok(vec![
                        d.to_string(),
                        num(l),
                        num(e),
                        num(h.min_eigenvalue),
                        num(h.fd_relative_error),
                        num(s.relative_residual()),
                    ])
                })
                .collect::<Result<Vec<_>, CliError>>()
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    for row in blocks.iter().flatten() {
        csv.row(row);
    }
    Ok(csv.into_string())
}

pub fn ghz(n: usize, grid: &[f64], seed: u64, out: &str, command_line: &str) -> Result<(), CliError> {
    if let Some(p) = grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(CliError::Usage(format!("p = {p} outside [0, 1]")));
    }
    let mut csv = Csv::new(command_line, seed, &["p", "purity", "qfi", "qfi_per_n2", "rhs", "fidelity_bound"]);
    for &p in grid {
        let state = GhzSubspaceState::noisy_ghz(n, p)?;
        let relation = ghz_purity_relation(&state)?;
        let bound = fidelity_bound(&state.embed(), n)?;
        let n2 = (n * n) as f64;
        csv.row(&[
            num(p),
            num(state.purity()),
            num(n2 * relation.lhs),
            num(relation.lhs),
            num(noisy_ghz_rhs(state.purity())),
            num(bound.bound),
        ]);
    }
    write_atomic(Path::new(out), &csv.into_string())
}

fn bound_json(b: &BoundReport<f64>) -> serde_json::Value {
    json!({ "value": b.bound, "holds": b.holds, "saturated": b.saturated })
}

pub fn gap_report(state: &str, op: &str, out: Option<&str>) -> Result<(), CliError> {
    let rho = parse_state(state)?;
    let a = parse_op(op, rho.dim())?;
    let g = gap(&rho, &a)?;
    let linear = bound_linear_entropy(&rho, &a)?;
    let harmonic = bound_h_times_sigma(&rho, &a)?;
    let rank2 = rank2_gap_identity(&rho, &a).ok().map(|r| r.formula);
    let report = json!({
        "dim": rho.dim(),
        "rank": rho.rank(),
        "variance": g.variance,
        "qfi": g.qfi,
        "gap": g.gap,
        "linear_entropy": rho.linear_entropy(),
        "h": harmonic_purity(rho.eigenvalues()),
        "sigma_max_sq": a.max_eigenvalue_of_square(),
        "bound_linear_entropy": bound_json(&linear),
        "bound_h_sigma": bound_json(&harmonic),
        "rank2_formula": rank2,
    });
    let text = serde_json::to_string_pretty(&report).expect("report serialises") + "\n";
    match out {
        Some(path) => write_atomic(Path::new(path), &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
