mod commands;
mod inputs;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Verification(String),
    Library(qfi_lab::Error),
}

impl From<qfi_lab::Error> for CliError {
    fn from(e: qfi_lab::Error) -> Self {
        CliError::Library(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Library(qfi_lab::Error::InternalMismatch { .. }) => 1,
            CliError::Usage(_) | CliError::Library(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Library(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    /// (exp S, H) scatter
    HExps,
    /// averaged variance, QFI and gap against exp S
    AvgvExps,
    /// averaged arithmetic-mean information against exp S, with the white-noise curve
    FqmathExps,
    /// averaged KMB information against exp S, with the white-noise curve
    FqkmbExps,
    /// reduced Hessian spectrum along the white-noise family
    Hessian,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::HExps => "h-exps",
            Figure::AvgvExps => "avgv-exps",
            Figure::FqmathExps => "fqmath-exps",
            Figure::FqkmbExps => "fqkmb-exps",
            Figure::Hessian => "hessian",
        }
    }
}

const SCAN_SCHEMA: &str = "\
CSV schemas (first line is a '#' comment with version, command line and seed;
floats carry 17 significant digits):
  h-exps       d,kind,rank,exp_s,h,s_vn,s_lin
  avgv-exps    d,kind,rank,exp_s,h,s_lin,avg_variance,avg_variance_mc,avg_variance_stderr,
               avg_qfi,avg_qfi_mc,avg_qfi_stderr,avg_gap,avg_gap_mc,avg_gap_stderr
  fqmath-exps  d,kind,rank,lambda,exp_s,avg,avg_mc,avg_stderr
  fqkmb-exps   same as fqmath-exps
  hessian      d,lambda,exp_s,min_eigenvalue,fd_relative_error,lagrange_relative_residual
kind is random, pure, mixed or boundary. Boundary rows are the white-noise
family (1-(d-1)L, L, ..., L) on L = i/((n+1)d), i = 1..n, plus L = 1/d;
lambda is empty on other rows. Scatter scans need full-rank states for the
fq* figures, so their ranks default to d and singular records are dropped.";

#[derive(Parser)]
#[command(name = "qfi-lab", version, about = "Variance, quantum Fisher information and their gap: checks and figure data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run identity and bound sweeps; exits 1 if any check fails.
    Verify {
        /// core, bounds, averages, landscape, spin or all
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Dimensions, e.g. 3, 2..6 or 5,15,25 (defaults depend on the suite)
        #[arg(long = "d")]
        dims: Option<String>,
        /// Monte-Carlo draws per average
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Random cases per dimension in each sweep
        #[arg(long, default_value_t = 500)]
        cases: usize,
        /// States per dimension in the Monte-Carlo gates
        #[arg(long, default_value_t = 5)]
        states: usize,
        /// Also write the report as CSV
        #[arg(long)]
        out: Option<String>,
    },
    /// Write figure data as CSV.
    #[command(after_help = SCAN_SCHEMA)]
    Scan {
        #[arg(value_enum)]
        figure: Figure,
        /// Dimensions, e.g. 3, 2..6 or 5,15,25
        #[arg(long = "d")]
        dims: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Random states per dimension
        #[arg(long, default_value_t = 500)]
        n_states: usize,
        /// Ranks cycled through by the random states, e.g. 1,2,3
        #[arg(long)]
        ranks: Option<String>,
        /// Monte-Carlo draws per averaged state
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Interior points of the white-noise grid
        #[arg(long, default_value_t = 50)]
        lambda_grid: usize,
        #[arg(long)]
        out: String,
    },
    /// Noisy-GHZ purity relation and fidelity bound as CSV:
    /// p,purity,qfi,qfi_per_n2,rhs,fidelity_bound, where fidelity_bound = N^2 (1-2F)^2 bounds qfi from below.
    Ghz {
        /// Number of qubits (at most 8)
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// start:stop:count or a comma list
        #[arg(long, default_value = "0:1:11")]
        p_grid: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: String,
    },
    /// Variance, QFI, gap and both upper bounds for one state and operator, as JSON.
    Gap {
        /// mixed:d=N | pure:random,d=N,seed=S | pure:d=N | diag:p1,p2,.. | file:rho.json
        #[arg(long)]
        state: String,
        /// generator index | sx|sy|sz | jx|jy|jz | pauli:XZ.. | file:a.json
        #[arg(long)]
        op: String,
        /// Write the JSON here instead of stdout
        #[arg(long)]
        out: Option<String>,
    },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("QFI_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("QFI_LAB_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the thread pool: {e}")))
}

fn run(cli: Cli, command_line: &str) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Verify { suite, seed, dims, samples, cases, states, out } => {
            let dims = dims.map(|d| inputs::parse_dims(&d)).transpose()?;
            commands::verify(commands::VerifyArgs { suite, seed, dims, samples, cases, states, out }, command_line)
        }
        Command::Scan { figure, dims, seed, n_states, ranks, samples, lambda_grid, out } => {
            let args = commands::ScanArgs {
                figure,
                dims: inputs::parse_dims(&dims)?,
                seed,
                n_states,
                ranks: ranks.map(|r| inputs::parse_list(&r)).transpose()?,
                samples,
                lambda_grid,
                out,
            };
            commands::scan(args, command_line)
        }
        Command::Ghz { n, p_grid, seed, out } => commands::ghz(n, &inputs::parse_grid(&p_grid)?, seed, &out, command_line),
        Command::Gap { state, op, out } => commands::gap_report(&state, &op, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let command_line = std::iter::once("qfi-lab").chain(args.iter().skip(1).map(String::as_str)).collect::<Vec<_>>().join(" ");
    match run(cli, &command_line) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qfi-lab: {e}");
            ExitCode::from(e.code())
        }
    }
}
