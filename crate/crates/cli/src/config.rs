use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use isingrect::params::{from_k_eta, Couplings};
use isingrect::partition::{PrecisionPolicy, Route};
use isingrect::Precision;

pub const PRECISION_ENV: &str = "ISINGRECT_PRECISION_BITS";

#[derive(Parser, Debug)]
#[command(name = "isingrect", version, about = "Exact partition functions of the open-boundary Ising rectangle")]
pub struct Cli {
    /// Working precision: 53, 100..=4096, or "auto".
    #[arg(long, global = true, env = PRECISION_ENV, default_value = "53")]
    pub precision_bits: String,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Thread budget for sweeps (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// log Z by the selected routes.
    Z {
        #[command(flatten)]
        sys: SystemArgs,
        /// Route name or "all"; repeatable.
        #[arg(long, default_value = "all")]
        route: Vec<String>,
        /// Record per-route wall time (makes output non-deterministic).
        #[arg(long)]
        timings: bool,
    },
    /// All feasible routes, pairwise deviations and the swap check.
    Compare {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        timings: bool,
    },
    /// Per-mode spectral data.
    Spectrum {
        #[command(flatten)]
        sys: SystemArgs,
    },
    /// Identity residual report; exit 3 on a gating failure.
    Identities {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 16)]
        samples: usize,
    },
    /// Sweep k at fixed η-fraction.
    Scan {
        #[arg(long = "L")]
        l: usize,
        #[arg(long = "M")]
        m: usize,
        #[arg(long = "eta-frac", default_value_t = 1.0)]
        eta_frac: f64,
        #[arg(long = "k-from")]
        k_from: f64,
        #[arg(long = "k-to")]
        k_to: f64,
        #[arg(long, default_value_t = 11)]
        steps: usize,
        #[arg(long, default_value = "all")]
        route: Vec<String>,
    },
    /// Integrand field over one u-plane cell (text format).
    Uplane {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, default_value_t = 1)]
        n: i32,
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SystemArgs {
    #[arg(long = "L")]
    pub l: usize,
    #[arg(long = "M")]
    pub m: usize,
    #[arg(long = "Kh")]
    pub kh: Option<f64>,
    #[arg(long = "Kv")]
    pub kv: Option<f64>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long = "eta-frac")]
    pub eta_frac: Option<f64>,
}

/// A validated run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub couplings: Couplings,
    pub precision: PrecisionPolicy,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

/// A configuration problem, reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

pub fn parse_precision(s: &str) -> Result<PrecisionPolicy, UsageError> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(PrecisionPolicy::Auto);
    }
    let bits: u32 = s.trim().parse().map_err(|_| UsageError(format!("precision must be an integer or 'auto', got '{s}'")))?;
    match bits {
        53 | 100..=4096 => Ok(PrecisionPolicy::Fixed(Precision::from_bits(bits).map_err(|e| UsageError(e.to_string()))?)),
        _ => Err(UsageError(format!("precision_bits must be 53 or in [100, 4096], got {bits}"))),
    }
}

pub fn couplings(sys: &SystemArgs) -> Result<Couplings, UsageError> {
    let direct = sys.kh.is_some() || sys.kv.is_some();
    let param = sys.k.is_some() || sys.eta_frac.is_some();
    match (direct, param) {
        (true, true) => Err(UsageError("give either --Kh/--Kv or --k/--eta-frac, not both".into())),
        (false, false) => Err(UsageError("give --Kh and --Kv, or --k and --eta-frac".into())),
        (true, false) => {
            let (Some(kh), Some(kv)) = (sys.kh, sys.kv) else {
                return Err(UsageError("--Kh and --Kv must be given together".into()));
            };
            Couplings::new(sys.l, sys.m, kh, kv).map_err(|e| UsageError(e.to_string()))
        }
        (false, true) => {
            let (Some(k), Some(fr)) = (sys.k, sys.eta_frac) else {
                return Err(UsageError("--k and --eta-frac must be given together".into()));
            };
            if !(fr > 0.0 && fr <= 1.0) {
                return Err(UsageError(format!("--eta-frac must lie in (0, 1], got {fr}")));
            }
            from_k_eta(k, fr, sys.l, sys.m).map_err(|e| UsageError(e.to_string()))
        }
    }
}

pub fn routes(names: &[String]) -> Result<Vec<Route>, UsageError> {
    let mut out = Vec::new();
    for n in names {
        for part in n.split(',') {
            if part == "all" {
                out.extend(Route::ALL);
            } else {
                out.push(Route::parse(part).ok_or_else(|| UsageError(format!("unknown route '{part}'")))?);
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

impl RunConfig {
    pub fn new(cli: &Cli, sys: &SystemArgs, default_format: Format) -> Result<Self, UsageError> {
        Ok(RunConfig {
            couplings: couplings(sys)?,
            precision: parse_precision(&cli.precision_bits)?,
            seed: cli.seed,
            format: cli.format.unwrap_or(default_format),
            out: cli.out.clone(),
        })
    }
}
