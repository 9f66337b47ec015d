//! `bpdirac`: spectra, two-photon rates and convergence scans for
//! hydrogen-like ions in a spherical cavity.
//!
//! ```text
//! bpdirac rate --z 1 --channels 2E1 --format table
//! bpdirac spectrum --z 1 --kappas=-1,1 --max-n 4
//! bpdirac scan --z 1 --radius 40 --sizes 24,28,32 --scan-digits 16,34
//! bpdirac cache list --cache-dir .cache
//! ```
//!
//! Exit status: 0 on success, 2 for configuration errors, 3 for numerical
//! failures (including spectrum warnings under `--strict`), 1 for I/O errors.

mod cache;
mod config;
mod verbs;

use std::path::PathBuf;
use std::process::ExitCode;

use bpdirac::basis::BasisKind;
use bpdirac::twophoton::MultipoleChannel;
use clap::{Args, Parser, Subcommand, ValueEnum};

use cache::Cache;
use config::{Format, Nuclear, RestrictionArg, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(bpdirac::Error),
    Strict(String),
    Io(String),
}

impl From<bpdirac::Error> for CliError {
    fn from(e: bpdirac::Error) -> Self {
        use bpdirac::Error::*;
        match e {
            InvalidBasis(_) | Domain { .. } | SelectionRule(_) | Parse(_) => CliError::Config(e.to_string()),
            e => CliError::Numeric(e),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) | CliError::Strict(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numeric(e) => write!(f, "numerical failure: {e}"),
            CliError::Strict(m) => write!(f, "spectrum warning escalated by --strict: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BasisArg {
    Bpoly,
    Bspline,
}

#[derive(Parser)]
#[command(name = "bpdirac", version, about = "Relativistic hydrogen-like spectra and two-photon decay rates")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    #[command(flatten)]
    flags: Overrides,
}

#[derive(Subcommand)]
enum Verb {
    /// Bound energies against the exact point-nucleus values.
    Spectrum,
    /// Two-photon totals per channel and summation restriction.
    Rate,
    /// Convergence sweep over basis size, radius and precision.
    Scan,
    /// Inspect or clear cached spectra.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand)]
enum CacheAction {
    List,
    Evict {
        /// Hash prefixes of the entries to remove.
        hashes: Vec<String>,
        #[arg(long)]
        all: bool,
    },
}

#[derive(Args)]
struct Overrides {
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Nuclear charges, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    z: Option<Vec<f64>>,
    #[arg(long, global = true)]
    basis: Option<BasisArg>,
    /// Polynomial degree, or spline order.
    #[arg(long, global = true)]
    order: Option<usize>,
    /// Number of basis functions.
    #[arg(long, global = true)]
    count: Option<usize>,
    /// Cavity radius in bohr.
    #[arg(long, global = true)]
    radius: Option<f64>,
    #[arg(long, global = true)]
    digits: Option<u32>,
    #[arg(long, global = true, value_delimiter = ',')]
    channels: Option<Vec<MultipoleChannel>>,
    /// `point` or `uniform:R_N`.
    #[arg(long, global = true)]
    nuclear: Option<Nuclear>,
    #[arg(long, global = true)]
    restriction: Option<RestrictionArg>,
    #[arg(long, global = true)]
    quad_points: Option<usize>,
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    kappas: Option<Vec<i32>>,
    #[arg(long, global = true)]
    max_n: Option<u32>,
    /// Scan: basis sizes.
    #[arg(long, global = true, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Scan: cavity radii.
    #[arg(long, global = true, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
    /// Scan: working precisions.
    #[arg(long, global = true, value_delimiter = ',')]
    scan_digits: Option<Vec<u32>>,
    #[arg(long, global = true)]
    format: Option<Format>,
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_name = "DIR")]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    no_cache: bool,
    /// Treat spectrum warnings as failures.
    #[arg(long, global = true)]
    strict: bool,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long, global = true)]
    emit_config: bool,
}

impl Overrides {
    fn apply(&self, cfg: &mut RunConfig) {
        macro_rules! set {
            ($($flag:ident => $($field:ident).+),* $(,)?) => {
                $(if let Some(v) = &self.$flag { cfg.$($field).+ = v.clone().into(); })*
            };
        }
        set! {
            z => z,
            order => order,
            count => count,
            radius => radius,
            digits => digits,
            channels => channels,
            nuclear => nuclear,
            restriction => restriction,
            quad_points => quad_points,
            kappas => kappas,
            max_n => max_n,
            sizes => scan.sizes,
            radii => scan.radii,
            scan_digits => scan.digits,
            format => output.format,
            out => output.out,
            cache_dir => output.cache_dir,
        }
        if let Some(b) = self.basis {
            cfg.basis = match b {
                BasisArg::Bpoly => BasisKind::BPolynomial,
                BasisArg::Bspline => BasisKind::BSpline,
            };
        }
        if self.no_cache {
            cfg.output.cache_dir = None;
        }
        if self.strict {
            cfg.output.strict = true;
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.flags.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cli.flags.apply(&mut cfg);
    if cli.flags.emit_config {
        print!("{}", cfg.to_toml());
        return Ok(());
    }
    let cache = Cache::new(cfg.output.cache_dir.clone());
    let text = match &cli.verb {
        Verb::Cache { action } => {
            let Some(dir) = cache.dir() else {
                return Err(CliError::Config("cache commands need --cache-dir or output.cache_dir".into()));
            };
            match action {
                CacheAction::List => verbs::cache_list(&cache)?,
                CacheAction::Evict { hashes, all } => {
                    if !all && hashes.is_empty() {
                        return Err(CliError::Config("give entry hashes or --all".into()));
                    }
                    let n = cache.evict(hashes, *all)?;
                    format!("evicted {n} entries from {}\n", dir.display())
                }
            }
        }
        verb => {
            cfg.validate()?;
            match verb {
                Verb::Spectrum => verbs::spectrum(&cfg, &cache)?,
                Verb::Rate => verbs::rate(&cfg, &cache)?,
                Verb::Scan => verbs::scan(&cfg, &cache)?,
                Verb::Cache { .. } => unreachable!(),
            }
        }
    };
    match &cfg.output.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bpdirac: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
