//! `qufti` command-line front end.
//!
//! Exit codes: 0 success, 1 invalid arguments or configuration, 2 numeric or
//! I/O failure, 3 exact computation refused by a size guard.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::Rng;

use crate::error::{Error, Result};
use crate::estimate::{Ensemble, Method};
use crate::experiments::{
    default_radius, fringe_scan, noise_sweep, phi_grid, r_sweep, ScanSpec, DEFAULT_NOISE_LEVELS,
    DEFAULT_NOISE_REALIZATIONS,
};
use crate::output::{r_sweep_records, scan_records, write_records, Format, Record};
use crate::rng::DEFAULT_SEED;

/// Environment variable read for the worker count when `--workers` is absent.
pub const WORKERS_ENV: &str = "QUFTI_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "qufti", version, about = "Phase-space Monte Carlo for quantum Fourier interferometer correlations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact |perm|² (or lower-order correlation) of the QuFTI matrix.
    Exact(PointArgs),
    /// Analytic QuFTI count rate.
    Conjecture(PointArgs),
    /// One sampled estimate at a single phase gradient.
    Estimate(PointArgs),
    /// Correlation versus phase gradient.
    Fringe(ScanArgs),
    /// Fringe scans at several phase-noise levels.
    NoiseSweep(NoiseSweepArgs),
    /// VCP standard error versus contour radius.
    RSweep(RSweepArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Number of modes (one input photon per mode).
    #[arg(long = "M")]
    m: usize,
    /// Correlation order; defaults to M.
    #[arg(long = "N")]
    n: Option<usize>,
    /// vcp, qcp, exact or conjecture; defaults to qcp at maximum order, vcp below.
    #[arg(long)]
    method: Option<String>,
    /// VCP contour radius; defaults to 0.1 at maximum order, 0.8 below.
    #[arg(long)]
    r: Option<f64>,
    /// QCP phase-circle size.
    #[arg(long, default_value_t = crate::qcp::DEFAULT_D)]
    d: u32,
    #[arg(long = "L1", default_value_t = 200)]
    l1: usize,
    #[arg(long = "L2", default_value_t = 10_000)]
    l2: usize,
    /// Standard deviation of the per-mode phase noise, radians.
    #[arg(long = "noise-sigma", default_value_t = 0.0)]
    noise_sigma: f64,
    /// Noise realizations averaged per point.
    #[arg(long)]
    realizations: Option<usize>,
    /// Master seed, or "random" to draw one from system entropy.
    #[arg(long)]
    seed: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or jsonl.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Worker threads; falls back to $QUFTI_WORKERS, then to all cores.
    #[arg(long)]
    workers: Option<usize>,
    /// Fill the wall_time_s column (makes output non-reproducible byte-for-byte).
    #[arg(long = "record-timing")]
    record_timing: bool,
}

#[derive(Debug, Args)]
struct PointArgs {
    #[command(flatten)]
    common: Common,
    /// Phase gradient, radians per mode.
    #[arg(long, allow_hyphen_values = true)]
    phi: f64,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Number of grid points.
    #[arg(long, default_value_t = 41)]
    points: usize,
    /// Lower end of the grid; defaults to −π/M.
    #[arg(long = "phi-min", allow_hyphen_values = true)]
    phi_min: Option<f64>,
    /// Upper end of the grid; defaults to π/M.
    #[arg(long = "phi-max", allow_hyphen_values = true)]
    phi_max: Option<f64>,
    /// Explicit comma-separated grid, overriding points/phi-min/phi-max.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    phis: Option<Vec<f64>>,
}

impl GridArgs {
    fn grid(&self, m: usize) -> Vec<f64> {
        if let Some(phis) = &self.phis {
            return phis.clone();
        }
        let half = std::f64::consts::PI / m.max(1) as f64;
        phi_grid(self.phi_min.unwrap_or(-half), self.phi_max.unwrap_or(half), self.points)
    }
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Debug, Args)]
struct NoiseSweepArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    grid: GridArgs,
    /// Comma-separated noise standard deviations.
    #[arg(long = "noise-levels", value_delimiter = ',')]
    noise_levels: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
struct RSweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, allow_hyphen_values = true)]
    phi: f64,
    /// Comma-separated contour radii.
    #[arg(long = "r-grid", value_delimiter = ',', default_value = "0.1,0.2,0.3,0.5,0.8,1.0")]
    r_grid: Vec<f64>,
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let common = match &cli.command {
        Command::Exact(a) | Command::Conjecture(a) | Command::Estimate(a) => &a.common,
        Command::Fringe(a) => &a.common,
        Command::NoiseSweep(a) => &a.common,
        Command::RSweep(a) => &a.common,
    };
    let workers = match common.workers {
        Some(w) => Some(w),
        None => match std::env::var(WORKERS_ENV) {
            Ok(v) => Some(
                v.parse()
                    .map_err(|_| Error::InvalidSpec(format!("{WORKERS_ENV} must be a positive integer, got '{v}'")))?,
            ),
            Err(_) => None,
        },
    };
    match workers {
        Some(0) => Err(Error::InvalidSpec("worker count must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidSpec(format!("cannot build worker pool: {e}")))?
            .install(|| execute(cli.command)),
        None => execute(cli.command),
    }
}

fn resolve_spec(c: &Common, forced: Option<Method>, default_realizations: usize) -> Result<ScanSpec> {
    let order = c.n.unwrap_or(c.m);
    let method = match (forced, &c.method) {
        (Some(m), _) => m,
        (None, Some(s)) => s.parse()?,
        (None, None) if order == c.m => Method::Qcp,
        (None, None) => Method::Vcp,
    };
    let seed = match c.seed.as_deref() {
        None => DEFAULT_SEED,
        Some("random") => rand::rng().random(),
        Some(s) => s
            .parse()
            .map_err(|_| Error::InvalidSpec(format!("seed must be a 64-bit unsigned integer or 'random', got '{s}'")))?,
    };
    Ok(ScanSpec {
        m: c.m,
        phis: Vec::new(),
        method,
        order,
        outputs: None,
        radius: c.r.unwrap_or_else(|| default_radius(c.m, order)),
        d: c.d,
        l1: c.l1,
        l2: c.l2,
        noise_sigma: c.noise_sigma,
        realizations: c.realizations.unwrap_or(default_realizations),
        seed,
    })
}

fn emit(common: &Common, records: &[Record]) -> Result<()> {
    let format: Format = common.format.parse()?;
    match &common.out {
        Some(path) => {
            let file = std::io::BufWriter::new(std::fs::File::create(path)?);
            write_records(records, format, common.record_timing, file)
        }
        None => write_records(records, format, common.record_timing, std::io::stdout().lock()),
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Exact(a) => print_value(Method::Exact, &a),
        Command::Conjecture(a) => print_value(Method::Conjecture, &a),
        Command::Estimate(a) => {
            let spec = resolve_spec(&a.common, None, 1)?.with_phis(vec![a.phi]);
            emit(&a.common, &scan_records(&fringe_scan(&spec)?))
        }
        Command::Fringe(a) => {
            let spec = resolve_spec(&a.common, None, 1)?;
            let spec = ScanSpec {
                phis: a.grid.grid(spec.m),
                ..spec
            };
            emit(&a.common, &scan_records(&fringe_scan(&spec)?))
        }
        Command::NoiseSweep(a) => {
            let spec = resolve_spec(&a.common, None, DEFAULT_NOISE_REALIZATIONS)?;
            let spec = ScanSpec {
                phis: a.grid.grid(spec.m),
                ..spec
            };
            let levels = a.noise_levels.clone().unwrap_or_else(|| DEFAULT_NOISE_LEVELS.to_vec());
            let records: Vec<Record> = noise_sweep(&spec, &levels)?.iter().flat_map(scan_records).collect();
            emit(&a.common, &records)
        }
        Command::RSweep(a) => {
            let spec = resolve_spec(&a.common, Some(Method::Vcp), 1)?;
            let rows = r_sweep(spec.m, a.phi, spec.order, &a.r_grid, Ensemble::new(spec.l1, spec.l2)?, spec.seed)?;
            emit(&a.common, &r_sweep_records(&spec, a.phi, &rows))
        }
    }
}

/// `exact` and `conjecture` print the bare value; `--out` additionally writes a record.
fn print_value(method: Method, a: &PointArgs) -> Result<()> {
    let spec = resolve_spec(&a.common, Some(method), 1)?.with_phis(vec![a.phi]);
    let result = fringe_scan(&spec)?;
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "{:?}", result.rows[0].q_mean)?;
    if a.common.out.is_some() {
        emit(&a.common, &scan_records(&result))?;
    }
    Ok(())
}
