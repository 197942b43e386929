//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use fss_core::error::ErrorKind;
use fss_core::io::{self, AngleUnit};
use fss_core::{
    analysis, frechet, testing, DistributionSpec, FssError, MeanSelection, ModulationOptions,
    RejectionOptions, Sample, TestMethod,
};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "fss", version, about = "Fréchet means and finite sample smeariness on circles and spheres")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Emit JSON where the default output is CSV.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads (defaults to all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Unit {
    Deg,
    Rad,
}

impl From<Unit> for AngleUnit {
    fn from(u: Unit) -> Self {
        match u {
            Unit::Deg => AngleUnit::Degrees,
            Unit::Rad => AngleUnit::Radians,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Selection {
    Auto,
    Global,
    Local,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Quantile,
    Bootstrap,
    Both,
}

impl MethodArg {
    fn methods(self) -> Vec<TestMethod> {
        match self {
            MethodArg::Quantile => vec![TestMethod::Quantile],
            MethodArg::Bootstrap => vec![TestMethod::Bootstrap],
            MethodArg::Both => vec![TestMethod::Quantile, TestMethod::Bootstrap],
        }
    }
}

/// Sample input: angle CSV by default, `x0..xm` columns with `--m`.
#[derive(Debug, Args)]
struct SampleFormat {
    /// Unit of angle files.
    #[arg(long, value_enum, default_value = "rad")]
    unit: Unit,
    /// Read points of S^m from columns x0..xm instead of angles.
    #[arg(long)]
    m: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte Carlo modulation curve of a distribution.
    SimulateModulation {
        /// Distribution spec: a JSON file or inline JSON.
        #[arg(long)]
        dist: String,
        /// Sample sizes: `a,b,c` or `log:a:b:k`.
        #[arg(long)]
        n_grid: String,
        #[arg(long)]
        replicates: usize,
        /// Global or local sample means; auto uses local means when the
        /// population mean is tied.
        #[arg(long, value_enum, default_value = "auto")]
        selection: Selection,
    },
    /// Bootstrap estimate of the modulation of a data set.
    BootstrapModulation {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        format: SampleFormat,
        #[arg(long = "B", alias = "b", default_value_t = 1000)]
        resamples: usize,
    },
    /// Hessian, tangent covariance and limiting modulation.
    Limit {
        #[arg(long)]
        dist: String,
    },
    /// Classify a modulation curve.
    Classify {
        #[arg(long)]
        curve: PathBuf,
        /// Analytic limiting modulation (`inf` for smeary).
        #[arg(long)]
        limit: Option<f64>,
    },
    /// Fit power-law bounds to the first rising regime of a curve.
    FitRegimes {
        #[arg(long)]
        curve: PathBuf,
    },
    /// Two-sample test for equal Fréchet means.
    Test {
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long)]
        sample1: PathBuf,
        #[arg(long)]
        sample2: PathBuf,
        #[command(flatten)]
        format: SampleFormat,
        #[arg(long = "B", alias = "b", default_value_t = 1000)]
        resamples: usize,
    },
    /// Rejection rates against rotations of a base distribution.
    RejectionCurve {
        #[arg(long)]
        dist: String,
        /// Rotation angles: `a,b,c` or `lin:a:b:k`.
        #[arg(long, allow_hyphen_values = true)]
        offsets: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        replicates: usize,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long, default_value_t = 0.05)]
        level: f64,
        #[arg(long = "B", alias = "b", default_value_t = 300)]
        resamples: usize,
    },
    /// Ring mixture whose limiting modulation exceeds a target.
    RingSearch {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        target: f64,
    },
    /// Read an angle CSV and write it back in radians on [-π, π).
    IngestAngles {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        unit: Unit,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(FssError),
}

impl From<FssError> for CliError {
    fn from(e: FssError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(FssError::Io(e))
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `a,b,c` or `log:a:b:k`; the result is sorted and deduplicated.
pub fn parse_n_grid(text: &str) -> Result<Vec<u64>, String> {
    let mut grid: Vec<u64> = if let Some(rest) = text.strip_prefix("log:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected log:a:b:k, got '{text}'"));
        }
        let a: u64 = parts[0].parse().map_err(|_| format!("bad start '{}'", parts[0]))?;
        let b: u64 = parts[1].parse().map_err(|_| format!("bad end '{}'", parts[1]))?;
        let k: usize = parts[2].parse().map_err(|_| format!("bad count '{}'", parts[2]))?;
        if a == 0 || b < a || k == 0 {
            return Err(format!("need 0 < a <= b and k >= 1 in '{text}'"));
        }
        if k == 1 {
            vec![a]
        } else {
            let (la, lb) = ((a as f64).ln(), (b as f64).ln());
            (0..k)
                .map(|i| {
                    let v = (la + (lb - la) * i as f64 / (k - 1) as f64).exp().round() as u64;
                    v.clamp(a, b)
                })
                .collect()
        }
    } else {
        text.split(',')
            .map(|s| s.trim().parse::<u64>().map_err(|_| format!("bad sample size '{s}'")))
            .collect::<Result<_, _>>()?
    };
    if grid.contains(&0) {
        return Err("sample sizes must be positive".into());
    }
    grid.sort_unstable();
    grid.dedup();
    Ok(grid)
}

/// Parses `a,b,c` or `lin:a:b:k`.
pub fn parse_offsets(text: &str) -> Result<Vec<f64>, String> {
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("bad offset '{s}'"))
    };
    if let Some(rest) = text.strip_prefix("lin:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected lin:a:b:k, got '{text}'"));
        }
        let (a, b) = (parse(parts[0])?, parse(parts[1])?);
        let k: usize = parts[2].parse().map_err(|_| format!("bad count '{}'", parts[2]))?;
        if k < 2 {
            return Err("lin: needs k >= 2".into());
        }
        return Ok((0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect());
    }
    text.split(',').map(parse).collect()
}

fn load_spec(arg: &str) -> CliResult<DistributionSpec> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg)?
    };
    Ok(DistributionSpec::from_json(&text)?)
}

fn load_sample(path: &Path, format: &SampleFormat) -> CliResult<Sample> {
    match format.m {
        Some(m) if m >= 2 => Ok(io::ingest_sphere_points(path, m)?),
        _ => Ok(io::ingest_angles(path, format.unit.into())?.sample()),
    }
}

fn emit(global: &Global, bytes: &[u8]) -> CliResult<()> {
    match &global.out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn emit_json(global: &Global, value: &impl serde::Serialize) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(FssError::from)?;
    text.push('\n');
    emit(global, text.as_bytes())
}

fn run(cli: Cli) -> CliResult<()> {
    let g = &cli.global;
    match cli.command {
        Command::SimulateModulation {
            dist,
            n_grid,
            replicates,
            selection,
        } => {
            let spec = load_spec(&dist)?;
            let grid = parse_n_grid(&n_grid).map_err(CliError::Usage)?;
            let options = ModulationOptions {
                selection: match selection {
                    Selection::Auto => MeanSelection::Auto,
                    Selection::Global => MeanSelection::Global,
                    Selection::Local => MeanSelection::Local,
                },
                ..ModulationOptions::default()
            };
            let curve = frechet::monte_carlo_modulation(&spec, &grid, replicates, g.seed, &options)?;
            if g.json {
                emit_json(g, &curve)
            } else {
                let mut buf = Vec::new();
                io::write_curve(&mut buf, &curve)?;
                emit(g, &buf)
            }
        }
        Command::BootstrapModulation {
            input,
            format,
            resamples,
        } => {
            let sample = load_sample(&input, &format)?;
            let result = frechet::bootstrap_modulation(&sample, resamples, g.seed)?;
            emit_json(g, &result)
        }
        Command::Limit { dist } => {
            let spec = load_spec(&dist)?;
            emit_json(g, &analysis::clt_analysis(&spec)?)
        }
        Command::Classify { curve, limit } => {
            let curve = io::read_curve_file(&curve)?;
            emit_json(g, &analysis::classify_fss(&curve, limit)?)
        }
        Command::FitRegimes { curve } => {
            let curve = io::read_curve_file(&curve)?;
            emit_json(g, &analysis::fit_regimes(&curve)?)
        }
        Command::Test {
            method,
            sample1,
            sample2,
            format,
            resamples,
        } => {
            let s1 = load_sample(&sample1, &format)?;
            let s2 = load_sample(&sample2, &format)?;
            let mut reports = Vec::new();
            for m in method.methods() {
                reports.push(match m {
                    TestMethod::Quantile => testing::two_sample_quantile_test(&s1, &s2)?,
                    TestMethod::Bootstrap => testing::two_sample_bootstrap_test(&s1, &s2, resamples, g.seed)?,
                });
            }
            if reports.len() == 1 {
                emit_json(g, &reports[0])
            } else {
                emit_json(g, &reports)
            }
        }
        Command::RejectionCurve {
            dist,
            offsets,
            n,
            replicates,
            method,
            level,
            resamples,
        } => {
            let spec = load_spec(&dist)?;
            let offsets = parse_offsets(&offsets).map_err(CliError::Usage)?;
            let options = RejectionOptions {
                n,
                replicates,
                level,
                resamples,
                seed: g.seed,
            };
            let rows = testing::rejection_curve(&spec, &offsets, &method.methods(), &options)?;
            if g.json {
                emit_json(g, &rows)
            } else {
                let mut buf = Vec::new();
                io::write_rejection_table(&mut buf, &rows)?;
                emit(g, &buf)
            }
        }
        Command::RingSearch { m, target } => emit_json(g, &analysis::ring_mixture_search(m, target)?),
        Command::IngestAngles { input, unit } => {
            let data = io::ingest_angles(&input, unit.into())?;
            if data.calm_skipped > 0 {
                eprintln!("skipped {} calm rows", data.calm_skipped);
            }
            if g.json {
                emit_json(g, &data)
            } else {
                let mut buf = Vec::new();
                io::write_angles(&mut buf, &data.angles)?;
                emit(g, &buf)
            }
        }
    }
}

fn exit_code(e: &CliError) -> i32 {
    match e {
        CliError::Usage(_) => 1,
        CliError::Core(e) => match e.kind() {
            ErrorKind::Data => 2,
            ErrorKind::Numerical => 3,
        },
    }
}

/// Runs the command line `argv` (including the program name) and returns
/// the process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.global.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| run(cli)),
            Err(e) => Err(CliError::Usage(format!("cannot start {t} threads: {e}"))),
        },
        None => run(cli),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let code = exit_code(&e);
            match &e {
                CliError::Usage(msg) => eprintln!("error: {msg}"),
                CliError::Core(err) => eprintln!("error: {err}"),
            }
            code
        }
    }
}
