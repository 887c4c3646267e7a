//! Command-line front end: parameter table, figure data, verification suite
//! and single evaluations. All information quantities are in bits per
//! channel use; SNR is given in dB and converted once.

pub mod experiment;
pub mod plot;
pub mod table;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use ssdd_core::infotheory::{jensen_bound_at_rate, mimo_capacity, ssdd_upper_bound};
use ssdd_core::verify::{run_suite, CheckOutcome, SuiteConfig};
use ssdd_core::{builtin, format, Normalization, RateParameters, SnrSpec64};

use experiment::{CodMethod, ExperimentConfig, FIG1_HEADER, FIG2_HEADER, UNITS};
use table::{cmd_table1, TABLE1_HEADER};

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "ssdd",
    version,
    about = "Symbolwise-decodable space-time block code experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Code parameters (M, SSDD rate, Q, T, COD rate) for M = 2..6.
    Table1(OutputArgs),
    /// Upper bound, exact COD MMI and ergodic capacity against M = N.
    Fig1(FigureArgs),
    /// Symbol rate at which the upper bound reaches capacity.
    Fig2(FigureArgs),
    /// Class predicates and channel identities for the built-in codes.
    Verify(VerifyArgs),
    /// Upper bound on SSDD mutual information.
    Bound(BoundArgs),
    /// Ergodic MIMO capacity by Monte Carlo.
    Capacity(CapacityArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormalizationArg {
    Paper,
    PowerConsistent,
}

impl From<NormalizationArg> for Normalization {
    fn from(n: NormalizationArg) -> Self {
        match n {
            NormalizationArg::Paper => Normalization::Paper,
            NormalizationArg::PowerConsistent => Normalization::PowerConsistent,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CodMethodArg {
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// SNR values in dB, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub snr_db: Option<Vec<f64>>,
    /// M = N values, comma separated; `a..b` is an inclusive range.
    #[arg(long, value_delimiter = ',', value_parser = parse_antennas)]
    pub antennas: Option<Vec<Vec<usize>>>,
    /// Monte Carlo trials per estimate; scientific notation accepted.
    #[arg(long, value_parser = parse_trials)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Gauss-Laguerre nodes for exact COD MMI.
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long, value_enum, default_value = "paper")]
    pub normalization: NormalizationArg,
    /// How the COD MMI expectation is evaluated.
    #[arg(long, value_enum, default_value = "quadrature")]
    pub cod_method: CodMethodArg,
    /// Bisection tolerance on the symbol rate.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a gnuplot script for the CSV (requires --out).
    #[arg(long, requires = "out")]
    pub gnuplot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Tolerance for algebraic identities and relative Gram diagonality.
    #[arg(long, default_value_t = ssdd_core::stbc::DEFAULT_TOLERANCE)]
    pub tol: f64,
    /// Channel draws for the Gram expectation check.
    #[arg(long, value_parser = parse_trials, default_value = "100000")]
    pub trials: u64,
    #[arg(long, default_value_t = SuiteConfig::default().seed)]
    pub seed: u64,
    /// Additional dispersion-set files checked for the SSDD property.
    #[arg(long)]
    pub code: Vec<PathBuf>,
    /// Write the check results as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        required = true
    )]
    pub snr_db: Vec<f64>,
    /// Receive antennas.
    #[arg(long)]
    pub n: usize,
    /// Symbol rate, as `Q/T` or a decimal.
    #[arg(long, value_parser = parse_rate)]
    pub rate: RateArg,
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        required = true
    )]
    pub snr_db: Vec<f64>,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_parser = parse_trials, default_value = "100000")]
    pub trials: u64,
    #[arg(long, default_value_t = experiment::DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateArg {
    Exact(Ratio<u32>),
    Decimal(f64),
}

/// Positive integer, also in forms such as `1e6` or `2.5e5`.
pub fn parse_trials(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return if n >= 1 {
            Ok(n)
        } else {
            Err("trials must be at least 1".into())
        };
    }
    let x: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if !((1.0..=9_007_199_254_740_992.0).contains(&x) && x.fract() == 0.0) {
        return Err(format!("trials must be a positive integer, got {s}"));
    }
    Ok(x as u64)
}

pub fn parse_antennas(s: &str) -> Result<Vec<usize>, String> {
    let one = |t: &str| {
        t.trim()
            .parse::<usize>()
            .ok()
            .filter(|&m| m >= 1)
            .ok_or_else(|| format!("antenna counts must be positive integers, got {t}"))
    };
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (one(a)?, one(b)?);
            if a > b {
                return Err(format!("empty antenna range {s}"));
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![one(s)?]),
    }
}

pub fn parse_rate(s: &str) -> Result<RateArg, String> {
    if let Some((q, t)) = s.split_once('/') {
        let q: u32 = q
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in {s}"))?;
        let t: u32 = t
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in {s}"))?;
        if q == 0 || t == 0 {
            return Err("rate terms must be positive".into());
        }
        return Ok(RateArg::Exact(Ratio::new(q, t)));
    }
    if let Ok(n) = s.parse::<u32>() {
        return parse_rate(&format!("{n}/1"));
    }
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(RateArg::Decimal(x)),
        _ => Err(format!(
            "rate must be positive, as Q/T or a decimal, got {s}"
        )),
    }
}

/// An error caused by the command line rather than by the computation.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| anyhow!(UsageError(format!("{e:#}"))))
}

pub fn exit_code_for(err: &anyhow::Error) -> i32 {
    let is_usage = err.chain().any(|cause| {
        cause.is::<UsageError>()
            || matches!(
                cause.downcast_ref::<ssdd_core::Error>(),
                Some(ssdd_core::Error::InvalidArgument(_))
            )
    });
    if is_usage {
        EXIT_USAGE
    } else {
        EXIT_VERIFICATION
    }
}

pub fn csv_string<I, R>(header: &[&str], records: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header)?;
    for r in records {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(
        w.into_inner().map_err(|e| anyhow!("{e}"))?,
    )?)
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => stdout.write_all(text.as_bytes()).context("writing stdout"),
    }
}

fn figure_config(args: &FigureArgs, defaults: ExperimentConfig) -> Result<ExperimentConfig> {
    let config = ExperimentConfig {
        snr_db_list: args.snr_db.clone().unwrap_or(defaults.snr_db_list),
        antenna_range: args
            .antennas
            .clone()
            .map(|v| v.concat())
            .unwrap_or(defaults.antenna_range),
        trials: args.trials.unwrap_or(defaults.trials),
        seed: args.seed.unwrap_or(defaults.seed),
        quadrature_nodes: args.nodes.unwrap_or(defaults.quadrature_nodes),
        normalization: args.normalization.into(),
        cod_method: match args.cod_method {
            CodMethodArg::Quadrature => CodMethod::Quadrature,
            CodMethodArg::MonteCarlo => CodMethod::MonteCarlo,
        },
        tol: args.tol.unwrap_or(defaults.tol),
    };
    usage(config.validate())?;
    Ok(config)
}

fn write_gnuplot(args: &FigureArgs, script: fn(&Path, &Path) -> String) -> Result<()> {
    if let (Some(script_path), Some(csv)) = (&args.gnuplot, &args.out) {
        let png = csv.with_extension("png");
        std::fs::write(script_path, script(csv, &png))
            .with_context(|| format!("writing {}", script_path.display()))?;
    }
    Ok(())
}

fn load_code(path: &Path) -> Result<ssdd_core::DispersionSet64> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("user");
    format::read_set(&text, name).with_context(|| format!("parsing {}", path.display()))
}

fn verify(args: &VerifyArgs, stdout: &mut dyn Write) -> Result<i32> {
    if !(args.tol > 0.0 && args.tol.is_finite()) {
        return Err(anyhow!(UsageError("tolerance must be positive".into())));
    }
    let user = usage(
        args.code
            .iter()
            .map(|p| load_code(p))
            .collect::<Result<Vec<_>>>(),
    )?;
    let config = SuiteConfig {
        tol: args.tol,
        expectation_draws: args.trials.max(2),
        seed: args.seed,
        ..SuiteConfig::default()
    };
    let mut outcomes = run_suite(&builtin::all(), &config)?;
    if !user.is_empty() {
        let config = SuiteConfig {
            require_cod: false,
            seed: ssdd_core::channel::derive_seed(args.seed, 0x05E4),
            ..config
        };
        outcomes.extend(run_suite(&user, &config)?);
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    for o in &outcomes {
        writeln!(
            stdout,
            "{} {} {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.detail
        )?;
    }
    writeln!(
        stdout,
        "{}/{} checks passed",
        outcomes.len() - failed,
        outcomes.len()
    )?;
    if let Some(out) = &args.out {
        let csv = csv_string(
            &["check", "passed", "detail"],
            outcomes
                .iter()
                .map(|o: &CheckOutcome| [o.name.clone(), o.passed.to_string(), o.detail.clone()]),
        )?;
        emit(Some(out), &csv, stdout)?;
    }
    Ok(if failed == 0 {
        EXIT_SUCCESS
    } else {
        EXIT_VERIFICATION
    })
}

fn bound(args: &BoundArgs, stdout: &mut dyn Write) -> Result<()> {
    if args.n == 0 {
        bail!(UsageError("--n must be positive".into()));
    }
    for &db in &args.snr_db {
        let rho = usage(SnrSpec64::from_db(db).map_err(Into::into))?;
        let value = match args.rate {
            RateArg::Exact(r) => {
                let params =
                    usage(RateParameters::new(*r.numer(), *r.denom()).map_err(Into::into))?;
                ssdd_upper_bound(rho, args.n, params).value
            }
            RateArg::Decimal(r) => jensen_bound_at_rate(rho.linear(), args.n, r),
        };
        writeln!(
            stdout,
            "snr_db={db} bound={value} std_error=0 method=closed-form units={UNITS}"
        )?;
    }
    Ok(())
}

fn capacity(args: &CapacityArgs, stdout: &mut dyn Write) -> Result<()> {
    if args.m == 0 || args.n == 0 {
        bail!(UsageError("--m and --n must be positive".into()));
    }
    for &db in &args.snr_db {
        let rho = usage(SnrSpec64::from_db(db).map_err(Into::into))?;
        let c = mimo_capacity(rho, args.m, args.n, args.trials, args.seed)?;
        writeln!(
            stdout,
            "snr_db={db} capacity={} std_error={} trials={} method={} units={UNITS}",
            c.value,
            c.std_error,
            c.trials,
            c.method.as_str()
        )?;
    }
    Ok(())
}

/// Runs a parsed command, writing human-readable output to `stdout`.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Table1(args) => {
            let csv = csv_string(&TABLE1_HEADER, cmd_table1().iter().map(|r| r.record()))?;
            emit(args.out.as_deref(), &csv, stdout)?;
        }
        Command::Fig1(args) => {
            let config = figure_config(args, ExperimentConfig::fig1_default())?;
            let rows = experiment::cmd_fig1(&config)?;
            let csv = csv_string(&FIG1_HEADER, rows.iter().map(|r| r.record()))?;
            emit(args.out.as_deref(), &csv, stdout)?;
            write_gnuplot(args, plot::fig1_script)?;
        }
        Command::Fig2(args) => {
            let config = figure_config(args, ExperimentConfig::fig2_default())?;
            let rows = experiment::cmd_fig2(&config)?;
            let csv = csv_string(&FIG2_HEADER, rows.iter().map(|r| r.record()))?;
            emit(args.out.as_deref(), &csv, stdout)?;
            write_gnuplot(args, plot::fig2_script)?;
        }
        Command::Verify(args) => return verify(args, stdout),
        Command::Bound(args) => bound(args, stdout)?,
        Command::Capacity(args) => capacity(args, stdout)?,
    }
    Ok(EXIT_SUCCESS)
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_SUCCESS
            };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            exit_code_for(&e)
        }
    }
}
