//! Command-line front end.
//!
//! Every command accepts the six model constants as flags, optionally backed
//! by a `key = value` config file. Results go to CSV (stdout or `--output`),
//! diagnostics to stderr. Exit codes: 0 success, 2 invalid or missing
//! parameters, 3 degenerate or unsupported analysis, 4 runtime failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::analysis::{sweep_tau, SweepRow};
use crate::error::Error;
use crate::model::{classify_regime, equilibria, linearize, ModelParams};
use crate::simulator::{default_dt, simulate, HistoryFunction, Interp, Scheme, SimConfig, Trajectory};
use crate::spectral::{char_delta, hopf_summary_with, HopfSummary, DEFAULT_K_MAX};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "hemodyn", version, about = "Stem-cell delay model: equilibria, Hopf analysis, simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Trivial and positive equilibria.
    Equilibria(Common),
    /// Linearization coefficients and stability regime.
    Linearize(Common),
    /// Evaluate the characteristic function at a complex λ (delay = --tau).
    Chareq {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        lambda_re: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        lambda_im: Option<f64>,
    },
    /// Enumerate purely imaginary crossings (requires tau_min = 0).
    Hopf {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        k_max: Option<usize>,
    },
    /// Integrate from a history and write t,x,z.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Simulate over a grid of delays and compare with the spectral prediction.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long)]
        tau_from: Option<f64>,
        #[arg(long)]
        tau_to: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    beta0: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    n: Option<f64>,
    #[arg(long)]
    tau_min: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    /// `key = value` file with the same keys as the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write CSV here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimArgs {
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    /// `const:<value>`, `xstar:<rel>` (x* scaled by 1 + rel) or `file:<path>`.
    #[arg(long)]
    history: Option<String>,
    /// `augmented` or `quadrature`.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    quad_panels: Option<usize>,
}

/// Where a resolved setting came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Flag,
    Config,
    Default,
}

/// Which command to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Equilibria,
    Linearize,
    Chareq,
    Hopf,
    Simulate,
    Sweep,
}

/// Fully resolved invocation.
#[derive(Debug, Clone)]
pub struct RunPlan {
    pub command: CommandKind,
    pub params: ModelParams,
    pub options: CommandOptions,
    pub output: Option<PathBuf>,
    /// Origin of every resolved key.
    pub sources: BTreeMap<String, Source>,
}

#[derive(Debug, Clone)]
pub enum CommandOptions {
    None,
    Chareq { lambda: Complex64 },
    Hopf { k_max: usize },
    Simulate { config: SimConfig, history: HistorySource },
    Sweep {
        config: SimConfig,
        history: HistorySource,
        tau_from: f64,
        tau_to: f64,
        steps: usize,
    },
}

/// Parsed `--history` value.
#[derive(Debug, Clone, PartialEq)]
pub enum HistorySource {
    Constant(f64),
    /// `x*·(1 + rel)`, a small displacement from the positive equilibrium.
    NearEquilibrium(f64),
    File(PathBuf),
}

impl FromStr for HistorySource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(v) = s.strip_prefix("const:") {
            v.trim()
                .parse()
                .map(HistorySource::Constant)
                .map_err(|e| format!("bad constant history '{v}': {e}"))
        } else if let Some(v) = s.strip_prefix("xstar:") {
            v.trim()
                .parse()
                .map(HistorySource::NearEquilibrium)
                .map_err(|e| format!("bad relative offset '{v}': {e}"))
        } else if let Some(p) = s.strip_prefix("file:") {
            Ok(HistorySource::File(PathBuf::from(p.trim())))
        } else {
            Err(format!(
                "history must be const:<value>, xstar:<rel> or file:<path>, got '{s}'"
            ))
        }
    }
}

impl HistorySource {
    pub fn load(&self, params: &ModelParams) -> Result<HistoryFunction, Error> {
        match self {
            HistorySource::Constant(v) => Ok(HistoryFunction::constant(*v)),
            HistorySource::NearEquilibrium(rel) => match equilibria(params).positive {
                Some(xs) => Ok(HistoryFunction::constant(xs * (1.0 + rel))),
                None => Err(Error::History(
                    "xstar history needs a positive equilibrium".into(),
                )),
            },
            HistorySource::File(path) => load_history_table(path),
        }
    }
}

/// Two-column `t,x` table; `#` comments and a non-numeric header are skipped.
pub fn load_history_table(path: &Path) -> Result<HistoryFunction, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::History(format!("cannot read {}: {e}", path.display())))?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        let parsed: Option<Vec<f64>> = fields.iter().map(|f| f.parse().ok()).collect();
        match parsed {
            Some(v) if v.len() == 2 => {
                times.push(v[0]);
                values.push(v[1]);
            }
            None if times.is_empty() => continue,
            _ => {
                return Err(Error::History(format!(
                    "{}:{}: expected two numbers",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    HistoryFunction::table(times, values, Interp::CubicHermite)
}

/// Parse a `key = value` config file. Keys accept `-` or `_`.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
        let key = k.trim().replace('_', "-");
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(format!("line {}: unknown key '{}'", i + 1, k.trim()));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

const SIMULATE_HISTORY: &str = "const:1e8";
const SWEEP_HISTORY: &str = "xstar:1e-4";

const KNOWN_KEYS: &[&str] = &[
    "delta", "beta0", "theta", "n", "tau-min", "tau", "dt", "t-end", "history", "scheme",
    "quad-panels", "tau-from", "tau-to", "steps", "lambda-re", "lambda-im", "k-max",
];

struct Resolver {
    config: BTreeMap<String, String>,
    sources: BTreeMap<String, Source>,
}

impl Resolver {
    fn pick<T>(&mut self, key: &str, flag: Option<T>, default: Option<T>) -> Result<T, String>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        let (value, source) = if let Some(v) = flag {
            (v, Source::Flag)
        } else if let Some(raw) = self.config.get(key) {
            let v = raw
                .parse()
                .map_err(|e| format!("config key '{key}' = '{raw}': {e}"))?;
            (v, Source::Config)
        } else if let Some(v) = default {
            (v, Source::Default)
        } else {
            return Err(format!("missing required value --{key}"));
        };
        self.sources.insert(key.to_string(), source);
        Ok(value)
    }
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    match s {
        "augmented" => Ok(Scheme::Augmented),
        "quadrature" | "direct-quadrature" => Ok(Scheme::DirectQuadrature),
        other => Err(format!("unknown scheme '{other}' (augmented|quadrature)")),
    }
}

fn resolve_params(r: &mut Resolver, c: &Common) -> Result<ModelParams, String> {
    let d = ModelParams::default();
    let p = ModelParams {
        delta: r.pick("delta", c.delta, Some(d.delta))?,
        beta0: r.pick("beta0", c.beta0, Some(d.beta0))?,
        theta: r.pick("theta", c.theta, Some(d.theta))?,
        n: r.pick("n", c.n, Some(d.n))?,
        tau_min: r.pick("tau-min", c.tau_min, Some(d.tau_min))?,
        tau: r.pick("tau", c.tau, Some(d.tau))?,
    };
    p.validate().map_err(|e| e.to_string())?;
    Ok(p)
}

fn resolve_sim(
    r: &mut Resolver,
    s: &SimArgs,
    params: &ModelParams,
    default_history: &str,
) -> Result<(SimConfig, HistorySource), String> {
    let base = SimConfig::for_params(params);
    let scheme = r.pick("scheme", s.scheme.clone(), Some("augmented".to_string()))?;
    let history = r.pick::<String>("history", s.history.clone(), Some(default_history.into()))?;
    let config = SimConfig {
        dt: r.pick("dt", s.dt, Some(base.dt))?,
        t_end: r.pick("t-end", s.t_end, Some(base.t_end))?,
        scheme: parse_scheme(&scheme)?,
        quad_panels: r.pick("quad-panels", s.quad_panels, Some(base.quad_panels))?,
        interp: Interp::CubicHermite,
    };
    Ok((config, history.parse()?))
}

/// Build a [`RunPlan`] from arguments (first element is the program name).
pub fn resolve<I, T>(args: I) -> Result<RunPlan, ParseFailure>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(ParseFailure::Clap)?;
    let common = match &cli.command {
        Command::Equilibria(c) | Command::Linearize(c) => c,
        Command::Chareq { common, .. }
        | Command::Hopf { common, .. }
        | Command::Simulate { common, .. }
        | Command::Sweep { common, .. } => common,
    };
    let config = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                ParseFailure::Invalid(format!("cannot read config {}: {e}", path.display()))
            })?;
            parse_config(&text).map_err(ParseFailure::Invalid)?
        }
        None => BTreeMap::new(),
    };
    let mut r = Resolver {
        config,
        sources: BTreeMap::new(),
    };
    let build = |r: &mut Resolver| -> Result<(CommandKind, ModelParams, CommandOptions), String> {
        let params = resolve_params(r, common)?;
        Ok(match &cli.command {
            Command::Equilibria(_) => (CommandKind::Equilibria, params, CommandOptions::None),
            Command::Linearize(_) => (CommandKind::Linearize, params, CommandOptions::None),
            Command::Chareq {
                lambda_re,
                lambda_im,
                ..
            } => {
                let re = r.pick("lambda-re", *lambda_re, Some(0.0))?;
                let im = r.pick("lambda-im", *lambda_im, Some(0.0))?;
                (
                    CommandKind::Chareq,
                    params,
                    CommandOptions::Chareq {
                        lambda: Complex64::new(re, im),
                    },
                )
            }
            Command::Hopf { k_max, .. } => {
                let k_max = r.pick("k-max", *k_max, Some(DEFAULT_K_MAX))?;
                (CommandKind::Hopf, params, CommandOptions::Hopf { k_max })
            }
            Command::Simulate { sim, .. } => {
                let (config, history) = resolve_sim(r, sim, &params, SIMULATE_HISTORY)?;
                (
                    CommandKind::Simulate,
                    params,
                    CommandOptions::Simulate { config, history },
                )
            }
            Command::Sweep {
                sim,
                tau_from,
                tau_to,
                steps,
                ..
            } => {
                let tau_from = r.pick("tau-from", *tau_from, None)?;
                let tau_to = r.pick("tau-to", *tau_to, None)?;
                let steps = r.pick("steps", *steps, Some(21))?;
                // per-row dt must resolve the smallest window of the sweep
                let narrowest = params.with_tau(tau_from).map_err(|e| e.to_string())?;
                // the sweep probes local stability, so start next to x* when it exists
                let default_history = if equilibria(&params).positive.is_some() {
                    SWEEP_HISTORY
                } else {
                    SIMULATE_HISTORY
                };
                let (mut config, history) = resolve_sim(r, sim, &narrowest, default_history)?;
                if r.sources.get("dt") == Some(&Source::Default) {
                    config.dt = default_dt(&narrowest);
                }
                (
                    CommandKind::Sweep,
                    params,
                    CommandOptions::Sweep {
                        config,
                        history,
                        tau_from,
                        tau_to,
                        steps,
                    },
                )
            }
        })
    };
    let (command, params, options) = build(&mut r).map_err(ParseFailure::Invalid)?;
    Ok(RunPlan {
        command,
        params,
        options,
        output: common.output.clone(),
        sources: r.sources,
    })
}

#[derive(Debug)]
pub enum ParseFailure {
    Clap(clap::Error),
    Invalid(String),
}

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Num(v) => f.write_str(&format_number(*v)),
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Empty => Ok(()),
        }
    }
}

/// Column layout of an output file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Schema(pub &'static [&'static str]);

pub const TRAJECTORY_SCHEMA: Schema = Schema(&["t", "x", "z"]);
pub const HOPF_SCHEMA: Schema = Schema(&["index", "branch", "tau_c", "omega_c", "y", "transversality"]);
pub const SWEEP_SCHEMA: Schema = Schema(&["tau", "classification", "period", "final_mean", "predicted"]);
pub const EQUILIBRIA_SCHEMA: Schema = Schema(&["trivial", "positive", "note"]);
pub const LINEARIZE_SCHEMA: Schema = Schema(&["beta_star", "delta_plus_beta_star", "ratio", "kappa", "regime"]);
pub const CHAREQ_SCHEMA: Schema = Schema(&["tau", "lambda_re", "lambda_im", "delta_re", "delta_im", "abs"]);

/// Nine significant digits; scientific for `|v| ≥ 1e6` or `|v| < 1e−3`.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = v.abs();
    if !(1e-3..1e6).contains(&a) {
        return format!("{v:.8e}");
    }
    let exp = a.log10().floor() as i32;
    let decimals = (8 - exp).max(0) as usize;
    let s = format!("{v:.decimals$}");
    // rounding may carry into the next decade
    let back: f64 = s.parse().unwrap_or(v);
    if back.abs() >= 10f64.powi(exp + 1) {
        if back.abs() >= 1e6 {
            return format!("{back:.8e}");
        }
        let decimals = decimals.saturating_sub(1);
        return format!("{v:.decimals$}");
    }
    s
}

/// Header line then one line per row, `\n`-separated.
pub fn write_csv<W: Write + ?Sized>(out: &mut W, schema: Schema, rows: &[Vec<Cell>]) -> io::Result<()> {
    writeln!(out, "{}", schema.0.join(","))?;
    for row in rows {
        debug_assert_eq!(row.len(), schema.0.len());
        let line: Vec<String> = row.iter().map(Cell::to_string).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()
}

pub fn trajectory_rows(traj: &Trajectory) -> Vec<Vec<Cell>> {
    traj.times
        .iter()
        .zip(&traj.x)
        .zip(&traj.z)
        .map(|((&t, &x), &z)| vec![Cell::Num(t), Cell::Num(x), Cell::Num(z)])
        .collect()
}

pub fn hopf_rows(summary: &HopfSummary) -> Vec<Vec<Cell>> {
    summary
        .crossings
        .iter()
        .enumerate()
        .map(|(i, c)| {
            vec![
                Cell::Int(i as i64),
                Cell::Text(c.branch.to_string()),
                Cell::Num(c.tau_c),
                Cell::Num(c.omega_c),
                Cell::Num(c.y),
                Cell::Text(c.transversality.as_str().into()),
            ]
        })
        .collect()
}

pub fn sweep_rows(rows: &[SweepRow]) -> Vec<Vec<Cell>> {
    rows.iter()
        .map(|r| {
            vec![
                Cell::Num(r.tau),
                Cell::Text(r.classification.as_str().into()),
                r.period.map_or(Cell::Empty, Cell::Num),
                Cell::Num(r.final_mean),
                Cell::Text(r.predicted.map_or("unknown", |p| p.as_str()).into()),
            ]
        })
        .collect()
}

/// Failure while executing a resolved command.
#[derive(Debug)]
pub enum RunError {
    Model(Error),
    Io(io::Error),
}

impl RunError {
    fn exit_code(&self) -> i32 {
        match self {
            RunError::Model(e) => e.exit_code(),
            RunError::Io(_) => EXIT_RUNTIME,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Model(e) => write!(f, "{e}"),
            RunError::Io(e) => write!(f, "output error: {e}"),
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Model(e)
    }
}

impl From<io::Error> for RunError {
    fn from(e: io::Error) -> Self {
        RunError::Io(e)
    }
}

/// Execute a resolved command; returns the schema and rows plus diagnostic lines.
/// Schema, rows and stderr notes of one command.
pub type Table = (Schema, Vec<Vec<Cell>>, Vec<String>);

pub fn execute(plan: &RunPlan) -> Result<Table, RunError> {
    let p = &plan.params;
    let mut notes = Vec::new();
    let (schema, rows) = match &plan.options {
        CommandOptions::None if plan.command == CommandKind::Equilibria => {
            let eq = equilibria(p);
            let note = match eq.absent_reason {
                Some(r) => format!("positive equilibrium absent ({r})"),
                None => "positive equilibrium present".into(),
            };
            let row = vec![
                Cell::Num(eq.trivial),
                eq.positive.map_or(Cell::Empty, Cell::Num),
                Cell::Text(note),
            ];
            (EQUILIBRIA_SCHEMA, vec![row])
        }
        CommandOptions::None => {
            let lin = linearize(p)?;
            let regime = classify_regime(p);
            if regime.boundary_warning {
                notes.push(format!("warning: R = {} lies on a regime boundary", regime.ratio));
            }
            let row = vec![
                Cell::Num(lin.beta_star),
                Cell::Num(lin.delta_plus_beta_star),
                Cell::Num(lin.ratio),
                lin.kappa.map_or(Cell::Empty, Cell::Num),
                Cell::Text(regime.regime.as_str().into()),
            ];
            (LINEARIZE_SCHEMA, vec![row])
        }
        CommandOptions::Chareq { lambda } => {
            let lin = linearize(p)?;
            let d = char_delta(&lin, p, p.tau, *lambda);
            let row = vec![
                Cell::Num(p.tau),
                Cell::Num(lambda.re),
                Cell::Num(lambda.im),
                Cell::Num(d.re),
                Cell::Num(d.im),
                Cell::Num(d.norm()),
            ];
            (CHAREQ_SCHEMA, vec![row])
        }
        CommandOptions::Hopf { k_max } => {
            let lin = linearize(p)?;
            let s = hopf_summary_with(&lin, p, *k_max)?;
            notes.push(format!("case: {}", s.case.label()));
            if s.stable_for_all_delays() {
                notes.push("no crossings: equilibrium stable for all delays".into());
            }
            if let (Some(t0), Some(period)) = (s.tau_0, s.onset_period) {
                notes.push(format!("tau_0 = {t0}, onset period 2*pi/omega_c = {period}"));
            }
            if let Some(tl) = s.tau_l {
                notes.push(format!("tau_l = {tl}"));
            }
            (HOPF_SCHEMA, hopf_rows(&s))
        }
        CommandOptions::Simulate { config, history } => {
            let traj = simulate(p, &history.load(p)?, config)?;
            (TRAJECTORY_SCHEMA, trajectory_rows(&traj))
        }
        CommandOptions::Sweep {
            config,
            history,
            tau_from,
            tau_to,
            steps,
        } => {
            let rows = sweep_tau(p, (*tau_from, *tau_to), *steps, config, &history.load(p)?)?;
            for r in rows.iter().filter(|r| r.error.is_some()) {
                notes.push(format!("tau = {}: {}", r.tau, r.error.as_ref().unwrap()));
            }
            (SWEEP_SCHEMA, sweep_rows(&rows))
        }
    };
    Ok((schema, rows, notes))
}

/// Parse, dispatch and write; returns the process exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let plan = match resolve(args) {
        Ok(s) => s,
        Err(ParseFailure::Clap(e)) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_INVALID
                }
            };
        }
        Err(ParseFailure::Invalid(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_INVALID;
        }
    };
    let result = execute(&plan).and_then(|(schema, rows, notes)| {
        for n in &notes {
            let _ = writeln!(stderr, "{n}");
        }
        match &plan.output {
            Some(path) => {
                let file = fs::File::create(path)?;
                let mut w = io::BufWriter::new(file);
                write_csv(&mut w, schema, &rows)?;
            }
            None => write_csv(stdout, schema, &rows)?,
        }
        Ok(())
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

/// Entry point for the binary.
pub fn run() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    run_with(std::env::args_os(), &mut out, &mut err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(1e8), "1.00000000e8");
        assert_eq!(format_number(-2.5e-5), "-2.50000000e-5");
        assert_eq!(format_number(18.2), "18.2000000");
        assert_eq!(format_number(0.05), "0.0500000000");
        assert_eq!(format_number(999_999.999_9), "1.00000000e6");
        assert_eq!(format_number(9.999_999_999), "10.0000000");
        assert_eq!(format_number(f64::NAN), "NaN");
    }

    #[test]
    fn csv_header_only_and_single_point() {
        let mut buf = Vec::new();
        write_csv(&mut buf, TRAJECTORY_SCHEMA, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,x,z\n");
        let mut buf = Vec::new();
        let row = vec![Cell::Num(0.0), Cell::Num(1e8), Cell::Num(3.25e9)];
        write_csv(&mut buf, TRAJECTORY_SCHEMA, &[row]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "t,x,z\n0,1.00000000e8,3.25000000e9\n"
        );
    }

    #[test]
    fn config_grammar() {
        let c = parse_config("# comment\ndelta = 0.1\n tau_min=2 # trailing\n\n").unwrap();
        assert_eq!(c["delta"], "0.1");
        assert_eq!(c["tau-min"], "2");
        assert!(parse_config("bogus = 1").is_err());
        assert!(parse_config("delta 0.1").is_err());
    }

    #[test]
    fn history_source_parsing() {
        assert_eq!("const:1e8".parse::<HistorySource>().unwrap(), HistorySource::Constant(1e8));
        assert_eq!(
            "file:/tmp/h.csv".parse::<HistorySource>().unwrap(),
            HistorySource::File("/tmp/h.csv".into())
        );
        assert_eq!(
            "xstar:1e-4".parse::<HistorySource>().unwrap(),
            HistorySource::NearEquilibrium(1e-4)
        );
        assert!("1e8".parse::<HistorySource>().is_err());
        let absent = ModelParams::new(0.05, 0.03, 1.62e8, 3.0, 0.0, 5.0).unwrap();
        assert!(HistorySource::NearEquilibrium(1e-4).load(&absent).is_err());
    }

    #[test]
    fn defaults_and_sources() {
        let plan = resolve(["hemodyn", "hopf", "--tau-min", "0"]).unwrap();
        assert_eq!(plan.params, ModelParams::default());
        assert_eq!(plan.sources["tau-min"], Source::Flag);
        assert_eq!(plan.sources["delta"], Source::Default);
    }

    proptest! {
        #[test]
        fn printed_numbers_round_trip(v in prop::num::f64::NORMAL) {
            let s = format_number(v);
            let back: f64 = s.parse().unwrap();
            prop_assert!((back - v).abs() <= 5e-9 * v.abs());
            prop_assert_eq!(format_number(back), s);
        }
    }
}
