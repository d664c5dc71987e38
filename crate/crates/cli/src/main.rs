//! `carpetdim`: dimension bounds and diagnostics for carpets and factor systems.
//!
//! Exit status: 0 success, 1 malformed specification or I/O failure,
//! 2 violated precondition (including a non-mixing shift), 3 exhausted
//! resource budget, 64 command-line usage error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use carpetdim::additivity::{additivity_scan, uniqueness_report};
use carpetdim::counting::{brute_force_count, partition_sum, preimage_count, SumMode, DEFAULT_ORACLE_BOUND};
use carpetdim::measures::gibbs_scan;
use carpetdim::pressure::{dimension_from_series, pressure_series, PressureSeries};
use carpetdim::render::render_carpet;
use carpetdim::report::{self, to_text};
use carpetdim::spectral::{compensation_at_periodic, DEFAULT_SERIES_DEPTH};
use carpetdim::{
    carpet_to_factor, fixtures, load_spec, CarpetSpec, Error, ErrorKind, EventuallyPeriodicPoint,
    FactorSystem, SpecFile,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

const EXIT_SPEC: u8 = 1;
const EXIT_PRECONDITION: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "carpetdim", version, about = "Hausdorff dimension bounds for carpets coded by shifts of finite type")]
struct Cli {
    /// Maximum number of prefix-tree nodes a partition sum may expand.
    #[arg(long, global = true, env = "CARPETDIM_NODE_BUDGET", default_value_t = carpetdim::counting::DEFAULT_NODE_BUDGET)]
    node_budget: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pressure or dimension report together with the diagnostics.
    Analyze(AnalyzeArgs),
    /// Dimension interval of a carpet (or of an abstract system given l and m).
    Dimension(SeriesArgs),
    /// Pressure interval at a fixed exponent.
    Pressure(PressureArgs),
    /// Preimage count of one image word.
    Counts(CountsArgs),
    /// Gibbs envelope of the finite-depth measures.
    Gibbs(GibbsArgs),
    /// Almost-additivity scan of the preimage counts.
    Additivity(AdditivityArgs),
    /// Growth rates of lift counts at an eventually periodic point.
    Compensation(CompensationArgs),
    /// Level-k approximation of a carpet as a PBM image.
    Render(RenderArgs),
    /// Writes the four example systems as spec files.
    Fixtures(FixturesArgs),
}

#[derive(Args, Debug)]
struct SpecArg {
    /// System specification file (JSON, schema 1).
    #[arg(long)]
    spec: PathBuf,
}

#[derive(Args, Debug)]
struct ExponentArgs {
    /// Exponent applied to preimage counts, in (0, 1].
    #[arg(long, conflicts_with_all = ["l", "m"])]
    theta: Option<f64>,
    /// Horizontal expansion factor; with --m sets theta = log m / log l.
    #[arg(long, requires = "m")]
    l: Option<u32>,
    /// Vertical expansion factor.
    #[arg(long, requires = "l")]
    m: Option<u32>,
}

#[derive(Args, Debug)]
struct SeriesArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[command(flatten)]
    exponent: ExponentArgs,
    /// Depth n of the partition sum S_n.
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    depth: u64,
    /// Also write the series n = 1..depth as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PressureArgs {
    #[command(flatten)]
    series: SeriesArgs,
    /// Evaluate S_n alone in this mode instead of the collapsed series.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Exact,
    Collapsed,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(flatten)]
    series: SeriesArgs,
    /// Depth l of the measure nu_l in the Gibbs scan.
    #[arg(long, default_value_t = 18)]
    gibbs_l: usize,
    /// Longest cylinder in the Gibbs scan.
    #[arg(long, default_value_t = 10)]
    gibbs_n: usize,
    /// Longest word length L in the additivity scan.
    #[arg(long, default_value_t = 12)]
    max_len: usize,
}

#[derive(Args, Debug)]
struct CountsArgs {
    #[command(flatten)]
    spec: SpecArg,
    /// Comma-separated image letters.
    #[arg(long)]
    word: String,
    /// Cross-check with the brute-force enumeration (words up to length 12).
    #[arg(long)]
    brute_force: bool,
}

#[derive(Args, Debug)]
struct GibbsArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[command(flatten)]
    exponent: ExponentArgs,
    /// Depth l of nu_l.
    #[arg(long, default_value_t = 18)]
    l_depth: usize,
    /// Longest cylinder checked.
    #[arg(long, default_value_t = 10)]
    n_max: usize,
}

#[derive(Args, Debug)]
struct AdditivityArgs {
    #[command(flatten)]
    spec: SpecArg,
    /// Longest word length L.
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u64).range(1..))]
    max_len: u64,
}

#[derive(Args, Debug)]
struct CompensationArgs {
    #[command(flatten)]
    spec: SpecArg,
    /// Comma-separated letters before the periodic part (may be empty).
    #[arg(long, default_value = "")]
    preperiod: String,
    /// Comma-separated repeating word.
    #[arg(long)]
    period: String,
    /// Depth n of the series estimate log |D_n(y)| / n.
    #[arg(long, default_value_t = DEFAULT_SERIES_DEPTH as u64, value_parser = clap::value_parser!(u64).range(1..))]
    series_n: u64,
}

#[derive(Args, Debug)]
struct RenderArgs {
    #[command(flatten)]
    spec: SpecArg,
    /// Level k of the approximation.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    /// Pixels per cell side.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    scale: u64,
    /// Output PBM file.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct FixturesArgs {
    /// Directory to write the spec files into (created if missing).
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e.kind() {
            ErrorKind::Spec => EXIT_SPEC,
            ErrorKind::Precondition => EXIT_PRECONDITION,
            ErrorKind::Resource => EXIT_RESOURCE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_SPEC,
        message: format!("{}: {e}", path.display()),
    }
}

type Outcome = Result<String, Failure>;

/// The system, its carpet if any, and the exponent to use.
struct Loaded {
    spec: SpecFile,
    fs: FactorSystem,
    theta: f64,
    /// `m` of the carpet or of `--l/--m`, when known.
    m: Option<u32>,
}

fn load(path: &Path, exponent: Option<&ExponentArgs>) -> Result<Loaded, Failure> {
    let spec = load_spec(path)?;
    let fs = spec.factor_system()?;
    let given = exponent.map(|e| (e.theta, e.l.zip(e.m)));
    let (theta, m) = match (spec.carpet(), given) {
        (Some(c), Some((None, None))) | (Some(c), None) => (c.theta(), Some(c.m())),
        (Some(_), Some(_)) => {
            return Err(usage("the exponent of a carpet spec is fixed by its l and m; drop --theta/--l/--m"))
        }
        (None, Some((Some(t), _))) => (t, None),
        (None, Some((None, Some((l, m))))) => {
            if m < 2 || l <= m {
                return Err(usage(format!("--l and --m need l > m >= 2, got l = {l}, m = {m}")));
            }
            ((m as f64).ln() / (l as f64).ln(), Some(m))
        }
        (None, Some((None, None))) => {
            return Err(usage("abstract systems need --theta or --l and --m"))
        }
        (None, None) => (1.0, None),
    };
    Ok(Loaded { spec, fs, theta, m })
}

fn write_csv(path: &Option<PathBuf>, series: &PressureSeries, n: usize) -> Result<(), Failure> {
    if let Some(p) = path {
        fs::write(p, report::series_csv(series, n)).map_err(|e| io_failure(p, e))?;
    }
    Ok(())
}

/// Pressure or dimension report for a loaded system.
fn series_report(ld: &Loaded, n: usize, budget: u64, want_dimension: bool) -> Result<(Value, PressureSeries), Failure> {
    let series = pressure_series(&ld.fs, ld.theta, n, budget)?;
    let value = match (ld.spec.carpet(), ld.m) {
        (Some(c), _) => {
            let (_, alpha) = carpet_to_factor(c)?;
            report::dimension_report(&dimension_from_series(c, alpha, &series, n)?)
        }
        (None, Some(m)) if want_dimension => {
            let mut v = report::pressure_report(&series, n, &[]);
            let log_m = (m as f64).ln();
            let lower = series.lower(n).ok().map(|p| (p / log_m).clamp(0.0, 2.0));
            v["dimension"] = json!({
                "lower": lower,
                "upper": (series.upper(n) / log_m).clamp(0.0, 2.0),
            });
            v
        }
        (None, _) if want_dimension => {
            return Err(usage("a dimension needs a carpet spec or --l and --m"))
        }
        _ => report::pressure_report(&series, n, &[]),
    };
    Ok((value, series))
}

fn cmd_dimension(a: &SeriesArgs, budget: u64) -> Outcome {
    let ld = load(&a.spec.spec, Some(&a.exponent))?;
    let n = a.depth as usize;
    let (value, series) = series_report(&ld, n, budget, true)?;
    write_csv(&a.csv, &series, n)?;
    Ok(to_text(&value))
}

fn cmd_pressure(a: &PressureArgs, budget: u64) -> Outcome {
    let s = &a.series;
    let ld = load(&s.spec.spec, Some(&s.exponent))?;
    let n = s.depth as usize;
    if let Some(mode) = a.mode {
        let mode = match mode {
            ModeArg::Exact => SumMode::Exact,
            ModeArg::Collapsed => SumMode::Collapsed,
        };
        let ps = partition_sum(&ld.fs, n, ld.theta, mode, budget)?;
        let mut v = serde_json::to_value(&ps).expect("serializable");
        v["log_Sn"] = json!(ps.log_value());
        if let Some(e) = &ps.exact {
            v["Sn_exact"] = json!(e.to_string());
        }
        return Ok(to_text(&v));
    }
    let (value, series) = series_report(&ld, n, budget, false)?;
    write_csv(&s.csv, &series, n)?;
    Ok(to_text(&value))
}

fn cmd_counts(a: &CountsArgs) -> Outcome {
    let ld = load(&a.spec.spec, None)?;
    let w = ld.fs.parse_word(&a.word)?;
    if w.is_empty() {
        return Err(usage("--word must contain at least one letter"));
    }
    let count = preimage_count(&ld.fs, &w)?;
    let mut v = json!({
        "word": ld.fs.format_word(&w),
        "length": w.len(),
        "count": count.to_string(),
    });
    if a.brute_force {
        let b = brute_force_count(&ld.fs, &w, DEFAULT_ORACLE_BOUND)?;
        v["brute_force"] = json!(b.to_string());
        v["agree"] = json!(b == count);
    }
    Ok(to_text(&v))
}

fn cmd_gibbs(a: &GibbsArgs, budget: u64) -> Outcome {
    let ld = load(&a.spec.spec, Some(&a.exponent))?;
    let g = gibbs_scan(&ld.fs, ld.theta, a.l_depth, a.n_max, budget)?;
    Ok(to_text(&json!({ "theta": ld.theta, "gibbs": report::gibbs_json(&g) })))
}

fn cmd_additivity(a: &AdditivityArgs, budget: u64) -> Outcome {
    let ld = load(&a.spec.spec, None)?;
    let scan = additivity_scan(&ld.fs, a.max_len as usize, budget)?;
    let mut v = json!({ "additivity": report::additivity_json(&ld.fs, &scan) });
    match uniqueness_report(&ld.fs, &scan) {
        Ok(u) => v["uniqueness"] = report::uniqueness_json(&u),
        Err(Error::NonMixing) => v["uniqueness"] = Value::Null,
        Err(e) => return Err(e.into()),
    }
    Ok(to_text(&v))
}

fn cmd_compensation(a: &CompensationArgs) -> Outcome {
    let ld = load(&a.spec.spec, None)?;
    let pre = ld.fs.parse_word(&a.preperiod)?;
    let per = ld.fs.parse_word(&a.period)?;
    let y = EventuallyPeriodicPoint::new(&ld.fs, pre, per)?;
    let c = compensation_at_periodic(&ld.fs, &y, a.series_n as usize)?;
    Ok(to_text(&report::compensation_json(&ld.fs, &c)))
}

fn cmd_render(a: &RenderArgs) -> Outcome {
    let spec = load_spec(&a.spec.spec)?;
    let carpet: &CarpetSpec = spec
        .carpet()
        .ok_or_else(|| Failure::from(Error::Precondition("render needs a carpet spec".into())))?;
    let img = render_carpet(carpet, a.k as usize, a.scale as usize)?;
    fs::write(&a.output, img.to_pbm()).map_err(|e| io_failure(&a.output, e))?;
    Ok(to_text(&json!({
        "output": a.output.display().to_string(),
        "k": a.k,
        "cells": [img.cells_x, img.cells_y],
        "pixels": [img.width(), img.height()],
        "filled": img.filled,
    })))
}

fn cmd_fixtures(a: &FixturesArgs) -> Outcome {
    fs::create_dir_all(&a.output_dir).map_err(|e| io_failure(&a.output_dir, e))?;
    let mut written = Vec::new();
    for (name, text) in fixtures::files() {
        let path = a.output_dir.join(name);
        fs::write(&path, text).map_err(|e| io_failure(&path, e))?;
        written.push(path.display().to_string());
    }
    Ok(to_text(&json!({ "written": written })))
}

fn cmd_analyze(a: &AnalyzeArgs, budget: u64) -> Outcome {
    let s = &a.series;
    let ld = load(&s.spec.spec, Some(&s.exponent))?;
    let n = s.depth as usize;
    let (mut value, series) = series_report(&ld, n, budget, ld.m.is_some())?;
    write_csv(&s.csv, &series, n)?;

    let mut warnings = Vec::new();
    let gibbs = match gibbs_scan(&ld.fs, ld.theta, a.gibbs_l, a.gibbs_n, budget) {
        Ok(g) => Some(g),
        Err(e) if e.kind() == ErrorKind::Precondition => {
            warnings.push(format!("Gibbs scan skipped: {e}"));
            None
        }
        Err(e) => return Err(e.into()),
    };
    let scan = additivity_scan(&ld.fs, a.max_len, budget)?;
    let uniqueness = match uniqueness_report(&ld.fs, &scan) {
        Ok(u) => Some(u),
        Err(e) if e.kind() == ErrorKind::Precondition => {
            warnings.push(format!("uniqueness verdict skipped: {e}"));
            None
        }
        Err(e) => return Err(e.into()),
    };
    value["diagnostics"] = report::diagnostic_report(&ld.fs, gibbs.as_ref(), &scan, uniqueness.as_ref(), &warnings);
    if let Some(name) = &ld.spec.name {
        value["system"] = json!(name);
    }
    Ok(to_text(&value))
}

fn run(cli: &Cli) -> Outcome {
    let budget = cli.node_budget;
    match &cli.command {
        Command::Analyze(a) => cmd_analyze(a, budget),
        Command::Dimension(a) => cmd_dimension(a, budget),
        Command::Pressure(a) => cmd_pressure(a, budget),
        Command::Counts(a) => cmd_counts(a),
        Command::Gibbs(a) => cmd_gibbs(a, budget),
        Command::Additivity(a) => cmd_additivity(a, budget),
        Command::Compensation(a) => cmd_compensation(a),
        Command::Render(a) => cmd_render(a),
        Command::Fixtures(a) => cmd_fixtures(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("carpetdim: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
