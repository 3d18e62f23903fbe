//! `epr` command line: correlations, angle scans, CHSH values and the validation suite.
//!
//! Exit codes: `0` success, `1` invalid input or failed validation, `2` numerical failure.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use epr_core::scenario_io::{format_float, parse_document, to_json_string, OutputKind};
use epr_core::validate::{run_validate, Fault, Level};
use epr_core::{
    chsh_value, correlation_distinguishable, correlation_equal_time, correlation_identical, correlation_symmetrized,
    emit_results, singlet_closed_form, triplet_closed_form, Backend, CorrelationResult, Direction, Error, Format,
    GridConfig, Scenario, Statistics,
};
use rayon::prelude::*;
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

const DEFAULT_GRID_N: usize = 512;
const DEFAULT_GRID_EXTENT: f64 = 16.0;

#[derive(Debug, Parser)]
#[command(
    name = "epr",
    version,
    about = "EPR spin correlations for localized detectors in Galilean motion"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Joint outcome table and correlation for one scenario.
    Correlate {
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Correlation as a function of the polar angle of B's direction.
    Scan {
        scenario: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long, default_value_t = PI)]
        to: f64,
        #[arg(long, default_value_t = 19, value_parser = clap::value_parser!(u64).range(2..))]
        steps: u64,
        #[command(flatten)]
        common: Common,
    },
    /// `|C(a,b) - C(a,b') + C(a',b) + C(a',b')|`, defaulting to the optimal singlet angles.
    Chsh {
        scenario: PathBuf,
        /// `theta,phi` of a.
        #[arg(long, value_parser = parse_direction)]
        a: Option<Direction>,
        #[arg(long = "a-prime", value_parser = parse_direction)]
        a_prime: Option<Direction>,
        #[arg(long, value_parser = parse_direction)]
        b: Option<Direction>,
        #[arg(long = "b-prime", value_parser = parse_direction)]
        b_prime: Option<Direction>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the invariant suite.
    Validate {
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub backend: Option<BackendArg>,
    #[arg(long)]
    pub grid_n: Option<usize>,
    #[arg(long)]
    pub grid_extent: Option<f64>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Analytic,
    Grid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Quick,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    SpinGenerator,
}

fn parse_direction(text: &str) -> Result<Direction, String> {
    let (theta, phi) = text.split_once(',').ok_or("expected `theta,phi`")?;
    let theta: f64 = theta.trim().parse().map_err(|e| format!("theta: {e}"))?;
    let phi: f64 = phi.trim().parse().map_err(|e| format!("phi: {e}"))?;
    Direction::new(theta, phi).map_err(|e| e.to_string())
}

/// Failure carrying the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_INVALID };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INVALID,
        message: message.into(),
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn execute(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Correlate { scenario, common } => run_correlate(&scenario, &common),
        Command::Scan {
            scenario,
            from,
            to,
            steps,
            common,
        } => run_scan(&scenario, from, to, steps as usize, &common),
        Command::Chsh {
            scenario,
            a,
            a_prime,
            b,
            b_prime,
            common,
        } => {
            let d = |t: f64| Direction::new(t, 0.0).expect("angle in range");
            let dirs = [
                a.unwrap_or_else(|| d(0.0)),
                a_prime.unwrap_or_else(|| d(FRAC_PI_2)),
                b.unwrap_or_else(|| d(FRAC_PI_4)),
                b_prime.unwrap_or_else(|| d(3.0 * FRAC_PI_4)),
            ];
            run_chsh(&scenario, dirs, &common)
        }
        Command::Validate {
            level,
            format,
            out,
            inject_fault,
        } => run_validate_command(level, format, out.as_deref(), inject_fault),
    }
}

fn load(path: &Path, common: &Common) -> Result<(Scenario, Vec<OutputKind>), Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let doc = parse_document(&text)?;
    let scenario = doc.into_scenario()?;
    let backend = select_backend(&scenario, common)?;
    Ok((scenario.with_backend(backend)?, doc.outputs))
}

fn select_backend(scenario: &Scenario, common: &Common) -> Result<Backend, Failure> {
    let grid_flags = common.grid_n.is_some() || common.grid_extent.is_some();
    let wants_grid = match common.backend {
        Some(BackendArg::Analytic) if grid_flags => {
            return Err(usage("--grid-n and --grid-extent need the grid backend"));
        }
        Some(BackendArg::Analytic) => false,
        Some(BackendArg::Grid) => true,
        None => grid_flags || matches!(scenario.backend, Backend::Grid(_)),
    };
    if !wants_grid {
        return Ok(Backend::Analytic);
    }
    let (n, extent) = match scenario.backend {
        Backend::Grid(g) => (g.points(), g.half_extent()),
        Backend::Analytic => (DEFAULT_GRID_N, DEFAULT_GRID_EXTENT),
    };
    let n = common.grid_n.unwrap_or(n);
    let extent = common.grid_extent.unwrap_or(extent);
    Ok(Backend::Grid(GridConfig::new(scenario.state.dimension(), n, extent)?))
}

fn data_format(format: FormatArg) -> Result<Format, Failure> {
    match format {
        FormatArg::Csv => Ok(Format::Csv),
        FormatArg::Json => Ok(Format::Json),
        FormatArg::Text => Err(usage("text output is only available for validate")),
    }
}

fn correlate(scenario: &Scenario) -> Result<CorrelationResult, Error> {
    match scenario.state.statistics() {
        Statistics::Distinguishable => correlation_distinguishable(scenario),
        _ => correlation_identical(scenario),
    }
}

fn report_warnings(result: &CorrelationResult) {
    for w in &result.diagnostics.warnings {
        eprintln!("warning: {w}");
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct WithExtras<'a> {
    result: &'a CorrelationResult,
    extra: Vec<(&'static str, f64)>,
}

fn extras(scenario: &Scenario, outputs: &[OutputKind]) -> Result<Vec<(&'static str, f64)>, Error> {
    let mut out = Vec::new();
    for kind in outputs {
        match kind {
            OutputKind::Joint | OutputKind::Identical => {}
            OutputKind::Symmetrized => out.push(("symmetrized", correlation_symmetrized(scenario)?)),
            OutputKind::EqualTime => out.push(("equal_time", correlation_equal_time(scenario)?)),
            OutputKind::ClosedForm => {
                let value = if scenario.state.is_singlet_class() {
                    singlet_closed_form(scenario)?
                } else {
                    triplet_closed_form(scenario)?
                };
                out.push(("closed_form", value));
            }
        }
    }
    Ok(out)
}

pub fn run_correlate(path: &Path, common: &Common) -> Result<i32, Failure> {
    let format = data_format(common.format)?;
    let (scenario, outputs) = load(path, common)?;
    let result = correlate(&scenario)?;
    report_warnings(&result);
    let extra = extras(&scenario, &outputs)?;
    let text = if extra.is_empty() {
        emit_results(&result, format)
    } else {
        match format {
            Format::Csv => {
                let mut text = emit_results(&result, format);
                for (name, value) in &extra {
                    let _ = writeln!(text, "{name},,{}", format_float(*value));
                }
                text
            }
            Format::Json => to_json_string(&WithExtras { result: &result, extra }),
        }
    };
    write_output(common.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct ScanPoint {
    theta_b: f64,
    correlation: f64,
}

fn thread_pool() -> Result<rayon::ThreadPool, Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(text) = std::env::var("EPR_THREADS") {
        let n: usize = text
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| usage(format!("EPR_THREADS must be a positive integer, got {text:?}")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| usage(format!("thread pool: {e}")))
}

pub fn run_scan(path: &Path, from: f64, to: f64, steps: usize, common: &Common) -> Result<i32, Failure> {
    if steps < 2 {
        return Err(usage("--steps must be at least 2"));
    }
    let format = data_format(common.format)?;
    let (scenario, _) = load(path, common)?;
    let phi_b = scenario.observer_b.direction.phi();
    let thetas: Vec<f64> = (0..steps)
        .map(|k| from + (to - from) * k as f64 / (steps - 1) as f64)
        .collect();
    let directions = thetas
        .iter()
        .map(|&t| Direction::new(t, phi_b).map_err(|e| usage(format!("scan range: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let a = scenario.observer_a.direction;
    let results: Vec<Result<CorrelationResult, Error>> = thread_pool()?.install(|| {
        directions
            .par_iter()
            .map(|b| correlate(&scenario.with_directions(a, *b)))
            .collect()
    });
    let mut points = Vec::with_capacity(steps);
    for (theta_b, r) in thetas.into_iter().zip(results) {
        let r = r?;
        report_warnings(&r);
        points.push(ScanPoint {
            theta_b,
            correlation: r.value,
        });
    }
    let text = match format {
        Format::Csv => {
            let mut text = String::from("theta_b,correlation\n");
            for p in &points {
                let _ = writeln!(text, "{},{}", format_float(p.theta_b), format_float(p.correlation));
            }
            text
        }
        Format::Json => to_json_string(&points),
    };
    write_output(common.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

pub fn run_chsh(path: &Path, dirs: [Direction; 4], common: &Common) -> Result<i32, Failure> {
    let format = data_format(common.format)?;
    let (scenario, _) = load(path, common)?;
    if scenario.state.statistics() != Statistics::Distinguishable {
        return Err(usage("chsh is defined for distinguishable particles"));
    }
    let [a, a2, b, b2] = dirs;
    let value = chsh_value(&scenario, a, a2, b, b2)?;
    let text = match format {
        Format::Csv => format!("quantity,value\nchsh,{}\n", format_float(value)),
        Format::Json => {
            #[derive(Serialize)]
            struct Chsh {
                chsh: f64,
            }
            to_json_string(&Chsh { chsh: value })
        }
    };
    write_output(common.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

pub fn run_validate_command(
    level: LevelArg,
    format: FormatArg,
    out: Option<&Path>,
    fault: Option<FaultArg>,
) -> Result<i32, Failure> {
    let level = match level {
        LevelArg::Quick => Level::Quick,
        LevelArg::Full => Level::Full,
    };
    let fault = fault.map(|FaultArg::SpinGenerator| Fault::SpinGenerator);
    let report = run_validate(level, fault);
    let text = match format {
        FormatArg::Text => report.render(),
        FormatArg::Json => to_json_string(&report),
        FormatArg::Csv => {
            let mut text = String::from("check,measured,tolerance,passed\n");
            for c in &report.checks {
                let _ = writeln!(
                    text,
                    "{},{},{},{}",
                    c.name,
                    format_float(c.measured),
                    format_float(c.tolerance),
                    c.passed
                );
            }
            text
        }
    };
    write_output(out, &text)?;
    if report.passed() {
        Ok(EXIT_OK)
    } else {
        for c in report.failures() {
            eprintln!("failed: {}", c.name);
        }
        Ok(EXIT_INVALID)
    }
}
