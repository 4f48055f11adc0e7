//! Command-line front end: configuration, fixtures, orchestration and
//! report emission. `main.rs` only parses arguments and calls [`execute`].

pub mod config;
pub mod fixtures;
mod report;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;
use thiserror::Error;

use crate::geometry::GeometryError;
use crate::map_analysis::{conformality, frame_at, slant_angle, MapError, SmoothMapSpec, DEFAULT_TOL_RANK, MIN_DIRECTIONS};
use crate::sampling::{sample_points, to_vector};
use crate::theorems::{check_ids, Analysis, CHECKS};

pub use config::{load_config, subject_from_fixture, RunConfig, Subject, DEFAULT_SAMPLES};
pub use fixtures::{build_fixture, fixture_names, Fixture, FIXTURES};
pub use report::{all_pass, FrameSummary, Report, SCHEMA_VERSION};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_EVAL: i32 = 3;

/// Relative agreement required to call a computed dilation the documented one.
const DILATION_MATCH: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("unknown fixture `{0}` (see list-fixtures)")]
    UnknownFixture(String),
    #[error("parameter `{key}`: {message}")]
    Param { key: String, message: String },
    #[error("unknown check `{0}` (see list-checks)")]
    UnknownCheck(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    /// Conformality, slant angle and frame dimensions only.
    Analyze,
    /// Everything in `Analyze` plus the checkers.
    Verify,
}

impl Command {
    fn as_str(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "slantsub", version, about = "Conformal slant submersions from cosymplectic manifolds, checked numerically")]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Decide conformality and the slant angle of a map.
    Analyze(RunArgs),
    /// Run the checkers on a map.
    Verify(RunArgs),
    /// List the built-in fixtures and their parameters.
    ListFixtures,
    /// List the checker ids.
    ListChecks,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Built-in fixture name.
    #[arg(long, conflicts_with = "config")]
    pub fixture: Option<String>,
    /// JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Fixture parameter, e.g. `--param alpha=0.3 --param pairing=cross`.
    #[arg(long = "param", value_name = "KEY=VALUE", value_parser = parse_key_value)]
    pub params: Vec<(String, String)>,
    /// Comma-separated checker ids (default: all).
    #[arg(long, value_delimiter = ',')]
    pub checks: Option<Vec<String>>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Decimal or 0x-prefixed hexadecimal.
    #[arg(long, value_parser = parse_seed)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tol_angle: Option<f64>,
    #[arg(long)]
    pub tol_identity: Option<f64>,
    #[arg(long)]
    pub tol_derivative: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Include wall time in the report (makes it run-dependent).
    #[arg(long)]
    pub timing: bool,
}

fn parse_key_value(s: &str) -> Result<(String, String), String> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .filter(|(k, _)| !k.is_empty())
        .ok_or_else(|| format!("expected KEY=VALUE, got `{s}`"))
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed `{s}`: {e}"))
}

/// A `--param` value: JSON if it parses as JSON, a string otherwise.
fn param_value(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

/// Resolves the subject and run parameters from files and flags.
pub fn resolve(args: &RunArgs) -> Result<(Subject, RunConfig), ConfigError> {
    let (subject, mut run) = match (&args.fixture, &args.config) {
        (Some(name), None) => {
            let params: BTreeMap<String, Value> =
                args.params.iter().map(|(k, v)| (k.clone(), param_value(v))).collect();
            (subject_from_fixture(name, &params)?, RunConfig::default())
        }
        (None, Some(path)) => {
            if !args.params.is_empty() {
                return Err(ConfigError::Invalid("--param applies to --fixture; put params in the config file".into()));
            }
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError::Invalid(format!("cannot read {}: {e}", path.display())))?;
            load_config(&text)?
        }
        (None, None) => return Err(ConfigError::Invalid("give --fixture or --config".into())),
        (Some(_), Some(_)) => return Err(ConfigError::Invalid("--fixture and --config are exclusive".into())),
    };
    if let Some(c) = &args.checks {
        run.checks = Some(c.clone());
    }
    if let Some(s) = args.samples {
        run.samples = s;
    }
    if let Some(s) = args.seed {
        run.seed = s;
    }
    if let Some(t) = args.tol_angle {
        run.tolerances.angle = t;
    }
    if let Some(t) = args.tol_identity {
        run.tolerances.identity = t;
    }
    if let Some(t) = args.tol_derivative {
        run.tolerances.derivative = t;
    }
    run.validate()?;
    Ok((subject, run))
}

fn frame_summary(map: &SmoothMapSpec, points: &[Vec<f64>]) -> Result<FrameSummary, MapError> {
    let mut summary: Option<FrameSummary> = None;
    for p in points {
        let f = frame_at(map, to_vector::<f64>(p).as_slice(), DEFAULT_TOL_RANK)?;
        let here = FrameSummary {
            vertical: f.vertical.len(),
            horizontal: f.horizontal.len(),
            e_kernel: f.e_kernel.len(),
            mu: f.mu.len(),
            xi_vertical: f.xi_index.is_some(),
            constant: true,
        };
        match &mut summary {
            None => summary = Some(here),
            Some(s) => {
                let same = s.vertical == here.vertical
                    && s.horizontal == here.horizontal
                    && s.e_kernel == here.e_kernel
                    && s.mu == here.mu
                    && s.xi_vertical == here.xi_vertical;
                s.constant &= same;
            }
        }
    }
    summary.ok_or_else(|| MapError::Shape("no sample points".into()))
}

/// Mean slant angle of the same fixture under the other pairing, at the
/// report's sample points.
fn other_pairing_angle(subject: &Subject, report: &Report) -> Option<(String, f64)> {
    let other = if subject.pairing.as_deref() == Some("cross") { "identity" } else { "cross" };
    let mut params = subject.params.clone();
    params.insert("pairing".to_string(), Value::from(other));
    let f = build_fixture(&subject.label, &params).ok()?;
    let points = sample_points(f.map.source().domain_box(), report.samples, report.seed);
    let s = slant_angle::<f64>(&f.map, &points, MIN_DIRECTIONS, report.tolerances.angle).ok()?;
    s.classification.is_slant().then(|| (other.to_string(), s.mean))
}

fn subject_notes(subject: &Subject, report: &Report) -> Vec<String> {
    let mut notes = Vec::new();
    if let Some(p) = &subject.pairing {
        let meaning = if p == "cross" {
            "phi pairs u_1 with v_n and u_n with v_1"
        } else {
            "phi pairs u_i with v_i"
        };
        notes.push(format!("pairing '{p}': {meaning}"));
    }
    let slant = &report.slant;
    if let (Some(angle), true) = (subject.documented_angle, slant.classification.is_slant()) {
        let pairing = subject.pairing.as_deref().unwrap_or("identity");
        if (slant.mean - angle).abs() < report.tolerances.angle {
            notes.push(format!(
                "the fixture's documented angle {angle:.10} rad is reproduced under pairing '{pairing}'"
            ));
        } else {
            let mut note = format!(
                "the fixture's documented angle {angle:.10} rad is not reproduced under pairing '{pairing}' \
                 (computed {:.10} rad)",
                slant.mean
            );
            if let Some((other, w)) = other_pairing_angle(subject, report) {
                let verb = if (w - angle).abs() < report.tolerances.angle { "is" } else { "is not" };
                note.push_str(&format!("; it {verb} reproduced under pairing '{other}' (computed {w:.10} rad)"));
            }
            notes.push(note);
        }
    }
    if let Some(lambda) = subject.documented_dilation {
        let c = &report.conformality;
        let rel = ((c.dilation_min - lambda).abs()).max((c.dilation_max - lambda).abs()) / lambda;
        let verb = if rel < DILATION_MATCH { "matches" } else { "does not match" };
        notes.push(format!(
            "computed dilation {verb} the documented constant {lambda:.10e} (relative error {rel:.1e})"
        ));
    }
    notes
}

/// Runs an analysis (and, for `Verify`, the checkers) on the subject.
pub fn run(subject: &Subject, config: &RunConfig, command: Command, timing: bool) -> Result<Report, MapError> {
    let start = Instant::now();
    let map = &subject.map;
    let tol = config.tolerances;
    let (conformality_report, slant, checks, points) = match command {
        Command::Analyze => {
            let points = sample_points(map.source().domain_box(), config.samples, config.seed);
            let c = conformality::<f64>(map, &points, tol.identity, tol.derivative)?;
            let s = slant_angle::<f64>(map, &points, MIN_DIRECTIONS, tol.angle)?;
            (c, s, Vec::new(), points)
        }
        Command::Verify => {
            let analysis = Analysis::<f64>::new(map, config.samples, config.seed, tol)?;
            let ids: Vec<&str> = match &config.checks {
                Some(ids) => ids.iter().map(String::as_str).collect(),
                None => check_ids().collect(),
            };
            let checks = analysis.run_all(&ids);
            (analysis.conformality, analysis.slant, checks, analysis.points)
        }
    };
    let frame = frame_summary(map, &points)?;
    let pass = match command {
        Command::Analyze => conformality_report.is_conformal && slant.classification.is_slant(),
        Command::Verify => all_pass(&checks),
    };
    let mut report = Report {
        schema_version: SCHEMA_VERSION,
        software_version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.as_str().to_string(),
        fixture: subject.label.clone(),
        params: subject.params.clone(),
        pairing: subject.pairing.clone(),
        seed: config.seed,
        samples: config.samples,
        tolerances: tol,
        conformality: conformality_report,
        slant,
        frame,
        checks,
        notes: Vec::new(),
        pass,
        wall_time_seconds: None,
    };
    report.notes = subject_notes(subject, &report);
    if timing {
        report.wall_time_seconds = Some(start.elapsed().as_secs_f64());
    }
    Ok(report)
}

/// Captured result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Execution {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

fn list_fixtures() -> String {
    let mut out = String::new();
    for f in &FIXTURES {
        out.push_str(&format!("{:<14} [{}]\n    {}\n", f.name, f.params.join(", "), f.description));
    }
    out
}

fn list_checks() -> String {
    CHECKS
        .iter()
        .map(|c| format!("{:<22} {}\n", c.id, c.description))
        .collect()
}

pub fn execute(cli: &Cli) -> Execution {
    let done = |stdout: String, stderr: String, code: i32| Execution { stdout, stderr, code };
    let (args, command) = match &cli.verb {
        Verb::ListFixtures => return done(list_fixtures(), String::new(), EXIT_PASS),
        Verb::ListChecks => return done(list_checks(), String::new(), EXIT_PASS),
        Verb::Analyze(a) => (a, Command::Analyze),
        Verb::Verify(a) => (a, Command::Verify),
    };
    let (subject, config) = match resolve(args) {
        Ok(r) => r,
        Err(e) => return done(String::new(), format!("configuration error: {e}\n"), EXIT_CONFIG),
    };
    let report = match run(&subject, &config, command, args.timing) {
        Ok(r) => r,
        Err(e) => return done(String::new(), format!("evaluation error: {e}\n"), EXIT_EVAL),
    };
    let stdout = match args.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    done(stdout, String::new(), if report.pass { EXIT_PASS } else { EXIT_FAIL })
}
