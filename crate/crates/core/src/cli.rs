//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage, 3 unparsable input, 4 invalid input,
//! 5 internal failure. Diagnostics go to stderr only.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::entities::{run_entity, EntityConfig, EntityKind, RunSpec, SoccerConfig, VesselsConfig};
use crate::error::{MeasurementError, ValidationError};
use crate::liar::{LiarEntity, LiarVariant, MeasurementChoice};
use crate::report::{self, BellCheckReport, LiarReport, PolytopeReport, TableInputError, VERSION};
use crate::scalar::Rational;
use crate::scenario::CorrelationVector;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;
pub const EXIT_INTERNAL: i32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "potentiality",
    version,
    about = "Bell/CHSH checks, correlation-polytope membership, liar-paradox dynamics and entity simulations"
)]
pub struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Seed for simulations
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Trials per coincidence pair for simulations
    #[arg(long, global = true, default_value_t = 10_000)]
    pub trials: u64,

    /// JSON file with the entity configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Write the result here instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Evaluate a behavior table file
    BellCheck { file: PathBuf },
    /// Run a seeded simulation of an entity
    Simulate {
        /// vessels or soccer
        entity: EntityKind,
    },
    /// Trace the truth-value cycle of a liar-paradox variant
    Liar {
        /// A, B or C
        #[arg(long)]
        variant: LiarVariant,
        /// Initial measurement, as sentence:value
        #[arg(long, default_value = "1:true")]
        start: MeasurementChoice,
        #[arg(long, default_value_t = 4)]
        steps: usize,
        /// Duration of one reasoning step
        #[arg(long, default_value_t = 1.0)]
        step_time: f64,
        /// Include the state vector after every step
        #[arg(long)]
        dump_state: bool,
    },
    /// List the deterministic correlation vertices, or test a vector
    Polytope {
        /// Correlation vector E13,E14,E23,E24 (decimals or p/q)
        #[arg(long, allow_hyphen_values = true, value_parser = parse_vector)]
        test: Option<CorrelationVector<Rational>>,
    },
}

fn parse_vector(s: &str) -> Result<CorrelationVector<Rational>, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("expected 4 comma-separated components, got {}", parts.len()));
    }
    let mut e = Vec::with_capacity(4);
    for p in parts {
        e.push(p.trim().parse::<Rational>().map_err(|err| format!("`{}`: {err}", p.trim()))?);
    }
    let [a, b, c, d]: [Rational; 4] = e.try_into().expect("four components");
    CorrelationVector::new(a, b, c, d).map_err(|err| err.to_string())
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl From<ValidationError> for CliError {
    fn from(e: ValidationError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<MeasurementError> for CliError {
    fn from(e: MeasurementError) -> Self {
        CliError::Validation(e.to_string())
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))
}

fn parse_json<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn canonical<T: Serialize>(value: &T) -> Result<String, CliError> {
    report::to_canonical_json(value).map_err(|e| CliError::Internal(format!("serialization failed: {e}")))
}

fn load_entity_config(kind: EntityKind, path: Option<&Path>) -> Result<EntityConfig, CliError> {
    let Some(path) = path else {
        return Ok(EntityConfig::default_for(kind));
    };
    let text = read_input(path)?;
    let config = match kind {
        EntityKind::Vessels => EntityConfig::Vessels(parse_json::<VesselsConfig>(path, &text)?),
        EntityKind::Soccer => EntityConfig::Soccer(parse_json::<SoccerConfig>(path, &text)?),
    };
    config.validate()?;
    Ok(config)
}

/// Executes a parsed command and returns the text to emit.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::BellCheck { file } => {
            let table = report::parse_table(&read_input(file)?).map_err(|e| match e {
                TableInputError::Parse { .. } => CliError::Parse(format!("{}: {e}", file.display())),
                TableInputError::Validation(v) => CliError::Validation(format!("{}: {v}", file.display())),
            })?;
            let r = BellCheckReport::new(&table);
            match cli.format {
                Format::Json => canonical(&r),
                Format::Csv => Ok(report::table_csv(&table)),
                Format::Text => Ok(report::bell_check_text(&r)),
            }
        }
        Command::Simulate { entity } => {
            let config = load_entity_config(*entity, cli.config.as_deref())?;
            let run = RunSpec::new(cli.trials, cli.seed)?;
            let r = run_entity(&config, run)?;
            match cli.format {
                Format::Json => canonical(&r),
                Format::Csv => Ok(report::table_csv(&r.table()?)),
                Format::Text => Ok(report::simulation_text(&r)),
            }
        }
        Command::Liar { variant, start, steps, step_time, dump_state } => {
            if !(step_time.is_finite() && *step_time > 0.0) {
                return Err(ValidationError::InvalidConfig {
                    field: "step_time".into(),
                    reason: format!("must be positive, got {step_time}"),
                }
                .into());
            }
            let entity = LiarEntity::with_step_time(*variant, *step_time);
            let (start_probability, trace) = entity.truth_trace(*start, *steps)?;
            let assignments: Vec<_> = trace.iter().map(|s| s.assignment).collect();
            let r = LiarReport {
                variant: *variant,
                start: *start,
                steps: *steps,
                step_time: *step_time,
                start_probability,
                cycle: assignments.iter().map(|a| a.label()).collect(),
                assignments,
                states: dump_state.then_some(trace),
                version: VERSION.to_string(),
            };
            match cli.format {
                Format::Json => canonical(&r),
                Format::Csv => Ok(report::liar_csv(&r)),
                Format::Text => Ok(report::liar_text(&r)),
            }
        }
        Command::Polytope { test } => {
            let r = PolytopeReport::new(test.as_ref());
            match cli.format {
                Format::Json => canonical(&r),
                Format::Csv => Ok(report::polytope_csv(&r)),
                Format::Text => Ok(report::polytope_text(&r)),
            }
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let result = execute(&cli).and_then(|text| emit(cli.output.as_deref(), &text));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    let written = match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(|e| format!("cannot write output: {e}")),
    };
    written.map_err(CliError::Internal)
}
