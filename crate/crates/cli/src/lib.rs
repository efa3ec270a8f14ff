//! The `gridaudit` command line: argument definitions and command execution,
//! kept in a library so tests can drive it without spawning a process.

pub mod dot;
pub mod report;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use gridaudit_core::{
    detect_all, eval_instance_lenient, infer_logical_areas, infer_physical_areas, instantiate, load_program,
    parse_interval_spec, run_interval_test, IntervalSpec, SpreadsheetInstance, SpreadsheetProgram,
};
use thiserror::Error;

use crate::dot::Resolution;
use crate::report::{InputFile, Report, Summary};

pub const EXIT_CLEAN: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "gridaudit", version, about = "Audit spreadsheet programs for structural faults")]
pub struct Cli {
    /// Output rendering.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the output to a file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphResolution {
    Cell,
    Area,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every fault detector.
    Check { sheet: PathBuf },
    /// Compare computed values with expected intervals.
    Test { sheet: PathBuf, intervals: PathBuf },
    /// Emit the data-flow graph as DOT.
    Graph {
        sheet: PathBuf,
        #[arg(long, value_enum, default_value_t = GraphResolution::Cell)]
        resolution: GraphResolution,
    },
    /// List physical and logical areas.
    Areas { sheet: PathBuf },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

/// What a command produced: the rendered output and the exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub exit_code: i32,
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

fn read(path: &Path) -> Result<(String, InputFile), CliError> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io {
        path: display(path),
        source,
    })?;
    let file = InputFile::new(&display(path), &bytes);
    let text = String::from_utf8(bytes).map_err(|_| CliError::Invalid {
        path: display(path),
        message: "not valid UTF-8".into(),
    })?;
    Ok((text, file))
}

fn load_sheet(path: &Path) -> Result<(SpreadsheetInstance, InputFile), CliError> {
    let (text, file) = read(path)?;
    let program = load_program(&text).map_err(|e| CliError::Parse {
        path: display(path),
        line: e.line(),
        message: e.to_string(),
    })?;
    Ok((instantiate(program, []).expect("no bindings"), file))
}

fn load_spec(path: &Path, program: &SpreadsheetProgram) -> Result<(IntervalSpec, InputFile), CliError> {
    let (text, file) = read(path)?;
    let spec = parse_interval_spec(&text).map_err(|e| match e {
        gridaudit_core::SpecError::MalformedLine { line, .. } | gridaudit_core::SpecError::Duplicate { line, .. } => {
            CliError::Parse {
                path: display(path),
                line,
                message: e.to_string(),
            }
        }
        other => CliError::Invalid {
            path: display(path),
            message: other.to_string(),
        },
    })?;
    spec.validate(program).map_err(|e| CliError::Invalid {
        path: display(path),
        message: e.to_string(),
    })?;
    Ok((spec, file))
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Text => report.render_text(),
        Format::Json => report.render_json(),
    }
}

/// Runs one command. Load failures are errors; findings are not.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Check { sheet } => {
            let (inst, file) = load_sheet(sheet)?;
            let p = inst.program();
            let eval = eval_instance_lenient(&inst);
            let diagnostics = detect_all(p, Some(&eval));
            let exit_code = if diagnostics.is_empty() { EXIT_CLEAN } else { EXIT_FINDINGS };
            let report = Report {
                command: "check".into(),
                inputs: vec![file],
                summary: Some(Summary::of(p)),
                diagnostics: Some(diagnostics),
                ..Report::default()
            };
            Ok(Outcome {
                output: render(&report, cli.format),
                exit_code,
            })
        }
        Command::Test { sheet, intervals } => {
            let (inst, sheet_file) = load_sheet(sheet)?;
            let (spec, spec_file) = load_spec(intervals, inst.program())?;
            let test = run_interval_test(&inst, &spec).map_err(|e| CliError::Invalid {
                path: display(sheet),
                message: e.to_string(),
            })?;
            let exit_code = if test.has_symptoms() { EXIT_FINDINGS } else { EXIT_CLEAN };
            let report = Report {
                command: "test".into(),
                inputs: vec![sheet_file, spec_file],
                summary: Some(Summary::of(inst.program())),
                test: Some(test),
                ..Report::default()
            };
            Ok(Outcome {
                output: render(&report, cli.format),
                exit_code,
            })
        }
        Command::Graph { sheet, resolution } => {
            let (inst, _) = load_sheet(sheet)?;
            let p = inst.program();
            let eval = eval_instance_lenient(&inst);
            let diagnostics = detect_all(p, Some(&eval));
            let resolution = match resolution {
                GraphResolution::Cell => Resolution::Cell,
                GraphResolution::Area => Resolution::Area,
            };
            let output = dot::render(
                p,
                &infer_physical_areas(p),
                &infer_logical_areas(p),
                &diagnostics,
                resolution,
            );
            Ok(Outcome {
                output,
                exit_code: EXIT_CLEAN,
            })
        }
        Command::Areas { sheet } => {
            let (inst, file) = load_sheet(sheet)?;
            let p = inst.program();
            let report = Report {
                command: "areas".into(),
                inputs: vec![file],
                summary: Some(Summary::of(p)),
                physical: Some(infer_physical_areas(p)),
                logical: Some(infer_logical_areas(p)),
                ..Report::default()
            };
            Ok(Outcome {
                output: render(&report, cli.format),
                exit_code: EXIT_CLEAN,
            })
        }
    }
}

/// Runs a command and writes its output where the flags say. Returns the
/// process exit status.
pub fn run(cli: &Cli) -> i32 {
    let outcome = match execute(cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &outcome.output) {
                eprintln!("error: {}: {e}", path.display());
                return EXIT_ERROR;
            }
        }
        None => print!("{}", outcome.output),
    }
    outcome.exit_code
}
