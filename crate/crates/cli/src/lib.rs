//! Command-line front end for the affine-algebroid engine.
//!
//! Spec files (`.alg`, TOML) are loaded by [`spec`]; [`commands`] holds the
//! verbs. Exit codes: 0 ok, 1 mathematical failure, 2 usage or parse error.

pub mod commands;
pub mod spec;

use std::path::{Path, PathBuf};

use affine_algebroid::symkernel::{DEFAULT_SEED, DEFAULT_TOL};
use affine_algebroid::ZeroTest;
use clap::{Parser, Subcommand};

use commands::{CliError, Options, Report, StepOverrides};

#[derive(Debug, Parser)]
#[command(name = "affalg", version, about = "Lie algebroids on affine bundles: validate, derive, lift, integrate")]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the primary output to this file (trajectories: `.json` or CSV).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for the randomized zero test.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Tolerance for the randomized zero test.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the algebroid axioms.
    Validate {
        file: PathBuf,
        /// Also check that d f = e^0 for this base function.
        #[arg(long, allow_hyphen_values = true)]
        exactness: Option<String>,
    },
    /// Print the Lagrangian pseudo-SODE.
    Derive { file: PathBuf },
    /// Print the complete and vertical lifts of a section given by its e0..en coefficients.
    /// Put coefficients starting with `-` after `--`.
    Lift {
        file: PathBuf,
        #[arg(required = true, num_args = 1..)]
        coeffs: Vec<String>,
    },
    /// Print the Poisson bracket table on the dual, or the bracket of two functions.
    Poisson {
        file: PathBuf,
        #[arg(requires = "g")]
        f: Option<String>,
        g: Option<String>,
    },
    /// Integrate the Lagrangian pseudo-SODE.
    Integrate {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t0: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        t1: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        h: Option<f64>,
    },
    /// Print the coefficients of the Cartan forms.
    ExportForms { file: PathBuf },
    /// Re-serialize a spec file in canonical form.
    Normalize { file: PathBuf },
}

/// Text destined for stdout and stderr, plus the exit code.
#[derive(Debug, Default)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

fn render(r: &Report, json: bool) -> String {
    if json {
        let mut s = serde_json::to_string_pretty(&r.json).expect("JSON values serialize");
        s.push('\n');
        s
    } else {
        r.text.clone()
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Write { path: path.display().to_string(), source })
}

fn execute(cli: &Cli) -> Result<Output, CliError> {
    let opts = Options { zero_test: ZeroTest::default().with_seed(cli.seed).with_tol(cli.tol) };
    if cli.tol.is_nan() || cli.tol <= 0.0 {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", cli.tol)));
    }
    let report = match &cli.command {
        Command::Validate { file, exactness } => commands::validate(&spec::load(file)?, &opts, exactness.as_deref())?,
        Command::Derive { file } => commands::derive(&spec::load(file)?, &opts)?,
        Command::Lift { file, coeffs } => commands::lift(&spec::load(file)?, &opts, coeffs)?,
        Command::Poisson { file, f, g } => {
            let pair = f.as_deref().zip(g.as_deref());
            commands::poisson(&spec::load(file)?, &opts, pair)?
        }
        Command::ExportForms { file } => commands::export_forms(&spec::load(file)?, &opts)?,
        Command::Normalize { file } => {
            // TOML is the machine form here; --json wraps it in a string.
            commands::normalize(&spec::load(file)?)
        }
        Command::Integrate { file, t0, t1, h } => {
            let model = spec::load(file)?;
            let run = commands::integrate(&model, &opts, StepOverrides { t0: *t0, t1: *t1, h: *h })?;
            let summary = run.summary();
            let as_json = |v: &serde_json::Value| serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n";
            let traj = match &cli.out {
                Some(p) if p.extension().is_some_and(|e| e == "json") => as_json(&run.to_json()),
                Some(_) => run.to_csv(),
                None if cli.json => as_json(&run.to_json()),
                None => run.to_csv(),
            };
            let code = u8::from(summary.failed);
            return Ok(match &cli.out {
                Some(p) => {
                    write_file(p, &traj)?;
                    Output { stdout: render(&summary, cli.json), stderr: String::new(), code }
                }
                None => Output { stdout: traj, stderr: summary.text, code },
            });
        }
    };
    finish(cli, &report)
}

fn finish(cli: &Cli, report: &Report) -> Result<Output, CliError> {
    let text = render(report, cli.json);
    let code = u8::from(report.failed);
    match &cli.out {
        Some(p) => {
            write_file(p, &text)?;
            Ok(Output { code, ..Output::default() })
        }
        None => Ok(Output { stdout: text, code, ..Output::default() }),
    }
}

/// Run a parsed command line; errors become exit code 1 or 2 with a message.
pub fn run(cli: &Cli) -> Output {
    match execute(cli) {
        Ok(o) => o,
        Err(e) => Output { stdout: String::new(), stderr: format!("error: {e}\n"), code: e.exit_code() },
    }
}
