//! Batch front end for `cadist-core`.
//!
//! Every subcommand produces one artifact, JSON or CSV, that starts with a
//! header block naming the tool version, a digest of the effective
//! configuration, the seed and the structure's constants.

pub mod args;
mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;

use cadist_core::filling::FillingConstants;
use clap::Parser;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::Cli;
use crate::config::{Budgets, ConfigFile};

pub use crate::config::BUDGET_ENV;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] cadist_core::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_budget() => EXIT_BUDGET,
            _ => EXIT_USAGE,
        }
    }

    fn status(&self) -> &'static str {
        match self.exit_code() {
            EXIT_BUDGET => "budget_exhausted",
            _ => "usage_error",
        }
    }
}

pub enum Body {
    Json(Value),
    Csv(String),
}

/// What a subcommand hands back for emission.
pub struct Outcome {
    pub file_name: String,
    pub body: Body,
    pub summary: String,
    pub constants: Option<FillingConstants>,
    /// Empty when every check passed.
    pub failures: Vec<Value>,
}

/// Resolved run settings passed to the subcommands.
pub struct Run {
    pub seed: u64,
    pub budgets: Budgets,
    pub out_dir: Option<PathBuf>,
}

#[derive(Serialize)]
struct Header<'a> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'a str,
    config_digest: &'a str,
    seed: u64,
    constants: Option<FillingConstants>,
}

impl Header<'_> {
    fn csv_lines(&self) -> String {
        let constants = match &self.constants {
            Some(k) => format!(
                "m={} e={} c={} d={} varsigma={} D={}",
                k.m, k.e, k.c, k.d, k.varsigma, k.dehn
            ),
            None => "none".into(),
        };
        format!(
            "# tool: {}\n# version: {}\n# subcommand: {}\n# config_digest: {}\n# seed: {}\n# constants: {}\n",
            self.tool, self.version, self.subcommand, self.config_digest, self.seed, constants
        )
    }
}

/// Parses `argv`, runs the subcommand and returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let subcommand = cli.command.name();
    match execute(cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let record =
                json!({ "status": e.status(), "subcommand": subcommand, "message": e.to_string() });
            let _ = writeln!(stderr, "{record}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let subcommand = cli.command.name();
    let config = match &cli.config {
        Some(path) => ConfigFile::load(path, subcommand)?,
        None => ConfigFile::default(),
    };
    let global = config::merge(&cli.global, config.global)?;
    let budgets = Budgets::resolve(&global, std::env::var(BUDGET_ENV).ok().as_deref())?;
    let seed = global.seed.unwrap_or(0);
    let run = Run {
        seed,
        budgets,
        out_dir: global.out_dir.clone(),
    };

    let work = || commands::dispatch(&cli.command, config.options, &run);
    let (options, outcome) = match global.threads {
        Some(0) => return Err(CliError::Usage("--threads must be positive".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(work)?,
        None => work()?,
    };

    let digest = config::digest(subcommand, &options, &run.budgets, seed);
    let header = Header {
        tool: "cadist",
        version: env!("CARGO_PKG_VERSION"),
        subcommand,
        config_digest: &digest,
        seed,
        constants: outcome.constants,
    };
    let bytes = match &outcome.body {
        Body::Json(v) => {
            let doc = json!({ "header": header, "result": v });
            let mut text = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
            text.push('\n');
            text
        }
        Body::Csv(csv) => header.csv_lines() + csv,
    };

    let target = match (&global.out, &global.out_dir) {
        (Some(out), Some(dir)) if out.is_relative() => Some(dir.join(out)),
        (Some(out), _) => Some(out.clone()),
        (None, Some(dir)) => Some(dir.join(&outcome.file_name)),
        (None, None) => None,
    };
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match &target {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(io)?;
            }
            std::fs::write(path, &bytes).map_err(io)?;
            writeln!(stdout, "{}", outcome.summary).map_err(io)?;
            writeln!(stdout, "wrote {}", path.display()).map_err(io)?;
        }
        None => {
            stdout.write_all(bytes.as_bytes()).map_err(io)?;
            writeln!(stderr, "{}", outcome.summary).map_err(io)?;
        }
    }

    if outcome.failures.is_empty() {
        Ok(EXIT_OK)
    } else {
        let record = json!({
            "status": "verification_failed",
            "subcommand": subcommand,
            "config_digest": digest,
            "seed": seed,
            "failures": outcome.failures,
        });
        writeln!(stderr, "{record}").map_err(io)?;
        Ok(EXIT_FAILED)
    }
}
