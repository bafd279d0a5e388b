//! Command-line front end for the `dfs-core` simulator.
//!
//! Exit codes: 0 when every check passes, 1 for usage or config errors,
//! 2 when a physics check fails.

pub mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use config::{OutputFormat, RunConfig};
use report::Report;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PHYSICS: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("output error: {0}")]
    Output(String),
}

impl From<dfs_core::Error> for CliError {
    fn from(e: dfs_core::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "dfs-ion", version, about = "Pair-encoded trapped-ion gate and teleportation checks")]
pub struct Cli {
    /// Flat TOML config file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Named parameter set applied before the config file.
    #[arg(long, global = true, value_name = "NAME")]
    pub preset: Option<String>,
    /// Override one config key; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compose the CNOT pulse sequence and compare with the truth table.
    CnotVerify,
    /// Teleport over a grid of input phases.
    Teleport {
        /// Use the printed correction table instead of the derived one.
        #[arg(long)]
        paper_table: bool,
    },
    /// Closed-form effective Rabi frequency against the ladder model.
    Rabi,
    /// Gate durations for the configured trap.
    Timing,
    /// Collective dephasing of encoded and bare qubits.
    Dephase,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::CnotVerify => "cnot-verify",
            Command::Teleport { .. } => "teleport",
            Command::Rabi => "rabi",
            Command::Timing => "timing",
            Command::Dephase => "dephase",
        }
    }
}

/// Layers defaults, preset, config file, `--set` overrides and flags.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let file = match &cli.config {
        Some(path) => Some(
            std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?,
        ),
        None => None,
    };
    let file_preset = match &file {
        Some(text) => text
            .parse::<toml::Table>()
            .map_err(|e| CliError::Config(format!("config parse error: {e}")))?
            .get("preset")
            .and_then(|v| v.as_str())
            .map(str::to_owned),
        None => None,
    };
    let mut cfg = match cli.preset.as_deref().or(file_preset.as_deref()) {
        Some(name) => config::preset(name)?,
        None => RunConfig::default(),
    };
    if let Some(text) = &file {
        let selected = cfg.preset.clone();
        cfg.merge_toml(text)?;
        // the flag wins over a preset named in the file
        if cli.preset.is_some() {
            cfg.preset = selected;
        }
    }
    for assignment in &cli.overrides {
        if assignment.trim_start().starts_with("preset") {
            return Err(CliError::Config("select presets with --preset".into()));
        }
        cfg.set_override(assignment)?;
    }
    if let Some(f) = cli.format {
        cfg.format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
    }
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Command::Teleport { paper_table: true } = cli.command {
        cfg.paper_table = true;
    }
    Ok(cfg)
}

pub fn run_command(command: &Command, cfg: &RunConfig) -> Result<Report, CliError> {
    match command {
        Command::CnotVerify => commands::cnot_verify(cfg),
        Command::Teleport { .. } => commands::teleport(cfg),
        Command::Rabi => commands::rabi(cfg),
        Command::Timing => commands::timing(cfg),
        Command::Dephase => commands::dephase(cfg),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_PASS
            };
        }
    };
    let result = resolve_config(&cli).and_then(|cfg| {
        let report = run_command(&cli.command, &cfg)?;
        let bytes = report.render(&cfg)?;
        match &cfg.out {
            Some(path) => std::fs::write(path, &bytes)
                .map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display())))?,
            None => stdout
                .write_all(&bytes)
                .map_err(|e| CliError::Output(e.to_string()))?,
        }
        Ok(report)
    });
    match result {
        Ok(report) => {
            for line in &report.notes {
                let _ = writeln!(stderr, "{line}");
            }
            let verdict = if report.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(stderr, "{}: {verdict}", cli.command.name());
            if report.passed {
                EXIT_PASS
            } else {
                EXIT_PHYSICS
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}
