//! Command-line front end for lightlike fronts of world sheets in
//! anti-de Sitter 3-space.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod export;

use std::path::PathBuf;

use adsfront::fronts::SignChoice;
use clap::{Parser, ValueEnum};

use crate::commands::{command, commands, execute, resolve_format, CommandError, RunContext};
use crate::config::{Format, RunConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Plus,
    Minus,
    Both,
}

impl SignArg {
    pub fn signs(self) -> Vec<SignChoice> {
        match self {
            SignArg::Plus => vec![SignChoice::Plus],
            SignArg::Minus => vec![SignChoice::Minus],
            SignArg::Both => SignChoice::BOTH.to_vec(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "adsfront",
    version,
    about = "Lightlike fronts of timelike world sheets in AdS3"
)]
pub struct Cli {
    /// Subcommand: validate, frames, curvatures, front, focal, caustic,
    /// maxwell, classify or report.
    pub command: String,
    /// Run configuration file.
    pub config: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output directory, overriding the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Which front sheets to compute.
    #[arg(long, value_enum, default_value = "both")]
    pub sign: SignArg,
    /// Restrict to a single slice t.
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Artifact format: csv, obj or json.
    #[arg(long)]
    pub format: Option<Format>,
}

fn command_list() -> String {
    commands()
        .iter()
        .map(|c| format!("  {:<11}{}", c.name(), c.about()))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_cli(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run_cli(cli: &Cli) -> Result<bool, CommandError> {
    let cmd = command(&cli.command).ok_or_else(|| {
        CommandError::Usage(format!(
            "unknown command '{}'; available:\n{}",
            cli.command,
            command_list()
        ))
    })?;
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CommandError::Usage("--threads must be positive".into()));
        }
        // A pool may already exist when called repeatedly in one process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let config = RunConfig::load(&cli.config)?;
    let format = resolve_format(cmd, cli.format, &config.outputs.formats)?;
    let ctx = RunContext::new(config, cli.sign.signs(), cli.t, cli.out.clone())?;
    log::info!("{}: {} slices, n_s = {}", cmd.name(), ctx.ts.len(), ctx.grid.n_s);
    match execute(cmd, &ctx, format) {
        Ok((path, passed)) => {
            println!("{}", path.display());
            Ok(passed)
        }
        Err(CommandError::Validation(report)) => {
            let path = commands::write_validation_failure(&ctx, &report)?;
            eprintln!("validation failed; see {}", path.display());
            Ok(false)
        }
        Err(e) => Err(e),
    }
}
