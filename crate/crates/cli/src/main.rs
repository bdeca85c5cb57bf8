use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gdiff_cli::problem::BackendKind;
use gdiff_cli::{render_structured, render_text, CliError, Options};

#[derive(Parser)]
#[command(name = "gdiff", version, about = "Solve G-difference equations described in a problem file")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task in a problem file.
    Run {
        file: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Overrides the file's backend.
        #[arg(long)]
        backend: Option<BackendKind>,
        /// Overrides the file's tolerance.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        output: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Run tasks on a thread pool; the report order is unchanged.
        #[arg(long)]
        parallel: bool,
    },
    /// Resolve every definition and report the ones that fail.
    Validate {
        file: String,
        #[arg(long)]
        backend: Option<BackendKind>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
}

fn exec(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Run { file, seed, backend, epsilon, output, format, parallel } => {
            let problem = gdiff_cli::read(&file)?;
            let report = gdiff_cli::run(&problem, &Options { seed, backend, epsilon, parallel })?;
            let text = match format {
                Format::Text => render_text(&report),
                Format::Structured => render_structured(&report),
            };
            match output {
                Some(path) => std::fs::write(&path, text).map_err(|source| CliError::Io { path, source })?,
                None => print!("{text}"),
            }
            Ok(report.passed)
        }
        Command::Validate { file, backend, epsilon } => {
            let problem = gdiff_cli::read(&file)?;
            let defs = gdiff_cli::validate(&problem, &Options { backend, epsilon, ..Options::default() })?;
            let mut ok = true;
            for d in &defs {
                match &d.error {
                    None => println!("[ok] {} {}", d.table, d.name),
                    Some(e) => {
                        ok = false;
                        println!("[invalid] {} {}: {e}", d.table, d.name);
                    }
                }
            }
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    match exec(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("gdiff: {e}");
            ExitCode::from(2)
        }
    }
}
