//! Command-line front end for the multiscale pipeline.
//!
//! Exit codes: 0 success, 2 numerical failure, 3 configuration error,
//! 4 failed acceptance verdict (`validate` only).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use shellhom::config::RunConfig;
use shellhom::pipeline::{self, RunOptions};

#[derive(Parser)]
#[command(name = "shellhom", version, about = "Two-scale homogenization of periodic composite plates and shells")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (INI).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides [output] directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Treat homogenized-tensor asymmetry warnings as errors.
    #[arg(long, global = true)]
    strict: bool,
    /// Accept archives written for a different config.
    #[arg(long, global = true)]
    force: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Write the macro and cell meshes.
    Mesh,
    /// Solve the cell problems at every representative point.
    Cell,
    /// Solve the homogenized macroscale problem.
    Macro,
    /// Reconstruct two-scale displacement, strain and stress fields.
    Reconstruct,
    /// Predict the critical load multiplier.
    Strength,
    /// Run the convergence study against fine-scale solves.
    Validate,
    /// Run mesh, cell, macro, reconstruct and strength in sequence.
    Pipeline,
}

fn run(cli: &Cli) -> shellhom::Result<u8> {
    let path = cli.config.as_ref().ok_or_else(|| shellhom::Error::Config("--config is required".into()))?;
    let cfg = RunConfig::from_file(path)?;
    let opts = RunOptions {
        out: cli.out.clone().unwrap_or_else(|| cfg.output.directory.clone()),
        strict: cli.strict,
        force: cli.force,
    };
    match cli.command {
        Command::Mesh => pipeline::cmd_mesh(&cfg, &opts)?,
        Command::Cell => {
            pipeline::cmd_cell(&cfg, &opts)?;
        }
        Command::Macro => {
            pipeline::cmd_macro(&cfg, &opts)?;
        }
        Command::Reconstruct => {
            pipeline::cmd_reconstruct(&cfg, &opts)?;
        }
        Command::Strength => {
            print!("{}", pipeline::strength_summary(&pipeline::cmd_strength(&cfg, &opts)?));
        }
        Command::Validate => {
            let (rows, verdict) = pipeline::cmd_validate(&cfg, &opts)?;
            let min_rate = cfg.validate.as_ref().map_or(0.0, |v| v.min_rate);
            print!("{}", pipeline::validate_summary(&rows, &verdict, min_rate));
            if !verdict.passed() {
                return Ok(4);
            }
        }
        Command::Pipeline => {
            if let Some(report) = pipeline::cmd_pipeline(&cfg, &opts)? {
                print!("{}", pipeline::strength_summary(&report));
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let threads = cli.threads.unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start {threads} worker threads: {e}");
            return ExitCode::from(3);
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
