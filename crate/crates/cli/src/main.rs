use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use otoc_core::experiment::{run_to_dir, ExperimentConfig, ExperimentKind};
use otoc_core::OtocError;

const EXIT_CONFIG: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;

#[derive(Parser)]
#[command(name = "otoc", version, about = "Bipartite OTOC experiments for quantum channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Override the seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the output directory from the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (falls back to OTOC_THREADS, then to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a config, run it and write result tables plus a manifest.
    Run { config: PathBuf },
    /// Validate a config without computing anything.
    Validate { config: PathBuf },
    /// List the available experiment kinds.
    ListExperiments,
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn load(cli: &Cli, path: &PathBuf) -> Result<(ExperimentConfig, String), OtocError> {
    let (mut config, text) = ExperimentConfig::load(path)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.output.dir = out.clone();
    }
    config.validate()?;
    Ok((config, text))
}

fn thread_count(cli: &Cli) -> Result<Option<usize>, String> {
    if let Some(n) = cli.threads {
        return if n == 0 { Err("--threads must be positive".into()) } else { Ok(Some(n)) };
    }
    match std::env::var("OTOC_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("OTOC_THREADS must be a positive integer, got {v:?}")),
        },
        Err(_) => Ok(None),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match thread_count(&cli) {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                return fail(EXIT_CONFIG, e);
            }
        }
        Ok(None) => {}
        Err(e) => return fail(EXIT_CONFIG, e),
    }
    match &cli.command {
        Command::ListExperiments => {
            for k in ExperimentKind::all() {
                println!("{:<18} {}", k.as_str(), k.describe());
            }
            ExitCode::SUCCESS
        }
        Command::Validate { config } => match load(&cli, config) {
            Ok((c, _)) => {
                println!("ok: {} ({})", config.display(), c.kind.as_str());
                ExitCode::SUCCESS
            }
            Err(e) => fail(EXIT_CONFIG, format!("{}: {e}", config.display())),
        },
        Command::Run { config } => {
            let (c, text) = match load(&cli, config) {
                Ok(x) => x,
                Err(e) => return fail(EXIT_CONFIG, format!("{}: {e}", config.display())),
            };
            match run_to_dir(&c, &text) {
                Ok(m) => {
                    for f in &m.files {
                        println!("{}", c.output.dir.join(f).display());
                    }
                    println!("{}", c.output.dir.join("manifest.json").display());
                    ExitCode::SUCCESS
                }
                Err(e @ OtocError::Io { .. }) => fail(EXIT_CONFIG, e),
                Err(e) => fail(EXIT_NUMERICAL, e),
            }
        }
    }
}
