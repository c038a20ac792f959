use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use viscomem::compare::{compare, Oracle};
use viscomem::config::RunConfig;
use viscomem::run::{run, RunOptions};
use viscomem::scenarios::{bundled, BUNDLED};
use viscomem::Error;

const EXIT_COMPARE_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_ABORT: u8 = 3;
const EXIT_NOT_CONVERGED: u8 = 4;

#[derive(Parser)]
#[command(name = "viscomem", version, about = "Integral viscoelastic flow solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configuration and write a run directory.
    Run {
        #[arg(long, conflicts_with = "scenario")]
        config: Option<PathBuf>,
        /// Name of a bundled scenario (see list-scenarios).
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Checkpoint every N steps unless the config sets a cadence.
        #[arg(long, value_name = "N", num_args = 0..=1, default_missing_value = "100")]
        emit_checkpoints: Option<usize>,
    },
    /// Compare a run directory against an oracle.
    Compare {
        run_dir: PathBuf,
        /// startup-shear | ucm-ode | lcm-ode | newtonian | run:<dir>
        #[arg(long)]
        oracle: String,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Multiplies the stress columns of a run: reference.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
    /// Parse and check a configuration without running it.
    ValidateConfig {
        #[arg(long)]
        config: PathBuf,
    },
    /// List the bundled scenarios.
    ListScenarios,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Inadmissible(_) | Error::SchemaMismatch(_) => EXIT_CONFIG,
        Error::NotConverged { .. } => EXIT_NOT_CONVERGED,
        _ => EXIT_ABORT,
    }
}

fn load(config: Option<PathBuf>, scenario: Option<String>) -> Result<RunConfig, Error> {
    match (config, scenario) {
        (Some(p), _) => RunConfig::from_path(&p),
        (None, Some(name)) => bundled(&name),
        (None, None) => Err(Error::Config("pass --config or --scenario".into())),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            scenario,
            out_dir,
            seed,
            emit_checkpoints,
        } => {
            let cfg = match load(config, scenario) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            let opts = RunOptions { seed, emit_checkpoints };
            match run(&cfg, &out_dir, &opts) {
                Ok(art) => match art.failure {
                    None => {
                        println!("{}: ok ({} files in {})", cfg.scenario.name, art.manifest.files.len(), art.dir.display());
                        ExitCode::SUCCESS
                    }
                    Some(e) => {
                        eprintln!("error: {e}");
                        ExitCode::from(exit_code(&e))
                    }
                },
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(exit_code(&e))
                }
            }
        }
        Command::Compare {
            run_dir,
            oracle,
            tol,
            scale,
        } => {
            let result = oracle
                .parse::<Oracle>()
                .and_then(|o| compare(&run_dir, &o, tol, scale));
            match result {
                Ok(report) => {
                    print!("{}", report.to_text());
                    if report.pass {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(EXIT_COMPARE_FAILED)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(exit_code(&e))
                }
            }
        }
        Command::ValidateConfig { config } => match RunConfig::from_path(&config) {
            Ok(cfg) => {
                let kind = if cfg.is_stationary() { "stationary" } else { "transient" };
                println!("{}: valid {kind} configuration", cfg.scenario.name);
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_CONFIG)
            }
        },
        Command::ListScenarios => {
            for (name, _) in BUNDLED {
                let description = bundled(name).map(|c| c.scenario.description).unwrap_or_default();
                println!("{name:<24}{description}");
            }
            ExitCode::SUCCESS
        }
    }
}
