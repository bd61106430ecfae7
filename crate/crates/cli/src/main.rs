use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cpi_sim::{demos, load_config, run_experiment, CliError};

/// Correlation plenoptic imaging simulator.
#[derive(Parser)]
#[command(name = "cpi-sim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its outputs.
    Run {
        config: PathBuf,
        /// Worker threads (0 uses all cores).
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Output directory; overrides CPI_SIM_OUT and run.output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides run.seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a config and print it with defaults filled in.
    Validate { config: PathBuf },
    /// Print a bundled config.
    Demo {
        /// One of: defocused, focused, montecarlo, budget.
        name: String,
    },
}

const DEFAULT_OUT: &str = "cpi-sim-out";

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run {
            config,
            threads,
            out,
            seed,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(s) = seed {
                cfg.run.seed = s;
            }
            let out_dir = out
                .or_else(|| std::env::var_os("CPI_SIM_OUT").map(PathBuf::from))
                .or_else(|| cfg.run.output.clone())
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
            let base = config.parent().unwrap_or(Path::new("."));
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .expect("thread pool starts");
            let manifest = pool.install(|| run_experiment(&cfg, base, &out_dir))?;
            println!("{} run finished: {} files in {}", manifest.mode, manifest.files.len() + 1, out_dir.display());
            for stage in &manifest.stages {
                println!("  {:<12} {:.3} s", stage.name, stage.wall_time_s);
            }
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = load_config(&config)?;
            print!("{}", cfg.to_toml());
            Ok(())
        }
        Command::Demo { name } => match demos::demo(&name) {
            Some(text) => {
                print!("{text}");
                Ok(())
            }
            None => Err(CliError::field(
                "demo",
                format!("unknown demo `{name}`; one of {}", demos::names().join(", ")),
            )),
        },
    }
}
