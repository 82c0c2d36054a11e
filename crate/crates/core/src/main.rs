use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bosonloc::selftest::run_selftest;
use bosonloc::sweep::{run_experiment, write_designs, ExperimentConfig};
use bosonloc::Error;

#[derive(Parser)]
#[command(name = "bosonloc", version, about = "Two-boson Anderson localization sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an ensemble sweep and write its tables.
    Run(ConfigArgs),
    /// Parse and validate a config without running it.
    Validate(ConfigArgs),
    /// Export waveguide-array designs for realization 0 of every U.
    Design(ConfigArgs),
    /// Run the built-in oracle and invariant checks.
    Selftest,
}

#[derive(Args)]
struct ConfigArgs {
    config: PathBuf,
    /// Override the base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the number of disorder realizations.
    #[arg(long)]
    realizations: Option<usize>,
    /// Worker threads (defaults to available parallelism).
    #[arg(long)]
    threads: Option<usize>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig, Error> {
        let mut config = ExperimentConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            config.seeds.base_seed = seed;
        }
        if let Some(n) = self.realizations {
            config.seeds.realizations = n;
        }
        if let Some(out) = &self.out {
            config.output_dir = Some(out.clone());
        }
        config.validate()?;
        Ok(config)
    }

    fn threads(&self) -> usize {
        self.threads
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}

fn execute(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Validate(args) => {
            let config = args.load()?;
            println!(
                "{}: ok ({} sites, {} U values, {} realizations, {} initial states)",
                config.name,
                config.sites,
                config.u_values.len(),
                config.seeds.realizations,
                config.initial_states.len()
            );
            Ok(0)
        }
        Command::Design(args) => {
            let config = args.load()?;
            let dir = args.out.clone().unwrap_or_else(|| config.output_dir().join("design"));
            for path in write_designs(&config, &dir)? {
                println!("{}", path.display());
            }
            Ok(0)
        }
        Command::Run(args) => {
            let config = args.load()?;
            let result = run_experiment(&config, args.threads())?;
            log::info!(
                "{}: {} cells in {:.1} s, output in {}",
                config.name,
                result.cells.len(),
                result.wall_time.as_secs_f64(),
                config.output_dir().display()
            );
            if result.failures.is_empty() {
                Ok(0)
            } else {
                eprintln!("{} realization(s) failed numerical checks; see summary.json", result.failures.len());
                Ok(2)
            }
        }
        Command::Selftest => {
            let checks = run_selftest();
            for c in &checks {
                println!("{c}");
            }
            Ok(if checks.iter().all(|c| c.passed) { 0 } else { 2 })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
