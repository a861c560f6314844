use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sphere_ls_lab::acceptance::{run_all, Fault};
use sphere_ls_lab::runner::{run_to_dir, summary};
use sphere_ls_lab::{describe, plotdata, ExperimentConfig, LabError, LabResult};

/// Experiments on polynomial concentration over subsets of the sphere.
#[derive(Parser)]
#[command(name = "sphere-ls", version)]
struct Cli {
    /// Print progress and summaries to stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the degree sweep of a config and write `<name>-<hash>.csv`.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Worker threads (0: one per core).
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the acceptance criteria and print one line per criterion.
    Verify {
        /// Criteria to run, e.g. `--only 1,3,10` (default: all).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        /// Inject a fault: kernel-normalization or halved-quadrature.
        #[arg(long)]
        fault: Vec<Fault>,
    },
    /// Collect results CSVs into one `<functional>.csv` per functional.
    Plotdata {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Restrict to one functional.
        #[arg(long)]
        kind: Option<String>,
        #[arg(long, default_value = "plotdata")]
        out: PathBuf,
    },
    /// List the functionals and the quantities they compute.
    Describe,
}

fn execute(cli: Cli) -> LabResult<()> {
    match cli.command {
        Command::Run { config, out, workers, seed } => {
            let mut config = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                config.seed = s;
            }
            let (path, rows) = run_to_dir(&config, &out, workers)?;
            if cli.verbose > 0 {
                eprint!("{}", summary(&config, &rows));
            }
            println!("{}", path.display());
        }
        Command::Verify { only, fault } => {
            let results = run_all(&only, &fault)?;
            for r in &results {
                println!("{r}");
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{} of {} criteria passed", results.len() - failed, results.len());
            if failed > 0 {
                return Err(LabError::Verification(format!("{failed} criteria failed")));
            }
        }
        Command::Plotdata { inputs, kind, out } => {
            for path in plotdata::write(&inputs, kind.as_deref(), &out)? {
                println!("{}", path.display());
            }
        }
        Command::Describe => print!("{}", describe::render()),
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
