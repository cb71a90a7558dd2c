use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qcc::commands::{self, to_json, Format};
use qcc::{CliError, RunConfig};

#[derive(Parser)]
#[command(name = "qcc", version, about = "Relative equilibria of three bodies under quasi-homogeneous potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trace every family, write curves, bifurcation values and metadata.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Level grid size (overrides the config).
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Central configurations with a given moment of inertia.
    Count {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        inertia: f64,
    },
    /// Central configurations at a given level ω².
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        omega2: f64,
    },
    /// Residual and one-period integration check of exported solutions.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        solution: Option<PathBuf>,
        /// Directory written by `analyze`.
        #[arg(long)]
        all: Option<PathBuf>,
        /// Verify only every n-th row of `--all`.
        #[arg(long, default_value_t = 1)]
        stride: usize,
    },
    /// Collinear central configurations at a given level ω².
    Collinear {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        omega2: f64,
    },
    /// Threshold scale of the pair-12 shape.
    Ktilde {
        #[arg(long)]
        config: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    qcc::init_threads()?;
    match cli.command {
        Command::Analyze {
            config,
            out,
            format,
            grid,
        } => {
            let cfg = RunConfig::load(&config)?;
            let analysis = commands::analyze(&cfg, grid)?;
            for path in commands::write_analysis(&analysis, &out, format)? {
                println!("{}", path.display());
            }
        }
        Command::Count { config, inertia } => {
            let cfg = RunConfig::load(&config)?;
            let report = commands::count(&cfg, inertia)?;
            print!("{}", to_json(&report));
            if report.count == 0 {
                return Err(CliError::Empty);
            }
        }
        Command::Solve { config, omega2 } => {
            let cfg = RunConfig::load(&config)?;
            let report = commands::solve(&cfg, omega2)?;
            print!("{}", to_json(&report));
            if report.count == 0 {
                return Err(CliError::Empty);
            }
        }
        Command::Verify {
            config,
            solution,
            all,
            stride,
        } => {
            let cfg = RunConfig::load(&config)?;
            let inputs = match (solution, all) {
                (Some(file), _) => commands::read_solution_file(&file)?,
                (None, Some(dir)) => commands::read_analysis_dir(&dir, stride)?,
                (None, None) => unreachable!("clap requires one of --solution, --all"),
            };
            let report = commands::verify(&cfg, &inputs)?;
            print!("{}", to_json(&report));
            if !report.all_pass() {
                return Err(CliError::VerificationFailed {
                    failed: report.failed,
                    total: report.count,
                });
            }
        }
        Command::Collinear { config, omega2 } => {
            let cfg = RunConfig::load(&config)?;
            let report = commands::collinear(&cfg, omega2)?;
            print!("{}", to_json(&report));
            if report.total == 0 {
                return Err(CliError::Empty);
            }
        }
        Command::Ktilde { config } => {
            let cfg = RunConfig::load(&config)?;
            print!("{}", to_json(&commands::ktilde(&cfg)?));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::Empty) {
                eprintln!("qcc: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
