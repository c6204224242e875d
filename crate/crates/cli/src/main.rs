use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gearforge_cli::registry::BuilderRegistry;
use gearforge_cli::run::{load_spec, run_check, run_gen, run_solve, RunFlags};

#[derive(Parser)]
#[command(name = "gearforge", version, about = "Generate, verify and export gear trains from spec files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate geometry: profiles to SVG, solids to STL.
    Gen(CommonArgs),
    /// Simulate declared pairs and verify penetration/gap thresholds.
    Check(CommonArgs),
    /// Solve derived quantities (center distances, motion spans) and print
    /// them as key=value lines.
    Solve(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Spec document to read.
    #[arg(long)]
    spec: PathBuf,
    /// Write profile drawings here (gen).
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Write a solid mesh here (gen).
    #[arg(long)]
    stl: Option<PathBuf>,
    /// Write the per-step simulation table here (check).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Simulation steps per pair (check).
    #[arg(long, default_value_t = 36)]
    steps: usize,
    /// Fail check when any pair penetrates deeper than this (mm).
    #[arg(long)]
    penetration_tol: Option<f64>,
    /// Fail check when any pair's closest approach ever exceeds this (mm).
    #[arg(long)]
    gap_tol: Option<f64>,
}

impl CommonArgs {
    fn flags(&self) -> RunFlags {
        RunFlags {
            svg: self.svg.clone(),
            stl: self.stl.clone(),
            report: self.report.clone(),
            steps: self.steps,
            penetration_tol: self.penetration_tol,
            gap_tol: self.gap_tol,
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let registry = BuilderRegistry::standard();
    let outcome = (|| -> anyhow::Result<ExitCode> {
        match &cli.command {
            Command::Gen(args) => {
                run_gen(&load_spec(&args.spec)?, &registry, &args.flags())?;
                Ok(ExitCode::SUCCESS)
            }
            Command::Check(args) => {
                let mut stdout = std::io::stdout().lock();
                let exceeded =
                    run_check(&load_spec(&args.spec)?, &registry, &args.flags(), &mut stdout)?;
                if exceeded {
                    eprintln!("check: thresholds exceeded");
                    Ok(ExitCode::FAILURE)
                } else {
                    Ok(ExitCode::SUCCESS)
                }
            }
            Command::Solve(args) => {
                let mut stdout = std::io::stdout().lock();
                run_solve(&load_spec(&args.spec)?, &registry, &mut stdout)?;
                Ok(ExitCode::SUCCESS)
            }
        }
    })();
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("gearforge: {err:#}");
            ExitCode::FAILURE
        }
    }
}
