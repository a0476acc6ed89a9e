use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use homfft::experiments::{self, RunConfig, RunOutcome};
use homfft::Method;

#[derive(Parser)]
#[command(name = "homfft", version, about = "FFT-based periodic homogenization of linear elastic composites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured cell problem(s) on one grid.
    Solve(RunArgs),
    /// Sweep over the grid sizes listed in the config.
    SweepGrid(RunArgs),
    /// Sweep over core/coating contrasts on the coated disk.
    SweepContrast(RunArgs),
    /// Write phase and Young's modulus maps of the configured structure.
    DumpStructure(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Fp,
    Krylov,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Restrict to one solver.
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Restrict to one problem order.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    alpha: Option<u8>,
    /// Assemble the first-order corrector before timing order-2 solves.
    #[arg(long)]
    seed_cache: bool,
    /// Run sweep points concurrently.
    #[arg(long)]
    parallel: bool,
}

impl RunArgs {
    fn load(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = RunConfig::load(&self.config).with_context(|| format!("loading {}", self.config.display()))?;
        if let Some(out) = &self.out {
            cfg.output.dir = out.clone();
        }
        if let Some(m) = self.method {
            cfg.solver.methods = vec![match m {
                MethodArg::Fp => Method::FixedPoint,
                MethodArg::Krylov => Method::Krylov,
            }];
        }
        if let Some(a) = self.alpha {
            cfg.alphas = vec![a as usize];
        }
        cfg.seed_cache |= self.seed_cache;
        cfg.parallel |= self.parallel;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn report(outcome: &RunOutcome) -> ExitCode {
    for r in &outcome.rows {
        println!(
            "{:<11} n={:<5} alpha={} iterations={:<6} residual={:.3e} time={:.3}s converged={}",
            r.method, r.n, r.alpha, r.iterations, r.final_residual, r.wall_time_seconds, r.converged
        );
    }
    println!("wrote {}", outcome.results_path.display());
    if outcome.all_converged() {
        ExitCode::SUCCESS
    } else {
        eprintln!("warning: at least one solve did not converge");
        ExitCode::from(2)
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    Ok(match cli.command {
        Command::Solve(args) => report(&experiments::run_single(&args.load()?)?),
        Command::SweepGrid(args) => report(&experiments::run_grid_sweep(&args.load()?)?),
        Command::SweepContrast(args) => report(&experiments::run_contrast_sweep(&args.load()?)?),
        Command::DumpStructure(args) => {
            for p in experiments::dump_structure(&args.load()?)? {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
