mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use idi_phase::verify::{VerifyScope, DEFAULT_SEED};

use crate::config::{Overrides, RunConfig};
use crate::error::CliError;

#[derive(Parser)]
#[command(
    name = "idi-phase",
    version,
    about = "Phase retrieval from intensity correlations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute g2/g3/g4 tables from an emitter configuration.
    Simulate(RunArgs),
    /// Count closure equations on a detector grid.
    Enumerate {
        #[arg(long)]
        pixels: usize,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Recover Fourier phases from simulated or measured correlations.
    Retrieve(RunArgs),
    /// Run the built-in consistency checks.
    Verify {
        #[arg(long, value_enum, default_value_t = Scope::All)]
        scope: Scope,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    prune_g4: bool,
    #[arg(long)]
    both_reflections: bool,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    noise_sigma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Also write a CSV of plot series to this path.
    #[arg(long)]
    emit_plot_data: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scope {
    Oracle,
    Counting,
    G4Consistency,
    All,
}

impl From<Scope> for VerifyScope {
    fn from(s: Scope) -> Self {
        match s {
            Scope::Oracle => VerifyScope::Oracle,
            Scope::Counting => VerifyScope::Counting,
            Scope::G4Consistency => VerifyScope::G4Consistency,
            Scope::All => VerifyScope::All,
        }
    }
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::load(&self.config)?;
        cfg.apply(&Overrides {
            order: self.order,
            prune_g4: self.prune_g4,
            both_reflections: self.both_reflections,
            tol: self.tol,
            noise_sigma: self.noise_sigma,
            seed: self.seed,
            out: self.out.clone(),
        });
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(a) => {
            let cfg = a.load()?;
            for p in commands::simulate(&cfg, a.emit_plot_data.as_deref())? {
                println!("wrote {}", p.display());
            }
        }
        Command::Enumerate { pixels, dim, out } => {
            if pixels < 2 || !(1..=2).contains(&dim) {
                return Err(CliError::Validation(format!(
                    "need pixels >= 2 and dim in 1..=2, got pixels={pixels} dim={dim}"
                )));
            }
            let (c, path) = commands::enumerate(pixels, dim, &out)?;
            println!(
                "M={} d={}: total {} trivial {} redundant {} canonical {} (closed form {}, {})",
                c.pixels,
                c.dim,
                c.total,
                c.trivial,
                c.redundant,
                c.canonical,
                c.formula_canonical,
                if c.matches { "match" } else { "MISMATCH" }
            );
            println!("unknown phases {}", c.unknowns);
            println!("wrote {}", path.display());
            if !c.matches {
                return Err(CliError::Inconsistent(
                    "census disagrees with its closed form".into(),
                ));
            }
        }
        Command::Retrieve(a) => {
            let cfg = a.load()?;
            let (status, path) = commands::retrieve(&cfg, a.emit_plot_data.as_deref())?;
            println!("status {}", commands::status_name(status));
            println!("wrote {}", path.display());
        }
        Command::Verify { scope, seed } => {
            let outcomes = commands::run_verify(scope.into(), seed)?;
            let mut failed = 0;
            for o in &outcomes {
                println!(
                    "{} {}: {} cases, max residual {:.3e} (tol {:.1e})",
                    if o.passed() { "PASS" } else { "FAIL" },
                    o.name,
                    o.cases,
                    o.max_residual,
                    o.tolerance
                );
                for f in &o.failures {
                    println!("    {f}");
                }
                failed += usize::from(!o.passed());
            }
            if failed > 0 {
                return Err(CliError::Inconsistent(format!("{failed} check(s) failed")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
