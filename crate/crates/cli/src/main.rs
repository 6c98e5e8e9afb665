mod commands;
mod config;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::Outputs;
use crate::config::{ConfigError, RunConfig, WeightsKey};

#[derive(Parser)]
#[command(
    name = "sgconsol",
    version,
    about = "Second-gradient poroelastic consolidation solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Configuration file; the reference material is used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `[output] dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, conflicts_with = "trunc_target")]
    modes: Option<usize>,
    #[arg(long, global = true)]
    trunc_target: Option<f64>,
    #[arg(long, global = true)]
    allow_unstable: bool,
    #[arg(long, global = true, value_enum)]
    weights: Option<WeightsArg>,
    /// Accepted for interface compatibility; every workflow is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also write gnuplot scripts.
    #[arg(long, global = true)]
    plot: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightsArg {
    Resolved,
    PaperLiteral,
}

#[derive(Clone, Copy, Subcommand)]
enum Command {
    /// Series solution: profiles, spectrum, Gram matrix, summary.
    Solve,
    /// Eigenvalues, norms and Fourier coefficients.
    Spectrum,
    /// Classical limit: series and finite-difference profiles.
    Terzaghi,
    /// Distance to the classical limit at zero prestress.
    Compare,
    /// First eigenvalue across prestress and the stability threshold.
    Sweep,
}

fn config(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(dir) = &cli.out {
        cfg.output.dir = dir.clone();
    }
    if let Some(n) = cli.modes {
        cfg.numerics.modes = Some(n);
        cfg.numerics.trunc_target = None;
    }
    if let Some(t) = cli.trunc_target {
        cfg.numerics.trunc_target = Some(t);
        cfg.numerics.modes = None;
    }
    cfg.numerics.allow_unstable |= cli.allow_unstable;
    if let Some(w) = cli.weights {
        cfg.numerics.weights = match w {
            WeightsArg::Resolved => WeightsKey::Resolved,
            WeightsArg::PaperLiteral => WeightsKey::PaperLiteral,
        };
    }
    cfg.output.plot |= cli.plot;
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let cfg = config(cli)?;
    let mut out = Outputs::new(&cfg.output.dir)?;
    match cli.command {
        Command::Solve => commands::run_solve(&cfg, &mut out)?,
        Command::Spectrum => commands::run_spectrum(&cfg, &mut out)?,
        Command::Terzaghi => commands::run_terzaghi(&cfg, &mut out)?,
        Command::Compare => commands::run_compare(&cfg, &mut out)?,
        Command::Sweep => commands::run_sweep(&cfg, &mut out)?,
    }
    Ok(out.written)
}

/// Exit code and machine-readable kind of a failure.
fn classify(err: &anyhow::Error) -> (u8, &'static str) {
    use sgconsol::Error as E;
    if err.downcast_ref::<ConfigError>().is_some() {
        return (2, "ConfigError");
    }
    match err.downcast_ref::<E>() {
        Some(e @ (E::PositivityViolation(_) | E::InvalidInput(_) | E::MismatchedParams(_))) => {
            (2, e.kind())
        }
        Some(e @ (E::CriticalPrestress | E::StabilityError { .. } | E::UndeterminedConstant)) => {
            (3, e.kind())
        }
        Some(e) => (4, e.kind()),
        None => (1, "IoError"),
    }
}

fn fail(code: u8, kind: &str, msg: &str) -> ExitCode {
    eprintln!("ERROR:{kind}:{}", msg.replace('\n', " "));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            return fail(
                2,
                "ArgumentError",
                msg.lines().next().unwrap_or("invalid arguments"),
            );
        }
    };
    match run(&cli) {
        Ok(written) => {
            for p in written {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            let (code, kind) = classify(&err);
            fail(code, kind, &format!("{err:#}"))
        }
    }
}
