use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use infocomp::frontier::DEFAULT_RESTARTS;
use infocomp::states::make_state;
use infocomp::{Family, Measure};
use infocomp_cli::figure::{
    frontier_rows, write_figure, FigureId, FigureOptions, FRONTIER_COLUMNS,
};
use infocomp_cli::output::{write_csv, write_sidecar, TOOL_VERSION};
use infocomp_cli::sweep::{sweep, SweepFamily, SweepSpec};
use infocomp_cli::tomo_run::{write_tomo, TomoOptions};
use infocomp_cli::verify::{run_checks, write_report, Fault, VerifyOptions};
use infocomp_cli::{CliError, EXIT_USAGE, EXIT_VERIFY_FAILED};
use serde::Serialize;

/// Information complementarity of two-qubit states: family sweeps, figure
/// tables, the maximal-tangle frontier, simulated tomography and an
/// invariant self-check.
///
/// Exit codes: 0 success, 1 verification failure, 2 usage or runtime error.
#[derive(Debug, Parser)]
#[command(name = "infocomp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate every measure along one family's parameter range.
    Sweep {
        #[arg(long, value_enum)]
        family: SweepFamily,
        /// Start of the parameter range [default: family minimum]
        #[arg(long)]
        from: Option<f64>,
        /// End of the parameter range [default: family maximum]
        #[arg(long)]
        to: Option<f64>,
        /// Exponent of the dephased family
        #[arg(long, default_value_t = 1.0)]
        exponent: f64,
        /// Number of grid points
        #[arg(long, default_value_t = 101)]
        grid: usize,
        /// Information measure
        #[arg(long, default_value = "vn")]
        measure: Measure,
        /// Output CSV [default: stdout]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the data table of one figure, plus a `.meta.json` sidecar.
    Figure {
        #[arg(value_enum)]
        id: FigureId,
        /// Output CSV
        #[arg(long)]
        out: PathBuf,
        /// Points per family sweep
        #[arg(long, default_value_t = 101)]
        grid: usize,
        /// Seed of the frontier search
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Restarts per frontier point
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        /// Entropy grid points of the frontier
        #[arg(long, default_value_t = 21)]
        frontier_grid: usize,
    },
    /// Largest tangle at each total entropy on a uniform grid over [0, 2].
    Frontier {
        /// Entropy grid points (each costs a multi-start search)
        #[arg(long, default_value_t = 21)]
        grid: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        /// Output CSV [default: stdout]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant checks; JSON lines, one per check, then a summary.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Size of each random ensemble
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Deliberately break a pipeline stage (negative control)
        #[arg(long, value_enum)]
        inject_fault: Option<Fault>,
        /// Report path [default: stdout]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulated tomography of a family member with Monte Carlo error bars.
    Tomo {
        #[command(flatten)]
        state: StateArgs,
        /// Expected counts per measurement setting
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        /// Simulated repetitions of the experiment
        #[arg(long, default_value_t = 100)]
        resamples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV [default: stdout]
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the count tables of one simulated experiment
        #[arg(long)]
        counts: Option<PathBuf>,
    },
    /// Print a family member's density matrix as JSON.
    State {
        #[command(flatten)]
        state: StateArgs,
    },
}

#[derive(Debug, Args)]
struct StateArgs {
    /// Family tag: pure, werner, mems, as1, as2, s, d
    #[arg(long)]
    family: String,
    /// Primary parameter (alpha, p, q or gamma)
    #[arg(long)]
    param: f64,
    /// Exponent, for the dephased family only
    #[arg(long)]
    exponent: Option<f64>,
}

impl StateArgs {
    fn family(&self) -> Result<Family, CliError> {
        Ok(Family::from_tag(&self.family, self.param, self.exponent)?)
    }
}

#[derive(Debug, Serialize)]
struct FrontierMeta {
    grid: usize,
    seed: u64,
    restarts: usize,
    columns: &'static [&'static str],
    tool_version: &'static str,
}

fn writer(out: Option<&PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

/// Runs the command; `Ok(false)` means it completed but verification failed.
fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Sweep {
            family,
            from,
            to,
            exponent,
            grid,
            measure,
            out,
        } => {
            let spec = SweepSpec {
                family,
                from,
                to,
                exponent,
                grid,
                measure,
            };
            write_csv(&sweep(&spec)?, out.as_deref())?;
        }
        Command::Figure {
            id,
            out,
            grid,
            seed,
            restarts,
            frontier_grid,
        } => {
            let opts = FigureOptions {
                grid,
                seed,
                restarts,
                frontier_grid,
            };
            write_figure(id, &opts, &out)?;
        }
        Command::Frontier {
            grid,
            seed,
            restarts,
            out,
        } => {
            write_csv(&frontier_rows(grid, restarts, seed)?, out.as_deref())?;
            if let Some(path) = &out {
                write_sidecar(
                    path,
                    &FrontierMeta {
                        grid,
                        seed,
                        restarts,
                        columns: &FRONTIER_COLUMNS,
                        tool_version: TOOL_VERSION,
                    },
                )?;
            }
        }
        Command::Verify {
            seed,
            samples,
            inject_fault,
            out,
        } => {
            let results = run_checks(&VerifyOptions {
                seed,
                samples,
                fault: inject_fault,
            })?;
            return write_report(&results, writer(out.as_ref())?);
        }
        Command::Tomo {
            state,
            shots,
            resamples,
            seed,
            out,
            counts,
        } => {
            let opts = TomoOptions {
                family: state.family()?,
                shots,
                resamples,
                seed,
            };
            write_tomo(&opts, out.as_deref(), counts.as_deref())?;
        }
        Command::State { state } => {
            let rho = make_state(&state.family()?)?;
            let mut w = writer(None)?;
            serde_json::to_writer_pretty(&mut w, &rho)?;
            writeln!(w)?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFY_FAILED as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
