use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ringqb_cli::{run, Invocation, Subcommand as Cmd};
use ringqb_core::sweep::Figure;

/// Ring-emitter quantum battery simulator.
#[derive(Parser)]
#[command(name = "ringqb", version, about)]
struct Cli {
    /// Configuration file (section-scoped key = value); defaults apply when
    /// omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker count for sweeps (results are identical for any value).
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Assert fully deterministic operation (always true; no RNG anywhere).
    #[arg(long, global = true, default_value_t = true)]
    seedless: bool,

    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Hybridized energies and scaled decay widths over the configured ring sizes.
    Hybridize {
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Also write a gnuplot script next to the CSV.
        #[arg(long)]
        plot_script: bool,
    },
    /// Time evolution with thermodynamic observables and epoch indices.
    Evolve {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        plot_script: bool,
    },
    /// Steady-state observables, one row.
    Steady {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        plot_script: bool,
    },
    /// A figure dataset over the configured sweep axes.
    Sweep {
        /// Which dataset: fig2, fig3, fig4, or fig5.
        #[arg(long)]
        figure: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        plot_script: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (subcommand, out, plot_script) = match cli.command {
        Commands::Hybridize { out, plot_script } => (Cmd::Hybridize, out, plot_script),
        Commands::Evolve { out, plot_script } => (Cmd::Evolve, out, plot_script),
        Commands::Steady { out, plot_script } => (Cmd::Steady, out, plot_script),
        Commands::Sweep {
            figure,
            out,
            plot_script,
        } => match Figure::from_name(&figure) {
            Some(f) => (Cmd::Sweep { figure: f }, out, plot_script),
            None => {
                eprintln!("error: code=bad-figure message=\"unknown figure '{figure}'\"");
                return ExitCode::FAILURE;
            }
        },
    };
    let invocation = Invocation {
        subcommand,
        config_path: cli.config,
        out_path: out,
        jobs: cli.jobs.max(1),
        plot_script,
    };
    match run(&invocation) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: code={} message=\"{e}\"", e.code());
            ExitCode::FAILURE
        }
    }
}
