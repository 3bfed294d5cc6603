//! `twoproj` command-line tool.
//!
//! Exit codes: `0` success, `1` I/O or parse error, `2` validation error,
//! `3` numerical classification error, `4` a law check failed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Debug, Parser)]
#[command(
    name = "twoproj",
    version,
    about = "Canonical form and anticommutator spectra of projection pairs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Six-subspace canonical form of a pair file.
    Decompose {
        #[arg(long)]
        input: PathBuf,
        /// Classification tolerance for eigenvalues near 0 and 1.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Predicted vs. computed spectra, norm identity, bound and inclusions.
    Predict {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 1e-9)]
        norm_tol: f64,
    },
    /// Build a pair from canonical data, target eigenvalues, or a grid.
    #[command(group(ArgGroup::new("source").required(true).args(["q0", "targets", "grid"])))]
    Synthesize {
        /// Comma-separated eigenvalues of Q0, each in (0, 1).
        #[arg(long, allow_hyphen_values = true)]
        q0: Option<String>,
        /// Comma-separated anticommutator eigenvalues, each in [-1/4, 2].
        #[arg(long, allow_hyphen_values = true)]
        targets: Option<String>,
        /// Grid size m ≥ 2 approximating the interval [-1/4, 2].
        #[arg(long)]
        grid: Option<usize>,
        /// Trivial block sizes h1,h2,h5,h6.
        #[arg(long)]
        dims: Option<String>,
        #[arg(long)]
        conjugate_seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Policy::Smallest)]
        policy: Policy,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Randomized verification campaign.
    Fuzz {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        dim_min: usize,
        #[arg(long, default_value_t = 16)]
        dim_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Classification window around 0 and 1 for the decomposition.
        #[arg(long, default_value_t = 1e-11)]
        class_tol: f64,
        #[arg(long, default_value_t = 1e-9)]
        norm_tol: f64,
        /// Also run one synthesized pair (h1 ≥ 1) per trial.
        #[arg(long)]
        synthesized: bool,
        /// Run trials on all cores.
        #[arg(long)]
        parallel: bool,
        /// Leave wall-clock fields out of the report.
        #[arg(long)]
        omit_timing: bool,
        /// Report destination; the report goes to stdout when absent.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Policy {
    Smallest,
    Largest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Decompose { input, tol } => commands::decompose(&input, tol),
        Command::Predict {
            input,
            tol,
            norm_tol,
        } => commands::predict(&input, tol, norm_tol),
        Command::Synthesize {
            q0,
            targets,
            grid,
            dims,
            conjugate_seed,
            policy,
            output,
        } => {
            let source = match (q0, targets, grid) {
                (Some(q), _, _) => commands::Source::Q0(q),
                (_, Some(t), _) => commands::Source::Targets(t),
                (_, _, Some(m)) => commands::Source::Grid(m),
                _ => unreachable!("clap enforces one source"),
            };
            let policy = match policy {
                Policy::Smallest => twoproj::synth::PreimagePolicy::Smallest,
                Policy::Largest => twoproj::synth::PreimagePolicy::Largest,
            };
            commands::synthesize(
                source,
                dims.as_deref(),
                conjugate_seed,
                policy,
                output.as_deref(),
            )
        }
        Command::Fuzz {
            trials,
            dim_min,
            dim_max,
            seed,
            tol,
            class_tol,
            norm_tol,
            synthesized,
            parallel,
            omit_timing,
            json,
        } => {
            let config = twoproj::CampaignConfig {
                trials,
                dim_min,
                dim_max,
                seed,
                tol,
                class_tol,
                norm_tol,
                include_synthesized: synthesized,
                parallel,
                ..Default::default()
            };
            commands::fuzz(&config, omit_timing, json.as_deref())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
