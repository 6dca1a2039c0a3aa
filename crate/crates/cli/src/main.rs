//! `hiddencomm`: experiments, threshold calculators and density evolution for
//! single hidden-community recovery with side information.
//!
//! Exit status is 0 on success, 2 for invalid parameters or guard violations
//! (including bad flags), and 1 for I/O and other failures.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod curves;
mod de;
mod detect;
mod detector;
mod experiment;
mod generate;
mod options;
mod phase;
mod thresholds;

#[derive(Debug, Parser)]
#[command(name = "hiddencomm", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Repeated generate / detect / score runs, with and without side information.
    Experiment(experiment::ExperimentArgs),
    /// Weak and exact recovery conditions and the BP threshold for one setting.
    Thresholds(thresholds::ThresholdArgs),
    /// Region map over (b, c) in the logarithmic regime.
    Phase(phase::PhaseArgs),
    /// Density-evolution trace, or the b_t bound report.
    De(de::DeArgs),
    /// psi - 1 against a for noisy labels, at fixed b and c.
    PsiCurve(curves::PsiCurveArgs),
    /// Exact-recovery exponent against the side-information strength beta.
    ExponentCurve(curves::ExponentCurveArgs),
    /// Sample a graph and side observations to files.
    Gen(generate::GenArgs),
    /// Run a detector on stored files.
    Detect(detect::DetectArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Experiment(a) => experiment::run(a),
        Command::Thresholds(a) => thresholds::run(a),
        Command::Phase(a) => phase::run(a),
        Command::De(a) => de::run(a),
        Command::PsiCurve(a) => curves::run_psi(a),
        Command::ExponentCurve(a) => curves::run_exponent(a),
        Command::Gen(a) => generate::run(a),
        Command::Detect(a) => detect::run(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<hiddencomm_core::Error>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
