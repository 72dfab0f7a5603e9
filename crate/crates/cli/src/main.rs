use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use ostbc_precoder::precoder::QForm;
use ostbc_precoder_cli::{run, CliError, Command, Run};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum QFormArg {
    Corrected,
    Printed,
}

/// Minimum-variance OSTBC precoder simulations.
///
/// Set PRECODER_THREADS to cap the worker count (0 or unset = all cores).
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    /// TOML config file (not needed for `verify`).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for result.csv, snr_vs_power.svg and run_manifest.txt.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "sweep")]
    command: Command,
    /// Form of Q used by `verify`; `printed` is a negative control.
    #[arg(long, value_enum, default_value = "corrected", hide = true)]
    q_form: QFormArg,
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("PRECODER_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        CliError::Config(format!(
            "PRECODER_THREADS=`{raw}` is not a non-negative integer"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot start {n} worker threads: {e}")))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let r = Run {
        command: args.command,
        config: args.config,
        out: args.out,
        seed: args.seed,
        q_form: match args.q_form {
            QFormArg::Corrected => QForm::Corrected,
            QFormArg::Printed => QForm::Printed,
        },
    };
    let result = init_threads().and_then(|()| run(&r, &mut std::io::stdout().lock()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
