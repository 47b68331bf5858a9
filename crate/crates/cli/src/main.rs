use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dipoed_cli::Step;

/// Bayesian optimal sensor placement pipeline.
#[derive(Parser)]
#[command(name = "dipoed", version)]
struct Cli {
    #[arg(value_enum)]
    step: Step,
    /// JSON run configuration.
    #[arg(short, long)]
    config: PathBuf,
    /// Override a config field, e.g. `--set eig.n_out=500`.
    #[arg(short = 's', long = "set", value_name = "PATH=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dipoed_cli::run(cli.step, &cli.config, &cli.overrides) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
