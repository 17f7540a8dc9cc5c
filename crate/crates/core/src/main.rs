use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use landing_approval::harness::{self, Command, ExperimentSpec, HarnessConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Validate,
    Boundary,
    Calibrate,
    Sweep,
    Report,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Validate => Command::Validate,
            Cmd::Boundary => Command::Boundary,
            Cmd::Calibrate => Command::Calibrate,
            Cmd::Sweep => Command::Sweep,
            Cmd::Report => Command::Report,
        }
    }
}

/// Sequential Bayesian deployment approval for landing controllers.
#[derive(Debug, Parser)]
#[command(name = "landing-approval", version)]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,
    /// JSON experiment config; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "LANDING_APPROVAL_OUT")]
    out: PathBuf,
    /// Worker threads for rollout generation.
    #[arg(long, default_value_t = 1)]
    parallel: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let config = match &cli.config {
        Some(path) => HarnessConfig::load(path),
        None => Ok(HarnessConfig::default()),
    };
    let result = config.and_then(|config| {
        let spec = ExperimentSpec::new(cli.command.into(), config, cli.seed, cli.out).with_parallelism(cli.parallel);
        harness::run(&spec)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
