use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dynmle::harness::{run_command, write_run, Command, ExperimentConfig};

/// Maximum likelihood estimation for noisily observed dynamical systems.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Simulate one observation file per entry of n_list.
    Simulate(Common),
    /// Grid and refined MLE for an observation file.
    Mle(WithData),
    /// Normalized log-likelihood surface (simulated data unless --data).
    LikelihoodSurface(WithData),
    /// Consistency sweep over n_list and replications.
    Consistency(Common),
    /// Condition report for the configured family at theta0.
    VerifyConditions(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Parent directory of the run directory [default: config `output`, else ./runs].
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads; never changes results.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Args)]
struct WithData {
    #[command(flatten)]
    common: Common,
    /// Observation file written by `simulate` (or in the same format).
    #[arg(long, value_name = "PATH")]
    data: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common, data) = match cli.command {
        Sub::Simulate(c) => (Command::Simulate, c, None),
        Sub::Mle(w) => (Command::Mle, w.common, w.data),
        Sub::LikelihoodSurface(w) => (Command::LikelihoodSurface, w.common, w.data),
        Sub::Consistency(c) => (Command::Consistency, c, None),
        Sub::VerifyConditions(c) => (Command::VerifyConditions, c, None),
    };
    if let Some(n) = common.threads {
        if n == 0 {
            eprintln!("error: --threads must be >= 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let mut config = match ExperimentConfig::from_path(&common.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    let out = common
        .out
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from("runs"));

    let output = match run_command(&config, command, data.as_deref()) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let dir = match write_run(&out, command, &config, &output) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: cannot write outputs: {e}");
            return ExitCode::from(2);
        }
    };
    println!("{}", dir.display());
    if output.check_failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        for f in &output.check_failures {
            eprintln!("check failed: {f}");
        }
        ExitCode::from(1)
    }
}
