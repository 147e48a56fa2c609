//! `gensob`: runs one experiment from a JSON config and writes
//! `report.json`, `results.csv` and `timing.json` to the output directory.
//!
//! Exit codes: 0 when every check passes, 2 when a check fails, 1 on config
//! errors and failed preconditions.

mod commands;
mod config;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::config::ExperimentConfig;
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "gensob", version, about = "Experiments with generalized Sobolev spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "GENSOB_WORKERS")]
    workers: Option<usize>,
    /// Overrides the config's `seed_base`.
    #[arg(long)]
    seed_base: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Runs the experiment named by the config's `command` key.
    Run(Common),
    WeightsIndices(Common),
    WeightsOrCheck(Common),
    InterpVerify(Common),
    EtaVerify(Common),
    EmbedHormander(Common),
    EmbedNikolskii(Common),
    EmbeddingRatio(Common),
    NoiseCovariance(Common),
    NoiseRegularity(Common),
    DiskSolve(Common),
    DiskApriori(Common),
    DiskConvergence(Common),
}

impl Command {
    fn split(&self) -> (Option<&'static str>, &Common) {
        use Command::*;
        match self {
            Run(c) => (None, c),
            WeightsIndices(c) => (Some("weights-indices"), c),
            WeightsOrCheck(c) => (Some("weights-or-check"), c),
            InterpVerify(c) => (Some("interp-verify"), c),
            EtaVerify(c) => (Some("eta-verify"), c),
            EmbedHormander(c) => (Some("embed-hormander"), c),
            EmbedNikolskii(c) => (Some("embed-nikolskii"), c),
            EmbeddingRatio(c) => (Some("embedding-ratio"), c),
            NoiseCovariance(c) => (Some("noise-covariance"), c),
            NoiseRegularity(c) => (Some("noise-regularity"), c),
            DiskSolve(c) => (Some("disk-solve"), c),
            DiskApriori(c) => (Some("disk-apriori"), c),
            DiskConvergence(c) => (Some("disk-convergence"), c),
        }
    }
}

fn execute(command: Option<&str>, common: &Common) -> Result<bool, CliError> {
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", common.config.display())))?;
    let mut config = ExperimentConfig::parse(&text, command)?;
    if let Some(base) = common.seed_base {
        config.set_seed_base(base);
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = common.workers {
        if w == 0 {
            return Err(CliError::Config("--workers must be at least 1".into()));
        }
        pool = pool.num_threads(w);
    }
    let pool = pool.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;

    let start = Instant::now();
    let outcome = pool.install(|| commands::run(&config))?;
    let seconds = start.elapsed().as_secs_f64();
    report::write_outputs(&common.out, &config, &outcome, seconds)?;

    for c in outcome.checks.iter().filter(|c| !c.pass) {
        eprintln!("check failed: {}: {}", c.name, c.detail);
    }
    let pass = outcome.pass();
    println!("{}: {}", config.command(), if pass { "pass" } else { "fail" });
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let (command, common) = cli.command.split();
    match execute(command, common) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
