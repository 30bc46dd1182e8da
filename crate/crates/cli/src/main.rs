use std::path::PathBuf;

use clap::Parser;

/// Simulations, steady states and existence scans for the KWC grain-boundary system.
#[derive(Debug, Parser)]
#[command(name = "kwc", version)]
struct Cli {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override a config value, e.g. `--set stepper.h=0.05`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory (overrides the config's `output`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for scans; 0 uses every core.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let inv = kwc_cli::Invocation { config: cli.config, overrides: cli.set, out: cli.out, jobs: cli.jobs };
    std::process::exit(kwc_cli::run(&inv));
}
