//! Batch front end: a JSON run config in, CSV/JSON/SVG artifacts out, and an
//! exit code that distinguishes bad input (1), solver failure (2) and a
//! violated invariant (3).

pub mod artifact;
pub mod config;
pub mod error;
pub mod modes;
pub mod svg;

use std::path::{Path, PathBuf};

use artifact::ArtifactWriter;
use config::RunConfig;
use error::AppError;

/// Parsed command line.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub config: PathBuf,
    pub overrides: Vec<String>,
    /// Takes precedence over the config's `output`.
    pub out: Option<PathBuf>,
    /// Worker threads for scans; 0 picks one per core.
    pub jobs: usize,
}

const DEFAULT_OUTPUT: &str = "output";

/// Runs one invocation and returns the process exit code. Failures also leave an
/// `error.json` in the output directory.
pub fn run(inv: &Invocation) -> i32 {
    let cfg = match RunConfig::load(&inv.config, &inv.overrides) {
        Ok(c) => c,
        Err(e) => {
            let dir = inv.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT));
            return fail(&dir, "none", "error", &e);
        }
    };
    let dir = inv.out.clone().or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT));
    let hash = cfg.hash();
    let result = ArtifactWriter::new(&dir, cfg.name(), &hash).and_then(|mut out| {
        let stale = dir.join("error.json");
        if stale.exists() {
            std::fs::remove_file(stale)?;
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(inv.jobs)
            .build()
            .map_err(|e| AppError::Validation(format!("worker pool: {e}")))?;
        pool.install(|| modes::execute(&cfg, &mut out))
    });
    match result {
        Ok(()) => 0,
        Err(e) => fail(&dir, &hash, cfg.name(), &e),
    }
}

fn fail(dir: &Path, hash: &str, name: &str, e: &AppError) -> i32 {
    log::error!("{e}");
    match ArtifactWriter::new(dir, name, hash).and_then(|mut w| w.error_json(&e.report())) {
        Ok(p) => log::info!("wrote {}", p.display()),
        Err(io) => log::error!("could not write error.json: {io}"),
    }
    e.exit_code()
}
