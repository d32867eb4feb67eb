//! Command-line front end for the NTN relay-chain evaluator: configuration
//! handling, figure presets, sweep execution, and CSV emission.

pub mod config;
pub mod output;

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use thiserror::Error;

use ntn_core::evaluator::{run_sweep, EvaluatorError, SweepPlan, SweepRow};
use ntn_core::propagation::AttenuationTables;
use ntn_core::scenarios::Catalog;

pub use config::{parse_grid, resolve, ConfigError, FigurePreset, PartialConfig, RunConfig};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Evaluator(#[from] EvaluatorError),
    #[error("writing {path}: {source}")]
    Output { path: PathBuf, source: csv::Error },
    #[error("I/O on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Outcome of a completed run.
#[derive(Debug)]
pub struct RunSummary {
    pub rows: usize,
    pub failed_points: usize,
    pub output: PathBuf,
}

/// Maps a resolved configuration onto an evaluator sweep plan.
pub fn sweep_plan(config: &RunConfig) -> SweepPlan {
    SweepPlan {
        band: config.band,
        variants: config.variants.clone(),
        axis: config.axis,
        elevation_grid_deg: config.elevation_grid_deg.clone(),
        epsilon_grid_db: config.epsilon_grid_db.clone(),
        engines: config.engines.clone(),
        n_samples: config.n_samples,
        seed: config.seed,
        chain_options: config.chain_options(),
        bandwidth_rule: config.bandwidth_rule,
        outage_definition: config.outage_definition,
    }
}

/// Executes the sweep described by `config` without touching the filesystem.
pub fn execute(
    catalog: &Catalog,
    tables: &AttenuationTables,
    config: &RunConfig,
) -> Result<Vec<SweepRow>, RunError> {
    Ok(run_sweep(catalog, tables, &sweep_plan(config))?)
}

/// Executes the sweep and writes the CSV artifact.
pub fn run(
    catalog: &Catalog,
    tables: &AttenuationTables,
    config: &RunConfig,
) -> Result<RunSummary, RunError> {
    let rows = execute(catalog, tables, config)?;
    let file = File::create(&config.output).map_err(|source| RunError::Io {
        path: config.output.clone(),
        source,
    })?;
    output::write_csv(BufWriter::new(file), &rows).map_err(|source| RunError::Output {
        path: config.output.clone(),
        source,
    })?;
    Ok(RunSummary {
        rows: rows.len(),
        failed_points: rows.iter().filter(|r| r.error.is_some()).count(),
        output: config.output.clone(),
    })
}
