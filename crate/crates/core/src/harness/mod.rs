//! Experiment plumbing: score normalization and aggregation, configuration
//! files, metrics CSVs and the suite runner behind the `hr-lab` binary.

mod config;
mod metrics;
mod scores;
mod scoring;
mod suite;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub use config::{DiagnosticsSection, EnvSection, ExperimentConfig, ExperimentSection, TrainSection};
pub use metrics::{format_float, parse_metrics_csv, render_metrics_csv, CSV_COLUMNS};
pub use scores::{
    humanoidbench_reference, humanoidbench_references, Aggregate, NormalizationMethod, ScoreRow,
    ScoreSummary, ScoreTable, TaskReference,
};
pub use scoring::{baseline_normalized, human_normalized, iqm, median, median_aggregate, success_normalized};
pub use suite::{run_experiment_suite, RunFilter, RunManifest, RunStatus, SuiteOutcome, VariantSummary};

use crate::{Error, Result};

/// Environment variable overriding the output directory.
pub const OUT_DIR_ENV: &str = "HR_LAB_OUT";

/// Writes `bytes` to a temporary sibling and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// `$HR_LAB_OUT` if set, else `fallback`.
pub fn resolve_output_dir(fallback: impl Into<PathBuf>) -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| fallback.into())
}
