use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::harness::{format_float, iqm, median, render_metrics_csv, write_atomic, ExperimentConfig};
use crate::network::{render_checkpoint, ActivationKind};
use crate::numerics::Matrix;
use crate::rl::{train_run_with_trainer, TrainRunRecord, Variant};
use crate::Result;

/// Restricts a suite to one seed and/or variant.
#[derive(Clone, Debug, Default)]
pub struct RunFilter {
    pub seed: Option<u64>,
    pub variant: Option<Variant>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Ok,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunEntry {
    pub run_id: String,
    pub variant: Variant,
    pub activation: ActivationKind,
    pub layer_norm: bool,
    pub seed: u64,
    pub status: RunStatus,
    pub error: Option<String>,
}

/// Seed statistics of final checkpoints for one (variant, activation) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantSummary {
    pub variant: Variant,
    pub activation: ActivationKind,
    pub layer_norm: bool,
    pub seeds: usize,
    pub final_eval_return_mean: f64,
    pub final_return_normalized_mean: f64,
    pub final_return_normalized_median: f64,
    pub final_return_normalized_iqm: f64,
    pub final_dormant_fraction_mean: f64,
    pub final_effective_rank_mean: f64,
    pub final_live_contrib_mean: f64,
    pub final_dormant_contrib_mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub name: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub seeds: Vec<u64>,
    pub runs: Vec<RunEntry>,
    pub summaries: Vec<VariantSummary>,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    pub fn failures(&self) -> usize {
        self.runs.iter().filter(|r| r.status == RunStatus::Failed).count()
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub manifest: RunManifest,
    pub records: Vec<TrainRunRecord>,
    pub out_dir: PathBuf,
}

impl SuiteOutcome {
    pub fn all_ok(&self) -> bool {
        self.manifest.failures() == 0
    }

    pub fn metrics_path(&self) -> PathBuf {
        self.out_dir.join("metrics.csv")
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.out_dir.join("manifest.json")
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn summarize(records: &[TrainRunRecord]) -> Result<Vec<VariantSummary>> {
    let mut cells: Vec<(Variant, ActivationKind, bool, Vec<&TrainRunRecord>)> = Vec::new();
    for r in records {
        match cells
            .iter_mut()
            .find(|c| c.0 == r.variant && c.1 == r.activation && c.2 == r.layer_norm)
        {
            Some(c) => c.3.push(r),
            None => cells.push((r.variant, r.activation, r.layer_norm, vec![r])),
        }
    }
    let mut out = Vec::with_capacity(cells.len());
    for (variant, activation, layer_norm, runs) in cells {
        let last: Vec<_> = runs.iter().filter_map(|r| r.final_checkpoint()).collect();
        if last.is_empty() {
            continue;
        }
        let col = |f: &dyn Fn(&crate::rl::RunCheckpoint) -> f64| last.iter().map(|c| f(c)).collect::<Vec<_>>();
        let norm = col(&|c| c.return_normalized);
        out.push(VariantSummary {
            variant,
            activation,
            layer_norm,
            seeds: last.len(),
            final_eval_return_mean: mean(&col(&|c| c.eval_return)),
            final_return_normalized_mean: mean(&norm),
            final_return_normalized_median: median(&norm)?,
            final_return_normalized_iqm: iqm(&norm)?,
            final_dormant_fraction_mean: mean(&col(&|c| c.dormant_fraction)),
            final_effective_rank_mean: mean(&col(&|c| c.effective_rank as f64)),
            final_live_contrib_mean: mean(&col(&|c| c.live_contrib)),
            final_dormant_contrib_mean: mean(&col(&|c| c.dormant_contrib)),
        });
    }
    Ok(out)
}

/// Observation matrix as headerless CSV, one observation per line.
pub(crate) fn render_matrix_csv(m: &Matrix) -> String {
    let mut out = String::new();
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(|&v| format_float(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Runs every (variant, activation, seed) of `config` that passes `filter`.
///
/// Under `out_dir` it writes `runs/<run_id>.csv`, the final network as
/// `checkpoints/<run_id>.hrck`, a final diagnostic observation batch as
/// `features/<run_id>.csv`, the combined `metrics.csv` and `manifest.json`.
/// A failed run is recorded in the manifest and does not stop the others.
pub fn run_experiment_suite(
    config: &ExperimentConfig,
    out_dir: &Path,
    filter: &RunFilter,
) -> Result<SuiteOutcome> {
    config.validate()?;
    let started = Instant::now();
    let runs: Vec<_> = config
        .runs()
        .into_iter()
        .filter(|r| filter.seed.is_none_or(|s| s == r.seed))
        .filter(|r| filter.variant.is_none_or(|v| v == r.variant))
        .collect();

    let mut entries = Vec::with_capacity(runs.len());
    let mut records = Vec::with_capacity(runs.len());
    for run in &runs {
        let run_id = run.run_id();
        log::info!("starting run {run_id}");
        let result = train_run_with_trainer(run).and_then(|(record, mut trainer)| {
            write_atomic(
                &out_dir.join("runs").join(format!("{run_id}.csv")),
                render_metrics_csv(std::slice::from_ref(&record)).as_bytes(),
            )?;
            write_atomic(
                &out_dir.join("checkpoints").join(format!("{run_id}.hrck")),
                render_checkpoint(trainer.online()).as_bytes(),
            )?;
            let features = trainer.diagnostic_batch()?;
            write_atomic(
                &out_dir.join("features").join(format!("{run_id}.csv")),
                render_matrix_csv(&features).as_bytes(),
            )?;
            Ok(record)
        });
        let (status, error) = match result {
            Ok(record) => {
                records.push(record);
                (RunStatus::Ok, None)
            }
            Err(e) => {
                log::error!("run {run_id} failed: {e}");
                (RunStatus::Failed, Some(e.to_string()))
            }
        };
        entries.push(RunEntry {
            run_id,
            variant: run.variant,
            activation: run.activation,
            layer_norm: run.layer_norm,
            seed: run.seed,
            status,
            error,
        });
    }

    write_atomic(&out_dir.join("metrics.csv"), render_metrics_csv(&records).as_bytes())?;
    let manifest = RunManifest {
        name: config.experiment.name.clone(),
        config_hash: config.content_hash(),
        config: config.clone(),
        seeds: config.experiment.seeds.clone(),
        runs: entries,
        summaries: summarize(&records)?,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_atomic(&out_dir.join("manifest.json"), json.as_bytes())?;
    Ok(SuiteOutcome {
        manifest,
        records,
        out_dir: out_dir.to_path_buf(),
    })
}
