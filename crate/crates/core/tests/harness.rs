use hr_lab::harness::{
    baseline_normalized, human_normalized, iqm, median, median_aggregate, parse_metrics_csv, render_metrics_csv,
    run_experiment_suite, success_normalized, ExperimentConfig, RunFilter, RunStatus,
};
use hr_lab::network::ActivationKind;
use hr_lab::rl::{RunCheckpoint, TrainRunRecord, Variant};
use proptest::prelude::*;

const TINY: &str = r#"
[experiment]
name = "tiny"
seeds = [0, 1]
variants = ["baseline", "hr"]
activations = ["tanh"]

[env]
n_states = 5
noise_dim = 2

[train]
total_steps = 300
hidden_width = 8
learning_starts = 50
target_update_period = 25
eval_episodes = 2

[diagnostics]
period = 150
batch = 32
"#;

#[test]
fn grid_cardinality_and_outputs() {
    let cfg = ExperimentConfig::parse(TINY).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment_suite(&cfg, dir.path(), &RunFilter::default()).unwrap();
    assert!(out.all_ok());
    assert_eq!(out.manifest.runs.len(), 4);
    assert_eq!(out.records.len(), 4);
    let metrics = std::fs::read_to_string(out.metrics_path()).unwrap();
    let parsed = parse_metrics_csv(&metrics).unwrap();
    assert_eq!(parsed.len(), 4);
    assert_eq!(metrics.lines().count(), 1 + 4 * 3);
    for r in &out.records {
        assert!(dir.path().join("runs").join(format!("{}.csv", r.run_id)).exists());
        assert!(dir.path().join("checkpoints").join(format!("{}.hrck", r.run_id)).exists());
        assert!(dir.path().join("features").join(format!("{}.csv", r.run_id)).exists());
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.manifest_path()).unwrap()).unwrap();
    assert_eq!(manifest["seeds"], serde_json::json!([0, 1]));
    assert_eq!(manifest["summaries"].as_array().unwrap().len(), 2);
    assert_eq!(manifest["config_hash"].as_str().unwrap(), cfg.content_hash());
}

#[test]
fn empty_grid_writes_an_empty_manifest() {
    let cfg = ExperimentConfig::parse("[experiment]\nseeds = []\n").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment_suite(&cfg, dir.path(), &RunFilter::default()).unwrap();
    assert!(out.all_ok());
    assert!(out.manifest.runs.is_empty());
    assert_eq!(std::fs::read_to_string(out.metrics_path()).unwrap().lines().count(), 1);
}

#[test]
fn filters_select_runs() {
    let cfg = ExperimentConfig::parse(TINY).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let filter = RunFilter {
        seed: Some(1),
        variant: Some(Variant::Hr),
    };
    let out = run_experiment_suite(&cfg, dir.path(), &filter).unwrap();
    assert_eq!(out.manifest.runs.len(), 1);
    assert_eq!(out.manifest.runs[0].run_id, "hr-tanh-s1");
    assert_eq!(out.manifest.runs[0].status, RunStatus::Ok);
}

#[test]
fn rerun_is_byte_identical() {
    let cfg = ExperimentConfig::parse(TINY).unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ra = run_experiment_suite(&cfg, a.path(), &RunFilter::default()).unwrap();
    let rb = run_experiment_suite(&cfg, b.path(), &RunFilter::default()).unwrap();
    assert_eq!(std::fs::read(ra.metrics_path()).unwrap(), std::fs::read(rb.metrics_path()).unwrap());
}

#[test]
fn config_hash_ignores_key_order() {
    let reordered = TINY.replace(
        "name = \"tiny\"\nseeds = [0, 1]",
        "seeds = [0, 1]\nname = \"tiny\"",
    );
    assert_ne!(reordered, TINY);
    let a = ExperimentConfig::parse(TINY).unwrap();
    let b = ExperimentConfig::parse(&reordered).unwrap();
    assert_eq!(a.content_hash(), b.content_hash());
    assert!(ExperimentConfig::parse("[train]\nbogus = 1\n").is_err());
}

#[test]
fn normalization_endpoints() {
    assert_eq!(baseline_normalized(3.0, 3.0, 11.0).unwrap(), 0.0);
    assert_eq!(baseline_normalized(11.0, 3.0, 11.0).unwrap(), 1.0);
    assert_eq!(baseline_normalized(7.0, 3.0, 11.0).unwrap(), 0.5);
    assert_eq!(human_normalized(-20.7, -20.7, 14.6).unwrap(), 0.0);
    assert_eq!(human_normalized(14.6, -20.7, 14.6).unwrap(), 1.0);
    assert!(human_normalized(-30.0, -20.7, 14.6).unwrap() < 0.0);
    assert_eq!(success_normalized(700.0, 2.38, 700.0).unwrap(), 1.0);
    assert_eq!(success_normalized(272.66, 272.66, 700.0).unwrap(), 0.0);
    assert!(baseline_normalized(1.0, 2.0, 2.0).is_err());
    assert!(human_normalized(1.0, 2.0, 2.0).is_err());
    assert!(success_normalized(1.0, 2.0, 2.0).is_err());
}

proptest! {
    #[test]
    fn iqm_is_bounded_and_symmetric_sets_match_median(
        mut values in prop::collection::vec(-1e3f64..1e3, 1..40),
    ) {
        let q = iqm(&values).unwrap();
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(q >= lo - 1e-9 && q <= hi + 1e-9);
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let centre = values[values.len() / 2];
        let symmetric: Vec<f64> = values.iter().map(|v| v - centre).chain(values.iter().map(|v| centre - v)).collect();
        let (qi, md) = (iqm(&symmetric).unwrap(), median(&symmetric).unwrap());
        prop_assert!((qi - md).abs() < 1e-9);
    }

    #[test]
    fn median_aggregate_ignores_task_order(
        tasks in prop::collection::vec(prop::collection::vec(-5f64..5.0, 1..4), 1..10),
        seed in any::<u64>(),
    ) {
        let mut shuffled = tasks.clone();
        let mut rng = hr_lab::numerics::Rng::new(seed);
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.below(i + 1));
        }
        prop_assert_eq!(median_aggregate(&tasks).unwrap(), median_aggregate(&shuffled).unwrap());
    }

    #[test]
    fn metrics_csv_round_trips(
        rows in prop::collection::vec(
            (-1e6f64..1e6, 0f64..1.0, 0usize..512, -1e3f64..1e3, 0f64..1e3),
            1..12,
        ),
        seed in 0u64..1000,
    ) {
        let checkpoints = rows
            .iter()
            .enumerate()
            .map(|(i, &(ret, frac, rank, contrib, loss))| RunCheckpoint {
                step: i as u64 * 100,
                eval_return: ret,
                return_normalized: ret / 7.0,
                dormant_fraction: frac,
                effective_rank: rank,
                live_contrib: contrib,
                dormant_contrib: contrib.abs() / 3.0,
                loss,
            })
            .collect();
        let record = TrainRunRecord {
            run_id: format!("hr2-relu+ln-s{seed}"),
            variant: Variant::Hr2,
            activation: ActivationKind::Relu,
            layer_norm: true,
            seed,
            checkpoints,
        };
        let text = render_metrics_csv(std::slice::from_ref(&record));
        let back = parse_metrics_csv(&text).unwrap();
        prop_assert_eq!(back, vec![record]);
    }
}
