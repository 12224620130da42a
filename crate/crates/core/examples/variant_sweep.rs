//! Run a small variant x activation x seed grid through the experiment
//! runner and print the per-variant summary.
//!
//! ```text
//! cargo run --release --example variant_sweep -- [total_steps]
//! ```

use hr_lab::harness::{run_experiment_suite, ExperimentConfig, RunFilter};

fn main() -> hr_lab::Result<()> {
    let steps: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10_000);
    let config = ExperimentConfig::parse(&format!(
        r#"
[experiment]
name = "variant-sweep"
seeds = [0, 1]
variants = ["baseline", "hr", "widen", "hr2"]
activations = ["tanh", "relu"]

[train]
total_steps = {steps}

[diagnostics]
period = {period}
"#,
        period = (steps / 4).max(1)
    ))?;
    let out = std::env::temp_dir().join("hr_lab_variant_sweep");
    let outcome = run_experiment_suite(&config, &out, &RunFilter::default())?;
    println!("{:<10} {:<6} {:>8} {:>8} {:>6}", "variant", "act", "return", "dormant", "rank");
    for s in &outcome.manifest.summaries {
        println!(
            "{:<10} {:<6} {:>8.4} {:>8.4} {:>6.1}",
            s.variant.to_string(),
            s.activation.to_string(),
            s.final_eval_return_mean,
            s.final_dormant_fraction_mean,
            s.final_effective_rank_mean
        );
    }
    println!("outputs in {}", out.display());
    Ok(())
}
