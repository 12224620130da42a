//! Success-normalized HumanoidBench scores aggregated with median and IQM.
//!
//! ```text
//! cargo run --example scoring
//! ```

use hr_lab::harness::{humanoidbench_references, Aggregate, NormalizationMethod, ScoreTable};

fn main() -> hr_lab::Result<()> {
    let mut table = String::from("task,seed,score,random,human,target,min,max\n");
    for (i, r) in humanoidbench_references().iter().enumerate() {
        for seed in 0..3 {
            // A made-up agent reaching between 20% and 110% of the target.
            let share = 0.2 + 0.9 * ((i * 3 + seed) % 7) as f64 / 6.0;
            let score = r.random + share * (r.target - r.random);
            table.push_str(&format!("{},{seed},{score},{},,{},,\n", r.task, r.random, r.target));
        }
    }
    let scores = ScoreTable::parse(&table)?;
    for aggregate in [Aggregate::Median, Aggregate::Iqm] {
        let summary = scores.summarize(NormalizationMethod::Success, aggregate)?;
        println!("{aggregate}: {:.4}", summary.aggregate);
    }
    let summary = scores.summarize(NormalizationMethod::Success, Aggregate::Median)?;
    for (task, v) in summary.per_task.iter().take(4) {
        println!("  {task:<14} {v:.4}");
    }
    Ok(())
}
