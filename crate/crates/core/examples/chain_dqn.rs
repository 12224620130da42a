//! Train one DQN agent on ChainWorld and print its diagnostic trajectory.
//!
//! ```text
//! cargo run --release --example chain_dqn -- [variant] [activation] [steps] [seed]
//! cargo run --release --example chain_dqn -- hr tanh 60000 0
//! ```

use std::time::Instant;

use hr_lab::network::ActivationKind;
use hr_lab::rl::{train_run, TrainConfig, Variant};

fn main() -> hr_lab::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let variant: Variant = args.first().map_or(Ok(Variant::Hr), |s| s.parse())?;
    let activation: ActivationKind = args.get(1).map_or(Ok(ActivationKind::Tanh), |s| s.parse())?;
    let total_steps = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(20_000);
    let seed = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(0);

    let config = TrainConfig {
        variant,
        activation,
        seed,
        total_steps,
        ..TrainConfig::default()
    };
    let start = Instant::now();
    let record = train_run(&config)?;
    println!("run {}", record.run_id);
    println!("step,eval_return,return_normalized,dormant_fraction,effective_rank,loss");
    for c in &record.checkpoints {
        println!(
            "{},{:.4},{:.4},{:.4},{},{:.5}",
            c.step, c.eval_return, c.return_normalized, c.dormant_fraction, c.effective_rank, c.loss
        );
    }
    println!("elapsed {:.1}s", start.elapsed().as_secs_f64());
    Ok(())
}
