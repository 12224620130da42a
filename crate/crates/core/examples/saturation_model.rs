//! Collapse probability of a single neuron vs a Hadamard pair, closed form
//! against Monte Carlo.
//!
//! ```text
//! cargo run --release --example saturation_model
//! ```

use hr_lab::network::ActivationKind;
use hr_lab::numerics::Rng;
use hr_lab::saturation::{collapse_probability, monte_carlo_collapse, CollapseModel, DormancyShift};

fn main() -> hr_lab::Result<()> {
    let root = Rng::new(5);
    println!("{:>4} {:>6} {:>10} {:>10} {:>10}", "p", "act", "closed", "mc", "delta");
    for (i, p) in [0.1, 0.39, 0.62, 0.9].into_iter().enumerate() {
        for (j, act) in [ActivationKind::Tanh, ActivationKind::Relu].into_iter().enumerate() {
            let model = CollapseModel::new(act, p)?;
            let mc = monte_carlo_collapse(&model, 1_000_000, &mut root.substream((2 * i + j) as u64))?;
            let shift = DormancyShift::predicted(&model)?;
            println!(
                "{p:>4} {act:>6} {:>10.5} {mc:>10.5} {:>+10.5}",
                collapse_probability(&model)?,
                shift.absolute
            );
        }
    }
    Ok(())
}
