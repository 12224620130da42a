//! Saturated tanh neurons turn their outgoing weights into a fixed bias.
//!
//! ```text
//! cargo run --example effective_bias
//! ```

use hr_lab::diagnostics::{bias_decomposition, classify_dormant, contribution_split, DormancyConfig, FeatureMatrix};
use hr_lab::network::{init_network, ActivationKind, HiddenSpec, Layer, NetworkSpec};
use hr_lab::numerics::{Matrix, Rng};

fn main() -> hr_lab::Result<()> {
    let mut rng = Rng::new(4);
    let spec = NetworkSpec {
        input_dim: 6,
        hidden: vec![HiddenSpec::dense(16, ActivationKind::Tanh), HiddenSpec::dense(8, ActivationKind::Tanh)],
        output_dim: 2,
    };
    let mut net = init_network(&spec, &mut rng)?;

    // Pin neurons 2 and 5 of the final hidden layer at +1 and -1.
    if let Layer::Dense(d) = &mut net.layers_mut()[1] {
        for (i, sign) in [(2, 1.0), (5, -1.0)] {
            for c in 0..d.projection.weights.cols() {
                d.projection.weights.set(i, c, 0.0);
            }
            d.projection.bias[i] = 40.0 * sign;
        }
    }

    let batch = Matrix::from_fn(256, 6, |_, _| rng.standard_normal());
    let trace = net.forward_batch(&batch)?;
    let z = trace.hidden.last().expect("hidden layer");
    let report = classify_dormant(&FeatureMatrix::new(z.clone())?, ActivationKind::Tanh, &DormancyConfig::default(), &mut rng)?;
    println!("dormant neurons {:?} with omega {:?}", report.dormant_indices(), report.dormant_omegas());

    let head = &net.head().projection;
    let d = bias_decomposition(&head.weights, &head.bias, z.row(0), &report.dormant_indices(), &report.dormant_omegas())?;
    println!("head bias      b  = {:?}", d.bias);
    println!("dormant bias   B* = {:?}", d.dormant_bias);
    println!("effective bias    = {:?}", d.effective_bias());
    println!("live + B* + b     = {:?}", d.reconstruct());
    println!("network output    = {:?}", trace.output.row(0));

    let split = contribution_split(&net, &batch, &report)?;
    println!("mean |contribution|: live {:.4}, dormant {:.4}", split.live, split.dormant);
    Ok(())
}
