//! Save a network to the text checkpoint format and load it back.
//!
//! ```text
//! cargo run --example checkpoint_roundtrip
//! ```

use hr_lab::network::{init_network, load_checkpoint, save_checkpoint, ActivationKind, HiddenSpec, NetworkSpec};
use hr_lab::numerics::{Matrix, Rng};

fn main() -> hr_lab::Result<()> {
    let spec = NetworkSpec {
        input_dim: 4,
        hidden: vec![
            HiddenSpec::dense(8, ActivationKind::Tanh).with_layer_norm(true),
            HiddenSpec::hr(8, ActivationKind::Tanh),
        ],
        output_dim: 2,
    };
    let mut rng = Rng::new(6);
    let net = init_network(&spec, &mut rng)?;
    let path = std::env::temp_dir().join("hr_lab_example.hrck");
    save_checkpoint(&net, &path)?;
    let back = load_checkpoint(&path)?;

    let x = Matrix::from_fn(5, 4, |_, _| rng.standard_normal());
    let (a, b) = (net.predict(&x)?, back.predict(&x)?);
    let max_diff = a.as_slice().iter().zip(b.as_slice()).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
    println!("wrote {}", path.display());
    for (name, dims, _) in back.named_tensors() {
        println!("  {name:<22} {}x{}", dims.0, dims.1);
    }
    println!("identical parameters: {}, max output difference {max_diff:e}", back == net);
    Ok(())
}
