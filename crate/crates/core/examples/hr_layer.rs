//! Forward and backward pass through a single Hadamard layer, next to the
//! dense layer it replaces.
//!
//! ```text
//! cargo run --example hr_layer
//! ```

use hr_lab::network::{hr_backward, hr_forward, ActivationKind, DenseLayer, HrLayer, Projection};
use hr_lab::numerics::{Matrix, Rng};

fn main() -> hr_lab::Result<()> {
    let mut rng = Rng::new(0);
    let x = [0.5, -1.0, 2.0];

    let branch1 = Projection::init(3, 4, false, &mut rng);
    let branch2 = Projection::init(3, 4, false, &mut rng);
    let hr = HrLayer::new(branch1.clone(), branch2, ActivationKind::Tanh)?;
    let dense = DenseLayer::new(branch1, Some(ActivationKind::Tanh));

    let (z, cache) = hr_forward(&hr, &x)?;
    let (zd, _) = dense.forward(&Matrix::row_vector(&x))?;
    println!("dense z = {:?}", zd.row(0));
    println!("HR    z = {z:?}");
    println!("HR parameters: {} (dense: {})", hr.param_count(), dense.param_count());

    // Gradient of sum(z) with respect to everything.
    let grads = hr_backward(&hr, &cache, &[1.0; 4])?;
    println!("dL/dx        = {:?}", grads.input.row(0));
    println!("dL/db1       = {:?}", grads.branch1.bias);
    println!("dL/db2       = {:?}", grads.branch2.bias);

    // A saturated first branch still passes gradient through the second.
    let pinned = Projection::new(Matrix::zeros(1, 3), vec![20.0], None)?;
    let open = Projection::new(Matrix::zeros(1, 3), vec![0.0], None)?;
    let layer = HrLayer::new(pinned, open, ActivationKind::Tanh)?;
    let (_, cache) = hr_forward(&layer, &x)?;
    let g = hr_backward(&layer, &cache, &[1.0])?;
    println!("branch1 saturated: dL/dA2 = {:?}, dL/dA1 = {:?}", g.branch2.weights.row(0), g.branch1.weights.row(0));
    Ok(())
}
