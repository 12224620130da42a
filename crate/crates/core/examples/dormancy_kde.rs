//! KDE peak densities and dormancy labels for a few synthetic neurons.
//!
//! ```text
//! cargo run --example dormancy_kde
//! ```

use hr_lab::diagnostics::{classify_dormant, DormancyConfig, FeatureMatrix};
use hr_lab::network::ActivationKind;
use hr_lab::numerics::{Matrix, Rng};

fn main() -> hr_lab::Result<()> {
    let n = 512;
    let mut rng = Rng::new(1);
    let columns: Vec<(&str, Vec<f64>)> = vec![
        ("saturated at +1", (0..n).map(|_| rng.uniform_in(0.9995, 1.0)).collect()),
        ("saturated at -1", (0..n).map(|_| -rng.uniform_in(0.9995, 1.0)).collect()),
        ("tanh of N(0,1)", (0..n).map(|_| rng.standard_normal().tanh()).collect()),
        ("uniform(-1,1)", (0..n).map(|_| rng.uniform_in(-1.0, 1.0)).collect()),
        ("narrow around 0", (0..n).map(|_| 0.01 * rng.standard_normal()).collect()),
    ];
    let features = FeatureMatrix::new(Matrix::from_fn(n, columns.len(), |r, c| columns[c].1[r]))?;
    let report = classify_dormant(&features, ActivationKind::Tanh, &DormancyConfig::default(), &mut Rng::new(2))?;

    println!("{:<18} {:>10} {:>8} {:>6}", "neuron", "peak", "dormant", "omega");
    for ((name, _), n) in columns.iter().zip(&report.neurons) {
        let omega = n.omega.map_or("-".to_string(), |o| format!("{o:+}"));
        println!("{name:<18} {:>10.2} {:>8} {omega:>6}", n.peak_density, n.dormant);
    }
    println!("dormant fraction: {:.2}", report.fraction);
    Ok(())
}
