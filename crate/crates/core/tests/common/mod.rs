//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use hr_lab::network::{ActivationKind, DenseLayer, HrLayer, Layer, Network, Projection};
use hr_lab::numerics::{Matrix, Rng};

pub fn random_matrix(rows: usize, cols: usize, scale: f64, rng: &mut Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| scale * rng.standard_normal())
}

/// Singular values from nalgebra's SVD, sorted descending.
pub fn oracle_singular_values(m: &Matrix) -> Vec<f64> {
    let na = nalgebra::DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice());
    let mut sv: Vec<f64> = na.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Line-by-line transcription of the reference rank procedure:
/// `d - sum(cumsum >= (1 - delta) * sum(sv)) + 1`.
pub fn oracle_effective_rank(m: &Matrix, delta: f64) -> usize {
    let sing_values = oracle_singular_values(m);
    let cumsum: Vec<f64> = sing_values
        .iter()
        .scan(0.0, |acc, &s| {
            *acc += s;
            Some(*acc)
        })
        .collect();
    let nuclear_norm: f64 = sing_values.iter().sum();
    let threshold = 1.0 - delta;
    let crossed = cumsum.iter().filter(|&&c| c >= threshold * nuclear_norm).count();
    sing_values.len() - crossed + 1
}

pub fn random_projection(input: usize, output: usize, layer_norm: bool, rng: &mut Rng) -> Projection {
    let mut p = Projection::init(input, output, layer_norm, rng);
    if let Some(ln) = &mut p.norm {
        for g in &mut ln.gain {
            *g = 1.0 + 0.3 * rng.standard_normal();
        }
        for o in &mut ln.offset {
            *o = 0.3 * rng.standard_normal();
        }
    }
    p
}

#[derive(Clone, Copy, Debug)]
pub enum Kind {
    Dense,
    Hr,
}

/// One layer under test followed by a fixed linear read-out, wrapped as a network
/// so parameters can be perturbed through the flat parameter vector.
pub fn layer_under_test(kind: Kind, act: ActivationKind, ln: bool, input: usize, width: usize, rng: &mut Rng) -> Network {
    let layer = match kind {
        Kind::Dense => Layer::Dense(DenseLayer::new(random_projection(input, width, ln, rng), Some(act))),
        Kind::Hr => Layer::Hr(
            HrLayer::new(
                random_projection(input, width, ln, rng),
                random_projection(input, width, ln, rng),
                act,
            )
            .unwrap(),
        ),
    };
    let head = Layer::Dense(DenseLayer::new(Projection::init(width, 1, false, rng), None));
    Network::new(vec![layer, head]).unwrap()
}

/// Pre-activations of every branch of the first layer, for kink avoidance.
fn first_layer_pre(net: &Network, x: &Matrix) -> Vec<f64> {
    let projections: Vec<Projection> = match &net.layers()[0] {
        Layer::Dense(d) => vec![d.projection.clone()],
        Layer::Hr(h) => vec![h.branch1.clone(), h.branch2.clone()],
    };
    projections
        .into_iter()
        .flat_map(|p| DenseLayer::new(p, None).forward(x).unwrap().0.into_vec())
        .collect()
}

fn loss(net: &Network, x: &Matrix, weights: &Matrix) -> f64 {
    let out = net.predict(x).unwrap();
    out.as_slice().iter().zip(weights.as_slice()).map(|(o, w)| o * w).sum()
}

/// Relative error `|g - g_fd| / max(|g| + |g_fd|, 1e-12)` between the analytic
/// gradient (parameters and input) and central differences with step `h`.
/// Returns `None` when a ReLU pre-activation lies too close to the kink.
pub fn gradient_check(net: &Network, x: &Matrix, h: f64, rng: &mut Rng) -> Option<f64> {
    if first_layer_pre(net, x).iter().any(|v| v.abs() < 1e-3) {
        return None;
    }
    let weights = random_matrix(x.rows(), 1, 1.0, rng);
    let trace = net.forward_batch(x).unwrap();
    let (grads, dx) = net.backward(&trace, &weights).unwrap();
    let analytic: Vec<f64> = grads.flat_params().into_iter().chain(dx.into_vec()).collect();

    let mut numeric = Vec::with_capacity(analytic.len());
    let base = net.flat_params();
    let mut probe = net.clone();
    for i in 0..base.len() {
        let mut p = base.clone();
        p[i] = base[i] + h;
        probe.set_flat_params(&p).unwrap();
        let up = loss(&probe, x, &weights);
        p[i] = base[i] - h;
        probe.set_flat_params(&p).unwrap();
        let down = loss(&probe, x, &weights);
        numeric.push((up - down) / (2.0 * h));
    }
    for i in 0..x.as_slice().len() {
        let mut xp = x.clone();
        xp.as_mut_slice()[i] += h;
        let up = loss(net, &xp, &weights);
        xp.as_mut_slice()[i] -= 2.0 * h;
        let down = loss(net, &xp, &weights);
        numeric.push((up - down) / (2.0 * h));
    }
    let diff: f64 = analytic.iter().zip(&numeric).map(|(a, n)| (a - n).powi(2)).sum::<f64>().sqrt();
    let norm_a: f64 = analytic.iter().map(|a| a * a).sum::<f64>().sqrt();
    let norm_n: f64 = numeric.iter().map(|n| n * n).sum::<f64>().sqrt();
    Some(diff / (norm_a + norm_n).max(1e-12))
}

/// Runs `configs` random gradient checks for one layer kind and returns the
/// worst relative error.
pub fn worst_gradient_error(kind: Kind, act: ActivationKind, ln: bool, configs: usize, seed: u64) -> f64 {
    let mut rng = Rng::new(seed);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < configs {
        let input = 1 + rng.below(6);
        let width = 3 + rng.below(6);
        let batch = 1 + rng.below(4);
        let net = layer_under_test(kind, act, ln, input, width, &mut rng);
        let x = random_matrix(batch, input, 1.0, &mut rng);
        if let Some(err) = gradient_check(&net, &x, 1e-5, &mut rng) {
            worst = worst.max(err);
            done += 1;
        }
    }
    worst
}
