mod common;

use common::{worst_gradient_error, Kind};
use hr_lab::network::{hr_backward, hr_forward, ActivationKind, HrLayer, Projection};
use hr_lab::numerics::Matrix;

fn check_all(kind: Kind, act: ActivationKind, seed: u64) {
    for ln in [false, true] {
        let err = worst_gradient_error(kind, act, ln, 100, seed);
        assert!(err < 1e-6, "{kind:?} {act} ln={ln}: relative error {err:e}");
    }
}

#[test]
fn dense_tanh_matches_finite_differences() {
    check_all(Kind::Dense, ActivationKind::Tanh, 11);
}

#[test]
fn dense_relu_matches_finite_differences() {
    check_all(Kind::Dense, ActivationKind::Relu, 12);
}

#[test]
fn hr_tanh_matches_finite_differences() {
    check_all(Kind::Hr, ActivationKind::Tanh, 13);
}

#[test]
fn hr_relu_matches_finite_differences() {
    check_all(Kind::Hr, ActivationKind::Relu, 14);
}

fn scalar_branch(w: &[f64], b: f64) -> Projection {
    Projection::new(Matrix::new(1, w.len(), w.to_vec()).unwrap(), vec![b], None).unwrap()
}

#[test]
fn both_branches_saturated_kill_the_gradient() {
    let x = [0.0, 0.0];
    let layer = HrLayer::new(scalar_branch(&[0.3, -0.2], 20.0), scalar_branch(&[0.1, 0.4], -20.0), ActivationKind::Tanh).unwrap();
    let (_, cache) = hr_forward(&layer, &x).unwrap();
    let g = hr_backward(&layer, &cache, &[1.0]).unwrap();
    for v in g.branch1.bias.iter().chain(&g.branch2.bias) {
        assert!(v.abs() < 1e-8, "{v}");
    }
}

#[test]
fn one_saturated_branch_leaves_the_other_path_open() {
    // u1 = 20, u2 = 0: dz/dA2 = tanh(20) * sech^2(0) * x
    let x = [0.7, -1.3];
    let layer = HrLayer::new(scalar_branch(&[0.0, 0.0], 20.0), scalar_branch(&[0.0, 0.0], 0.0), ActivationKind::Tanh).unwrap();
    let (z, cache) = hr_forward(&layer, &x).unwrap();
    assert_eq!(z, vec![0.0]);
    let g = hr_backward(&layer, &cache, &[1.0]).unwrap();
    let scale = 20f64.tanh() * (1.0 - 0f64.tanh().powi(2));
    for (got, xi) in g.branch2.weights.as_slice().iter().zip(x) {
        assert!((got - scale * xi).abs() < 1e-15);
    }
    assert!((g.branch2.bias[0] - scale).abs() < 1e-15);
    assert!(g.branch1.weights.as_slice().iter().all(|v| v.abs() < 1e-15));
}
