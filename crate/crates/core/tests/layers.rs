mod common;

use common::{random_matrix, random_projection};
use hr_lab::network::{
    forward, hr_forward, init_network, ActivationKind, DenseLayer, HiddenSpec, HrLayer, Layer, LayerNorm, Network,
    NetworkSpec, Projection,
};
use hr_lab::numerics::{Matrix, Rng};
use hr_lab::rl::{build_variant, TrainConfig, Variant};
use hr_lab::Error;
use proptest::prelude::*;

/// Branch 2 with zero weights and a bias that drives the activation to exactly 1.
/// With LayerNorm the normalized pre-activation is 0 and the offset carries the bias.
fn unit_branch(input: usize, width: usize, act: ActivationKind, ln: bool) -> Projection {
    let b = match act {
        ActivationKind::Tanh => 40.0,
        ActivationKind::Relu => 1.0,
    };
    let norm = ln.then(|| LayerNorm {
        gain: vec![0.0; width],
        offset: vec![b; width],
    });
    Projection::new(Matrix::zeros(width, input), vec![b; width], norm).unwrap()
}

#[test]
fn frozen_unit_branch_reproduces_dense_layer() {
    let mut rng = Rng::new(5);
    for act in [ActivationKind::Tanh, ActivationKind::Relu] {
        for ln in [false, true] {
            let b1 = random_projection(6, 5, ln, &mut rng);
            let dense = DenseLayer::new(b1.clone(), Some(act));
            let hr = HrLayer::new(b1, unit_branch(6, 5, act, ln), act).unwrap();
            let x = random_matrix(7, 6, 1.0, &mut rng);
            let (zd, cd) = dense.forward(&x).unwrap();
            let (zh, ch) = hr.forward(&x).unwrap();
            assert_eq!(zd, zh);
            let up = random_matrix(7, 5, 1.0, &mut rng);
            let (dxd, gd) = dense.backward(&cd, &up).unwrap();
            let gh = hr.backward(&ch, &up).unwrap();
            assert_eq!(gd.projection, gh.branch1);
            assert_eq!(dxd, gh.input);
        }
    }
}

#[test]
fn widen_matches_hr_parameter_count() {
    let base = TrainConfig::default();
    let count = |variant| {
        let net = build_variant(&TrainConfig { variant, ..base.clone() }).unwrap();
        (net.param_count(), net.layers()[1].param_count())
    };
    let (baseline, _) = count(Variant::Baseline);
    let (hr, hr_stage) = count(Variant::Hr);
    let (_, widen_stage) = count(Variant::Widen);
    assert_eq!(hr_stage, 2 * (128 * 128 + 128));
    assert_eq!(widen_stage, hr_stage);
    assert!(baseline < hr);
    let hr2 = build_variant(&TrainConfig { variant: Variant::Hr2, ..base }).unwrap();
    assert_eq!(hr2.layers().iter().filter(|l| matches!(l, Layer::Hr(_))).count(), 2);
}

#[test]
fn hr_scalar_examples() {
    let branch = |b: f64| Projection::new(Matrix::zeros(1, 1), vec![b], None).unwrap();
    let relu = HrLayer::new(branch(2.0), branch(3.0), ActivationKind::Relu).unwrap();
    assert_eq!(hr_forward(&relu, &[0.4]).unwrap().0, vec![6.0]);
    let tanh = HrLayer::new(branch(1.0), branch(-1.0), ActivationKind::Tanh).unwrap();
    let z = hr_forward(&tanh, &[0.4]).unwrap().0[0];
    assert!((z + 1f64.tanh().powi(2)).abs() < 1e-15);
    assert!((z + 0.580026).abs() < 1e-6);
    let zero = HrLayer::new(branch(0.0), branch(0.0), ActivationKind::Tanh).unwrap();
    assert_eq!(hr_forward(&zero, &[3.0]).unwrap().0, vec![0.0]);
    assert!(matches!(hr_forward(&zero, &[1.0, 2.0]), Err(Error::Shape(_))));
}

#[test]
fn mismatched_branches_are_rejected() {
    let mut rng = Rng::new(1);
    let a = Projection::init(3, 4, false, &mut rng);
    let b = Projection::init(3, 5, false, &mut rng);
    assert!(HrLayer::new(a, b, ActivationKind::Tanh).is_err());
}

#[test]
fn network_composition_is_exact() {
    let mut rng = Rng::new(2);
    let hr = HrLayer::new(
        Projection::init(4, 3, false, &mut rng),
        Projection::init(4, 3, false, &mut rng),
        ActivationKind::Tanh,
    )
    .unwrap();
    let head = Projection::init(3, 2, false, &mut rng);
    let net = Network::new(vec![
        Layer::Hr(hr.clone()),
        Layer::Dense(DenseLayer::new(head.clone(), None)),
    ])
    .unwrap();
    let x = [0.3, -0.1, 0.8, 1.2];
    let (out, record) = forward(&net, &x).unwrap();
    let z = hr_forward(&hr, &x).unwrap().0;
    let manual: Vec<f64> = (0..2)
        .map(|o| (0..3).map(|i| head.weights.get(o, i) * z[i]).sum::<f64>() + head.bias[o])
        .collect();
    assert_eq!(record, vec![z]);
    for (a, b) in out.iter().zip(&manual) {
        assert!((a - b).abs() < 1e-15);
    }

    let identity = Network::new(vec![Layer::Dense(DenseLayer::new(
        Projection::new(Matrix::identity(3), vec![0.0; 3], None).unwrap(),
        None,
    ))])
    .unwrap();
    assert_eq!(forward(&identity, &[1.5, -2.0, 0.25]).unwrap().0, vec![1.5, -2.0, 0.25]);
}

fn spec() -> NetworkSpec {
    NetworkSpec {
        input_dim: 400,
        hidden: vec![HiddenSpec::hr(250, ActivationKind::Tanh)],
        output_dim: 2,
    }
}

#[test]
fn init_is_seeded_and_branches_are_independent() {
    let a = init_network(&spec(), &mut Rng::new(9)).unwrap();
    let b = init_network(&spec(), &mut Rng::new(9)).unwrap();
    assert_eq!(a, b);
    let Layer::Hr(hr) = &a.layers()[0] else { panic!("expected HR stage") };
    assert_ne!(hr.branch1, hr.branch2);
}

#[test]
fn init_std_matches_uniform_fan_in() {
    // 400 x 250 = 1e5 draws from U(-1/20, 1/20): std = 1 / (20 sqrt 3)
    let net = init_network(&spec(), &mut Rng::new(4)).unwrap();
    let Layer::Hr(hr) = &net.layers()[0] else { panic!("expected HR stage") };
    let w = hr.branch1.weights.as_slice();
    assert_eq!(w.len(), 100_000);
    let mean = w.iter().sum::<f64>() / w.len() as f64;
    let std = (w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / w.len() as f64).sqrt();
    let target = 1.0 / (20.0 * 3f64.sqrt());
    assert!((std / target - 1.0).abs() < 0.2, "{std} vs {target}");
}

#[test]
fn zero_width_is_invalid() {
    let mut s = spec();
    s.hidden[0].width = 0;
    assert!(matches!(init_network(&s, &mut Rng::new(0)), Err(Error::InvalidSpec(_))));
}

proptest! {
    #[test]
    fn hr_tanh_output_is_bounded(seed in any::<u64>(), scale in 0.1f64..50.0) {
        let mut rng = Rng::new(seed);
        let hr = HrLayer::new(
            random_projection(5, 8, false, &mut rng),
            random_projection(5, 8, false, &mut rng),
            ActivationKind::Tanh,
        ).unwrap();
        let x = random_matrix(16, 5, scale, &mut rng);
        let (z, _) = hr.forward(&x).unwrap();
        prop_assert!(z.as_slice().iter().all(|v| v.abs() <= 1.0));
    }
}
