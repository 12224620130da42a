use crate::{Error, Result};

/// Adam with bias correction over a flat parameter vector.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub step: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl AdamState {
    /// `beta1 = 0.9`, `beta2 = 0.999`.
    pub fn new(n_params: usize, lr: f64, eps: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps,
            step: 0,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
        }
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    pub fn first_moment(&self) -> &[f64] {
        &self.m
    }

    pub fn second_moment(&self) -> &[f64] {
        &self.v
    }
}

/// One Adam update of `params` in place.
pub fn adam_step(state: &mut AdamState, params: &mut [f64], grads: &[f64]) -> Result<()> {
    if params.len() != state.m.len() || grads.len() != state.m.len() {
        return Err(Error::Shape(format!(
            "adam state holds {} moments, got {} params and {} grads",
            state.m.len(),
            params.len(),
            grads.len()
        )));
    }
    state.step += 1;
    let t = state.step as i32;
    let c1 = 1.0 - state.beta1.powi(t);
    let c2 = 1.0 - state.beta2.powi(t);
    let (b1, b2) = (state.beta1, state.beta2);
    for ((p, g), (m, v)) in params
        .iter_mut()
        .zip(grads)
        .zip(state.m.iter_mut().zip(state.v.iter_mut()))
    {
        *m = b1 * *m + (1.0 - b1) * g;
        *v = b2 * *v + (1.0 - b2) * g * g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *p -= state.lr * m_hat / (v_hat.sqrt() + state.eps);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_is_a_no_op() {
        let mut s = AdamState::new(3, 0.1, 1e-8);
        let mut p = vec![1.0, -2.0, 3.0];
        adam_step(&mut s, &mut p, &[0.0; 3]).unwrap();
        assert_eq!(p, vec![1.0, -2.0, 3.0]);
    }

    #[test]
    fn first_step_hand_trace() {
        // m = 0.1, v = 0.001; corrected both to 1 => delta = -lr / (1 + eps)
        let mut s = AdamState::new(1, 0.1, 1e-8);
        let mut p = vec![0.0];
        adam_step(&mut s, &mut p, &[1.0]).unwrap();
        let expected = -0.1 / (1.0 + 1e-8);
        assert!((p[0] - expected).abs() < 1e-15, "{}", p[0]);
        assert!((p[0] + 0.099999999).abs() < 1e-12);
    }

    #[test]
    fn steps_depend_on_history() {
        let mut s = AdamState::new(1, 0.1, 1e-8);
        let mut p = vec![0.0];
        adam_step(&mut s, &mut p, &[1.0]).unwrap();
        let after_first = p[0];
        adam_step(&mut s, &mut p, &[0.5]).unwrap();
        let second = p[0] - after_first;

        let mut fresh = AdamState::new(1, 0.1, 1e-8);
        let mut q = vec![0.0];
        adam_step(&mut fresh, &mut q, &[0.5]).unwrap();
        assert!((second - q[0]).abs() > 1e-3, "{second} vs {}", q[0]);
        assert_eq!(s.step, 2);
    }

    #[test]
    fn shape_mismatch() {
        let mut s = AdamState::new(2, 0.1, 1e-8);
        let mut p = vec![0.0; 3];
        assert!(matches!(adam_step(&mut s, &mut p, &[0.0; 3]), Err(Error::Shape(_))));
    }
}
