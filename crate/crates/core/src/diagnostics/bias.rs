use crate::diagnostics::DormancyReport;
use crate::network::Network;
use crate::numerics::Matrix;
use crate::{Error, Result};

/// Split of `h = A z + b` into live-neuron terms and the constant vector
/// `B* = sum_{i in D} omega_i A[:, i]` contributed by dormant neurons.
#[derive(Clone, Debug, PartialEq)]
pub struct BiasDecomposition {
    pub live: Vec<f64>,
    pub dormant_bias: Vec<f64>,
    pub bias: Vec<f64>,
}

impl BiasDecomposition {
    /// `B* + b`.
    pub fn effective_bias(&self) -> Vec<f64> {
        self.dormant_bias.iter().zip(&self.bias).map(|(d, b)| d + b).collect()
    }

    /// `live + B* + b`.
    pub fn reconstruct(&self) -> Vec<f64> {
        self.live
            .iter()
            .zip(self.effective_bias())
            .map(|(l, e)| l + e)
            .collect()
    }
}

/// Decomposes the next layer's pre-activation. `omegas[k]` is the saturation
/// value of neuron `dormant[k]`.
pub fn bias_decomposition(
    a_next: &Matrix,
    b_next: &[f64],
    z: &[f64],
    dormant: &[usize],
    omegas: &[f64],
) -> Result<BiasDecomposition> {
    let (out, width) = a_next.shape();
    if b_next.len() != out || z.len() != width {
        return Err(Error::Shape(format!(
            "weights {out}x{width} with bias {} and activations {}",
            b_next.len(),
            z.len()
        )));
    }
    if dormant.len() != omegas.len() {
        return Err(Error::InvalidInput(format!(
            "{} dormant indices but {} saturation values",
            dormant.len(),
            omegas.len()
        )));
    }
    let mut is_dormant = vec![false; width];
    let mut dormant_bias = vec![0.0; out];
    for (&i, &omega) in dormant.iter().zip(omegas) {
        if i >= width {
            return Err(Error::InvalidInput(format!(
                "dormant index {i} out of range for {width} neurons"
            )));
        }
        if is_dormant[i] {
            return Err(Error::InvalidInput(format!("dormant index {i} listed twice")));
        }
        is_dormant[i] = true;
        for (r, d) in dormant_bias.iter_mut().enumerate() {
            *d += omega * a_next.get(r, i);
        }
    }
    let mut live = vec![0.0; out];
    for (i, &zi) in z.iter().enumerate() {
        if is_dormant[i] {
            continue;
        }
        for (r, l) in live.iter_mut().enumerate() {
            *l += zi * a_next.get(r, i);
        }
    }
    Ok(BiasDecomposition {
        live,
        dormant_bias,
        bias: b_next.to_vec(),
    })
}

/// Per-sample head contributions of live and dormant final-hidden neurons,
/// using their actual activations. `live + dormant + head bias` is the output.
#[derive(Clone, Debug)]
pub struct Contributions {
    pub live: Matrix,
    pub dormant: Matrix,
}

/// Mean absolute head contribution per output unit and sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContributionSplit {
    pub live: f64,
    pub dormant: f64,
}

pub fn output_contributions(
    net: &Network,
    batch: &Matrix,
    dormancy: &DormancyReport,
) -> Result<Contributions> {
    if batch.rows() == 0 {
        return Err(Error::InvalidInput("empty observation batch".into()));
    }
    let trace = net.forward_batch(batch)?;
    let Some(z) = trace.hidden.last() else {
        return Err(Error::InvalidInput("network has no hidden layer".into()));
    };
    if dormancy.neurons.len() != z.cols() {
        return Err(Error::InvalidInput(format!(
            "dormancy report covers {} neurons, final hidden layer has {}",
            dormancy.neurons.len(),
            z.cols()
        )));
    }
    let head = &net.head().projection.weights;
    let outputs = head.rows();
    let mut live = Matrix::zeros(batch.rows(), outputs);
    let mut dormant = Matrix::zeros(batch.rows(), outputs);
    for s in 0..batch.rows() {
        for (i, n) in dormancy.neurons.iter().enumerate() {
            let zi = z.get(s, i);
            let target = if n.dormant { &mut dormant } else { &mut live };
            for o in 0..outputs {
                let v = target.get(s, o) + zi * head.get(o, i);
                target.set(s, o, v);
            }
        }
    }
    Ok(Contributions { live, dormant })
}

/// Average `|contribution|` of live and dormant neurons on the head outputs.
pub fn contribution_split(
    net: &Network,
    batch: &Matrix,
    dormancy: &DormancyReport,
) -> Result<ContributionSplit> {
    let c = output_contributions(net, batch, dormancy)?;
    let mean_abs = |m: &Matrix| m.as_slice().iter().map(|v| v.abs()).sum::<f64>() / m.as_slice().len() as f64;
    Ok(ContributionSplit {
        live: mean_abs(&c.live),
        dormant: mean_abs(&c.dormant),
    })
}
