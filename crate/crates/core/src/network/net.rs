use serde::{Deserialize, Serialize};

use crate::network::{ActivationKind, DenseCache, DenseLayer, HrCache, HrLayer, Projection};
use crate::numerics::{Matrix, Rng};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Layer {
    Dense(DenseLayer),
    Hr(HrLayer),
}

impl Layer {
    pub fn input_dim(&self) -> usize {
        match self {
            Layer::Dense(l) => l.input_dim(),
            Layer::Hr(l) => l.input_dim(),
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            Layer::Dense(l) => l.output_dim(),
            Layer::Hr(l) => l.output_dim(),
        }
    }

    pub fn param_count(&self) -> usize {
        match self {
            Layer::Dense(l) => l.param_count(),
            Layer::Hr(l) => l.param_count(),
        }
    }

    pub fn activation(&self) -> Option<ActivationKind> {
        match self {
            Layer::Dense(l) => l.activation,
            Layer::Hr(l) => Some(l.activation),
        }
    }

    fn projections(&self) -> Vec<(&'static str, &Projection)> {
        match self {
            Layer::Dense(l) => vec![("", &l.projection)],
            Layer::Hr(l) => vec![("branch1.", &l.branch1), ("branch2.", &l.branch2)],
        }
    }

    fn projections_mut(&mut self) -> Vec<&mut Projection> {
        match self {
            Layer::Dense(l) => vec![&mut l.projection],
            Layer::Hr(l) => vec![&mut l.branch1, &mut l.branch2],
        }
    }

    /// Forward on a batch; rows are samples.
    pub fn forward(&self, x: &Matrix) -> Result<(Matrix, LayerCache)> {
        match self {
            Layer::Dense(l) => l.forward(x).map(|(z, c)| (z, LayerCache::Dense(c))),
            Layer::Hr(l) => l.forward(x).map(|(z, c)| (z, LayerCache::Hr(c))),
        }
    }

    /// Returns `(d input, gradients shaped like self)`.
    pub fn backward(&self, cache: &LayerCache, upstream: &Matrix) -> Result<(Matrix, Layer)> {
        match (self, cache) {
            (Layer::Dense(l), LayerCache::Dense(c)) => {
                l.backward(c, upstream).map(|(dx, g)| (dx, Layer::Dense(g)))
            }
            (Layer::Hr(l), LayerCache::Hr(c)) => {
                let g = l.backward(c, upstream)?;
                let grad = HrLayer {
                    branch1: g.branch1,
                    branch2: g.branch2,
                    activation: l.activation,
                };
                Ok((g.input, Layer::Hr(grad)))
            }
            _ => Err(Error::Contract("cache belongs to a different layer kind".into())),
        }
    }
}

#[derive(Clone, Debug)]
pub enum LayerCache {
    Dense(DenseCache),
    Hr(HrCache),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayerKind {
    Dense,
    Hr,
}

/// One hidden stage of a [`NetworkSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct HiddenSpec {
    pub kind: LayerKind,
    pub width: usize,
    pub activation: ActivationKind,
    pub layer_norm: bool,
}

impl HiddenSpec {
    pub fn dense(width: usize, activation: ActivationKind) -> Self {
        Self {
            kind: LayerKind::Dense,
            width,
            activation,
            layer_norm: false,
        }
    }

    pub fn hr(width: usize, activation: ActivationKind) -> Self {
        Self {
            kind: LayerKind::Hr,
            width,
            activation,
            layer_norm: false,
        }
    }

    pub fn with_layer_norm(mut self, on: bool) -> Self {
        self.layer_norm = on;
        self
    }
}

/// Architecture description consumed by [`init_network`]. The head is a
/// linear layer of width `output_dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkSpec {
    pub input_dim: usize,
    pub hidden: Vec<HiddenSpec>,
    pub output_dim: usize,
}

/// Dense feed-forward network: hidden stages followed by one head layer.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    layers: Vec<Layer>,
}

/// Everything recorded by a batched forward pass, needed by [`Network::backward`].
#[derive(Clone, Debug)]
pub struct ForwardTrace {
    pub output: Matrix,
    /// Output of every hidden stage, in order.
    pub hidden: Vec<Matrix>,
    caches: Vec<LayerCache>,
}

impl Network {
    /// Chains `layers`; the last one is the output head and must be dense.
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        let Some(last) = layers.last() else {
            return Err(Error::InvalidSpec("network needs at least a head layer".into()));
        };
        if !matches!(last, Layer::Dense(_)) {
            return Err(Error::InvalidSpec("output head must be a dense layer".into()));
        }
        for (i, pair) in layers.windows(2).enumerate() {
            if pair[0].output_dim() != pair[1].input_dim() {
                return Err(Error::Shape(format!(
                    "layer {i} outputs {} but layer {} expects {}",
                    pair[0].output_dim(),
                    i + 1,
                    pair[1].input_dim()
                )));
            }
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].output_dim()
    }

    pub fn hidden_count(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn head(&self) -> &DenseLayer {
        match self.layers.last() {
            Some(Layer::Dense(d)) => d,
            _ => unreachable!("constructor guarantees a dense head"),
        }
    }

    pub fn head_mut(&mut self) -> &mut DenseLayer {
        match self.layers.last_mut() {
            Some(Layer::Dense(d)) => d,
            _ => unreachable!("constructor guarantees a dense head"),
        }
    }

    /// The activation of the last hidden stage, if any.
    pub fn final_hidden_activation(&self) -> Option<ActivationKind> {
        let n = self.layers.len();
        (n >= 2).then(|| self.layers[n - 2].activation()).flatten()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Layer::param_count).sum()
    }

    pub fn forward_batch(&self, x: &Matrix) -> Result<ForwardTrace> {
        let mut caches = Vec::with_capacity(self.layers.len());
        let mut hidden = Vec::with_capacity(self.hidden_count());
        let mut current = x.clone();
        for (i, layer) in self.layers.iter().enumerate() {
            let (z, cache) = layer.forward(&current)?;
            caches.push(cache);
            if i + 1 < self.layers.len() {
                hidden.push(z.clone());
            }
            current = z;
        }
        Ok(ForwardTrace {
            output: current,
            hidden,
            caches,
        })
    }

    /// Forward pass without keeping caches.
    pub fn predict(&self, x: &Matrix) -> Result<Matrix> {
        let mut current = x.clone();
        for layer in &self.layers {
            current = layer.forward(&current)?.0;
        }
        Ok(current)
    }

    /// Backpropagates `d output` through a trace from this network.
    /// Returns the parameter gradients (as a network of identical shape) and
    /// the gradient with respect to the input batch.
    pub fn backward(&self, trace: &ForwardTrace, d_output: &Matrix) -> Result<(Network, Matrix)> {
        if trace.caches.len() != self.layers.len() {
            return Err(Error::Contract("trace was produced by a different network".into()));
        }
        let mut grads = Vec::with_capacity(self.layers.len());
        let mut upstream = d_output.clone();
        for (layer, cache) in self.layers.iter().zip(&trace.caches).rev() {
            let (dx, g) = layer.backward(cache, &upstream)?;
            grads.push(g);
            upstream = dx;
        }
        grads.reverse();
        Ok((Network { layers: grads }, upstream))
    }

    /// Named tensors in a fixed order: `layer{i}.A`, `layer{i}.branch2.b`, ...
    pub fn named_tensors(&self) -> Vec<(String, (usize, usize), &[f64])> {
        let mut out = Vec::new();
        for (i, layer) in self.layers.iter().enumerate() {
            for (prefix, proj) in layer.projections() {
                for (name, dims, data) in proj.tensors() {
                    out.push((format!("layer{i}.{prefix}{name}"), dims, data));
                }
            }
        }
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        self.layers
            .iter_mut()
            .flat_map(|l| l.projections_mut())
            .flat_map(|p| p.tensors_mut())
            .collect()
    }

    /// All parameters flattened in [`Network::named_tensors`] order.
    pub fn flat_params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for (_, _, data) in self.named_tensors() {
            out.extend_from_slice(data);
        }
        out
    }

    pub fn set_flat_params(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.param_count() {
            return Err(Error::Shape(format!(
                "expected {} parameters, got {}",
                self.param_count(),
                flat.len()
            )));
        }
        let mut offset = 0;
        for t in self.tensors_mut() {
            t.copy_from_slice(&flat[offset..offset + t.len()]);
            offset += t.len();
        }
        Ok(())
    }
}

/// Single-sample forward. Returns the output and one activation vector per
/// hidden stage.
pub fn forward(net: &Network, x: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    if x.len() != net.input_dim() {
        return Err(Error::Shape(format!(
            "input length {} does not match network input {}",
            x.len(),
            net.input_dim()
        )));
    }
    let trace = net.forward_batch(&Matrix::row_vector(x))?;
    let record = trace.hidden.into_iter().map(Matrix::into_vec).collect();
    Ok((trace.output.into_vec(), record))
}

/// Builds a network from `spec`. Every projection, including both HR
/// branches, is drawn independently with the uniform fan-in scheme of
/// [`Projection::init`]; the head is linear.
pub fn init_network(spec: &NetworkSpec, rng: &mut Rng) -> Result<Network> {
    if spec.input_dim == 0 || spec.output_dim == 0 || spec.hidden.iter().any(|h| h.width == 0) {
        return Err(Error::InvalidSpec("layer dimensions must be positive".into()));
    }
    let mut layers = Vec::with_capacity(spec.hidden.len() + 1);
    let mut width = spec.input_dim;
    for h in &spec.hidden {
        let layer = match h.kind {
            LayerKind::Dense => Layer::Dense(DenseLayer::new(
                Projection::init(width, h.width, h.layer_norm, rng),
                Some(h.activation),
            )),
            LayerKind::Hr => {
                let b1 = Projection::init(width, h.width, h.layer_norm, rng);
                let b2 = Projection::init(width, h.width, h.layer_norm, rng);
                Layer::Hr(HrLayer::new(b1, b2, h.activation)?)
            }
        };
        layers.push(layer);
        width = h.width;
    }
    layers.push(Layer::Dense(DenseLayer::new(
        Projection::init(width, spec.output_dim, false, rng),
        None,
    )));
    Network::new(layers)
}
