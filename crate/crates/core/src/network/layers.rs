use crate::network::ActivationKind;
use crate::numerics::{Matrix, Rng};
use crate::{Error, Result};

/// Epsilon added to the variance inside [`LayerNorm`].
pub const LAYER_NORM_EPS: f64 = 1e-5;

/// Per-sample normalization over features with learnable gain and offset.
/// Applied to the affine output, before the nonlinearity.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerNorm {
    pub gain: Vec<f64>,
    pub offset: Vec<f64>,
}

impl LayerNorm {
    pub fn new(width: usize) -> Self {
        Self {
            gain: vec![1.0; width],
            offset: vec![0.0; width],
        }
    }

    fn zeros_like(&self) -> Self {
        Self {
            gain: vec![0.0; self.gain.len()],
            offset: vec![0.0; self.offset.len()],
        }
    }
}

/// Affine map `A x + b`, optionally followed by [`LayerNorm`].
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    /// `out x in`.
    pub weights: Matrix,
    pub bias: Vec<f64>,
    pub norm: Option<LayerNorm>,
}

#[derive(Clone, Debug)]
pub(crate) struct ProjectionCache {
    /// Row-normalized affine output (only with LayerNorm).
    normalized: Option<Matrix>,
    inv_std: Vec<f64>,
}

impl Projection {
    pub fn new(weights: Matrix, bias: Vec<f64>, norm: Option<LayerNorm>) -> Result<Self> {
        if bias.len() != weights.rows() {
            return Err(Error::Shape(format!(
                "bias length {} does not match {} weight rows",
                bias.len(),
                weights.rows()
            )));
        }
        if let Some(ln) = &norm {
            if ln.gain.len() != bias.len() || ln.offset.len() != bias.len() {
                return Err(Error::Shape("layer norm width mismatch".into()));
            }
        }
        Ok(Self {
            weights,
            bias,
            norm,
        })
    }

    /// Uniform fan-in initialization: weights and biases from
    /// `U(-1/sqrt(in), 1/sqrt(in))`. LayerNorm starts at gain 1, offset 0.
    pub fn init(input: usize, output: usize, layer_norm: bool, rng: &mut Rng) -> Self {
        let bound = 1.0 / (input as f64).sqrt();
        let weights = Matrix::from_fn(output, input, |_, _| rng.uniform_in(-bound, bound));
        let bias = (0..output).map(|_| rng.uniform_in(-bound, bound)).collect();
        Self {
            weights,
            bias,
            norm: layer_norm.then(|| LayerNorm::new(output)),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.weights.rows()
    }

    pub fn param_count(&self) -> usize {
        self.weights.rows() * self.weights.cols()
            + self.bias.len()
            + self.norm.as_ref().map_or(0, |n| n.gain.len() + n.offset.len())
    }

    pub(crate) fn zeros_like(&self) -> Self {
        Self {
            weights: Matrix::zeros(self.weights.rows(), self.weights.cols()),
            bias: vec![0.0; self.bias.len()],
            norm: self.norm.as_ref().map(LayerNorm::zeros_like),
        }
    }

    pub(crate) fn tensors(&self) -> Vec<(&'static str, (usize, usize), &[f64])> {
        let mut out = vec![
            ("A", self.weights.shape(), self.weights.as_slice()),
            ("b", (self.bias.len(), 1), self.bias.as_slice()),
        ];
        if let Some(ln) = &self.norm {
            out.push(("ln.gain", (ln.gain.len(), 1), ln.gain.as_slice()));
            out.push(("ln.offset", (ln.offset.len(), 1), ln.offset.as_slice()));
        }
        out
    }

    pub(crate) fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = vec![self.weights.as_mut_slice(), self.bias.as_mut_slice()];
        if let Some(ln) = &mut self.norm {
            out.push(ln.gain.as_mut_slice());
            out.push(ln.offset.as_mut_slice());
        }
        out
    }

    /// Pre-activations for a batch (rows are samples).
    pub(crate) fn forward(&self, x: &Matrix) -> Result<(Matrix, ProjectionCache)> {
        if x.cols() != self.input_dim() {
            return Err(Error::Shape(format!(
                "input width {} does not match layer input {}",
                x.cols(),
                self.input_dim()
            )));
        }
        let mut h = x.matmul_t(&self.weights)?;
        h.add_row_broadcast(&self.bias);
        let Some(ln) = &self.norm else {
            return Ok((
                h,
                ProjectionCache {
                    normalized: None,
                    inv_std: Vec::new(),
                },
            ));
        };
        let width = h.cols() as f64;
        let mut inv_std = Vec::with_capacity(h.rows());
        let mut normalized = h.clone();
        for r in 0..h.rows() {
            let row = normalized.row_mut(r);
            let mean = row.iter().sum::<f64>() / width;
            let var = row.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / width;
            let inv = 1.0 / (var + LAYER_NORM_EPS).sqrt();
            for v in row.iter_mut() {
                *v = (*v - mean) * inv;
            }
            inv_std.push(inv);
            let out = h.row_mut(r);
            for (j, o) in out.iter_mut().enumerate() {
                *o = ln.gain[j] * normalized.get(r, j) + ln.offset[j];
            }
        }
        Ok((
            h,
            ProjectionCache {
                normalized: Some(normalized),
                inv_std,
            },
        ))
    }

    /// Returns `(d input, parameter gradients)` given `d pre-activation`.
    pub(crate) fn backward(
        &self,
        x: &Matrix,
        cache: &ProjectionCache,
        mut dpre: Matrix,
    ) -> Result<(Matrix, Projection)> {
        if dpre.shape() != (x.rows(), self.output_dim()) {
            return Err(Error::Contract(format!(
                "gradient shape {:?} does not match cached batch of {} for layer width {}",
                dpre.shape(),
                x.rows(),
                self.output_dim()
            )));
        }
        let mut grads = self.zeros_like();
        if let (Some(ln), Some(xhat), Some(gln)) =
            (&self.norm, &cache.normalized, grads.norm.as_mut())
        {
            let width = dpre.cols() as f64;
            for r in 0..dpre.rows() {
                let xr = xhat.row(r);
                let dy = dpre.row_mut(r);
                for j in 0..dy.len() {
                    gln.gain[j] += dy[j] * xr[j];
                    gln.offset[j] += dy[j];
                    dy[j] *= ln.gain[j];
                }
                let mean_d = dy.iter().sum::<f64>() / width;
                let mean_dx = dy.iter().zip(xr).map(|(d, x)| d * x).sum::<f64>() / width;
                let inv = cache.inv_std[r];
                for j in 0..dy.len() {
                    dy[j] = inv * (dy[j] - mean_d - xr[j] * mean_dx);
                }
            }
        }
        grads.weights = dpre.t_matmul(x)?;
        grads.bias = dpre.sum_rows();
        let dx = dpre.matmul(&self.weights)?;
        Ok((dx, grads))
    }
}

/// Standard hidden (or head) layer `f(A x + b)`; `activation: None` is the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseLayer {
    pub projection: Projection,
    pub activation: Option<ActivationKind>,
}

/// Cached forward state of a [`DenseLayer`].
#[derive(Clone, Debug)]
pub struct DenseCache {
    input: Matrix,
    pre: Matrix,
    out: Matrix,
    proj: ProjectionCache,
}

impl DenseLayer {
    pub fn new(projection: Projection, activation: Option<ActivationKind>) -> Self {
        Self {
            projection,
            activation,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.projection.input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.projection.output_dim()
    }

    pub fn param_count(&self) -> usize {
        self.projection.param_count()
    }

    pub fn forward(&self, x: &Matrix) -> Result<(Matrix, DenseCache)> {
        let (pre, proj) = self.projection.forward(x)?;
        let out = match self.activation {
            Some(kind) => pre.map(|v| kind.apply(v)),
            None => pre.clone(),
        };
        Ok((
            out.clone(),
            DenseCache {
                input: x.clone(),
                pre,
                out,
                proj,
            },
        ))
    }

    /// Returns `(d input, parameter gradients shaped like self)`.
    pub fn backward(&self, cache: &DenseCache, upstream: &Matrix) -> Result<(Matrix, DenseLayer)> {
        if upstream.shape() != cache.out.shape() {
            return Err(Error::Contract(format!(
                "upstream gradient {:?} does not match cached output {:?}",
                upstream.shape(),
                cache.out.shape()
            )));
        }
        let dpre = match self.activation {
            Some(kind) => Matrix::from_fn(upstream.rows(), upstream.cols(), |r, c| {
                upstream.get(r, c) * kind.derivative(cache.pre.get(r, c), cache.out.get(r, c))
            }),
            None => upstream.clone(),
        };
        let (dx, grad) = self.projection.backward(&cache.input, &cache.proj, dpre)?;
        Ok((dx, DenseLayer::new(grad, self.activation)))
    }
}

/// Hadamard representation layer: `f(A1 x + b1) * f(A2 x + b2)` element-wise,
/// with independently parameterized branches of identical shape.
#[derive(Clone, Debug, PartialEq)]
pub struct HrLayer {
    pub branch1: Projection,
    pub branch2: Projection,
    pub activation: ActivationKind,
}

/// Cached forward state of an [`HrLayer`]: the input and both branch
/// pre-activations and outputs.
#[derive(Clone, Debug)]
pub struct HrCache {
    input: Matrix,
    pub pre1: Matrix,
    pub pre2: Matrix,
    out1: Matrix,
    out2: Matrix,
    proj1: ProjectionCache,
    proj2: ProjectionCache,
}

/// Gradients of an HR layer.
#[derive(Clone, Debug)]
pub struct HrGradients {
    pub input: Matrix,
    pub branch1: Projection,
    pub branch2: Projection,
}

impl HrLayer {
    pub fn new(branch1: Projection, branch2: Projection, activation: ActivationKind) -> Result<Self> {
        if branch1.weights.shape() != branch2.weights.shape()
            || branch1.norm.is_some() != branch2.norm.is_some()
        {
            return Err(Error::Shape(format!(
                "HR branches differ in shape: {:?} vs {:?}",
                branch1.weights.shape(),
                branch2.weights.shape()
            )));
        }
        Ok(Self {
            branch1,
            branch2,
            activation,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.branch1.input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.branch1.output_dim()
    }

    pub fn param_count(&self) -> usize {
        self.branch1.param_count() + self.branch2.param_count()
    }

    pub fn forward(&self, x: &Matrix) -> Result<(Matrix, HrCache)> {
        let (pre1, proj1) = self.branch1.forward(x)?;
        let (pre2, proj2) = self.branch2.forward(x)?;
        let f = self.activation;
        let out1 = pre1.map(|v| f.apply(v));
        let out2 = pre2.map(|v| f.apply(v));
        let mut z = out1.clone();
        for (zi, b) in z.as_mut_slice().iter_mut().zip(out2.as_slice()) {
            *zi *= b;
        }
        Ok((
            z,
            HrCache {
                input: x.clone(),
                pre1,
                pre2,
                out1,
                out2,
                proj1,
                proj2,
            },
        ))
    }

    /// Product rule through both branches:
    /// `dz/du1 = f'(u1) f(u2)`, `dz/du2 = f(u1) f'(u2)`.
    pub fn backward(&self, cache: &HrCache, upstream: &Matrix) -> Result<HrGradients> {
        if upstream.shape() != cache.out1.shape() || cache.out1.cols() != self.output_dim() {
            return Err(Error::Contract(format!(
                "upstream gradient {:?} does not match cached HR output {:?}",
                upstream.shape(),
                cache.out1.shape()
            )));
        }
        let f = self.activation;
        let (rows, cols) = upstream.shape();
        let du1 = Matrix::from_fn(rows, cols, |r, c| {
            upstream.get(r, c)
                * cache.out2.get(r, c)
                * f.derivative(cache.pre1.get(r, c), cache.out1.get(r, c))
        });
        let du2 = Matrix::from_fn(rows, cols, |r, c| {
            upstream.get(r, c)
                * cache.out1.get(r, c)
                * f.derivative(cache.pre2.get(r, c), cache.out2.get(r, c))
        });
        let (dx1, g1) = self.branch1.backward(&cache.input, &cache.proj1, du1)?;
        let (dx2, g2) = self.branch2.backward(&cache.input, &cache.proj2, du2)?;
        let mut input = dx1;
        for (a, b) in input.as_mut_slice().iter_mut().zip(dx2.as_slice()) {
            *a += b;
        }
        Ok(HrGradients {
            input,
            branch1: g1,
            branch2: g2,
        })
    }
}

/// Single-sample HR forward pass.
pub fn hr_forward(layer: &HrLayer, x: &[f64]) -> Result<(Vec<f64>, HrCache)> {
    let (z, cache) = layer.forward(&Matrix::row_vector(x))?;
    Ok((z.into_vec(), cache))
}

/// Single-sample HR backward pass.
pub fn hr_backward(layer: &HrLayer, cache: &HrCache, upstream: &[f64]) -> Result<HrGradients> {
    layer.backward(cache, &Matrix::row_vector(upstream))
}
