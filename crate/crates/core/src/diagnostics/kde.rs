use crate::diagnostics::DormancyConfig;
use crate::numerics::{gaussian_sample, Rng};
use crate::{Error, Result};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
/// Kernel terms beyond this many bandwidths are below 1e-19 of the peak term.
const KERNEL_CUTOFF: f64 = 9.5;

/// Scott's rule for one dimension: `n^(-1/5) * std` (population std).
pub fn scott_bandwidth(sample: &[f64]) -> f64 {
    let n = sample.len() as f64;
    if sample.iter().all(|&x| x == sample[0]) {
        return 0.0;
    }
    let mean = sample.iter().sum::<f64>() / n;
    let var = sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    n.powf(-0.2) * var.sqrt()
}

/// Gaussian KDE of a jittered activation sample evaluated on an equally
/// spaced grid over `[min - 3 bw, max + 3 bw]`.
#[derive(Clone, Debug)]
pub struct KdeCurve {
    pub bandwidth: f64,
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
}

impl KdeCurve {
    /// Jitters `activations` with `N(0, jitter_variance)` noise and evaluates
    /// the density on `grid_points` points.
    pub fn estimate(activations: &[f64], rng: &mut Rng, cfg: &DormancyConfig) -> Result<Self> {
        if activations.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "KDE needs at least 2 samples, got {}",
                activations.len()
            )));
        }
        if cfg.grid_points < 2 {
            return Err(Error::InvalidInput("KDE grid needs at least 2 points".into()));
        }
        let noise = gaussian_sample(rng, 0.0, cfg.jitter_variance.sqrt(), activations.len())?;
        let mut jittered: Vec<f64> = activations.iter().zip(&noise).map(|(a, e)| a + e).collect();
        if jittered.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite activation".into()));
        }
        jittered.sort_by(f64::total_cmp);

        let bw = scott_bandwidth(&jittered);
        let lo = jittered[0];
        let hi = jittered[jittered.len() - 1];
        if bw == 0.0 {
            // Point mass: the density is unbounded.
            return Ok(Self {
                bandwidth: 0.0,
                grid: vec![lo],
                density: vec![f64::INFINITY],
            });
        }
        let (start, end) = (lo - 3.0 * bw, hi + 3.0 * bw);
        let step = (end - start) / (cfg.grid_points - 1) as f64;
        let norm = INV_SQRT_2PI / (jittered.len() as f64 * bw);
        let reach = KERNEL_CUTOFF * bw;

        let mut grid = Vec::with_capacity(cfg.grid_points);
        let mut density = Vec::with_capacity(cfg.grid_points);
        let mut first = 0;
        for g in 0..cfg.grid_points {
            let x = start + step * g as f64;
            while first < jittered.len() && jittered[first] < x - reach {
                first += 1;
            }
            let mut acc = 0.0;
            for &s in jittered[first..].iter().take_while(|&&s| s <= x + reach) {
                let u = (x - s) / bw;
                acc += (-0.5 * u * u).exp();
            }
            grid.push(x);
            density.push(acc * norm);
        }
        Ok(Self {
            bandwidth: bw,
            grid,
            density,
        })
    }

    /// Index of the global maximum (first on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &d) in self.density.iter().enumerate() {
            if d > self.density[best] {
                best = i;
            }
        }
        best
    }

    pub fn peak(&self) -> f64 {
        self.density[self.argmax()]
    }

    /// Highest local maximum strictly on the other side of zero from the
    /// global peak, if any.
    pub fn opposite_peak(&self) -> Option<f64> {
        let side = self.grid[self.argmax()].signum();
        let n = self.density.len();
        (0..n)
            .filter(|&i| self.grid[i] != 0.0 && self.grid[i].signum() == -side)
            .filter(|&i| {
                let left = i == 0 || self.density[i - 1] <= self.density[i];
                let right = i + 1 == n || self.density[i + 1] <= self.density[i];
                left && right
            })
            .map(|i| self.density[i])
            .max_by(f64::total_cmp)
    }
}

/// Peak of the jittered Gaussian KDE with the default jitter variance and grid.
pub fn kde_peak_density(activations: &[f64], rng: &mut Rng) -> Result<f64> {
    kde_peak_density_with(activations, rng, &DormancyConfig::default())
}

pub fn kde_peak_density_with(activations: &[f64], rng: &mut Rng, cfg: &DormancyConfig) -> Result<f64> {
    Ok(KdeCurve::estimate(activations, rng, cfg)?.peak())
}
