use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::{minimize, LbfgsOptions};

/// Squared-exponential kernel with one length scale per input dimension plus
/// white observation noise. Variances refer to standardized targets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub length_scales: Vec<f64>,
    pub signal_variance: f64,
    pub noise_variance: f64,
}

impl Hyperparameters {
    pub fn isotropic(dim: usize, length: f64, signal: f64, noise: f64) -> Self {
        Hyperparameters {
            length_scales: vec![length; dim],
            signal_variance: signal,
            noise_variance: noise,
        }
    }

    fn to_log(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.length_scales.iter().map(|l| l.ln()).collect();
        v.push(self.signal_variance.ln());
        v.push(self.noise_variance.ln());
        v
    }

    fn from_log(v: &[f64]) -> Self {
        let d = v.len() - 2;
        Hyperparameters {
            length_scales: v[..d].iter().map(|x| x.exp()).collect(),
            signal_variance: v[d].exp(),
            noise_variance: v[d + 1].exp(),
        }
    }

    pub fn kernel(&self, a: &[f64], b: &[f64]) -> f64 {
        let r2: f64 = a
            .iter()
            .zip(b)
            .zip(&self.length_scales)
            .map(|((x, y), l)| ((x - y) / l).powi(2))
            .sum();
        self.signal_variance * (-0.5 * r2).exp()
    }
}

/// Bounds used when fitting, natural log of each hyperparameter.
const LOG_LENGTH: (f64, f64) = (-4.6, 2.3);
const LOG_SIGNAL: (f64, f64) = (-6.9, 4.6);
const LOG_NOISE: (f64, f64) = (-18.4, 0.0);

/// Gaussian-process regression model over the unit cube.
#[derive(Clone, Debug)]
pub struct GpSurrogate {
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
    hyper: Hyperparameters,
    y_mean: f64,
    y_scale: f64,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
    jitter: f64,
}

fn check_data(x: &[Vec<f64>], y: &[f64]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
    }
    if x.len() < 2 {
        return Err(Error::DegenerateData("need at least two observations".into()));
    }
    let d = x[0].len();
    if d == 0 || x.iter().any(|p| p.len() != d) {
        return Err(Error::DegenerateData("inputs must share a non-zero dimension".into()));
    }
    if x.iter().flatten().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::DegenerateData("non-finite observation".into()));
    }
    if x.iter().all(|p| p == &x[0]) {
        return Err(Error::DegenerateData("all inputs coincide".into()));
    }
    Ok(d)
}

fn kernel_matrix(x: &[Vec<f64>], h: &Hyperparameters) -> DMatrix<f64> {
    let n = x.len();
    DMatrix::from_fn(n, n, |i, j| h.kernel(&x[i], &x[j]))
}

/// Cholesky of `K + (noise + jitter) I`, raising the jitter until it works.
fn factor(k: &DMatrix<f64>, noise: f64) -> Result<(Cholesky<f64, Dyn>, f64)> {
    let n = k.nrows();
    let scale = k.diagonal().max().max(1e-300);
    let mut jitter = 0.0;
    loop {
        let m = k + DMatrix::identity(n, n) * (noise + jitter);
        if let Some(c) = m.cholesky() {
            if jitter > 0.0 {
                log::debug!("kernel matrix needed jitter {jitter:e}");
            }
            return Ok((c, jitter));
        }
        jitter = if jitter == 0.0 { 1e-10 * scale } else { jitter * 10.0 };
        if jitter > scale {
            return Err(Error::Singular);
        }
    }
}

fn standardize(y: &[f64]) -> (f64, f64, DVector<f64>) {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let scale = if var > 0.0 { var.sqrt() } else { 1.0 };
    (mean, scale, DVector::from_iterator(y.len(), y.iter().map(|v| (v - mean) / scale)))
}

/// Negative log marginal likelihood and its gradient in log-hyperparameters.
fn neg_log_likelihood(x: &[Vec<f64>], y: &DVector<f64>, logh: &[f64], grad: &mut [f64]) -> f64 {
    let h = Hyperparameters::from_log(logh);
    let n = x.len();
    let d = h.length_scales.len();
    let kf = kernel_matrix(x, &h);
    let Ok((chol, _)) = factor(&kf, h.noise_variance) else {
        grad.iter_mut().for_each(|g| *g = 0.0);
        return 1e300;
    };
    let alpha = chol.solve(y);
    let log_det: f64 = 2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>();
    let nll = 0.5 * y.dot(&alpha) + 0.5 * log_det + 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln();

    // dNLL/dtheta = -0.5 tr((alpha alpha^T - K^-1) dK/dtheta)
    let inner = &alpha * alpha.transpose() - chol.inverse();
    for k in 0..d {
        let l2 = h.length_scales[k].powi(2);
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                let dk = kf[(i, j)] * (x[i][k] - x[j][k]).powi(2) / l2;
                s += inner[(i, j)] * dk;
            }
        }
        grad[k] = -0.5 * s;
    }
    grad[d] = -0.5 * inner.component_mul(&kf).sum();
    grad[d + 1] = -0.5 * inner.trace() * h.noise_variance;
    nll
}

impl GpSurrogate {
    /// Condition on data with fixed hyperparameters.
    pub fn with_hyperparameters(x: Vec<Vec<f64>>, y: Vec<f64>, hyper: Hyperparameters) -> Result<Self> {
        let d = check_data(&x, &y)?;
        if hyper.length_scales.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: hyper.length_scales.len() });
        }
        let (y_mean, y_scale, ys) = standardize(&y);
        let (chol, jitter) = factor(&kernel_matrix(&x, &hyper), hyper.noise_variance)?;
        let alpha = chol.solve(&ys);
        Ok(GpSurrogate {
            inputs: x,
            targets: y,
            hyper,
            y_mean,
            y_scale,
            chol,
            alpha,
            jitter,
        })
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn hyperparameters(&self) -> &Hyperparameters {
        &self.hyper
    }

    /// Jitter added to the diagonal beyond the noise variance.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Observation-noise standard deviation in target units.
    pub fn noise_std(&self) -> f64 {
        self.hyper.noise_variance.sqrt() * self.y_scale
    }

    /// Prior variance of the latent function in target units.
    pub fn prior_variance(&self) -> f64 {
        self.hyper.signal_variance * self.y_scale.powi(2)
    }

    fn cross(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.inputs.len(), self.inputs.iter().map(|p| self.hyper.kernel(x, p)))
    }

    /// Posterior mean and variance of the latent function at `x`.
    pub fn predict(&self, x: &[f64]) -> (f64, f64) {
        let ks = self.cross(x);
        let mean = self.y_mean + self.y_scale * ks.dot(&self.alpha);
        let v = self.chol.l_dirty().solve_lower_triangular(&ks).unwrap_or_else(|| ks.clone());
        let var = (self.hyper.signal_variance - v.norm_squared()).max(0.0);
        (mean, var * self.y_scale.powi(2))
    }

    pub fn mean(&self, x: &[f64]) -> f64 {
        self.y_mean + self.y_scale * self.cross(x).dot(&self.alpha)
    }

    /// Posterior mean and its gradient with respect to `x`.
    pub fn mean_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut m = 0.0;
        for (p, a) in self.inputs.iter().zip(self.alpha.iter()) {
            let k = self.hyper.kernel(x, p) * a;
            m += k;
            for (d, g) in grad.iter_mut().enumerate() {
                *g -= k * (x[d] - p[d]) / self.hyper.length_scales[d].powi(2);
            }
        }
        grad.iter_mut().for_each(|g| *g *= self.y_scale);
        self.y_mean + self.y_scale * m
    }
}

/// Fit hyperparameters by maximizing the marginal likelihood, then condition.
pub fn gp_fit(x: Vec<Vec<f64>>, y: Vec<f64>) -> Result<GpSurrogate> {
    let d = check_data(&x, &y)?;
    let (_, _, ys) = standardize(&y);
    let mut bounds = vec![LOG_LENGTH; d];
    bounds.push(LOG_SIGNAL);
    bounds.push(LOG_NOISE);
    let starts = [
        Hyperparameters::isotropic(d, 0.3, 1.0, 1e-2),
        Hyperparameters::isotropic(d, 1.0, 1.0, 1e-1),
        Hyperparameters::isotropic(d, 0.1, 1.0, 1e-4),
    ];
    let opts = LbfgsOptions {
        max_iterations: 200,
        f_tol: 1e-9,
        g_tol: 1e-6,
        ..Default::default()
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    for h0 in &starts {
        let res = minimize(|p, g| neg_log_likelihood(&x, &ys, p, g), &h0.to_log(), Some(&bounds), &opts);
        if best.as_ref().is_none_or(|(f, _)| res.f < *f) {
            best = Some((res.f, res.x));
        }
    }
    let (_, logh) = best.expect("at least one start");
    GpSurrogate::with_hyperparameters(x, y, Hyperparameters::from_log(&logh))
}
