use nalgebra::Matrix4;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal as NormalCdf};

use super::TomographySetting;
use crate::error::{Error, Result};
use crate::quantum::DensityMatrix;

/// Gaussian voltage clouds for the four basis states.
///
/// Qubit `k` reads out on its own `(I, Q)` pair; its excited centroid sits
/// `separation[k]` along `I` from the ground centroid. Every axis carries
/// independent noise of width `sigma`. The scale is synthetic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReadoutModel {
    pub separation: [f64; 2],
    pub sigma: f64,
    pub shots: usize,
}

impl Default for ReadoutModel {
    /// Unit separation with 5% per-qubit assignment error, 10^4 shots.
    fn default() -> Self {
        Self::with_error_rate(0.05, 10_000)
    }
}

impl ReadoutModel {
    /// Unit separation and the noise width giving `error` per qubit.
    pub fn with_error_rate(error: f64, shots: usize) -> Self {
        let sigma = if error <= 0.0 {
            1e-6
        } else {
            let z = NormalCdf::new(0.0, 1.0).expect("unit normal").inverse_cdf(error);
            0.5 / -z
        };
        ReadoutModel {
            separation: [1.0, 1.0],
            sigma,
            shots,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) {
            return Err(Error::param("sigma", "must be positive"));
        }
        if self.separation.iter().any(|&d| !(d > 0.0)) {
            return Err(Error::param("separation", "centroids must be distinct"));
        }
        if self.shots == 0 {
            return Err(Error::param("shots", "must be at least one"));
        }
        Ok(())
    }

    /// `(V_I1, V_Q1, V_I2, V_Q2)` centroid of basis state `2 q1 + q2`.
    pub fn centroid(&self, state: usize) -> [f64; 4] {
        let q1 = (state >> 1) & 1;
        let q2 = state & 1;
        [q1 as f64 * self.separation[0], 0.0, q2 as f64 * self.separation[1], 0.0]
    }

    pub fn centroids(&self) -> [[f64; 4]; 4] {
        [0, 1, 2, 3].map(|s| self.centroid(s))
    }

    /// Nearest-centroid label of a voltage sample.
    pub fn classify(&self, v: &[f64; 4]) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (k, c) in self.centroids().iter().enumerate() {
            let d: f64 = v.iter().zip(c).map(|(a, b)| (a - b).powi(2)).sum();
            if d < best.0 {
                best = (d, k);
            }
        }
        best.1
    }

    /// Exact confusion matrix of the nearest-centroid rule.
    pub fn confusion(&self) -> ConfusionMatrix {
        let unit = NormalCdf::new(0.0, 1.0).expect("unit normal");
        let e = self.separation.map(|d| unit.cdf(-d / (2.0 * self.sigma)));
        let single = |k: usize, a: usize, b: usize| if a == b { 1.0 - e[k] } else { e[k] };
        let m = Matrix4::from_fn(|i, j| single(0, i >> 1, j >> 1) * single(1, i & 1, j & 1));
        ConfusionMatrix { matrix: m }
    }

    /// Confusion matrix estimated by preparing each basis state `shots` times.
    pub fn sample_confusion(&self, rng: &mut impl Rng) -> Result<ConfusionMatrix> {
        let mut m = Matrix4::zeros();
        for i in 0..4 {
            let counts = self.sample_counts(&[(i == 0) as u8 as f64, (i == 1) as u8 as f64, (i == 2) as u8 as f64, (i == 3) as u8 as f64], rng)?;
            for j in 0..4 {
                m[(i, j)] = counts[j] as f64 / self.shots as f64;
            }
        }
        Ok(ConfusionMatrix { matrix: m })
    }

    fn sample_counts(&self, probabilities: &[f64; 4], rng: &mut impl Rng) -> Result<[u64; 4]> {
        self.validate()?;
        let noise = Normal::new(0.0, self.sigma).map_err(|e| Error::param("sigma", e.to_string()))?;
        let mut cumulative = [0.0; 4];
        let mut acc = 0.0;
        for (c, &p) in cumulative.iter_mut().zip(probabilities) {
            acc += p.max(0.0);
            *c = acc;
        }
        let mut counts = [0u64; 4];
        for _ in 0..self.shots {
            let u: f64 = rng.random::<f64>() * acc;
            let state = cumulative.iter().position(|&c| u < c).unwrap_or(3);
            let c = self.centroid(state);
            let v = [
                c[0] + noise.sample(rng),
                c[1] + noise.sample(rng),
                c[2] + noise.sample(rng),
                c[3] + noise.sample(rng),
            ];
            counts[self.classify(&v)] += 1;
        }
        Ok(counts)
    }
}

/// `C[i][j] = P(classified j | prepared i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfusionMatrix {
    pub matrix: Matrix4<f64>,
}

impl ConfusionMatrix {
    pub fn identity() -> Self {
        ConfusionMatrix { matrix: Matrix4::identity() }
    }

    pub fn new(matrix: Matrix4<f64>) -> Result<Self> {
        for i in 0..4 {
            let row: f64 = matrix.row(i).sum();
            if (row - 1.0).abs() > 1e-9 || matrix.row(i).iter().any(|&v| !(0.0..=1.0).contains(&v)) {
                return Err(Error::param("confusion", format!("row {i} is not a probability vector")));
            }
        }
        Ok(ConfusionMatrix { matrix })
    }

    /// Ratio of extreme singular values.
    pub fn condition_number(&self) -> f64 {
        let sv = self.matrix.singular_values();
        let max = sv.max();
        let min = sv.min();
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }
}

/// Simulate `model.shots` single-shot readouts of `rho` after the setting's
/// pre-rotations and tally the classifier output.
pub fn simulate_measurement(
    rho: &DensityMatrix,
    setting: &TomographySetting,
    model: &ReadoutModel,
    rng: &mut impl Rng,
) -> Result<[u64; 4]> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: rho.dim() });
    }
    model.sample_counts(&setting.probabilities(rho.matrix()), rng)
}

/// Undo readout errors: the observed frequencies are `f = C^T p`.
pub fn correct_populations(counts: &[u64; 4], confusion: &ConfusionMatrix) -> Result<[f64; 4]> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::param("counts", "no shots recorded"));
    }
    let f = nalgebra::Vector4::from_fn(|i, _| counts[i] as f64 / total as f64);
    let ct = confusion.matrix.transpose();
    if confusion.condition_number() > 1e12 {
        return Err(Error::Singular);
    }
    let p = ct.lu().solve(&f).ok_or(Error::Singular)?;
    Ok([p[0], p[1], p[2], p[3]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn error_rate_sets_sigma() {
        let m = ReadoutModel::with_error_rate(0.05, 100);
        assert!((m.sigma - 0.30397).abs() < 1e-4);
        let c = m.confusion();
        assert!((c.matrix[(0, 0)] - 0.9025).abs() < 1e-9);
        assert!((c.matrix[(0, 3)] - 0.0025).abs() < 1e-9);
    }

    #[test]
    fn identity_correction_returns_frequencies() {
        let p = correct_populations(&[10, 20, 30, 40], &ConfusionMatrix::identity()).unwrap();
        assert_eq!(p, [0.1, 0.2, 0.3, 0.4]);
    }

    #[test]
    fn inverts_exact_counts() {
        let c = ReadoutModel::with_error_rate(0.08, 1).confusion();
        let p = nalgebra::Vector4::new(0.1, 0.45, 0.4, 0.05);
        let f = c.matrix.transpose() * p;
        let counts = [0, 1, 2, 3].map(|i| (f[i] * 1e12).round() as u64);
        let q = correct_populations(&counts, &c).unwrap();
        for i in 0..4 {
            assert!((q[i] - p[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn singular_rejected() {
        let m = Matrix4::from_fn(|_, _| 0.25);
        let c = ConfusionMatrix::new(m).unwrap();
        assert!(matches!(correct_populations(&[1, 1, 1, 1], &c), Err(Error::Singular)));
    }

    #[test]
    fn sampled_confusion_matches_gaussian_overlap() {
        let model = ReadoutModel { separation: [1.0, 0.8], sigma: 0.35, shots: 20_000 };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let emp = model.sample_confusion(&mut rng).unwrap();
        let exact = model.confusion();
        let mut within = 0;
        for i in 0..4 {
            for j in 0..4 {
                let p = exact.matrix[(i, j)];
                let sd = (p * (1.0 - p) / model.shots as f64).sqrt();
                let dev = (emp.matrix[(i, j)] - p).abs();
                assert!(dev <= 3.5 * sd + 1e-12, "({i},{j}) {} vs {p}", emp.matrix[(i, j)]);
                if dev <= 2.0 * sd {
                    within += 1;
                }
            }
        }
        assert!(within >= 13, "{within} of 16 within two sigma");
    }
}
