//! Small curve fits used by the calibration protocols.

use crate::error::{Error, Result};

/// Result of fitting `y = amplitude * exp(-t / tau)`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct ExponentialFit {
    pub amplitude: f64,
    pub tau: f64,
}

/// Weighted log-linear fit of a decaying exponential. Weights `y^2` undo the
/// noise amplification of the logarithm at small `y`.
pub fn fit_exponential(t: &[f64], y: &[f64]) -> Result<ExponentialFit> {
    if t.len() != y.len() {
        return Err(Error::Fit(format!("{} times but {} values", t.len(), y.len())));
    }
    let pts: Vec<(f64, f64, f64)> = t
        .iter()
        .zip(y)
        .filter(|(_, &v)| v > 0.0 && v.is_finite())
        .map(|(&t, &v)| (t, v.ln(), v * v))
        .collect();
    if pts.len() < 3 {
        return Err(Error::Fit("fewer than three positive samples".into()));
    }
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let mt = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let ml = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let stt: f64 = pts.iter().map(|p| p.2 * (p.0 - mt).powi(2)).sum();
    let stl: f64 = pts.iter().map(|p| p.2 * (p.0 - mt) * (p.1 - ml)).sum();
    if stt <= 0.0 {
        return Err(Error::Fit("all samples at the same time".into()));
    }
    let slope = stl / stt;
    if !(slope < 0.0) {
        return Err(Error::Fit(format!("signal does not decay (slope {slope:e})")));
    }
    Ok(ExponentialFit {
        amplitude: (ml - slope * mt).exp(),
        tau: -1.0 / slope,
    })
}

/// Minimize a unimodal function on `[lo, hi]` by golden-section search.
pub fn golden_section(mut f: impl FnMut(f64) -> Result<f64>, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exponential() {
        let t: Vec<f64> = (0..30).map(|k| k as f64 * 50e-9).collect();
        let y: Vec<f64> = t.iter().map(|t| 0.8 * (-t / 550e-9).exp()).collect();
        let f = fit_exponential(&t, &y).unwrap();
        assert!((f.tau / 550e-9 - 1.0).abs() < 1e-9);
        assert!((f.amplitude - 0.8).abs() < 1e-9);
    }

    #[test]
    fn rejects_growth_and_short_data() {
        assert!(fit_exponential(&[0.0, 1.0, 2.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(fit_exponential(&[0.0, 1.0], &[1.0, 0.5]).is_err());
    }

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, _) = golden_section(|x| Ok((x - 0.3).powi(2)), -1.0, 2.0, 1e-9).unwrap();
        assert!((x - 0.3).abs() < 1e-8);
    }
}
