use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Calibrated resonant modulation frequency as a function of amplitude,
/// linearly interpolated between measured points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DcOffsetMap {
    points: Vec<(f64, f64)>,
}

impl DcOffsetMap {
    /// `points` are `(eps, resonant frequency)` pairs with strictly
    /// increasing `eps`.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::param("points", "calibration needs at least one point"));
        }
        if points.iter().any(|(e, f)| !e.is_finite() || !f.is_finite()) {
            return Err(Error::param("points", "calibration values must be finite"));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::param("points", "amplitudes must be sorted and distinct"));
        }
        Ok(DcOffsetMap { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn range(&self) -> (f64, f64) {
        (self.points[0].0, self.points[self.points.len() - 1].0)
    }

    /// Resonant modulation frequency at `eps`. Refuses to extrapolate.
    pub fn resonance(&self, eps: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(eps >= lo && eps <= hi) {
            return Err(Error::OutOfRange { value: eps, lo, hi });
        }
        let k = self.points.partition_point(|&(e, _)| e <= eps);
        if k == 0 {
            return Ok(self.points[0].1);
        }
        let (e0, f0) = self.points[k - 1];
        if e0 == eps || k == self.points.len() {
            return Ok(f0);
        }
        let (e1, f1) = self.points[k];
        let w = (eps - e0) / (e1 - e0);
        Ok(f0 + w * (f1 - f0))
    }
}

/// Free-function form of [`DcOffsetMap::resonance`].
pub fn dc_offset_resonance(map: &DcOffsetMap, eps: f64) -> Result<f64> {
    map.resonance(eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map() -> DcOffsetMap {
        DcOffsetMap::new(vec![(1.0, 10.0), (2.0, 14.0), (4.0, 30.0)]).unwrap()
    }

    #[test]
    fn exact_at_points() {
        let m = map();
        assert_eq!(m.resonance(1.0).unwrap(), 10.0);
        assert_eq!(m.resonance(2.0).unwrap(), 14.0);
        assert_eq!(m.resonance(4.0).unwrap(), 30.0);
    }

    #[test]
    fn midpoint_is_mean() {
        let m = map();
        assert_eq!(m.resonance(1.5).unwrap(), 12.0);
        assert_eq!(m.resonance(3.0).unwrap(), 22.0);
    }

    #[test]
    fn refuses_extrapolation() {
        let m = map();
        assert!(matches!(m.resonance(0.99), Err(Error::OutOfRange { .. })));
        assert!(matches!(m.resonance(4.01), Err(Error::OutOfRange { .. })));
        assert!(m.resonance(f64::NAN).is_err());
    }

    #[test]
    fn rejects_unsorted() {
        assert!(DcOffsetMap::new(vec![(1.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(DcOffsetMap::new(vec![(2.0, 1.0), (1.0, 2.0)]).is_err());
    }

    #[test]
    fn quadratic_interpolation_error_bound() {
        // f(e) = f0 + c e^2 sampled at 5 points; linear interpolation error is
        // bounded by c h^2 / 4 (half the second difference over two).
        let c = 4e-11;
        let f = |e: f64| 3.1e9 + c * e * e;
        let h = 100e6;
        let pts: Vec<(f64, f64)> = (0..5).map(|k| {
            let e = 300e6 + k as f64 * h;
            (e, f(e))
        }).collect();
        let m = DcOffsetMap::new(pts).unwrap();
        let bound = 2.0 * c * h * h / 8.0;
        let mut worst: f64 = 0.0;
        for i in 0..=400 {
            let e = 300e6 + 400e6 * i as f64 / 400.0;
            worst = worst.max((m.resonance(e).unwrap() - f(e)).abs());
        }
        assert!(worst <= bound * (1.0 + 1e-9), "{worst} > {bound}");
        assert!(worst > 0.5 * bound);
    }
}
