use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gaussian envelopes are cut to zero beyond this many standard deviations.
pub const GAUSSIAN_TRUNCATION: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum PulseShape {
    Square,
    Gaussian { sigma: f64, center: f64 },
}

/// Envelope of a parametric flux tone.
///
/// `amplitude` is the peak qubit-frequency excursion in Hz and `frequency`
/// the modulation frequency in Hz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluxPulse {
    pub shape: PulseShape,
    pub amplitude: f64,
    pub frequency: f64,
    pub start: f64,
    pub duration: f64,
}

impl FluxPulse {
    pub fn square(amplitude: f64, frequency: f64, start: f64, duration: f64) -> Result<Self> {
        let p = FluxPulse {
            shape: PulseShape::Square,
            amplitude,
            frequency,
            start,
            duration,
        };
        p.validate()?;
        Ok(p)
    }

    /// Gaussian centred on `center`, truncated at `±5 sigma`.
    pub fn gaussian(amplitude: f64, frequency: f64, center: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::param("sigma", format!("must be positive, got {sigma}")));
        }
        let half = GAUSSIAN_TRUNCATION * sigma;
        let p = FluxPulse {
            shape: PulseShape::Gaussian { sigma, center },
            amplitude,
            frequency,
            start: center - half,
            duration: 2.0 * half,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0) {
            return Err(Error::param("duration", format!("must be positive, got {}", self.duration)));
        }
        if !(self.frequency > 0.0) {
            return Err(Error::param("frequency", "modulation frequency must be positive"));
        }
        if !self.amplitude.is_finite() || self.amplitude < 0.0 {
            return Err(Error::param("amplitude", "must be finite and non-negative"));
        }
        Ok(())
    }

    pub fn end(&self) -> f64 {
        self.start + self.duration
    }

    /// Instantaneous modulation amplitude. Square pulses are on over
    /// `[start, end)`.
    pub fn envelope(&self, t: f64) -> f64 {
        match self.shape {
            PulseShape::Square => {
                if t >= self.start && t < self.end() {
                    self.amplitude
                } else {
                    0.0
                }
            }
            PulseShape::Gaussian { sigma, center } => {
                let x = t - center;
                if x.abs() <= GAUSSIAN_TRUNCATION * sigma {
                    self.amplitude * (-0.5 * (x / sigma).powi(2)).exp()
                } else {
                    0.0
                }
            }
        }
    }

    /// Times at which the envelope is discontinuous.
    pub fn breakpoints(&self) -> [f64; 2] {
        [self.start, self.end()]
    }

    pub fn shifted(mut self, dt: f64) -> Self {
        self.start += dt;
        if let PulseShape::Gaussian { ref mut center, .. } = self.shape {
            *center += dt;
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_edges() {
        let p = FluxPulse::square(1.0, 1e9, 10e-9, 20e-9).unwrap();
        assert_eq!(p.envelope(9.99e-9), 0.0);
        assert_eq!(p.envelope(10e-9), 1.0);
        assert_eq!(p.envelope(29.99e-9), 1.0);
        assert_eq!(p.envelope(p.end()), 0.0);
        assert_eq!(p.envelope(30.001e-9), 0.0);
    }

    #[test]
    fn gaussian_truncation() {
        let sigma = 40e-9;
        let p = FluxPulse::gaussian(2.0, 1e9, 300e-9, sigma).unwrap();
        assert_eq!(p.envelope(300e-9), 2.0);
        let edge = 300e-9 + 5.0 * sigma;
        assert!(p.envelope(edge - 1e-15) > 0.0);
        assert_eq!(p.envelope(edge + 1e-12), 0.0);
        assert_eq!(p.envelope(300e-9 - 5.0 * sigma - 1e-12), 0.0);
        assert!((p.duration - 10.0 * sigma).abs() < 1e-20);
    }

    #[test]
    fn rejects_bad_duration() {
        assert!(FluxPulse::square(1.0, 1e9, 0.0, 0.0).is_err());
        assert!(FluxPulse::gaussian(1.0, 1e9, 0.0, 0.0).is_err());
    }
}
