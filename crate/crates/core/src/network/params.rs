use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-chip circuit parameters. Frequencies in Hz, times in seconds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    /// Static transmon frequency.
    pub nu_q: f64,
    /// Anharmonicity magnitude; the e-f transition sits `alpha` below g-e.
    pub alpha: f64,
    pub nu_r: f64,
    /// On-chip communication resonator.
    pub nu_c: f64,
    /// Multimode memory frequencies.
    pub nu_m: Vec<f64>,
    /// Transmon to communication-resonator coupling.
    pub g_qc: f64,
    /// Transmon coupling to the readout and memory resonators. Only used for
    /// spectator chevrons.
    pub g_spectator: f64,
    pub t1: f64,
    /// Ramsey time.
    pub t2: f64,
    /// Mean frequency pull under modulation: the qubit sits at
    /// `nu_q - dc_curvature * eps^2` while a flux tone of amplitude `eps` plays.
    pub dc_curvature: f64,
    /// Largest flux-modulation amplitude the bias line can deliver.
    pub eps_max: f64,
}

impl DeviceParams {
    /// Module 1 of the two-chip device.
    pub fn module_one() -> Self {
        DeviceParams {
            nu_q: 4.7685e9,
            alpha: 109.8e6,
            nu_r: 5.7463e9,
            nu_c: 7.88e9,
            nu_m: memory_ladder(),
            g_qc: 50e6,
            g_spectator: 50e6,
            t1: 10.1e-6,
            t2: 0.7e-6,
            dc_curvature: 4.0e-5 / 1e6,
            eps_max: 705e6,
        }
    }

    pub fn module_two() -> Self {
        DeviceParams {
            nu_q: 4.7420e9,
            alpha: 109.9e6,
            nu_r: 5.7405e9,
            t1: 7.9e-6,
            t2: 1.4e-6,
            ..Self::module_one()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("nu_q", self.nu_q),
            ("alpha", self.alpha),
            ("nu_r", self.nu_r),
            ("nu_c", self.nu_c),
            ("t1", self.t1),
            ("t2", self.t2),
            ("eps_max", self.eps_max),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, format!("must be positive, got {v}")));
            }
        }
        if self.nu_m.iter().any(|&f| !(f.is_finite() && f > 0.0)) {
            return Err(Error::param("nu_m", "memory frequencies must be positive"));
        }
        if self.g_qc < 0.0 || self.g_spectator < 0.0 {
            return Err(Error::param("g_qc", "couplings must be non-negative"));
        }
        if self.dc_curvature < 0.0 {
            return Err(Error::param("dc_curvature", "must be non-negative"));
        }
        check_coherence(self.t1, self.t2)
    }

    /// Frequency shift of the qubit while modulated at amplitude `eps`.
    pub fn dc_shift(&self, eps: f64) -> f64 {
        -self.dc_curvature * eps * eps
    }

    pub fn effective_frequency(&self, eps: f64) -> f64 {
        self.nu_q + self.dc_shift(eps)
    }
}

/// Eight memory modes spread evenly over 5.9 to 7.6 GHz.
fn memory_ladder() -> Vec<f64> {
    (0..8).map(|m| 5.9e9 + m as f64 * (1.7e9 / 7.0)).collect()
}

pub(crate) fn check_coherence(t1: f64, t2: f64) -> Result<()> {
    if t2 > 2.0 * t1 * (1.0 + 1e-12) {
        return Err(Error::param(
            "t2",
            format!("T2 = {t2:e} s exceeds 2*T1 = {:e} s", 2.0 * t1),
        ));
    }
    Ok(())
}

/// Cable and communication-resonator parameters shared by the two chips.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterconnectParams {
    pub nu_c: f64,
    /// Cable-mode detuning `nu_l - nu_c`.
    pub delta: f64,
    /// Resonator to cable coupling (the main-text `g_c`).
    pub g_l: f64,
    /// Energy decay rate of each bright normal mode, 1/s.
    pub kappa_bright: f64,
    /// Energy decay rate of the dark mode, 1/s.
    pub kappa_dark: f64,
    /// Ramsey time of the dark mode. `None` means lifetime limited.
    pub t2_dark: Option<f64>,
}

impl Default for InterconnectParams {
    fn default() -> Self {
        InterconnectParams {
            nu_c: 7.88e9,
            delta: 4.25e6,
            g_l: 6.46e6,
            kappa_bright: 1.0 / 200e-9,
            kappa_dark: 1.0 / 550e-9,
            t2_dark: Some(1e-6),
        }
    }
}

impl InterconnectParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu_c.is_finite() && self.nu_c > 0.0) {
            return Err(Error::param("nu_c", "must be positive"));
        }
        if !(self.g_l.is_finite() && self.g_l > 0.0) {
            return Err(Error::param("g_l", format!("must be positive, got {}", self.g_l)));
        }
        if !self.delta.is_finite() {
            return Err(Error::param("delta", "must be finite"));
        }
        if self.kappa_bright < 0.0 || self.kappa_dark < 0.0 {
            return Err(Error::param("kappa", "decay rates must be non-negative"));
        }
        if let Some(t2) = self.t2_dark {
            if !(t2 > 0.0) {
                return Err(Error::param("t2_dark", "must be positive"));
            }
            if self.kappa_dark > 0.0 {
                check_coherence(1.0 / self.kappa_dark, t2)?;
            }
        }
        Ok(())
    }

    pub fn nu_cable(&self) -> f64 {
        self.nu_c + self.delta
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        DeviceParams::module_one().validate().unwrap();
        DeviceParams::module_two().validate().unwrap();
        InterconnectParams::default().validate().unwrap();
    }

    #[test]
    fn t2_bound_enforced() {
        let mut d = DeviceParams::module_one();
        d.t2 = 2.0 * d.t1;
        d.validate().unwrap();
        d.t2 = 2.0 * d.t1 * (1.0 + 1e-9);
        assert!(d.validate().is_err());
    }

    #[test]
    fn memory_ladder_spacing() {
        let m = memory_ladder();
        assert_eq!(m.len(), 8);
        assert!((m[0] - 5.9e9).abs() < 1.0 && (m[7] - 7.6e9).abs() < 1.0);
        assert!(((m[1] - m[0]) - 242.857e6).abs() < 1e3);
    }

    #[test]
    fn rejects_non_positive_cable_coupling() {
        let p = InterconnectParams {
            g_l: 0.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }
}
