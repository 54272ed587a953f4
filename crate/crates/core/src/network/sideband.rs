use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::FluxPulse;
use crate::error::{Error, Result};
use crate::lindblad::TimeDependentHamiltonian;
use crate::quantum::{annihilation, embed, number, HilbertSpace, Operator};
use crate::special::bessel_j1;

/// How the modulation-induced frequency pull enters the rotating frame.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DcMode {
    /// The pull follows the instantaneous envelope, so a pulse calibrated at
    /// its peak is detuned on its flanks.
    #[default]
    Instantaneous,
    /// The drive frequency tracks the envelope and the qubit stays at its
    /// peak-amplitude detuning for the whole pulse.
    PeakCompensated,
}

/// Effective exchange rate `g_tilde * J1(eps / (2 omega))`.
pub fn sideband_rate(g_tilde: f64, eps: f64, omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::param("omega", format!("must be positive, got {omega}")));
    }
    Ok(g_tilde * bessel_j1(eps / (2.0 * omega)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SidebandQubit {
    pub label: String,
    pub frequency: f64,
    pub dc_curvature: f64,
    /// Non-overlapping pulses sharing one modulation frequency.
    pub pulses: Vec<FluxPulse>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SidebandMode {
    pub label: String,
    pub frequency: f64,
    pub levels: usize,
    /// Signed coupling to each qubit, in qubit order.
    pub couplings: Vec<f64>,
}

/// Two-level qubits exchanging excitations with bosonic modes through
/// first-order flux sidebands, in a frame rotating at `frame` for the modes
/// and at `frame - omega_i` for qubit `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct SidebandModel {
    pub qubits: Vec<SidebandQubit>,
    pub modes: Vec<SidebandMode>,
    pub frame: f64,
    pub dc_mode: DcMode,
}

impl SidebandModel {
    pub fn space(&self) -> Result<HilbertSpace> {
        HilbertSpace::new(
            self.qubits
                .iter()
                .map(|q| (q.label.clone(), 2))
                .chain(self.modes.iter().map(|m| (m.label.clone(), m.levels))),
        )
    }

    pub fn hamiltonian(&self) -> Result<TimeDependentHamiltonian> {
        let space = self.space()?;
        let nq = self.qubits.len();
        for m in &self.modes {
            if m.couplings.len() != nq {
                return Err(Error::DimensionMismatch {
                    expected: nq,
                    found: m.couplings.len(),
                });
            }
        }
        let mut h = TimeDependentHamiltonian::zero(&space);
        let mut lowering = Vec::with_capacity(self.modes.len());
        for (k, m) in self.modes.iter().enumerate() {
            let idx = nq + k;
            let n = embed(&number(m.levels)?, &space, idx)?;
            h.add_static(&n.scale_real(TAU * (m.frequency - self.frame)))?;
            lowering.push(embed(&annihilation(m.levels)?, &space, idx)?);
        }

        for (i, q) in self.qubits.iter().enumerate() {
            let Some(first) = q.pulses.first() else { continue };
            let omega = first.frequency;
            for p in &q.pulses {
                p.validate()?;
                if (p.frequency - omega).abs() > 1e-12 * omega {
                    return Err(Error::param("pulses", "all pulses on a qubit must share one frequency"));
                }
            }
            let pulses: Arc<[FluxPulse]> = q.pulses.clone().into();
            let envelope = {
                let pulses = pulses.clone();
                move |t: f64| pulses.iter().map(|p| p.envelope(t)).sum::<f64>()
            };
            let peak = q.pulses.iter().map(|p| p.amplitude).fold(0.0, f64::max);
            let n_q = embed(&number(2)?, &space, i)?;
            let sm = embed(&annihilation(2)?, &space, i)?;
            let sp = sm.dag();

            let base = q.frequency + omega - self.frame;
            match self.dc_mode {
                DcMode::Instantaneous => {
                    h.add_static(&n_q.scale_real(TAU * base))?;
                    let curv = q.dc_curvature;
                    if curv != 0.0 {
                        let env = envelope.clone();
                        h.add_term(
                            move |t| {
                                let e = env(t);
                                -TAU * curv * e * e
                            },
                            n_q.clone(),
                        )?;
                    }
                }
                DcMode::PeakCompensated => {
                    let shift = -q.dc_curvature * peak * peak;
                    h.add_static(&n_q.scale_real(TAU * (base + shift)))?;
                }
            }

            // -i g (b s+ - b^+ s-) summed over modes
            let mut v = Operator::zeros(&space);
            for (m, b) in self.modes.iter().zip(&lowering) {
                let g = m.couplings[i];
                if g == 0.0 {
                    continue;
                }
                let x = &(b * &sp) - &(&b.dag() * &sm);
                v = &v + &x.scale(Complex64::new(0.0, -TAU * g));
            }
            h.add_term(move |t| bessel_j1(envelope(t) / (2.0 * omega)), v)?;
            h.add_breakpoints(pulses.iter().flat_map(|p| p.breakpoints()));
        }
        Ok(h)
    }
}
