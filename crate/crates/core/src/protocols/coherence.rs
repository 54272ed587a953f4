use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{fit_exponential, ExponentialFit};
use crate::lindblad::Observable;
use crate::network::{sideband_rate, FluxPulse, Network};
use crate::quantum::{embed, projector, sigma_x, sigma_y, DensityMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoherenceKind {
    T1,
    Ramsey,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeTarget {
    Dark,
    /// Lower (0) or upper (1) bright mode.
    Bright(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherenceProbe {
    pub kind: CoherenceKind,
    pub target: ProbeTarget,
    pub qubit: usize,
    pub eps: f64,
    pub waits: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoherenceResult {
    pub waits: Vec<f64>,
    pub signal: Vec<f64>,
    pub fit: ExponentialFit,
    pub swap_length: f64,
}

/// Swap an excitation (T1) or a superposition (Ramsey) from the qubit into
/// the target mode, wait, swap back and fit the decay of the returned
/// population or coherence magnitude.
pub fn mode_coherence_probe(net: &Network, probe: &CoherenceProbe) -> Result<CoherenceResult> {
    let q = probe.qubit;
    if q > 1 {
        return Err(Error::InvalidSubsystem { index: q, len: 2 });
    }
    if probe.waits.len() < 3 {
        return Err(Error::param("waits", "need at least three wait times"));
    }
    let m = &net.modes;
    let (freq, coupling) = match probe.target {
        ProbeTarget::Dark => (m.dark_frequency(), m.couplings[q][m.dark_index]),
        ProbeTarget::Bright(k) if k < 2 => {
            let idx = m.bright_indices()[k];
            if !net.options.include_bright {
                return Err(Error::param("target", "bright modes are not simulated"));
            }
            (m.frequencies[idx], m.couplings[q][idx])
        }
        ProbeTarget::Bright(_) => return Err(Error::param("target", "bright index must be 0 or 1")),
    };
    let omega = match probe.target {
        ProbeTarget::Dark => net.resonance(q, probe.eps)?,
        ProbeTarget::Bright(_) => net.bare_resonance(q, probe.eps, freq),
    };
    let rate = sideband_rate(coupling.abs(), probe.eps, omega)?;
    if !(rate > 0.0) {
        return Err(Error::param("eps", "no sideband coupling at this amplitude"));
    }
    let swap = 1.0 / (4.0 * rate);

    let space = net.space()?;
    let mut psi = nalgebra::DVector::zeros(space.total_dim());
    let mut levels = vec![0; space.len()];
    let ground = space.basis_index(&levels)?;
    levels[q] = 1;
    let excited = space.basis_index(&levels)?;
    match probe.kind {
        CoherenceKind::T1 => psi[excited] = num_complex::Complex64::new(1.0, 0.0),
        CoherenceKind::Ramsey => {
            let h = num_complex::Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            psi[ground] = h;
            psi[excited] = h;
        }
    }
    let rho0 = DensityMatrix::from_ket(&space, &psi)?;
    let obs = [
        Observable::new("P_e", embed(&projector(2, 1)?, &space, q)?),
        Observable::new("X", embed(&sigma_x(), &space, q)?),
        Observable::new("Y", embed(&sigma_y(), &space, q)?),
    ];

    let signal = probe
        .waits
        .par_iter()
        .map(|&w| -> Result<f64> {
            let first = FluxPulse::square(probe.eps, omega, 0.0, swap)?;
            let second = FluxPulse::square(probe.eps, omega, swap + w, swap)?;
            let mut train = [Vec::new(), Vec::new()];
            train[q] = vec![first, second];
            let h = net.sequence_model(train).hamiltonian()?;
            let channels = net.channels()?;
            let mut opts = net.options.solver.clone();
            opts.store_states = false;
            let end = second.end();
            let traj = crate::lindblad::evolve_with(&h, &channels, &rho0, &[0.0, end], &opts, &obs)?;
            let get = |k: &str| traj.observable(k).expect("recorded")[1];
            Ok(match probe.kind {
                CoherenceKind::T1 => get("P_e"),
                CoherenceKind::Ramsey => 0.5 * get("X").hypot(get("Y")),
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let fit = fit_exponential(&probe.waits, &signal)?;
    Ok(CoherenceResult {
        waits: probe.waits.clone(),
        signal,
        fit,
        swap_length: swap,
    })
}

