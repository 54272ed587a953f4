use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lindblad::{channels_from_coherence, evolve_with, CollapseChannel, Observable};
use crate::network::{sideband_rate, FluxPulse, Network, SidebandMode, SidebandModel, SidebandQubit};
use crate::quantum::{annihilation, embed, projector, DensityMatrix};

/// A mode taking part in a chevron scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChevronMode {
    pub label: String,
    pub frequency: f64,
    pub coupling: f64,
    pub kappa: f64,
    /// Bare sideband resonance at the scan amplitude.
    pub resonance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChevronResult {
    pub frequencies: Vec<f64>,
    pub lengths: Vec<f64>,
    /// `population[i][j]`: excited population at `frequencies[i]`, `lengths[j]`.
    pub population: Vec<Vec<f64>>,
    pub modes: Vec<ChevronMode>,
}

fn candidate_modes(net: &Network, qubit: usize, eps: f64, spectators: bool) -> Vec<ChevronMode> {
    let d = &net.devices[qubit];
    let m = &net.modes;
    let ic = &net.interconnect;
    let mut out = Vec::new();
    let mut push = |label: String, frequency: f64, coupling: f64, kappa: f64| {
        out.push(ChevronMode {
            label,
            frequency,
            coupling,
            kappa,
            resonance: net.bare_resonance(qubit, eps, frequency),
        })
    };
    push("dark".into(), m.dark_frequency(), m.couplings[qubit][m.dark_index], ic.kappa_dark);
    for (label, k) in ["bright_lo", "bright_hi"].iter().zip(m.bright_indices()) {
        push(label.to_string(), m.frequencies[k], m.couplings[qubit][k], ic.kappa_bright);
    }
    if spectators {
        push("readout".into(), d.nu_r, d.g_spectator, 0.0);
        for (k, &f) in d.nu_m.iter().enumerate() {
            push(format!("memory{k}"), f, d.g_spectator, 0.0);
        }
    }
    out
}

/// Qubit population after a square sideband pulse of each length at each
/// modulation frequency. Only modes whose sideband falls near the scanned
/// band are simulated; `spectators` adds the readout and memory resonators
/// to the candidates.
pub fn chevron_scan(
    net: &Network,
    qubit: usize,
    frequencies: &[f64],
    lengths: &[f64],
    eps: f64,
    spectators: bool,
) -> Result<ChevronResult> {
    if qubit > 1 {
        return Err(Error::InvalidSubsystem { index: qubit, len: 2 });
    }
    if frequencies.is_empty() || lengths.is_empty() {
        return Err(Error::param("frequencies", "scan axes must not be empty"));
    }
    if lengths[0] < 0.0 || lengths.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("lengths", "must be non-negative and increasing"));
    }
    let (fmin, fmax) = frequencies
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &f| (a.min(f), b.max(f)));
    let modes: Vec<ChevronMode> = candidate_modes(net, qubit, eps, spectators)
        .into_iter()
        .filter(|m| {
            let rate = sideband_rate(m.coupling.abs(), eps, m.resonance.abs().max(1.0)).unwrap_or(0.0);
            let margin = 5e6 + 10.0 * rate;
            m.resonance >= fmin - margin && m.resonance <= fmax + margin
        })
        .collect();
    if modes.is_empty() {
        log::debug!(
            "no mode has its sideband within {:.3}..{:.3} MHz; the chevron map will be flat",
            fmin / 1e6,
            fmax / 1e6
        );
    }

    let levels = net.options.mode_levels;
    let d = &net.devices[qubit];
    let frame = modes.first().map(|m| m.frequency).unwrap_or(d.nu_q);
    let base = SidebandModel {
        qubits: vec![SidebandQubit {
            label: "q".into(),
            frequency: d.nu_q,
            dc_curvature: d.dc_curvature,
            pulses: Vec::new(),
        }],
        modes: modes
            .iter()
            .map(|m| SidebandMode {
                label: m.label.clone(),
                frequency: m.frequency,
                levels,
                couplings: vec![m.coupling],
            })
            .collect(),
        frame,
        dc_mode: net.options.dc_mode,
    };
    let space = base.space()?;
    let mut channels: Vec<CollapseChannel> = Vec::new();
    let (t1, t2) = net.qubit_coherence(qubit);
    for (k, c) in channels_from_coherence(t1, t2, &space, 0)?.into_iter().enumerate() {
        let relax = t1.is_finite() && k == 0;
        if (relax && net.options.loss) || (!relax && net.options.dephasing) {
            channels.push(c);
        }
    }
    if net.options.loss {
        for (k, m) in modes.iter().enumerate() {
            if m.kappa > 0.0 {
                channels.push(CollapseChannel::new(embed(&annihilation(levels)?, &space, 1 + k)?, m.kappa)?);
            }
        }
    }

    let mut levels0 = vec![0; space.len()];
    levels0[0] = 1;
    let rho0 = DensityMatrix::basis(&space, &levels0)?;
    let obs = [Observable::new("P_e", embed(&projector(2, 1)?, &space, 0)?)];
    let prepend = lengths[0] > 0.0;
    let mut times = Vec::with_capacity(lengths.len() + 1);
    if prepend {
        times.push(0.0);
    }
    times.extend_from_slice(lengths);
    let t_end = *lengths.last().expect("non-empty");
    let mut opts = net.options.solver.clone();
    opts.store_states = false;

    let population = frequencies
        .par_iter()
        .map(|&omega| -> Result<Vec<f64>> {
            let mut model = base.clone();
            if omega <= 0.0 {
                return Err(Error::param("frequencies", "modulation frequency must be positive"));
            }
            model.qubits[0].pulses = vec![FluxPulse::square(eps, omega, 0.0, t_end + 1e-9)?];
            let h = model.hamiltonian()?;
            let traj = evolve_with(&h, &channels, &rho0, &times, &opts, &obs)?;
            let p = traj.observable("P_e").expect("recorded");
            Ok(p[prepend as usize..].to_vec())
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ChevronResult {
        frequencies: frequencies.to_vec(),
        lengths: lengths.to_vec(),
        population,
        modes,
    })
}
