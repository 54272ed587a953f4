use serde::{Deserialize, Serialize};

use super::{initial_state, population_observables, simulate, time_grid};
use crate::error::{Error, Result};
use crate::network::Network;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferParams {
    /// 0 or 1.
    pub sender: usize,
    /// Flux amplitudes `[eps1, eps2]`, Hz.
    pub eps: [f64; 2],
    /// Pulse lengths per qubit; `None` keeps the pulse on for the whole
    /// window, which turns the trace into a length scan.
    pub lengths: [Option<f64>; 2],
    /// Receiver pulse start relative to the sender's, seconds.
    pub delay: f64,
    pub duration: f64,
    pub samples: usize,
}

impl TransferParams {
    /// Simultaneous pulses at maximum amplitude over a 600 ns window.
    pub fn standard(net: &Network, sender: usize) -> Self {
        TransferParams {
            sender,
            eps: [net.devices[0].eps_max, net.devices[1].eps_max],
            lengths: [None, None],
            delay: 0.0,
            duration: 600e-9,
            samples: 601,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransferResult {
    pub times: Vec<f64>,
    pub p_eg: Vec<f64>,
    pub p_ge: Vec<f64>,
    pub p_gg: Vec<f64>,
    /// Sender population at the end of the window.
    pub sender_final: f64,
    pub peak_fidelity: f64,
    pub peak_time: f64,
    /// Sender population at the peak.
    pub sender_at_peak: f64,
    pub gg_at_peak: f64,
}

impl TransferResult {
    pub fn receiver(&self, sender: usize) -> &[f64] {
        if sender == 0 {
            &self.p_ge
        } else {
            &self.p_eg
        }
    }
}

/// Excite `sender`, switch on both sideband pulses and record the two-qubit
/// populations.
pub fn transfer(net: &Network, p: &TransferParams) -> Result<TransferResult> {
    if p.sender > 1 {
        return Err(Error::InvalidSubsystem { index: p.sender, len: 2 });
    }
    if !(p.duration > 0.0) {
        return Err(Error::param("duration", "must be positive"));
    }
    let receiver = 1 - p.sender;
    let mut start = [0.0; 2];
    start[receiver] = p.delay;
    let offset = (-p.delay).max(0.0);
    let mut pulses = [None, None];
    for q in 0..2 {
        let s = start[q] + offset;
        let len = p.lengths[q].unwrap_or(p.duration - s + 1e-9).max(1e-15);
        pulses[q] = Some(net.square_pulse(q, p.eps[q], s, len)?);
    }
    let mut excited = [false; 2];
    excited[p.sender] = true;
    let rho0 = initial_state(net, excited)?;
    let times = time_grid(p.duration, p.samples);
    let obs = population_observables(net)?;
    let traj = simulate(net, pulses, &rho0, &times, &obs, false)?;
    let get = |k: &str| traj.observable(k).expect("recorded").to_vec();
    let (p_eg, p_ge, p_gg) = (get("P_eg"), get("P_ge"), get("P_gg"));
    let (recv, send) = if p.sender == 0 { (&p_ge, &p_eg) } else { (&p_eg, &p_ge) };
    let k = recv
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .unwrap_or(0);
    Ok(TransferResult {
        peak_fidelity: recv[k],
        peak_time: times[k],
        sender_at_peak: send[k],
        gg_at_peak: p_gg[k],
        sender_final: *send.last().unwrap_or(&0.0),
        times,
        p_eg,
        p_ge,
        p_gg,
    })
}
