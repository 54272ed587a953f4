//! Simulated experiments: chevrons, transfer, delay calibration, STIRAP,
//! Bell-pair creation and mode coherence probes.

mod bell;
mod calibration;
mod chevron;
mod coherence;
mod delay;
mod stirap;
mod transfer;

pub use bell::{apply_phase, bell_protocol, optimal_phase, psi_plus, BellParams, BellResult};
pub use calibration::{calibrate_dc_map, calibrate_resonance, CalibrationOptions};
pub use chevron::{chevron_scan, ChevronMode, ChevronResult};
pub use coherence::{mode_coherence_probe, CoherenceKind, CoherenceProbe, ProbeTarget};
pub use delay::{delay_scan, symmetry_center, DelayMap};
pub use stirap::{stirap_scan, stirap_transfer, StirapMap, StirapParams};
pub use transfer::{transfer, TransferParams, TransferResult};

use crate::error::Result;
use crate::lindblad::{evolve_with, Observable, Trajectory};
use crate::network::{FluxPulse, Network};
use crate::quantum::{embed, projector, DensityMatrix, Operator};

/// Product state with qubit `i` in `|e>` when `excited[i]`, modes empty.
pub fn initial_state(net: &Network, excited: [bool; 2]) -> Result<DensityMatrix> {
    let space = net.space()?;
    let mut levels = vec![0; space.len()];
    levels[0] = excited[0] as usize;
    levels[1] = excited[1] as usize;
    DensityMatrix::basis(&space, &levels)
}

/// Projector onto the two-qubit basis state `(q1, q2)`, identity on modes.
pub fn joint_projector(net: &Network, q1: usize, q2: usize) -> Result<Operator> {
    let space = net.space()?;
    let a = embed(&projector(2, q1)?, &space, 0)?;
    let b = embed(&projector(2, q2)?, &space, 1)?;
    Ok(&a * &b)
}

pub fn excitation_number(net: &Network) -> Result<Operator> {
    let space = net.space()?;
    let mut total = Operator::zeros(&space);
    for (i, &d) in space.dims().iter().enumerate() {
        total = &total + &embed(&crate::quantum::number(d)?, &space, i)?;
    }
    Ok(total)
}

/// `n` evenly spaced samples over `[0, t_end]`.
pub fn time_grid(t_end: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|k| t_end * k as f64 / (n - 1) as f64).collect()
}

pub(crate) fn simulate(
    net: &Network,
    pulses: [Option<FluxPulse>; 2],
    rho0: &DensityMatrix,
    times: &[f64],
    observables: &[Observable],
    store_states: bool,
) -> Result<Trajectory> {
    let h = net.hamiltonian(pulses)?;
    let channels = net.channels()?;
    let mut opts = net.options.solver.clone();
    opts.store_states = store_states;
    evolve_with(&h, &channels, rho0, times, &opts, observables)
}

pub(crate) fn population_observables(net: &Network) -> Result<Vec<Observable>> {
    Ok(vec![
        Observable::new("P_gg", joint_projector(net, 0, 0)?),
        Observable::new("P_ge", joint_projector(net, 0, 1)?),
        Observable::new("P_eg", joint_projector(net, 1, 0)?),
        Observable::new("P_ee", joint_projector(net, 1, 1)?),
    ])
}
