use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{initial_state, joint_projector, simulate};
use crate::error::{Error, Result};
use crate::lindblad::Observable;
use crate::network::{DcMode, Network, GAUSSIAN_TRUNCATION};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StirapParams {
    pub sender: usize,
    pub sigma: f64,
    /// Lead of the receiver pulse over the sender pulse, seconds.
    pub delta_t: f64,
    /// Shared peak flux amplitude, Hz.
    pub amplitude: f64,
    pub dc_mode: DcMode,
}

impl StirapParams {
    pub fn new(sender: usize, sigma: f64, delta_t: f64, amplitude: f64) -> Self {
        StirapParams {
            sender,
            sigma,
            delta_t,
            amplitude,
            dc_mode: DcMode::PeakCompensated,
        }
    }
}

/// Receiver excited population after a counter-intuitive pair of truncated
/// Gaussian pulses.
pub fn stirap_transfer(net: &Network, p: &StirapParams) -> Result<f64> {
    if p.sender > 1 {
        return Err(Error::InvalidSubsystem { index: p.sender, len: 2 });
    }
    if !(p.sigma > 0.0) {
        return Err(Error::param("sigma", "must be positive"));
    }
    let receiver = 1 - p.sender;
    let mut net = net.clone();
    net.options.dc_mode = p.dc_mode;
    let half = GAUSSIAN_TRUNCATION * p.sigma;
    let mut centers = [0.0; 2];
    centers[receiver] = half + (-p.delta_t).max(0.0);
    centers[p.sender] = centers[receiver] + p.delta_t;
    let mut pulses = [None, None];
    for q in 0..2 {
        pulses[q] = Some(net.gaussian_pulse(q, p.amplitude, centers[q], p.sigma)?);
    }
    let end = pulses.iter().flatten().map(|x| x.end()).fold(0.0, f64::max);
    let mut excited = [false; 2];
    excited[p.sender] = true;
    let rho0 = initial_state(&net, excited)?;
    let proj = if receiver == 1 {
        joint_projector(&net, 0, 1)?
    } else {
        joint_projector(&net, 1, 0)?
    };
    let obs = [Observable::new("P", proj)];
    let traj = simulate(&net, pulses, &rho0, &[0.0, end], &obs, false)?;
    Ok(traj.observable("P").expect("recorded")[1])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StirapMap {
    pub sigmas: Vec<f64>,
    pub delays: Vec<f64>,
    /// `fidelity[i][j]` for `sigmas[i]`, `delays[j]`.
    pub fidelity: Vec<Vec<f64>>,
    pub best_sigma: f64,
    pub best_delay: f64,
    pub best_fidelity: f64,
}

pub fn stirap_scan(
    net: &Network,
    sender: usize,
    amplitude: f64,
    sigmas: &[f64],
    delays: &[f64],
    dc_mode: DcMode,
) -> Result<StirapMap> {
    if sigmas.is_empty() || delays.is_empty() {
        return Err(Error::param("sigmas", "scan axes must not be empty"));
    }
    let cells: Vec<(usize, usize)> = (0..sigmas.len())
        .flat_map(|i| (0..delays.len()).map(move |j| (i, j)))
        .collect();
    let values = cells
        .par_iter()
        .map(|&(i, j)| {
            let mut p = StirapParams::new(sender, sigmas[i], delays[j], amplitude);
            p.dc_mode = dc_mode;
            stirap_transfer(net, &p)
        })
        .collect::<Result<Vec<f64>>>()?;
    let k = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .expect("non-empty");
    let (bi, bj) = cells[k];
    Ok(StirapMap {
        sigmas: sigmas.to_vec(),
        delays: delays.to_vec(),
        fidelity: values.chunks(delays.len()).map(<[f64]>::to_vec).collect(),
        best_sigma: sigmas[bi],
        best_delay: delays[bj],
        best_fidelity: values[k],
    })
}
