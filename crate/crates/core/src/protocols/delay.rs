use rayon::prelude::*;
use serde::Serialize;

use super::{initial_state, joint_projector, simulate};
use crate::error::{Error, Result};
use crate::lindblad::Observable;
use crate::network::Network;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DelayMap {
    pub sender: usize,
    pub delays: Vec<f64>,
    pub lengths: Vec<f64>,
    /// `population[i][j]`: sender excited population after both pulses, for
    /// `delays[i]` and `lengths[j]`.
    pub population: Vec<Vec<f64>>,
}

impl DelayMap {
    pub fn center(&self) -> Result<f64> {
        symmetry_center(&self.delays, &self.population)
    }
}

/// Equal-length square pulses on both qubits, the receiver's delayed by each
/// entry of `delays` (negative: receiver first). Records the sender's excited
/// population once both pulses have finished.
pub fn delay_scan(net: &Network, sender: usize, eps: [f64; 2], delays: &[f64], lengths: &[f64]) -> Result<DelayMap> {
    if sender > 1 {
        return Err(Error::InvalidSubsystem { index: sender, len: 2 });
    }
    if delays.is_empty() || lengths.is_empty() {
        return Err(Error::param("delays", "scan axes must not be empty"));
    }
    if lengths.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::param("lengths", "pulse lengths must be positive"));
    }
    let receiver = 1 - sender;
    let mut excited = [false; 2];
    excited[sender] = true;
    let rho0 = initial_state(net, excited)?;
    let proj = if sender == 0 {
        &joint_projector(net, 1, 0)? + &joint_projector(net, 1, 1)?
    } else {
        &joint_projector(net, 0, 1)? + &joint_projector(net, 1, 1)?
    };
    let obs = [Observable::new("P_sender", proj)];
    let cells: Vec<(usize, usize)> = (0..delays.len())
        .flat_map(|i| (0..lengths.len()).map(move |j| (i, j)))
        .collect();
    let values = cells
        .par_iter()
        .map(|&(i, j)| -> Result<f64> {
            let (d, len) = (delays[i], lengths[j]);
            let t0 = (-d).max(0.0);
            let mut start = [0.0; 2];
            start[sender] = t0;
            start[receiver] = t0 + d;
            let mut pulses = [None, None];
            for q in 0..2 {
                pulses[q] = Some(net.square_pulse(q, eps[q], start[q], len)?);
            }
            let end = pulses
                .iter()
                .flatten()
                .map(|p| p.end())
                .fold(0.0, f64::max);
            let traj = simulate(net, pulses, &rho0, &[0.0, end + 1e-9], &obs, false)?;
            Ok(traj.observable("P_sender").expect("recorded")[1])
        })
        .collect::<Result<Vec<f64>>>()?;
    let population = values.chunks(lengths.len()).map(<[f64]>::to_vec).collect();
    Ok(DelayMap {
        sender,
        delays: delays.to_vec(),
        lengths: lengths.to_vec(),
        population,
    })
}

/// Delay about which the map's rows are most nearly mirror-symmetric.
///
/// Every grid delay with at least a third of the grid on each side is a
/// candidate; the score is the mean squared difference between mirrored
/// rows over the overlap.
pub fn symmetry_center(delays: &[f64], rows: &[Vec<f64>]) -> Result<f64> {
    let n = delays.len();
    if n < 3 || rows.len() != n {
        return Err(Error::param("delays", "need at least three delays, one row each"));
    }
    let min_arm = (n / 3).max(1);
    let mut best: Option<(f64, usize)> = None;
    for c in min_arm..n.saturating_sub(min_arm) {
        let arm = c.min(n - 1 - c);
        let mut acc = 0.0;
        let mut count = 0usize;
        for k in 1..=arm {
            for (a, b) in rows[c - k].iter().zip(&rows[c + k]) {
                acc += (a - b).powi(2);
                count += 1;
            }
        }
        let score = acc / count.max(1) as f64;
        if best.is_none_or(|(s, _)| score < s) {
            best = Some((score, c));
        }
    }
    best.map(|(_, c)| delays[c])
        .ok_or_else(|| Error::param("delays", "grid too small for a symmetry search"))
}
