use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{initial_state, joint_projector, simulate, time_grid};
use crate::error::{Error, Result};
use crate::fit::golden_section;
use crate::lindblad::Observable;
use crate::network::{DcOffsetMap, FluxPulse, Network};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CalibrationOptions {
    /// Half-width of the frequency search around the bare resonance, Hz.
    pub span: f64,
    pub coarse_points: usize,
    /// Final frequency resolution, Hz.
    pub tolerance: f64,
    /// Averaging window in units of the vacuum Rabi period `1 / (2 g_eff)`.
    pub periods: f64,
    pub samples: usize,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        CalibrationOptions {
            span: 1.5e6,
            coarse_points: 13,
            tolerance: 2e3,
            periods: 2.0,
            samples: 81,
        }
    }
}

/// Modulation frequency at which `qubit` swaps most completely with the dark
/// mode at amplitude `eps`, found by minimizing the time-averaged excited
/// population of a lossless chevron column. Captures the Stark pull of the
/// bright modes on top of the bare modulation offset.
pub fn calibrate_resonance(net: &Network, qubit: usize, eps: f64, opts: &CalibrationOptions) -> Result<f64> {
    if qubit > 1 {
        return Err(Error::InvalidSubsystem { index: qubit, len: 2 });
    }
    let mut lossless = net.clone();
    lossless.options.loss = false;
    lossless.options.dephasing = false;
    lossless.set_dc_map(qubit, None);
    let bare = lossless.resonance(qubit, eps)?;
    let g = lossless.dark_rate(qubit, eps)?;
    if !(g > 0.0) {
        return Err(Error::param("eps", "no sideband coupling at this amplitude"));
    }
    let window = opts.periods / (2.0 * g);
    let times = time_grid(window, opts.samples);
    let mut excited = [false; 2];
    excited[qubit] = true;
    let rho0 = initial_state(&lossless, excited)?;
    let level = |q: usize| (q == qubit) as usize;
    let obs = [Observable::new("P", joint_projector(&lossless, level(0), level(1))?)];

    let mean_population = |omega: f64| -> Result<f64> {
        let mut pulses = [None, None];
        pulses[qubit] = Some(FluxPulse::square(eps, omega, 0.0, window + 1e-9)?);
        let traj = simulate(&lossless, pulses, &rho0, &times, &obs, false)?;
        let p = traj.observable("P").expect("recorded");
        Ok(p.iter().sum::<f64>() / p.len() as f64)
    };

    let n = opts.coarse_points.max(3);
    let step = 2.0 * opts.span / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|k| bare - opts.span + k as f64 * step).collect();
    let values = grid
        .par_iter()
        .map(|&w| mean_population(w))
        .collect::<Result<Vec<f64>>>()?;
    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .expect("non-empty grid");
    let lo = grid[best] - step;
    let hi = grid[best] + step;
    let (omega, _) = golden_section(mean_population, lo, hi, opts.tolerance)?;
    Ok(omega)
}

/// Calibrate `qubit` at each amplitude in `eps` (sorted ascending).
pub fn calibrate_dc_map(net: &Network, qubit: usize, eps: &[f64], opts: &CalibrationOptions) -> Result<DcOffsetMap> {
    let points = eps
        .par_iter()
        .map(|&e| Ok((e, calibrate_resonance(net, qubit, e, opts)?)))
        .collect::<Result<Vec<_>>>()?;
    DcOffsetMap::new(points)
}
