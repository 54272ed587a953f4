use serde::Serialize;

use super::{optimize, OptimizationRecord, OptimizerOptions, ParameterBox};
use crate::error::{Error, Result};
use crate::network::Network;
use crate::protocols::{apply_phase, bell_protocol, optimal_phase, psi_plus, BellParams, BellResult};
use crate::quantum::{state_fidelity, DensityMatrix};
use crate::tomography::{clipped_bell_objective, run_tomography, ReadoutModel};

/// Simulated Bell experiment scored the way the lab loop would see it.
#[derive(Clone, Debug)]
pub struct BellExperiment {
    pub network: Network,
    /// `None` scores the simulated state directly, skipping readout.
    pub readout: Option<ReadoutModel>,
    /// Score with the clipped-magnitude objective instead of the
    /// phase-corrected fidelity.
    pub clipped: bool,
    pub seed: u64,
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl BellExperiment {
    pub fn new(network: Network, shots: usize, clipped: bool, seed: u64) -> Self {
        BellExperiment {
            network,
            readout: (shots > 0).then(|| ReadoutModel::with_error_rate(0.05, shots)),
            clipped,
            seed,
        }
    }

    /// Search region over `(eps1, eps2, len1, len2)`.
    pub fn default_box(&self) -> ParameterBox {
        let e = [self.network.devices[0].eps_max, self.network.devices[1].eps_max];
        ParameterBox::new(
            &["eps1", "eps2", "len1", "len2"],
            vec![0.4 * e[0], 0.4 * e[1], 20e-9, 40e-9],
            vec![e[0], e[1], 250e-9, 500e-9],
        )
        .expect("static box is valid")
    }

    pub fn params(x: &[f64]) -> BellParams {
        BellParams {
            eps: [x[0], x[1]],
            lengths: [x[2], x[3]],
            delay: 0.0,
            phase_correction: None,
        }
    }

    /// Per-point seed so a score does not depend on evaluation order.
    fn seed_for(&self, x: &[f64]) -> u64 {
        x.iter().fold(mix(self.seed), |h, v| mix(h ^ v.to_bits()))
    }

    /// Reconstructed two-qubit state as the readout chain would report it.
    pub fn measure(&self, raw: &DensityMatrix, seed: u64) -> Result<DensityMatrix> {
        match &self.readout {
            Some(model) => Ok(run_tomography(raw, model, seed)?.mle),
            None => Ok(raw.clone()),
        }
    }

    fn score(&self, rho: &DensityMatrix) -> Result<f64> {
        if self.clipped {
            Ok(clipped_bell_objective(rho.matrix()))
        } else {
            state_fidelity(&apply_phase(rho, optimal_phase(rho))?, &psi_plus())
        }
    }

    pub fn objective(&self, x: &[f64]) -> Result<f64> {
        if x.len() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, found: x.len() });
        }
        let res = bell_protocol(&self.network, &Self::params(x))?;
        self.score(&self.measure(&res.raw, self.seed_for(x))?)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BellOutcome {
    pub records: Vec<OptimizationRecord>,
    pub best_objective: f64,
    pub best_params: BellParams,
    /// Noiseless state at the best parameters, phase corrected.
    #[serde(skip)]
    pub result: BellResult,
    /// Fidelity of the reconstructed state after the optimal local phase.
    pub measured_fidelity: f64,
    pub simulated_fidelity: f64,
    pub sender_population: f64,
}

/// Run the search loop against `exp` and re-score the winner without
/// clipping.
pub fn optimize_bell(
    exp: &BellExperiment,
    bounds: &ParameterBox,
    opts: &OptimizerOptions,
    history: Vec<OptimizationRecord>,
    on_record: impl FnMut(&OptimizationRecord) -> Result<()>,
) -> Result<BellOutcome> {
    if bounds.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: bounds.dim() });
    }
    if opts.iterations == 0 {
        return Err(Error::param("iterations", "must be at least one"));
    }
    let records = optimize(&|x: &[f64]| exp.objective(x), bounds, opts, history, on_record)?;
    let last = records.last().expect("at least one record");
    let best_params = BellExperiment::params(&last.best_params);
    let result = bell_protocol(&exp.network, &best_params)?;
    let measured = exp.measure(&result.raw, exp.seed_for(&last.best_params) ^ 1)?;
    let measured_fidelity = state_fidelity(&apply_phase(&measured, optimal_phase(&measured))?, &psi_plus())?;
    Ok(BellOutcome {
        best_objective: last.best_value,
        best_params,
        measured_fidelity,
        simulated_fidelity: result.fidelity,
        sender_population: result.sender_population(),
        result,
        records,
    })
}
