use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{initial_state, simulate};
use crate::error::{Error, Result};
use crate::network::Network;
use crate::quantum::{partial_trace, state_fidelity, CMatrix, DensityMatrix};

/// `(|ge> + |eg>) / sqrt(2)` in the `2 q1 + q2` basis.
pub fn psi_plus() -> DVector<Complex64> {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    DVector::from_vec(vec![Complex64::new(0.0, 0.0), h, h, Complex64::new(0.0, 0.0)])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellParams {
    /// Flux amplitudes `[sender, receiver]`; qubit 1 sends.
    pub eps: [f64; 2],
    pub lengths: [f64; 2],
    /// Receiver start relative to the sender's.
    pub delay: f64,
    /// Local phase advance on qubit 2. `None` picks the optimum.
    pub phase_correction: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BellResult {
    /// Two-qubit state before phase correction.
    pub raw: DensityMatrix,
    pub rho: DensityMatrix,
    pub fidelity: f64,
    pub phase: f64,
    pub params: BellParams,
}

impl BellResult {
    /// Excited population of the sender (qubit 1).
    pub fn sender_population(&self) -> f64 {
        let m = self.rho.matrix();
        m[(2, 2)].re + m[(3, 3)].re
    }
}

/// Phase advance on qubit 2 maximizing the overlap with `|Psi+>`.
pub fn optimal_phase(rho: &DensityMatrix) -> f64 {
    -rho.matrix()[(1, 2)].arg()
}

/// `rho` after advancing the phase of qubit 2's excited state by `phi`.
pub fn apply_phase(rho: &DensityMatrix, phi: f64) -> Result<DensityMatrix> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: rho.dim() });
    }
    let u = Complex64::from_polar(1.0, phi);
    let diag = [Complex64::new(1.0, 0.0), u, Complex64::new(1.0, 0.0), u];
    let m = rho.matrix();
    let out = CMatrix::from_fn(4, 4, |i, j| diag[i] * m[(i, j)] * diag[j].conj());
    DensityMatrix::from_matrix_unchecked(rho.space().clone(), out)
}

/// Excite qubit 1, play both sideband pulses, trace out the link and score
/// the two-qubit state against `|Psi+>`.
pub fn bell_protocol(net: &Network, p: &BellParams) -> Result<BellResult> {
    if p.lengths.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::param("lengths", "pulse lengths must be positive"));
    }
    let offset = (-p.delay).max(0.0);
    let pulses = [
        Some(net.square_pulse(0, p.eps[0], offset, p.lengths[0])?),
        Some(net.square_pulse(1, p.eps[1], offset + p.delay, p.lengths[1])?),
    ];
    let end = pulses.iter().flatten().map(|x| x.end()).fold(0.0, f64::max);
    let rho0 = initial_state(net, [true, false])?;
    let traj = simulate(net, pulses, &rho0, &[0.0, end], &[], false)?;
    let raw = partial_trace(&traj.final_state, &[0, 1])?;
    let phase = p.phase_correction.unwrap_or_else(|| optimal_phase(&raw));
    let rho = apply_phase(&raw, phase)?;
    let fidelity = state_fidelity(&rho, &psi_plus())?;
    Ok(BellResult {
        raw,
        rho,
        fidelity,
        phase,
        params: p.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::HilbertSpace;

    #[test]
    fn phase_correction_recovers_rotated_bell_state() {
        let space = HilbertSpace::new([("q1", 2), ("q2", 2)]).unwrap();
        let rho = DensityMatrix::from_ket(&space, &psi_plus()).unwrap();
        let rotated = apply_phase(&rho, 1.1).unwrap();
        assert!(state_fidelity(&rotated, &psi_plus()).unwrap() < 0.8);
        let phi = optimal_phase(&rotated);
        let fixed = apply_phase(&rotated, phi).unwrap();
        assert!((state_fidelity(&fixed, &psi_plus()).unwrap() - 1.0).abs() < 1e-12);
    }
}
