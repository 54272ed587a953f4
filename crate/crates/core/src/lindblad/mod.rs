//! Lindblad master-equation integration for time-dependent Hamiltonians.

mod hamiltonian;
mod integrator;
mod sparse;

pub use hamiltonian::{Coefficient, TimeDependentHamiltonian};
pub use integrator::{evolve, evolve_with, Observable, SolverOptions, Trajectory};

use crate::error::{Error, Result};
use crate::network::params::check_coherence;
use crate::quantum::{annihilation, embed, number, HilbertSpace, Operator};

/// A dissipator `rate * D[operator]` with `D[L]rho = L rho L^+ - {L^+ L, rho}/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct CollapseChannel {
    operator: Operator,
    rate: f64,
}

impl CollapseChannel {
    pub fn new(operator: Operator, rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::param("rate", format!("must be finite and >= 0, got {rate}")));
        }
        Ok(CollapseChannel { operator, rate })
    }

    pub fn operator(&self) -> &Operator {
        &self.operator
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

/// Relaxation at `1/t1` and pure dephasing on subsystem `target`.
///
/// Dephasing uses `2n - 1` (the qubit `sigma_z`) at rate
/// `(1/t2 - 1/(2 t1)) / 2`, so two-level coherences decay at exactly `1/t2`.
/// An infinite `t1` disables relaxation and an infinite `t2` disables
/// dephasing. Zero-rate channels are omitted.
pub fn channels_from_coherence(
    t1: f64,
    t2: f64,
    space: &HilbertSpace,
    target: usize,
) -> Result<Vec<CollapseChannel>> {
    if !(t1 > 0.0) || !(t2 > 0.0) {
        return Err(Error::param("t1", "coherence times must be positive"));
    }
    check_coherence(t1, t2)?;
    space.check_index(target)?;
    let d = space.dims()[target];
    let mut out = Vec::with_capacity(2);
    let gamma1 = if t1.is_finite() { 1.0 / t1 } else { 0.0 };
    if gamma1 > 0.0 {
        out.push(CollapseChannel::new(embed(&annihilation(d)?, space, target)?, gamma1)?);
    }
    let gamma_phi = dephasing_rate(t1, t2);
    if gamma_phi > 0.0 {
        let n = number(d)?;
        let z = &n.scale_real(2.0) - &Operator::identity(n.space());
        out.push(CollapseChannel::new(embed(&z, space, target)?, gamma_phi)?);
    }
    Ok(out)
}

/// Rate of the `sigma_z` dephasing channel for the given `T1`, `T2`.
pub fn dephasing_rate(t1: f64, t2: f64) -> f64 {
    let inv_t1 = if t1.is_finite() { 1.0 / t1 } else { 0.0 };
    let inv_t2 = if t2.is_finite() { 1.0 / t2 } else { 0.0 };
    (0.5 * (inv_t2 - 0.5 * inv_t1)).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lifetime_limited_has_no_dephasing() {
        let s = HilbertSpace::single(2).unwrap();
        let ch = channels_from_coherence(10e-6, 20e-6, &s, 0).unwrap();
        assert_eq!(ch.len(), 1);
        assert!((ch[0].rate() - 1e5).abs() < 1e-6);
    }

    #[test]
    fn table_values() {
        let s = HilbertSpace::single(2).unwrap();
        let ch = channels_from_coherence(10.1e-6, 0.7e-6, &s, 0).unwrap();
        let want = (1.0 / 0.7e-6 - 1.0 / 20.2e-6) / 2.0;
        assert!((ch[1].rate() / want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_t2_above_bound() {
        let s = HilbertSpace::single(2).unwrap();
        assert!(channels_from_coherence(1e-6, 2.1e-6, &s, 0).is_err());
    }

    #[test]
    fn negative_rate_rejected() {
        let s = HilbertSpace::single(2).unwrap();
        assert!(CollapseChannel::new(Operator::identity(&s), -1.0).is_err());
    }
}
