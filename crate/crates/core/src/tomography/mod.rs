//! Simulated two-qubit readout and state tomography.

mod estimate;
mod objective;
mod readout;

pub use estimate::{
    fit_pauli_expectations, linear_estimate, mle_objective, mle_reconstruct, pauli_expectations,
    MleOptions, PAULI_LABELS,
};
pub use objective::clipped_bell_objective;
pub use readout::{correct_populations, simulate_measurement, ConfusionMatrix, ReadoutModel};

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{CMatrix, DensityMatrix, HilbertSpace};

/// Single-qubit pre-rotation applied before readout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rotation {
    I,
    /// `R_X(+pi/2)`
    Xp,
    Xm,
    /// `R_Y(+pi/2)`
    Yp,
    Ym,
}

impl Rotation {
    pub fn matrix(self) -> Matrix2<Complex64> {
        let c = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        // R_a(theta) = cos(theta/2) I - i sin(theta/2) sigma_a
        match self {
            Rotation::I => Matrix2::new(one, z, z, one),
            Rotation::Xp => Matrix2::new(c, Complex64::new(0.0, -s), Complex64::new(0.0, -s), c),
            Rotation::Xm => Matrix2::new(c, Complex64::new(0.0, s), Complex64::new(0.0, s), c),
            Rotation::Yp => Matrix2::new(c, Complex64::new(-s, 0.0), Complex64::new(s, 0.0), c),
            Rotation::Ym => Matrix2::new(c, Complex64::new(s, 0.0), Complex64::new(-s, 0.0), c),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Rotation::I => "I",
            Rotation::Xp => "X+",
            Rotation::Xm => "X-",
            Rotation::Yp => "Y+",
            Rotation::Ym => "Y-",
        }
    }
}

/// A pair of pre-rotations and, once measured, the corrected populations of
/// `gg, ge, eg, ee`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomographySetting {
    pub rotations: [Rotation; 2],
    pub populations: Option<[f64; 4]>,
}

impl TomographySetting {
    pub fn new(r1: Rotation, r2: Rotation) -> Self {
        TomographySetting {
            rotations: [r1, r2],
            populations: None,
        }
    }

    /// `R1 (x) R2` in the `2 q1 + q2` basis.
    pub fn unitary(&self) -> CMatrix {
        let a = self.rotations[0].matrix();
        let b = self.rotations[1].matrix();
        CMatrix::from_fn(4, 4, |i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
    }

    /// Born probabilities of the four outcomes after the pre-rotation.
    pub fn probabilities(&self, rho: &CMatrix) -> [f64; 4] {
        let u = self.unitary();
        let r = &u * rho * u.adjoint();
        [r[(0, 0)].re, r[(1, 1)].re, r[(2, 2)].re, r[(3, 3)].re]
    }
}

/// The over-complete set: `{I, Y+, X+}^2` and `{I, Y-, X-}^2` with the
/// shared `I I` counted once.
pub fn tomography_settings() -> Vec<TomographySetting> {
    let pos = [Rotation::I, Rotation::Yp, Rotation::Xp];
    let neg = [Rotation::I, Rotation::Ym, Rotation::Xm];
    let mut out = Vec::with_capacity(17);
    for set in [pos, neg] {
        for &a in &set {
            for &b in &set {
                let s = TomographySetting::new(a, b);
                if !out.contains(&s) {
                    out.push(s);
                }
            }
        }
    }
    out
}

pub fn two_qubit_space() -> HilbertSpace {
    HilbertSpace::new([("q1", 2), ("q2", 2)]).expect("valid")
}

#[derive(Clone, Debug)]
pub struct TomographyResult {
    pub settings: Vec<TomographySetting>,
    pub confusion: ConfusionMatrix,
    pub pauli: [f64; 16],
    pub linear: CMatrix,
    pub mle: DensityMatrix,
}

/// Measure all 17 settings of `rho`, correct with the model's confusion
/// matrix and reconstruct. Setting `k` draws from stream `k` of `seed`.
pub fn run_tomography(rho: &DensityMatrix, model: &ReadoutModel, seed: u64) -> Result<TomographyResult> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: rho.dim() });
    }
    let confusion = model.confusion();
    let settings = tomography_settings()
        .into_par_iter()
        .enumerate()
        .map(|(k, mut s)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let counts = simulate_measurement(rho, &s, model, &mut rng)?;
            s.populations = Some(correct_populations(&counts, &confusion)?);
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    let pauli = fit_pauli_expectations(&settings)?;
    let linear = linear_estimate(&pauli);
    let mle = mle_reconstruct(&settings, &MleOptions::default())?;
    Ok(TomographyResult {
        settings,
        confusion,
        pauli,
        linear,
        mle,
    })
}

/// Random two-qubit state from the Ginibre ensemble of the given rank.
pub fn random_state(rng: &mut impl rand::Rng, rank: usize) -> DensityMatrix {
    use rand_distr::{Distribution, StandardNormal};
    let rank = rank.clamp(1, 4);
    let g = CMatrix::from_fn(4, rank, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    });
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityMatrix::new(two_qubit_space(), m / tr).expect("Ginibre states are physical")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_distinct_settings() {
        let s = tomography_settings();
        assert_eq!(s.len(), 17);
        for (i, a) in s.iter().enumerate() {
            for b in &s[i + 1..] {
                assert_ne!(a.rotations, b.rotations);
            }
        }
    }

    #[test]
    fn rotations_are_unitary_and_inverse_pairs() {
        for r in [Rotation::Xp, Rotation::Yp] {
            let m = r.matrix();
            let inv = match r {
                Rotation::Xp => Rotation::Xm,
                _ => Rotation::Ym,
            }
            .matrix();
            let id = m * inv;
            assert!((id - Matrix2::identity()).norm() < 1e-12);
            assert!((m * m.adjoint() - Matrix2::identity()).norm() < 1e-12);
        }
        // R_Y(pi/2) takes |g> to (|g> + |e>)/sqrt 2
        let v = Rotation::Yp.matrix() * nalgebra::Vector2::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        assert!((v[0].re - v[1].re).abs() < 1e-12 && v[1].re > 0.0);
    }
}
