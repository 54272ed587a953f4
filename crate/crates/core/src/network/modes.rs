use nalgebra::{Matrix3, SymmetricEigen};
use serde::Serialize;

use super::InterconnectParams;

/// Hybridized modes of the two communication resonators and the cable.
///
/// Columns of `eigenvectors` are the normal modes expressed in the
/// `(b_1c, b_2c, b_l)` basis, sorted by ascending frequency.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalModeDecomposition {
    pub frequencies: [f64; 3],
    pub eigenvectors: Matrix3<f64>,
    /// `couplings[q][k]`: signed coupling of qubit `q` to normal mode `k`.
    pub couplings: [[f64; 3]; 2],
    pub dark_index: usize,
}

impl NormalModeDecomposition {
    /// Indices of the two cable-carrying modes, ascending in frequency.
    pub fn bright_indices(&self) -> [usize; 2] {
        let mut out = [0; 2];
        let mut n = 0;
        for k in 0..3 {
            if k != self.dark_index {
                out[n] = k;
                n += 1;
            }
        }
        out
    }

    pub fn dark_frequency(&self) -> f64 {
        self.frequencies[self.dark_index]
    }

    /// Participation of the cable in mode `k`.
    pub fn cable_participation(&self, k: usize) -> f64 {
        self.eigenvectors[(2, k)].powi(2)
    }

    /// Frequencies relative to the bare resonator frequency.
    pub fn detunings(&self, nu_c: f64) -> [f64; 3] {
        self.frequencies.map(|f| f - nu_c)
    }
}

/// Normal modes for degenerate communication resonators.
pub fn diagonalize_interconnect(p: &InterconnectParams, g_qc: [f64; 2]) -> NormalModeDecomposition {
    diagonalize_detuned(p, [0.0, 0.0], g_qc)
}

/// Normal modes when resonator `i` sits `offsets[i]` away from `p.nu_c`.
pub fn diagonalize_detuned(
    p: &InterconnectParams,
    offsets: [f64; 2],
    g_qc: [f64; 2],
) -> NormalModeDecomposition {
    let g = p.g_l;
    let coupling = Matrix3::new(
        offsets[0], 0.0, g, //
        0.0, offsets[1], g, //
        g, g, p.delta,
    );
    let eig = SymmetricEigen::new(coupling);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut frequencies = [0.0; 3];
    let mut vectors = Matrix3::zeros();
    for (col, &k) in order.iter().enumerate() {
        frequencies[col] = p.nu_c + eig.eigenvalues[k];
        let mut v = eig.eigenvectors.column(k).into_owned();
        // Fix the overall sign: first resonator component non-negative, or
        // the cable component when the first resonator does not participate.
        let pivot = if v[0].abs() > 1e-12 { v[0] } else { v[2] };
        if pivot < 0.0 {
            v = -v;
        }
        vectors.set_column(col, &v);
    }

    let dark_index = (0..3)
        .min_by(|&a, &b| vectors[(2, a)].abs().total_cmp(&vectors[(2, b)].abs()))
        .expect("three modes");

    let mut couplings = [[0.0; 3]; 2];
    for (q, row) in couplings.iter_mut().enumerate() {
        for (k, c) in row.iter_mut().enumerate() {
            *c = g_qc[q] * vectors[(q, k)];
        }
    }

    NormalModeDecomposition {
        frequencies,
        eigenvectors: vectors,
        couplings,
        dark_index,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(delta: f64, g_l: f64) -> InterconnectParams {
        InterconnectParams {
            delta,
            g_l,
            ..Default::default()
        }
    }

    #[test]
    fn degenerate_splitting() {
        let p = params(0.0, 1e6);
        let d = diagonalize_interconnect(&p, [50e6, 50e6]);
        let rel = d.detunings(p.nu_c);
        let s = 2f64.sqrt() * 1e6;
        assert!((rel[0] + s).abs() < 1e-3);
        assert!(rel[1].abs() < 1e-3);
        assert!((rel[2] - s).abs() < 1e-3);
        assert_eq!(d.dark_index, 1);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = d.eigenvectors.column(1);
        assert!((v[0] - h).abs() < 1e-12 && (v[1] + h).abs() < 1e-12 && v[2].abs() < 1e-12);
    }

    #[test]
    fn dark_coupling_is_g_over_root_two() {
        for (delta, g_l) in [(0.0, 6.46e6), (4.25e6, 6.46e6), (-3e6, 2e6)] {
            let d = diagonalize_interconnect(&params(delta, g_l), [50e6, 42e6]);
            let dark = d.dark_index;
            assert!((d.couplings[0][dark].abs() - 50e6 / 2f64.sqrt()).abs() < 1e-9 * 50e6);
            assert!((d.couplings[1][dark].abs() - 42e6 / 2f64.sqrt()).abs() < 1e-9 * 42e6);
            // Opposite signs on the two resonators.
            assert!(d.couplings[0][dark] * d.couplings[1][dark] < 0.0);
            assert!(d.eigenvectors[(2, dark)].abs() < 1e-9);
            assert!((d.dark_frequency() - 7.88e9).abs() < 1e-6);
        }
    }

    #[test]
    fn eigenvectors_orthonormal_and_couplings_sum() {
        let d = diagonalize_interconnect(&params(4.25e6, 6.46e6), [50e6, 50e6]);
        let gram = d.eigenvectors.transpose() * d.eigenvectors;
        assert!((gram - Matrix3::identity()).abs().max() < 1e-9);
        for q in 0..2 {
            let s: f64 = d.couplings[q].iter().map(|g| g * g).sum();
            assert!((s / (50e6f64).powi(2) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn mismatched_resonators_leak_into_cable() {
        // A 3 MHz resonator mismatch keeps the cable share of the
        // communication mode below five percent.
        let p = params(4.25e6, 6.46e6);
        let d = diagonalize_detuned(&p, [1.5e6, -1.5e6], [50e6, 50e6]);
        let share = d.cable_participation(d.dark_index);
        assert!(share > 0.0 && share < 0.05, "cable share {share}");
    }
}
