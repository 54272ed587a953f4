//! Triplet form of the (mostly very sparse) model operators, used only
//! inside the right-hand side of the master equation.

use num_complex::Complex64;

use crate::quantum::CMatrix;

#[derive(Clone, Debug, Default)]
pub(crate) struct Triplets {
    pub(crate) entries: Vec<(usize, usize, Complex64)>,
}

impl Triplets {
    pub(crate) fn from_dense(m: &CMatrix) -> Self {
        let mut entries = Vec::new();
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                let v = m[(r, c)];
                if v.norm_sqr() > 0.0 {
                    entries.push((r, c, v));
                }
            }
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        Triplets { entries }
    }

    /// `out += scale * self * rho`, all row-major `n x n`.
    #[inline]
    pub(crate) fn mul_acc(&self, scale: Complex64, rho: &[Complex64], out: &mut [Complex64], n: usize) {
        for &(r, c, v) in &self.entries {
            let w = v * scale;
            let src = &rho[c * n..(c + 1) * n];
            let dst = &mut out[r * n..(r + 1) * n];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += w * s;
            }
        }
    }

    /// `out += rate * L rho L^+`.
    #[inline]
    pub(crate) fn sandwich_acc(&self, rate: f64, rho: &[Complex64], out: &mut [Complex64], n: usize) {
        for &(a, c, v1) in &self.entries {
            let w1 = v1 * rate;
            for &(b, d, v2) in &self.entries {
                out[a * n + b] += w1 * rho[c * n + d] * v2.conj();
            }
        }
    }
}
