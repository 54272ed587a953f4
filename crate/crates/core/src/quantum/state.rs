use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};

use super::operator::{hermitian_eigenvalues, CMatrix, ZERO};
use super::{HilbertSpace, Operator};

/// Tolerance applied by [`DensityMatrix::new`] to Hermiticity, trace and
/// positivity.
pub const STATE_TOLERANCE: f64 = 1e-9;

/// Trace-one positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    space: HilbertSpace,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity at [`STATE_TOLERANCE`].
    pub fn new(space: HilbertSpace, matrix: CMatrix) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(space, matrix)?;
        rho.validate(STATE_TOLERANCE)?;
        Ok(rho)
    }

    /// Shape-checked only. Numerical integrators use this and report drift
    /// separately.
    pub fn from_matrix_unchecked(space: HilbertSpace, matrix: CMatrix) -> Result<Self> {
        let n = space.total_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.nrows(),
            });
        }
        Ok(DensityMatrix { space, matrix })
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let op = Operator::new(self.space.clone(), self.matrix.clone())?;
        let herm = op.hermiticity_error();
        if herm > tol {
            return Err(Error::InvalidState(format!("not Hermitian (error {herm:e})")));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > tol {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let min = self.min_eigenvalue();
        if min < -tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn from_ket(space: &HilbertSpace, psi: &DVector<Complex64>) -> Result<Self> {
        let n = space.total_dim();
        if psi.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: psi.len(),
            });
        }
        let norm = psi.norm();
        if (norm - 1.0).abs() > STATE_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(DensityMatrix {
            space: space.clone(),
            matrix: psi * psi.adjoint(),
        })
    }

    pub fn basis(space: &HilbertSpace, levels: &[usize]) -> Result<Self> {
        let psi = super::basis_ket(space, levels)?;
        Self::from_ket(space, &psi)
    }

    pub fn maximally_mixed(space: &HilbertSpace) -> Self {
        let n = space.total_dim();
        DensityMatrix {
            space: space.clone(),
            matrix: CMatrix::identity(n, n) * Complex64::new(1.0 / n as f64, 0.0),
        }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Population of a product basis state.
    pub fn population(&self, levels: &[usize]) -> Result<f64> {
        let idx = self.space.basis_index(levels)?;
        Ok(self.matrix[(idx, idx)].re)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        let space = HilbertSpace::new(
            self.space
                .labels()
                .iter()
                .cloned()
                .zip(self.space.dims().iter().copied())
                .chain(
                    other
                        .space
                        .labels()
                        .iter()
                        .cloned()
                        .zip(other.space.dims().iter().copied()),
                ),
        )?;
        Ok(DensityMatrix {
            space,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    /// `U rho U^dagger`.
    pub fn transform(&self, unitary: &Operator) -> Result<Self> {
        if unitary.space() != &self.space {
            return Err(Error::SpaceMismatch);
        }
        let u = unitary.matrix();
        Ok(DensityMatrix {
            space: self.space.clone(),
            matrix: u * &self.matrix * u.adjoint(),
        })
    }

    /// Half the trace norm of `self - other`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.space.total_dim() != other.space.total_dim() {
            return Err(Error::SpaceMismatch);
        }
        let diff = &self.matrix - &other.matrix;
        Ok(0.5 * hermitian_eigenvalues(&diff).iter().map(|v| v.abs()).sum::<f64>())
    }
}

/// `Tr(op * rho)`.
pub fn expect(op: &Operator, rho: &DensityMatrix) -> Result<Complex64> {
    if op.space() != rho.space() {
        return Err(Error::SpaceMismatch);
    }
    let a = op.matrix();
    let r = rho.matrix();
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * r[(k, i)];
        }
    }
    Ok(acc)
}

/// Reduced state on the `keep` subsystems (output ordered as in `keep`).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let space = rho.space();
    let sub = space.subspace(keep)?;
    let mut seen = vec![false; space.len()];
    for &k in keep {
        if std::mem::replace(&mut seen[k], true) {
            return Err(Error::param("keep", format!("subsystem {k} listed twice")));
        }
    }
    let traced: Vec<usize> = (0..space.len()).filter(|i| !seen[*i]).collect();
    let traced_space_dim: usize = traced.iter().map(|&i| space.dims()[i]).product();
    let n_out = sub.total_dim();
    let mut out = CMatrix::zeros(n_out, n_out);

    let full_index = |kept: &[usize], env: &[usize]| -> usize {
        let mut levels = vec![0usize; space.len()];
        for (&k, &v) in keep.iter().zip(kept) {
            levels[k] = v;
        }
        for (&t, &v) in traced.iter().zip(env) {
            levels[t] = v;
        }
        space.basis_index(&levels).expect("levels in range")
    };
    let traced_space = if traced.is_empty() {
        None
    } else {
        Some(HilbertSpace::new(traced.iter().map(|&t| (String::new(), space.dims()[t])))?)
    };

    let m = rho.matrix();
    for i in 0..n_out {
        let li = sub.levels_of(i);
        for j in 0..n_out {
            let lj = sub.levels_of(j);
            let mut acc = ZERO;
            for e in 0..traced_space_dim {
                let env = traced_space.as_ref().map(|s| s.levels_of(e)).unwrap_or_default();
                acc += m[(full_index(&li, &env), full_index(&lj, &env))];
            }
            out[(i, j)] = acc;
        }
    }
    DensityMatrix::from_matrix_unchecked(sub, out)
}

/// `<psi|rho|psi>` for a normalized pure state.
pub fn state_fidelity(rho: &DensityMatrix, psi: &DVector<Complex64>) -> Result<f64> {
    if psi.len() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: psi.len(),
        });
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > STATE_TOLERANCE {
        return Err(Error::NotNormalized(norm));
    }
    let f = (psi.adjoint() * rho.matrix() * psi)[(0, 0)].re;
    if f < -STATE_TOLERANCE || f > 1.0 + STATE_TOLERANCE {
        return Ok(f);
    }
    Ok(f.clamp(0.0, 1.0))
}
