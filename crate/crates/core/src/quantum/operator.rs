use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

use super::HilbertSpace;

pub type CMatrix = DMatrix<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
pub(crate) const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// A dense operator tied to the Hilbert space it acts on.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    space: HilbertSpace,
    matrix: CMatrix,
}

impl Operator {
    pub fn new(space: HilbertSpace, matrix: CMatrix) -> Result<Self> {
        let n = space.total_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Operator { space, matrix })
    }

    /// Wrap a square matrix as an operator on a single anonymous subsystem.
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        let space = HilbertSpace::single(matrix.nrows())?;
        Self::new(space, matrix)
    }

    pub fn from_real(rows: usize, data: &[f64]) -> Result<Self> {
        let m = CMatrix::from_row_iterator(rows, rows, data.iter().map(|&x| Complex64::new(x, 0.0)));
        Self::from_matrix(m)
    }

    pub fn identity(space: &HilbertSpace) -> Self {
        let n = space.total_dim();
        Operator {
            space: space.clone(),
            matrix: CMatrix::identity(n, n),
        }
    }

    pub fn zeros(space: &HilbertSpace) -> Self {
        let n = space.total_dim();
        Operator {
            space: space.clone(),
            matrix: CMatrix::zeros(n, n),
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

    pub fn dag(&self) -> Self {
        Operator {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix * factor,
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn try_add(&self, other: &Operator) -> Result<Self> {
        self.same_space(other)?;
        Ok(Operator {
            space: self.space.clone(),
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn try_mul(&self, other: &Operator) -> Result<Self> {
        self.same_space(other)?;
        Ok(Operator {
            space: self.space.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// `[self, other]`
    pub fn commutator(&self, other: &Operator) -> Result<Self> {
        self.same_space(other)?;
        Ok(Operator {
            space: self.space.clone(),
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        })
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Largest elementwise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues_hermitian(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Kronecker product; the result lives on the concatenated space.
    pub fn kron(&self, other: &Operator) -> Result<Self> {
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
        Ok(Operator {
            space,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    pub(crate) fn same_space(&self, other: &Operator) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.try_add(rhs).expect("operator spaces differ")
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.same_space(rhs).expect("operator spaces differ");
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.try_mul(rhs).expect("operator spaces differ")
    }
}

pub(crate) fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut vals: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    vals
}

/// Lowering operator with `sqrt(n)` on the first superdiagonal.
pub fn annihilation(dim: usize) -> Result<Operator> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let mut m = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        m[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    Operator::from_matrix(m)
}

pub fn creation(dim: usize) -> Result<Operator> {
    Ok(annihilation(dim)?.dag())
}

pub fn number(dim: usize) -> Result<Operator> {
    let a = annihilation(dim)?;
    Ok(&a.dag() * &a)
}

/// `|level><level|` on a single subsystem.
pub fn projector(dim: usize, level: usize) -> Result<Operator> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    if level >= dim {
        return Err(Error::DimensionMismatch { expected: dim, found: level });
    }
    let mut m = CMatrix::zeros(dim, dim);
    m[(level, level)] = ONE;
    Operator::from_matrix(m)
}

/// Pauli matrices in the `(g, e)` = `(0, 1)` basis.
pub fn sigma_x() -> Operator {
    Operator::from_real(2, &[0.0, 1.0, 1.0, 0.0]).expect("2x2")
}

pub fn sigma_y() -> Operator {
    let m = CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]);
    Operator::from_matrix(m).expect("2x2")
}

/// `|e><e| - |g><g|`, so the excited level carries `+1`.
pub fn sigma_z() -> Operator {
    Operator::from_real(2, &[-1.0, 0.0, 0.0, 1.0]).expect("2x2")
}

/// `sigma^-` = `|g><e|`.
pub fn sigma_minus() -> Operator {
    annihilation(2).expect("2x2")
}

pub fn sigma_plus() -> Operator {
    creation(2).expect("2x2")
}

/// Place `op` at subsystem `index` of `space`, identity elsewhere.
pub fn embed(op: &Operator, space: &HilbertSpace, index: usize) -> Result<Operator> {
    space.check_index(index)?;
    let d = space.dims()[index];
    if op.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: op.dim(),
        });
    }
    let left: usize = space.dims()[..index].iter().product();
    let right: usize = space.dims()[index + 1..].iter().product();
    let n = space.total_dim();
    let mut m = CMatrix::zeros(n, n);
    let local = op.matrix();
    for l in 0..left {
        for a in 0..d {
            for b in 0..d {
                let v = local[(a, b)];
                if v == ZERO {
                    continue;
                }
                for r in 0..right {
                    let row = (l * d + a) * right + r;
                    let col = (l * d + b) * right + r;
                    m[(row, col)] = v;
                }
            }
        }
    }
    Operator::new(space.clone(), m)
}

/// Product state `|levels>` as a column vector.
pub fn basis_ket(space: &HilbertSpace, levels: &[usize]) -> Result<nalgebra::DVector<Complex64>> {
    let idx = space.basis_index(levels)?;
    let mut v = nalgebra::DVector::zeros(space.total_dim());
    v[idx] = ONE;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: &CMatrix, b: &CMatrix, tol: f64) {
        assert_eq!(a.shape(), b.shape());
        let diff = (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff <= tol, "matrices differ by {diff}");
    }

    #[test]
    fn two_level_lowering() {
        let a = annihilation(2).unwrap();
        let expect = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        assert_close(a.matrix(), &expect, 0.0);
    }

    #[test]
    fn three_level_superdiagonal() {
        let a = annihilation(3).unwrap();
        assert!((a.matrix()[(0, 1)].re - 1.0).abs() < 1e-15);
        assert!((a.matrix()[(1, 2)].re - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(a.matrix().iter().filter(|z| **z != ZERO).count(), 2);
    }

    #[test]
    fn number_operator_diagonal() {
        let n = number(4).unwrap();
        for k in 0..4 {
            assert!((n.matrix()[(k, k)].re - k as f64).abs() < 1e-12);
        }
        assert!(n.is_hermitian(1e-15));
    }

    #[test]
    fn annihilation_rejects_small_dim() {
        assert!(matches!(annihilation(1), Err(Error::InvalidDimension(1))));
    }

    #[test]
    fn embed_matches_kron() {
        let space = HilbertSpace::new([("a", 2), ("b", 2)]).unwrap();
        let z0 = embed(&sigma_z(), &space, 0).unwrap();
        let kron = sigma_z().kron(&Operator::identity(&HilbertSpace::single(2).unwrap())).unwrap();
        assert_close(z0.matrix(), kron.matrix(), 0.0);
    }

    #[test]
    fn embed_identity_is_identity() {
        let space = HilbertSpace::new([("a", 2), ("b", 3), ("c", 2)]).unwrap();
        for idx in 0..3 {
            let d = space.dims()[idx];
            let id = Operator::identity(&HilbertSpace::single(d).unwrap());
            let e = embed(&id, &space, idx).unwrap();
            assert_close(e.matrix(), &CMatrix::identity(12, 12), 0.0);
        }
    }

    #[test]
    fn embed_dimension_mismatch() {
        let space = HilbertSpace::new([("a", 2), ("b", 3)]).unwrap();
        assert!(matches!(
            embed(&sigma_x(), &space, 1),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn embedded_spectrum_has_complementary_multiplicity() {
        let space = HilbertSpace::new([("a", 3), ("b", 2)]).unwrap();
        let n = number(3).unwrap();
        let e = embed(&n, &space, 0).unwrap();
        let vals = e.eigenvalues_hermitian();
        let expect = [0.0, 0.0, 1.0, 1.0, 2.0, 2.0];
        for (v, x) in vals.iter().zip(expect) {
            assert!((v - x).abs() < 1e-12);
        }
    }
}
