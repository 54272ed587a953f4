use std::fmt;

use crate::error::{Error, Result};

use super::MAX_DIMENSION;

/// Ordered tensor-product structure of a truncated Hilbert space.
///
/// Subsystem `0` is the most significant factor of the flattened index, so a
/// basis state `|n_0, n_1, ..., n_k>` sits at `sum_i n_i * stride_i` with the
/// last subsystem varying fastest.
#[derive(Clone, PartialEq, Eq)]
pub struct HilbertSpace {
    dims: Vec<usize>,
    labels: Vec<String>,
}

impl HilbertSpace {
    pub fn new<S: Into<String>>(subsystems: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let (labels, dims): (Vec<String>, Vec<usize>) = subsystems
            .into_iter()
            .map(|(label, dim)| (label.into(), dim))
            .unzip();
        if dims.is_empty() {
            return Err(Error::EmptySelection);
        }
        if let Some(&bad) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDimension(bad));
        }
        let total = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .unwrap_or(usize::MAX);
        if total > MAX_DIMENSION {
            return Err(Error::DimensionTooLarge(total));
        }
        Ok(HilbertSpace { dims, labels })
    }

    /// A single unnamed subsystem of the given dimension.
    pub fn single(dim: usize) -> Result<Self> {
        Self::new([("0", dim)])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.dims.len() {
            return Err(Error::InvalidSubsystem {
                index,
                len: self.dims.len(),
            });
        }
        Ok(())
    }

    /// Flattened index of a product basis state.
    pub fn basis_index(&self, levels: &[usize]) -> Result<usize> {
        if levels.len() != self.dims.len() {
            return Err(Error::DimensionMismatch {
                expected: self.dims.len(),
                found: levels.len(),
            });
        }
        let mut idx = 0;
        for (&n, &d) in levels.iter().zip(&self.dims) {
            if n >= d {
                return Err(Error::DimensionMismatch { expected: d, found: n });
            }
            idx = idx * d + n;
        }
        Ok(idx)
    }

    /// Inverse of [`basis_index`](Self::basis_index).
    pub fn levels_of(&self, mut index: usize) -> Vec<usize> {
        let mut levels = vec![0; self.dims.len()];
        for (slot, &d) in levels.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        levels
    }

    /// The space spanned by the listed subsystems, in the given order.
    pub fn subspace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::EmptySelection);
        }
        for &k in keep {
            self.check_index(k)?;
        }
        Self::new(keep.iter().map(|&k| (self.labels[k].clone(), self.dims[k])))
    }
}

impl fmt::Debug for HilbertSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .labels
            .iter()
            .zip(&self.dims)
            .map(|(l, d)| format!("{l}:{d}"))
            .collect();
        write!(f, "HilbertSpace[{}]", parts.join(" ⊗ "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_index_round_trip() {
        let space = HilbertSpace::new([("a", 2), ("b", 3), ("c", 2)]).unwrap();
        assert_eq!(space.total_dim(), 12);
        for i in 0..12 {
            let levels = space.levels_of(i);
            assert_eq!(space.basis_index(&levels).unwrap(), i);
        }
        assert_eq!(space.basis_index(&[1, 0, 0]).unwrap(), 6);
    }

    #[test]
    fn rejects_bad_dims() {
        assert!(matches!(
            HilbertSpace::new([("a", 1)]),
            Err(Error::InvalidDimension(1))
        ));
        assert!(matches!(
            HilbertSpace::new((0..13).map(|i| (format!("q{i}"), 2))),
            Err(Error::DimensionTooLarge(8192))
        ));
    }
}
