use crate::quantum::CMatrix;

/// Optimizer objective for the Bell search: overlap with `Psi+` after taking
/// elementwise magnitudes and capping every entry at 0.5.
pub fn clipped_bell_objective(rho: &CMatrix) -> f64 {
    let a = |i: usize, j: usize| rho[(i, j)].norm().min(0.5);
    0.5 * (a(1, 1) + a(2, 2) + a(1, 2) + a(2, 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn bell_like(p_eg: f64, coherence: Complex64) -> CMatrix {
        let mut m = CMatrix::zeros(4, 4);
        m[(2, 2)] = Complex64::new(p_eg, 0.0);
        m[(1, 1)] = Complex64::new(1.0 - p_eg, 0.0);
        m[(1, 2)] = coherence;
        m[(2, 1)] = coherence.conj();
        m
    }

    #[test]
    fn perfect_bell_scores_one() {
        assert!((clipped_bell_objective(&bell_like(0.5, Complex64::new(0.5, 0.0))) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_is_capped() {
        let v = clipped_bell_objective(&bell_like(0.6, Complex64::new(0.45, 0.0)));
        assert!((v - 0.5 * (0.5 + 0.4 + 0.9)).abs() < 1e-15);
    }

    #[test]
    fn magnitude_hides_phase() {
        let a = clipped_bell_objective(&bell_like(0.5, Complex64::new(0.0, 0.4)));
        let b = clipped_bell_objective(&bell_like(0.5, Complex64::new(0.4, 0.0)));
        assert_eq!(a, b);
    }
}
