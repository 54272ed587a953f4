use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use qlink::quantum::{embed, partial_trace, CMatrix, DensityMatrix, HilbertSpace, Operator};

fn complex_matrix(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
        .prop_map(move |v| DMatrix::from_iterator(n, n, v.into_iter().map(|(a, b)| Complex64::new(a, b))))
}

fn hermitian(n: usize) -> impl Strategy<Value = CMatrix> {
    complex_matrix(n).prop_map(|m| (&m + m.adjoint()).scale(0.5))
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

fn dims() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(2usize..4, 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn embedded_spectrum_repeats_local_spectrum(dims in dims(), pick in 0usize..3, seed in hermitian(3)) {
        let index = pick % dims.len();
        let d = dims[index];
        let local = Operator::from_matrix(seed.view((0, 0), (d, d)).into_owned()).unwrap();
        let space = HilbertSpace::new(dims.iter().enumerate().map(|(i, &n)| (format!("s{i}"), n))).unwrap();
        let big = embed(&local, &space, index).unwrap();
        prop_assert!(big.is_hermitian(1e-9));
        let rest = space.total_dim() / d;
        let expected = sorted(local.eigenvalues_hermitian().into_iter().flat_map(|e| std::iter::repeat_n(e, rest)).collect());
        let got = sorted(big.eigenvalues_hermitian());
        for (a, b) in expected.iter().zip(&got) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn sums_and_products_of_hermitian_parts_stay_hermitian(a in hermitian(4), b in hermitian(4)) {
        let a = Operator::from_matrix(a).unwrap();
        let b = Operator::from_matrix(b).unwrap();
        let sum = a.try_add(&b).unwrap();
        prop_assert!(sum.is_hermitian(1e-9));
        let anti = a.try_mul(&b).unwrap().try_add(&b.try_mul(&a).unwrap()).unwrap();
        prop_assert!(anti.is_hermitian(1e-9));
        prop_assert!(a.kron(&b).unwrap().is_hermitian(1e-9));
    }

    #[test]
    fn partial_trace_keeps_unit_trace_and_positivity(dims in dims(), g in complex_matrix(27), keep_mask in 1u8..8) {
        let space = HilbertSpace::new(dims.iter().enumerate().map(|(i, &n)| (format!("s{i}"), n))).unwrap();
        let n = space.total_dim();
        let a = g.view((0, 0), (n, n)).into_owned();
        let m = &a * a.adjoint();
        let tr = m.trace();
        let rho = DensityMatrix::new(space.clone(), m.map(|x| x / tr)).unwrap();
        let keep: Vec<usize> = (0..dims.len()).filter(|i| keep_mask & (1 << i) != 0).collect();
        prop_assume!(!keep.is_empty());
        let r = partial_trace(&rho, &keep).unwrap();
        prop_assert!((r.trace() - 1.0).abs() < 1e-9);
        prop_assert!(r.min_eigenvalue() >= -1e-9);
    }
}
