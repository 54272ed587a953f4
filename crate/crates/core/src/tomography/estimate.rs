use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;

use super::{two_qubit_space, TomographySetting};
use crate::error::{Error, Result};
use crate::optim::{minimize, LbfgsOptions};
use crate::quantum::{CMatrix, DensityMatrix};

/// Labels of the coefficients, index `4 k + l` for `sigma_k (x) sigma_l`.
pub const PAULI_LABELS: [&str; 16] = [
    "II", "IX", "IY", "IZ", "XI", "XX", "XY", "XZ", "YI", "YX", "YY", "YZ", "ZI", "ZX", "ZY", "ZZ",
];

fn pauli(k: usize) -> Matrix2<Complex64> {
    let o = Complex64::new(0.0, 0.0);
    let r = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match k {
        0 => Matrix2::new(r, o, o, r),
        1 => Matrix2::new(o, r, r, o),
        2 => Matrix2::new(o, -i, i, o),
        _ => Matrix2::new(r, o, o, -r),
    }
}

fn pauli_pair(index: usize) -> CMatrix {
    let a = pauli(index / 4);
    let b = pauli(index % 4);
    CMatrix::from_fn(4, 4, |i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            s += a[(i, j)] * b[(j, i)];
        }
    }
    s
}

/// `Tr[(sigma_k (x) sigma_l) rho]` for all 16 pairs.
pub fn pauli_expectations(rho: &DensityMatrix) -> [f64; 16] {
    std::array::from_fn(|k| trace_product(&pauli_pair(k), rho.matrix()).re)
}

/// `sum_kl c_kl sigma_k (x) sigma_l / 4`. Hermitian with unit trace when
/// `c[0] = 1`, not necessarily positive.
pub fn linear_estimate(c: &[f64; 16]) -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    for (k, &v) in c.iter().enumerate() {
        m += pauli_pair(k) * Complex64::new(v / 4.0, 0.0);
    }
    m
}

/// `U^dag |m><m| U` for each outcome of a setting.
fn effects(s: &TomographySetting) -> [CMatrix; 4] {
    let u = s.unitary();
    std::array::from_fn(|m| {
        let row = u.row(m);
        CMatrix::from_fn(4, 4, |i, j| row[i].conj() * row[j])
    })
}

fn measured(s: &TomographySetting) -> Result<[f64; 4]> {
    s.populations
        .ok_or_else(|| Error::param("settings", "every setting needs measured populations"))
}

/// Least-squares Pauli coefficients from corrected populations, with the
/// identity coefficient pinned to one.
pub fn fit_pauli_expectations(settings: &[TomographySetting]) -> Result<[f64; 16]> {
    let rows = 4 * settings.len();
    let mut a = DMatrix::<f64>::zeros(rows, 15);
    let mut b = DVector::<f64>::zeros(rows);
    let paulis: Vec<CMatrix> = (0..16).map(pauli_pair).collect();
    for (n, s) in settings.iter().enumerate() {
        let p = measured(s)?;
        for (m, e) in effects(s).iter().enumerate() {
            let r = 4 * n + m;
            b[r] = p[m] - trace_product(e, &paulis[0]).re / 4.0;
            for k in 1..16 {
                a[(r, k - 1)] = trace_product(e, &paulis[k]).re / 4.0;
            }
        }
    }
    let svd = a.svd(true, true);
    if svd.singular_values.min() < 1e-10 {
        return Err(Error::Singular);
    }
    let x = svd.solve(&b, 1e-12).map_err(|e| Error::param("settings", e))?;
    let mut c = [0.0; 16];
    c[0] = 1.0;
    c[1..].copy_from_slice(x.as_slice());
    Ok(c)
}

/// Squared deviation between predicted and measured populations.
pub fn mle_objective(settings: &[TomographySetting], rho: &CMatrix) -> Result<f64> {
    let mut f = 0.0;
    for s in settings {
        let p = measured(s)?;
        let q = s.probabilities(rho);
        f += p.iter().zip(&q).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
    }
    Ok(f)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MleOptions {
    pub max_iterations: usize,
    pub f_tol: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        MleOptions {
            max_iterations: 10_000,
            f_tol: 1e-10,
        }
    }
}

/// Upper-triangular `T` from 16 reals: four diagonal entries then real and
/// imaginary parts of the six off-diagonal ones.
fn unpack(x: &[f64]) -> CMatrix {
    let mut t = CMatrix::zeros(4, 4);
    let mut k = 4;
    for i in 0..4 {
        t[(i, i)] = Complex64::new(x[i], 0.0);
        for j in i + 1..4 {
            t[(i, j)] = Complex64::new(x[k], x[k + 1]);
            k += 2;
        }
    }
    t
}

fn pack(t: &CMatrix, out: &mut [f64]) {
    let mut k = 4;
    for i in 0..4 {
        out[i] = t[(i, i)].re;
        for j in i + 1..4 {
            out[k] = t[(i, j)].re;
            out[k + 1] = t[(i, j)].im;
            k += 2;
        }
    }
}

fn rho_of(t: &CMatrix) -> (CMatrix, f64) {
    let m = t.adjoint() * t;
    let tau = m.trace().re;
    (m / Complex64::new(tau, 0.0), tau)
}

/// Zero the negative eigenvalues and renormalize.
fn clip_to_physical(m: &CMatrix) -> CMatrix {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let vals: Vec<f64> = eig.eigenvalues.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = vals.iter().sum();
    let mut out = CMatrix::zeros(4, 4);
    for (k, &v) in vals.iter().enumerate() {
        let col = eig.eigenvectors.column(k);
        out += &col * col.adjoint() * Complex64::new(v, 0.0);
    }
    if total > 0.0 {
        out / Complex64::new(total, 0.0)
    } else {
        CMatrix::identity(4, 4) / Complex64::new(4.0, 0.0)
    }
}

/// Starting point: the clipped linear estimate factored as `rho = T^dag T`.
fn initial_t(settings: &[TomographySetting]) -> Result<CMatrix> {
    let start = clip_to_physical(&linear_estimate(&fit_pauli_expectations(settings)?));
    let mut jitter = 1e-6;
    loop {
        let m = &start + CMatrix::identity(4, 4) * Complex64::new(jitter, 0.0);
        if let Some(ch) = m.cholesky() {
            return Ok(ch.l().adjoint());
        }
        jitter *= 10.0;
        if jitter > 1.0 {
            return Err(Error::Singular);
        }
    }
}

/// Physical `rho = T^dag T / Tr(T^dag T)` minimizing [`mle_objective`].
pub fn mle_reconstruct(settings: &[TomographySetting], opts: &MleOptions) -> Result<DensityMatrix> {
    let data: Vec<([CMatrix; 4], [f64; 4])> = settings
        .iter()
        .map(|s| Ok((effects(s), measured(s)?)))
        .collect::<Result<_>>()?;
    let t0 = initial_t(settings)?;
    let mut x0 = vec![0.0; 16];
    pack(&t0, &mut x0);

    let objective = |x: &[f64], grad: &mut [f64]| -> f64 {
        let t = unpack(x);
        let (rho, tau) = rho_of(&t);
        let mut f = 0.0;
        let mut g = CMatrix::zeros(4, 4);
        for (es, p) in &data {
            for (e, &pm) in es.iter().zip(p) {
                let r = trace_product(e, &rho).re - pm;
                f += r * r;
                g += e * Complex64::new(2.0 * r, 0.0);
            }
        }
        let shift = trace_product(&g, &rho).re;
        let gp = (g - CMatrix::identity(4, 4) * Complex64::new(shift, 0.0)) / Complex64::new(tau, 0.0);
        let w = &t * gp;
        let mut k = 4;
        for i in 0..4 {
            grad[i] = 2.0 * w[(i, i)].re;
            for j in i + 1..4 {
                grad[k] = 2.0 * w[(i, j)].re;
                grad[k + 1] = 2.0 * w[(i, j)].im;
                k += 2;
            }
        }
        f
    };

    let lbfgs = LbfgsOptions {
        max_iterations: opts.max_iterations,
        f_tol: opts.f_tol,
        g_tol: 1e-14,
        ..Default::default()
    };
    let res = minimize(objective, &x0, None, &lbfgs);
    let (rho, _) = rho_of(&unpack(&res.x));
    let rho = clip_to_physical(&rho);
    let out = DensityMatrix::new(two_qubit_space(), rho)?;
    if !res.converged {
        return Err(Error::NotConverged {
            iterations: res.iterations,
            objective: res.f,
            best: Box::new(out),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tomography::tomography_settings;

    fn psi_plus() -> CMatrix {
        let h = Complex64::new(0.5, 0.0);
        let mut m = CMatrix::zeros(4, 4);
        for i in [1, 2] {
            for j in [1, 2] {
                m[(i, j)] = h;
            }
        }
        m
    }

    fn exact_settings(rho: &CMatrix) -> Vec<TomographySetting> {
        tomography_settings()
            .into_iter()
            .map(|mut s| {
                s.populations = Some(s.probabilities(rho));
                s
            })
            .collect()
    }

    #[test]
    fn bell_signature() {
        let mut c = [0.0; 16];
        c[0] = 1.0;
        c[5] = 1.0;
        c[10] = 1.0;
        c[15] = -1.0;
        assert!((linear_estimate(&c) - psi_plus()).norm() < 1e-12);
    }

    #[test]
    fn identity_only_is_maximally_mixed() {
        let mut c = [0.0; 16];
        c[0] = 1.0;
        let m = linear_estimate(&c);
        assert!((m - CMatrix::identity(4, 4) * Complex64::new(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn fit_recovers_exact_coefficients() {
        let rho = DensityMatrix::new(two_qubit_space(), psi_plus()).unwrap();
        let c = fit_pauli_expectations(&exact_settings(rho.matrix())).unwrap();
        let want = pauli_expectations(&rho);
        for k in 0..16 {
            assert!((c[k] - want[k]).abs() < 1e-10, "{}", PAULI_LABELS[k]);
        }
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let target = psi_plus() * Complex64::new(0.9, 0.0) + CMatrix::identity(4, 4) * Complex64::new(0.025, 0.0);
        let settings = exact_settings(&target);
        let data: Vec<_> = settings.iter().map(|s| (effects(s), s.populations.unwrap())).collect();
        let f = |x: &[f64]| {
            let (rho, _) = rho_of(&unpack(x));
            data.iter()
                .flat_map(|(es, p)| es.iter().zip(p).map(|(e, pm)| (trace_product(e, &rho).re - pm).powi(2)).collect::<Vec<_>>())
                .sum::<f64>()
        };
        let x: Vec<f64> = (0..16).map(|k| 0.3 + 0.1 * ((k * 7) % 5) as f64 - 0.05 * k as f64).collect();
        // reuse the analytic gradient through a tiny reconstruct-free wrapper
        let t = unpack(&x);
        let (rho, tau) = rho_of(&t);
        let mut g = CMatrix::zeros(4, 4);
        for (es, p) in &data {
            for (e, &pm) in es.iter().zip(p) {
                g += e * Complex64::new(2.0 * (trace_product(e, &rho).re - pm), 0.0);
            }
        }
        let shift = trace_product(&g, &rho).re;
        let w = &t * ((g - CMatrix::identity(4, 4) * Complex64::new(shift, 0.0)) / Complex64::new(tau, 0.0));
        let mut grad = vec![0.0; 16];
        pack(&w.map(|z| z * 2.0), &mut grad);
        for k in 0..16 {
            let h = 1e-6;
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += h;
            xm[k] -= h;
            let fd = (f(&xp) - f(&xm)) / (2.0 * h);
            assert!((fd - grad[k]).abs() < 1e-6, "param {k}: {fd} vs {}", grad[k]);
        }
    }

    #[test]
    fn noiseless_bell_reconstruction() {
        let settings = exact_settings(&psi_plus());
        let rho = mle_reconstruct(&settings, &MleOptions::default()).unwrap();
        let f = trace_product(rho.matrix(), &psi_plus()).re;
        assert!(f >= 1.0 - 1e-6, "fidelity {f}");
    }

    #[test]
    fn mle_never_worse_than_start() {
        let mut settings = exact_settings(&psi_plus());
        for (k, s) in settings.iter_mut().enumerate() {
            let p = s.populations.as_mut().unwrap();
            p[k % 4] += 0.03;
            p[(k + 1) % 4] -= 0.03;
        }
        let start = clip_to_physical(&linear_estimate(&fit_pauli_expectations(&settings).unwrap()));
        let rho = mle_reconstruct(&settings, &MleOptions::default()).unwrap();
        assert!(mle_objective(&settings, rho.matrix()).unwrap() <= mle_objective(&settings, &start).unwrap() + 1e-12);
        assert!(rho.min_eigenvalue() > -1e-9);
    }
}
