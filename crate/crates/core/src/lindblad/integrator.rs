use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sparse::Triplets;
use super::{Coefficient, CollapseChannel, TimeDependentHamiltonian};
use crate::error::{Error, Result};
use crate::quantum::{CMatrix, DensityMatrix, Operator};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on the step size, seconds.
    pub max_step: Option<f64>,
    pub max_steps: usize,
    /// Keep the full state at every output time. When false only the
    /// observables and the final state are retained.
    pub store_states: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            rtol: 1e-8,
            atol: 1e-10,
            max_step: None,
            max_steps: 10_000_000,
            store_states: true,
        }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::param("rtol", "tolerances must be positive"));
        }
        if let Some(h) = self.max_step {
            if !(h > 0.0) {
                return Err(Error::param("max_step", "must be positive"));
            }
        }
        Ok(())
    }
}

/// Named expectation value recorded at each output time.
#[derive(Clone, Debug)]
pub struct Observable {
    pub name: String,
    pub operator: Operator,
}

impl Observable {
    pub fn new(name: impl Into<String>, operator: Operator) -> Self {
        Observable {
            name: name.into(),
            operator,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Empty unless [`SolverOptions::store_states`] is set.
    pub states: Vec<DensityMatrix>,
    pub observables: BTreeMap<String, Vec<f64>>,
    pub final_state: DensityMatrix,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn observable(&self, name: &str) -> Option<&[f64]> {
        self.observables.get(name).map(Vec::as_slice)
    }
}

/// Integrate with default options, keeping every state.
pub fn evolve(
    h: &TimeDependentHamiltonian,
    channels: &[CollapseChannel],
    rho0: &DensityMatrix,
    times: &[f64],
) -> Result<Trajectory> {
    evolve_with(h, channels, rho0, times, &SolverOptions::default(), &[])
}

pub fn evolve_with(
    h: &TimeDependentHamiltonian,
    channels: &[CollapseChannel],
    rho0: &DensityMatrix,
    times: &[f64],
    opts: &SolverOptions,
    observables: &[Observable],
) -> Result<Trajectory> {
    opts.validate()?;
    let space = h.space();
    if rho0.space() != space
        || channels.iter().any(|c| c.operator().space() != space)
        || observables.iter().any(|o| o.operator.space() != space)
    {
        return Err(Error::SpaceMismatch);
    }
    if times.is_empty() {
        return Err(Error::param("times", "need at least one output time"));
    }
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("times", "must be finite and strictly increasing"));
    }

    let n = space.total_dim();
    let rhs = Rhs::compile(h, channels);
    let probes: Vec<(String, Triplets)> = observables
        .iter()
        .map(|o| (o.name.clone(), Triplets::from_dense(o.operator.matrix())))
        .collect();

    let mut y: Vec<Complex64> = row_major(rho0.matrix());
    let mut record = Recorder::new(space.clone(), n, opts.store_states, &probes, times.len());
    record.push(&y)?;

    let t_end = *times.last().expect("non-empty");
    // Breakpoints that differ from an existing node only by rounding would
    // leave a sliver segment the stepper cannot resolve; drop them.
    let tol = 1e-12 * (t_end - times[0]).abs().max(f64::MIN_POSITIVE);
    let mut nodes: Vec<f64> = times.to_vec();
    let mut extra: Vec<f64> = h.breakpoints().iter().copied().filter(|&b| b > times[0] && b < t_end).collect();
    extra.sort_by(f64::total_cmp);
    for b in extra {
        let near = |x: &f64| (x - b).abs() <= tol;
        if !nodes.iter().any(near) {
            nodes.push(b);
        }
    }
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();

    let mut stepper = Dopri5::new(n * n, opts);
    let mut next_output = 1;
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        stepper.integrate(&rhs, &mut y, a, b)?;
        if next_output < times.len() && b == times[next_output] {
            record.push(&y)?;
            next_output += 1;
        }
    }
    let (accepted, rejected) = (stepper.accepted, stepper.rejected);
    Ok(record.finish(times.to_vec(), &y, accepted, rejected))
}

fn row_major(m: &CMatrix) -> Vec<Complex64> {
    let n = m.nrows();
    let mut v = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            v.push(m[(r, c)]);
        }
    }
    v
}

fn to_matrix(y: &[Complex64], n: usize) -> CMatrix {
    CMatrix::from_row_slice(n, n, y)
}

struct Recorder<'a> {
    space: crate::quantum::HilbertSpace,
    n: usize,
    store: bool,
    probes: &'a [(String, Triplets)],
    states: Vec<DensityMatrix>,
    values: Vec<Vec<f64>>,
}

impl<'a> Recorder<'a> {
    fn new(
        space: crate::quantum::HilbertSpace,
        n: usize,
        store: bool,
        probes: &'a [(String, Triplets)],
        capacity: usize,
    ) -> Self {
        Recorder {
            space,
            n,
            store,
            probes,
            states: Vec::with_capacity(if store { capacity } else { 0 }),
            values: vec![Vec::with_capacity(capacity); probes.len()],
        }
    }

    fn push(&mut self, y: &[Complex64]) -> Result<()> {
        let n = self.n;
        for ((_, op), out) in self.probes.iter().zip(&mut self.values) {
            let v: f64 = op.entries.iter().map(|&(r, c, v)| (v * y[c * n + r]).re).sum();
            out.push(v);
        }
        if self.store {
            self.states
                .push(DensityMatrix::from_matrix_unchecked(self.space.clone(), to_matrix(y, n))?);
        }
        Ok(())
    }

    fn finish(self, times: Vec<f64>, y: &[Complex64], accepted: usize, rejected: usize) -> Trajectory {
        let final_state = DensityMatrix::from_matrix_unchecked(self.space.clone(), to_matrix(y, self.n))
            .expect("shape fixed");
        Trajectory {
            times,
            states: self.states,
            observables: self
                .probes
                .iter()
                .map(|(name, _)| name.clone())
                .zip(self.values)
                .collect(),
            final_state,
            accepted_steps: accepted,
            rejected_steps: rejected,
        }
    }
}

/// Compiled right-hand side. With `H_eff = H - (i/2) sum_k r_k L_k^+ L_k`
/// and `A = H_eff rho`, `drho/dt = -i A + (-i A)^+ + sum_k r_k L_k rho L_k^+`.
struct Rhs {
    n: usize,
    h0: Triplets,
    terms: Vec<(Coefficient, Triplets)>,
    jumps: Vec<(f64, Triplets)>,
}

impl Rhs {
    fn compile(h: &TimeDependentHamiltonian, channels: &[CollapseChannel]) -> Self {
        let n = h.space().total_dim();
        let mut h0 = h.static_part().matrix().clone();
        let mut jumps = Vec::new();
        for ch in channels {
            if ch.rate() == 0.0 {
                continue;
            }
            let l = ch.operator().matrix();
            h0 -= (l.adjoint() * l) * Complex64::new(0.0, 0.5 * ch.rate());
            jumps.push((ch.rate(), Triplets::from_dense(l)));
        }
        Rhs {
            n,
            h0: Triplets::from_dense(&h0),
            terms: h
                .terms()
                .iter()
                .map(|(f, op)| (f.clone(), Triplets::from_dense(op.matrix())))
                .collect(),
            jumps,
        }
    }

    fn eval(&self, t: f64, y: &[Complex64], out: &mut [Complex64], scratch: &mut [Complex64]) {
        let n = self.n;
        scratch.fill(Complex64::new(0.0, 0.0));
        self.h0.mul_acc(Complex64::new(1.0, 0.0), y, scratch, n);
        for (f, op) in &self.terms {
            let c = f(t);
            if c != 0.0 {
                op.mul_acc(Complex64::new(c, 0.0), y, scratch, n);
            }
        }
        for i in 0..n {
            for j in 0..n {
                let a = scratch[i * n + j];
                let b = scratch[j * n + i];
                // -i a + conj(-i b) = -i a + i conj(b)
                out[i * n + j] = Complex64::new(a.im + b.im, b.re - a.re);
            }
        }
        for (rate, l) in &self.jumps {
            l.sandwich_acc(*rate, y, out, n);
        }
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [0.2];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Dormand-Prince 5(4) with standard step-size control.
struct Dopri5 {
    rtol: f64,
    atol: f64,
    max_step: f64,
    max_steps: usize,
    h: Option<f64>,
    k: [Vec<Complex64>; 7],
    tmp: Vec<Complex64>,
    y_new: Vec<Complex64>,
    scratch: Vec<Complex64>,
    accepted: usize,
    rejected: usize,
}

impl Dopri5 {
    fn new(len: usize, opts: &SolverOptions) -> Self {
        let z = || vec![Complex64::new(0.0, 0.0); len];
        Dopri5 {
            rtol: opts.rtol,
            atol: opts.atol,
            max_step: opts.max_step.unwrap_or(f64::INFINITY),
            max_steps: opts.max_steps,
            h: None,
            k: [z(), z(), z(), z(), z(), z(), z()],
            tmp: z(),
            y_new: z(),
            scratch: z(),
            accepted: 0,
            rejected: 0,
        }
    }

    fn norm(&self, v: &[Complex64], y: &[Complex64]) -> f64 {
        let s: f64 = v
            .iter()
            .zip(y)
            .map(|(e, y)| {
                let sc = self.atol + self.rtol * y.norm();
                (e.norm() / sc).powi(2)
            })
            .sum();
        (s / v.len() as f64).sqrt()
    }

    fn initial_step(&mut self, rhs: &Rhs, y: &[Complex64], a: f64, span: f64) -> f64 {
        let d0 = self.norm(y, y);
        let d1 = self.norm(&self.k[0], y);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6 * span
        } else {
            0.01 * d0 / d1
        };
        let h0 = h0.min(span).min(self.max_step);
        for ((t, yi), ki) in self.tmp.iter_mut().zip(y).zip(&self.k[0]) {
            *t = yi + ki * h0;
        }
        let (k1, rest) = self.k.split_at_mut(1);
        rhs.eval(a + h0, &self.tmp, &mut rest[0], &mut self.scratch);
        let diff: Vec<Complex64> = rest[0].iter().zip(&k1[0]).map(|(x, y)| (x - y) / h0).collect();
        let d2 = self.norm(&diff, y);
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6 * span)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(self.max_step)
    }

    fn integrate(&mut self, rhs: &Rhs, y: &mut Vec<Complex64>, a: f64, b: f64) -> Result<()> {
        let span = b - a;
        // Coefficients are sampled strictly inside the segment so that
        // envelope edges at `b` are never seen from the left.
        let guard = span * 1e-9;
        let clamp = |t: f64| t.min(b - guard).max(a);
        rhs.eval(clamp(a), y, &mut self.k[0], &mut self.scratch);
        let mut h = match self.h {
            Some(h) => h,
            None => self.initial_step(rhs, y, a, span),
        };
        let mut t = a;
        while t < b {
            if self.accepted + self.rejected >= self.max_steps {
                return Err(Error::Integration {
                    time: t,
                    step: h,
                    reason: format!("exceeded {} steps", self.max_steps),
                });
            }
            h = h.min(self.max_step);
            let last = t + h >= b - 1e-12 * span;
            let step = if last { b - t } else { h };
            if step <= f64::EPSILON * t.abs().max(span) {
                return Err(Error::Integration {
                    time: t,
                    step,
                    reason: "step size underflow".into(),
                });
            }
            self.stages(rhs, y, t, step, &clamp);
            let err = self.error_norm(y, step);
            if !err.is_finite() {
                self.rejected += 1;
                h = step * 0.2;
                continue;
            }
            let factor = if err == 0.0 {
                10.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 10.0)
            };
            if err <= 1.0 {
                self.accepted += 1;
                std::mem::swap(y, &mut self.y_new);
                self.k.swap(0, 6);
                t = if last { b } else { t + step };
                // Do not let a short final step shrink the next proposal.
                h = if last { h.max(step * factor) } else { step * factor };
            } else {
                self.rejected += 1;
                h = step * factor.min(1.0);
            }
        }
        self.h = Some(h);
        Ok(())
    }

    fn stages(&mut self, rhs: &Rhs, y: &[Complex64], t: f64, h: f64, clamp: &dyn Fn(f64) -> f64) {
        let rows: [&[f64]; 5] = [&A2, &A3, &A4, &A5, &A6];
        for (s, row) in rows.iter().enumerate() {
            let stage = s + 1;
            for (i, out) in self.tmp.iter_mut().enumerate() {
                let mut acc = y[i];
                for (j, &a) in row.iter().enumerate() {
                    if a != 0.0 {
                        acc += self.k[j][i] * (a * h);
                    }
                }
                *out = acc;
            }
            let (done, rest) = self.k.split_at_mut(stage);
            let _ = done;
            rhs.eval(clamp(t + C[stage] * h), &self.tmp, &mut rest[0], &mut self.scratch);
        }
        for (i, out) in self.y_new.iter_mut().enumerate() {
            let mut acc = y[i];
            for (j, &bj) in B.iter().enumerate() {
                if bj != 0.0 {
                    acc += self.k[j][i] * (bj * h);
                }
            }
            *out = acc;
        }
        let (_, rest) = self.k.split_at_mut(6);
        rhs.eval(clamp(t + h), &self.y_new, &mut rest[0], &mut self.scratch);
    }

    fn error_norm(&self, y: &[Complex64], h: f64) -> f64 {
        let mut s = 0.0;
        for i in 0..y.len() {
            let mut e = Complex64::new(0.0, 0.0);
            for (j, &ej) in E.iter().enumerate() {
                if ej != 0.0 {
                    e += self.k[j][i] * ej;
                }
            }
            let sc = self.atol + self.rtol * y[i].norm().max(self.y_new[i].norm());
            s += ((e * h).norm() / sc).powi(2);
        }
        (s / y.len() as f64).sqrt()
    }
}
