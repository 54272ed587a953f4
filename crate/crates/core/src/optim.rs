//! Limited-memory BFGS with optional box constraints (projected search).

#[derive(Clone, Debug, PartialEq)]
pub struct LbfgsOptions {
    pub memory: usize,
    pub max_iterations: usize,
    /// Stop once successive objective values differ by less than this.
    pub f_tol: f64,
    /// Stop once the projected gradient's largest component is below this.
    pub g_tol: f64,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        LbfgsOptions {
            memory: 8,
            max_iterations: 1000,
            f_tol: 1e-12,
            g_tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LbfgsResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn project(x: &mut [f64], bounds: Option<&[(f64, f64)]>) {
    if let Some(b) = bounds {
        for (v, &(lo, hi)) in x.iter_mut().zip(b) {
            *v = v.clamp(lo, hi);
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Components of `g` that can still move `x` without leaving the box.
fn free_gradient(x: &[f64], g: &[f64], bounds: Option<&[(f64, f64)]>) -> Vec<f64> {
    match bounds {
        None => g.to_vec(),
        Some(b) => x
            .iter()
            .zip(g)
            .zip(b)
            .map(|((&x, &g), &(lo, hi))| {
                let at_lo = x <= lo && g > 0.0;
                let at_hi = x >= hi && g < 0.0;
                if at_lo || at_hi {
                    0.0
                } else {
                    g
                }
            })
            .collect(),
    }
}

/// Minimize `f`, which returns the objective and writes the gradient into
/// its second argument.
pub fn minimize(
    mut f: impl FnMut(&[f64], &mut [f64]) -> f64,
    x0: &[f64],
    bounds: Option<&[(f64, f64)]>,
    opts: &LbfgsOptions,
) -> LbfgsResult {
    let n = x0.len();
    let mut x = x0.to_vec();
    project(&mut x, bounds);
    let mut g = vec![0.0; n];
    let mut fx = f(&x, &mut g);
    let mut s_hist: Vec<Vec<f64>> = Vec::new();
    let mut y_hist: Vec<Vec<f64>> = Vec::new();
    let mut g_new = vec![0.0; n];

    for it in 0..opts.max_iterations {
        let pg = free_gradient(&x, &g, bounds);
        if pg.iter().fold(0.0f64, |m, v| m.max(v.abs())) < opts.g_tol {
            return LbfgsResult { x, f: fx, iterations: it, converged: true };
        }
        // Two-loop recursion on the free components.
        let mut q = pg.clone();
        let mut alpha = vec![0.0; s_hist.len()];
        for k in (0..s_hist.len()).rev() {
            let rho = 1.0 / dot(&y_hist[k], &s_hist[k]);
            alpha[k] = rho * dot(&s_hist[k], &q);
            for (qi, yi) in q.iter_mut().zip(&y_hist[k]) {
                *qi -= alpha[k] * yi;
            }
        }
        if let (Some(s), Some(y)) = (s_hist.last(), y_hist.last()) {
            let gamma = dot(s, y) / dot(y, y);
            q.iter_mut().for_each(|v| *v *= gamma);
        } else {
            let norm = dot(&pg, &pg).sqrt().max(1e-300);
            q.iter_mut().for_each(|v| *v /= norm);
        }
        for k in 0..s_hist.len() {
            let rho = 1.0 / dot(&y_hist[k], &s_hist[k]);
            let beta = rho * dot(&y_hist[k], &q);
            for (qi, si) in q.iter_mut().zip(&s_hist[k]) {
                *qi += si * (alpha[k] - beta);
            }
        }
        let mut d: Vec<f64> = q.iter().zip(&pg).map(|(v, p)| if *p == 0.0 { 0.0 } else { -v }).collect();
        if !(dot(&d, &pg) < 0.0) {
            s_hist.clear();
            y_hist.clear();
            let norm = dot(&pg, &pg).sqrt().max(1e-300);
            d = pg.iter().map(|v| -v / norm).collect();
        }

        // Backtracking Armijo search along the projected path.
        let mut step = 1.0;
        let mut x_new = vec![0.0; n];
        let mut accepted = false;
        let mut f_new = fx;
        for _ in 0..60 {
            for i in 0..n {
                x_new[i] = x[i] + step * d[i];
            }
            project(&mut x_new, bounds);
            f_new = f(&x_new, &mut g_new);
            let moved: f64 = x_new.iter().zip(&x).zip(&pg).map(|((a, b), g)| (a - b) * g).sum();
            if f_new.is_finite() && f_new <= fx + 1e-4 * moved {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return LbfgsResult { x, f: fx, iterations: it, converged: s_hist.is_empty() };
        }
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() && sy > 0.0 {
            if s_hist.len() == opts.memory {
                s_hist.remove(0);
                y_hist.remove(0);
            }
            s_hist.push(s);
            y_hist.push(y);
        }
        let df = (fx - f_new).abs();
        x.copy_from_slice(&x_new);
        g.copy_from_slice(&g_new);
        fx = f_new;
        if df < opts.f_tol {
            return LbfgsResult { x, f: fx, iterations: it + 1, converged: true };
        }
    }
    LbfgsResult {
        x,
        f: fx,
        iterations: opts.max_iterations,
        converged: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64], g: &mut [f64]) -> f64 {
        let (a, b) = (x[0], x[1]);
        g[0] = -2.0 * (1.0 - a) - 400.0 * a * (b - a * a);
        g[1] = 200.0 * (b - a * a);
        (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2)
    }

    #[test]
    fn unconstrained_rosenbrock() {
        let r = minimize(rosenbrock, &[-1.2, 1.0], None, &LbfgsOptions::default());
        assert!((r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] - 1.0).abs() < 1e-5, "{:?}", r);
    }

    #[test]
    fn active_bound() {
        // Minimum of (x-2)^2 + (y+1)^2 on [0,1]^2 is at (1, 0).
        let f = |x: &[f64], g: &mut [f64]| {
            g[0] = 2.0 * (x[0] - 2.0);
            g[1] = 2.0 * (x[1] + 1.0);
            (x[0] - 2.0).powi(2) + (x[1] + 1.0).powi(2)
        };
        let r = minimize(f, &[0.5, 0.5], Some(&[(0.0, 1.0), (0.0, 1.0)]), &LbfgsOptions::default());
        assert!((r.x[0] - 1.0).abs() < 1e-12 && r.x[1].abs() < 1e-12);
        assert!(r.converged);
    }
}
