//! Online Gaussian-process search over pulse parameters.

mod bell;
mod gp;

pub use bell::{optimize_bell, BellExperiment, BellOutcome};
pub use gp::{gp_fit, GpSurrogate, Hyperparameters};

use std::io::{BufRead, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::{minimize, LbfgsOptions};

/// Axis-aligned search region in physical units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterBox {
    pub names: Vec<String>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ParameterBox {
    pub fn new(names: &[&str], lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let b = ParameterBox {
            names: names.iter().map(|s| s.to_string()).collect(),
            lower,
            upper,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lower.len() != self.upper.len() || self.names.len() != self.lower.len() {
            return Err(Error::param("box", "names and bounds must have equal length"));
        }
        if self.lower.is_empty() {
            return Err(Error::param("box", "needs at least one dimension"));
        }
        for (k, (lo, hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::param("box", format!("dimension {k} needs lower < upper")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn to_unit(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(v, (lo, hi))| (v - lo) / (hi - lo))
            .collect()
    }

    pub fn from_unit(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(v, (lo, hi))| lo + v.clamp(0.0, 1.0) * (hi - lo))
            .collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().zip(self.lower.iter().zip(&self.upper)).all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    pub fn diagonal(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(lo, hi)| (hi - lo).powi(2)).sum::<f64>().sqrt()
    }
}

/// Where a candidate came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Space-filling draw before any model exists.
    Initial,
    SurrogateArgmax,
    FilteredRandom,
    PureRandom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub params: Vec<f64>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub params: Vec<f64>,
    pub provenance: Provenance,
    /// `None` when the experiment failed.
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// One line of the optimization trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizationRecord {
    pub iteration: usize,
    pub evaluations: Vec<Evaluation>,
    pub best_value: f64,
    pub best_params: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOptions {
    /// Model-guided iterations after the initial design.
    pub iterations: usize,
    pub initial_points: usize,
    /// Uniform draws screened by the surrogate per iteration.
    pub pool_size: usize,
    pub filtered: usize,
    pub random: usize,
    pub seed: u64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        OptimizerOptions {
            iterations: 40,
            initial_points: 10,
            pool_size: 256,
            filtered: 7,
            random: 2,
            seed: 0,
        }
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn uniform(rng: &mut impl Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.random::<f64>()).collect()
}

/// Ten candidates: the surrogate-mean maximizer, the best `filtered` of
/// `pool_size` uniform draws, and `random` uniform draws.
pub fn propose_candidates(gp: &GpSurrogate, bounds: &ParameterBox, seed: u64, opts: &OptimizerOptions) -> Vec<Candidate> {
    let d = bounds.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<(f64, Vec<f64>)> = (0..opts.pool_size.max(opts.filtered))
        .map(|_| {
            let u = uniform(&mut rng, d);
            (gp.mean(&u), u)
        })
        .collect();
    pool.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut starts: Vec<Vec<f64>> = pool.iter().take(4).map(|(_, u)| u.clone()).collect();
    if let Some((i, _)) = gp.targets().iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)) {
        starts.push(gp.inputs()[i].clone());
    }
    let unit = vec![(0.0, 1.0); d];
    let lbfgs = LbfgsOptions {
        max_iterations: 200,
        f_tol: 1e-12,
        g_tol: 1e-9,
        ..Default::default()
    };
    let argmax = starts
        .iter()
        .map(|s| {
            minimize(
                |x, g| {
                    let m = gp.mean_gradient(x, g);
                    g.iter_mut().for_each(|v| *v = -*v);
                    -m
                },
                s,
                Some(&unit),
                &lbfgs,
            )
        })
        .min_by(|a, b| a.f.total_cmp(&b.f))
        .map(|r| r.x)
        .unwrap_or_else(|| vec![0.5; d]);

    let mut out = vec![Candidate {
        params: bounds.from_unit(&argmax),
        provenance: Provenance::SurrogateArgmax,
    }];
    out.extend(pool.iter().take(opts.filtered).map(|(_, u)| Candidate {
        params: bounds.from_unit(u),
        provenance: Provenance::FilteredRandom,
    }));
    for _ in 0..opts.random {
        out.push(Candidate {
            params: bounds.from_unit(&uniform(&mut rng, d)),
            provenance: Provenance::PureRandom,
        });
    }
    out
}

fn evaluate(
    objective: &(dyn Fn(&[f64]) -> Result<f64> + Sync),
    candidates: Vec<Candidate>,
) -> Vec<Evaluation> {
    candidates
        .into_par_iter()
        .map(|c| match objective(&c.params) {
            Ok(v) if v.is_finite() => Evaluation { params: c.params, provenance: c.provenance, value: Some(v), error: None },
            Ok(v) => Evaluation { params: c.params, provenance: c.provenance, value: None, error: Some(format!("non-finite objective {v}")) },
            Err(e) => {
                log::warn!("experiment failed at {:?}: {e}", c.params);
                Evaluation { params: c.params, provenance: c.provenance, value: None, error: Some(e.to_string()) }
            }
        })
        .collect()
}

/// Maximize `objective` over `bounds`. `history` holds records from an
/// earlier run to resume from; each new record is passed to `on_record`.
pub fn optimize(
    objective: &(dyn Fn(&[f64]) -> Result<f64> + Sync),
    bounds: &ParameterBox,
    opts: &OptimizerOptions,
    history: Vec<OptimizationRecord>,
    mut on_record: impl FnMut(&OptimizationRecord) -> Result<()>,
) -> Result<Vec<OptimizationRecord>> {
    bounds.validate()?;
    let mut records = history;
    let mut best: Option<(f64, Vec<f64>)> = records.last().map(|r| (r.best_value, r.best_params.clone()));
    let mut xs: Vec<Vec<f64>> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for e in records.iter().flat_map(|r| &r.evaluations) {
        if let Some(v) = e.value {
            xs.push(bounds.to_unit(&e.params));
            ys.push(v);
        }
    }

    for iteration in records.len()..=opts.iterations {
        let mut rng = rng_for(opts.seed, iteration as u64);
        let candidates = if iteration == 0 {
            (0..opts.initial_points)
                .map(|_| Candidate { params: bounds.from_unit(&uniform(&mut rng, bounds.dim())), provenance: Provenance::Initial })
                .collect()
        } else {
            match gp_fit(xs.clone(), ys.clone()) {
                Ok(gp) => propose_candidates(&gp, bounds, rng.random(), opts),
                Err(e) => {
                    log::warn!("surrogate fit failed at iteration {iteration}: {e}; sampling uniformly");
                    (0..1 + opts.filtered + opts.random)
                        .map(|_| Candidate { params: bounds.from_unit(&uniform(&mut rng, bounds.dim())), provenance: Provenance::PureRandom })
                        .collect()
                }
            }
        };
        let evaluations = evaluate(objective, candidates);
        for e in &evaluations {
            if let Some(v) = e.value {
                xs.push(bounds.to_unit(&e.params));
                ys.push(v);
                if best.as_ref().is_none_or(|(b, _)| v > *b) {
                    best = Some((v, e.params.clone()));
                }
            }
        }
        let (best_value, best_params) = best.clone().unwrap_or((f64::NEG_INFINITY, Vec::new()));
        let record = OptimizationRecord { iteration, evaluations, best_value, best_params };
        log::info!("iteration {iteration}: best {best_value:.4}");
        on_record(&record)?;
        records.push(record);
    }
    if best.is_none() {
        return Err(Error::DegenerateData("every experiment failed".into()));
    }
    Ok(records)
}

/// Append one JSON line per record.
pub fn write_record(w: &mut impl Write, record: &OptimizationRecord) -> Result<()> {
    serde_json::to_writer(&mut *w, record)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Records from a JSON-lines trace. A missing file is an empty history.
pub fn read_trace(path: &Path) -> Result<Vec<OptimizationRecord>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut out = Vec::new();
    for line in file.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r: OptimizationRecord = serde_json::from_str(&line)?;
        if r.iteration != out.len() {
            return Err(Error::Config(format!("trace out of order at iteration {}", r.iteration)));
        }
        out.push(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump_box() -> ParameterBox {
        ParameterBox::new(&["a", "b", "c", "d"], vec![0.0, -1.0, 10.0, 0.0], vec![1.0, 1.0, 20.0, 5.0]).unwrap()
    }

    fn bump(x: &[f64]) -> f64 {
        let c = [0.7, -0.2, 13.0, 2.0];
        let s = [0.3, 0.5, 3.0, 1.5];
        let r2: f64 = x.iter().zip(c).zip(s).map(|((v, c), s)| ((v - c) / s).powi(2)).sum();
        (-0.5 * r2).exp()
    }

    fn ok_bump(x: &[f64]) -> Result<f64> {
        Ok(bump(x))
    }

    #[test]
    fn box_rejects_inverted_bounds() {
        assert!(ParameterBox::new(&["a"], vec![1.0], vec![1.0]).is_err());
        assert!(ParameterBox::new(&["a"], vec![2.0], vec![1.0]).is_err());
    }

    #[test]
    fn proposals_find_planted_bump() {
        let b = bump_box();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<Vec<f64>> = (0..60).map(|_| uniform(&mut rng, 4)).collect();
        let y: Vec<f64> = x.iter().map(|u| bump(&b.from_unit(u))).collect();
        let gp = gp_fit(x, y).unwrap();
        let opts = OptimizerOptions::default();
        let c = propose_candidates(&gp, &b, 11, &opts);
        assert_eq!(c.len(), 10);
        assert_eq!(c.iter().filter(|c| c.provenance == Provenance::PureRandom).count(), 2);
        assert_eq!(c.iter().filter(|c| c.provenance == Provenance::FilteredRandom).count(), 7);
        assert!(c.iter().all(|c| b.contains(&c.params)));
        // Distance measured in the unit cube, where the box diagonal is 2.
        let truth = b.to_unit(&[0.7, -0.2, 13.0, 2.0]);
        let got = b.to_unit(&c[0].params);
        let dist: f64 = got.iter().zip(&truth).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(dist < 0.02 * 2.0, "argmax off by {dist}");
        let again = propose_candidates(&gp, &b, 11, &opts);
        assert_eq!(c, again);
    }

    #[test]
    fn loop_is_monotone_and_resumable() {
        let b = bump_box();
        let opts = OptimizerOptions { iterations: 4, seed: 5, ..Default::default() };
        let full = optimize(&ok_bump, &b, &opts, Vec::new(), |_| Ok(())).unwrap();
        assert_eq!(full.len(), 5);
        for w in full.windows(2) {
            assert!(w[1].best_value >= w[0].best_value);
        }
        for r in &full[1..] {
            assert_eq!(r.evaluations.len(), 10);
        }
        let best_random = full
            .iter()
            .flat_map(|r| &r.evaluations)
            .filter(|e| e.provenance == Provenance::PureRandom)
            .filter_map(|e| e.value)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(full.last().unwrap().best_value >= best_random);

        let mut buf = Vec::new();
        let first = optimize(&ok_bump, &b, &OptimizerOptions { iterations: 2, ..opts.clone() }, Vec::new(), |r| write_record(&mut buf, r)).unwrap();
        assert_eq!(first.len(), 3);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.jsonl");
        std::fs::write(&path, &buf).unwrap();
        let resumed = optimize(&ok_bump, &b, &opts, read_trace(&path).unwrap(), |_| Ok(())).unwrap();
        assert_eq!(resumed, full);
    }

    #[test]
    fn failed_experiments_are_skipped() {
        let b = bump_box();
        let flaky = |x: &[f64]| if x[0] > 0.5 { Err(Error::param("x", "boom")) } else { Ok(bump(x)) };
        let opts = OptimizerOptions { iterations: 2, seed: 1, ..Default::default() };
        let recs = optimize(&flaky, &b, &opts, Vec::new(), |_| Ok(())).unwrap();
        assert!(recs.iter().flat_map(|r| &r.evaluations).any(|e| e.error.is_some()));
        assert!(recs.last().unwrap().best_params[0] <= 0.5);
    }
}
