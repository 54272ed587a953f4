//! Command-line front end: config loading, dispatch, sweeps and outputs.

mod output;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

pub use output::{matrix_json, version_stamp, Output};

use crate::config::{linspace, RunConfig};
use crate::error::Error;
use crate::network::Network;
use crate::optimizer::{optimize_bell, read_trace, write_record, BellExperiment, OptimizerOptions};
use crate::protocols::{
    bell_protocol, calibrate_dc_map, chevron_scan, mode_coherence_probe, stirap_transfer, symmetry_center, transfer,
    BellParams, CalibrationOptions, CoherenceKind, CoherenceProbe, ProbeTarget, StirapParams, TransferParams,
};
use crate::tomography::{pauli_expectations, random_state, run_tomography, ReadoutModel, PAULI_LABELS};

const MHZ: f64 = 1e6;
const NS: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "qlink", version, about = "Two-module photon transfer simulator")]
pub struct Cli {
    /// TOML run configuration (MHz, ns).
    #[arg(long, env = "QLINK_CONFIG", global = true)]
    pub config: Option<PathBuf>,
    /// Result directory.
    #[arg(long, global = true, default_value = "results")]
    pub out: PathBuf,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for sweeps; 0 uses every core.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Override a config value, e.g. `--set network.loss=false`.
    #[arg(long = "set", global = true, value_name = "SECTION.KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Make the given sweep cell panic (for testing partial output).
    #[arg(long, hide = true, global = true)]
    pub fail_cell: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    T1,
    Ramsey,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sideband chevron of one qubit.
    Chevron {
        #[arg(long)]
        qubit: Option<usize>,
    },
    /// Normal modes of the resonator-cable-resonator link.
    Modes,
    /// Single-photon transfer with simultaneous square pulses.
    Transfer {
        #[arg(long)]
        sender: Option<usize>,
    },
    /// Relative-delay sweep locating the flux-line skew.
    DelayCal {
        #[arg(long)]
        sender: Option<usize>,
    },
    /// Gaussian-pulse adiabatic transfer map over width and delay.
    Stirap {
        #[arg(long)]
        sender: Option<usize>,
    },
    /// Bell-state creation with the configured pulse pair.
    Bell,
    /// Tomography of the Bell state, or of random states.
    Tomo,
    /// Gaussian-process search for the Bell pulses.
    Optimize {
        #[arg(long)]
        iterations: Option<usize>,
        /// Continue from `trace.jsonl` in the output directory.
        #[arg(long)]
        resume: bool,
    },
    /// Mode T1 or Ramsey probe via swaps.
    Coherence {
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        /// `dark`, `bright1` or `bright2`.
        #[arg(long)]
        target: Option<String>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Chevron { .. } => "chevron",
            Command::Modes => "modes",
            Command::Transfer { .. } => "transfer",
            Command::DelayCal { .. } => "delay-cal",
            Command::Stirap { .. } => "stirap",
            Command::Bell => "bell",
            Command::Tomo => "tomo",
            Command::Optimize { .. } => "optimize",
            Command::Coherence { .. } => "coherence",
        }
    }

    fn overrides(&self) -> Vec<String> {
        let mut v = Vec::new();
        match self {
            Command::Chevron { qubit: Some(q) } => v.push(format!("chevron.qubit={q}")),
            Command::Transfer { sender: Some(s) } => v.push(format!("transfer.sender={s}")),
            Command::DelayCal { sender: Some(s) } => v.push(format!("delay.sender={s}")),
            Command::Stirap { sender: Some(s) } => v.push(format!("stirap.sender={s}")),
            Command::Optimize { iterations: Some(n), .. } => v.push(format!("optimize.iterations={n}")),
            Command::Coherence { kind, target } => {
                if let Some(k) = kind {
                    let k = if *k == KindArg::T1 { "t1" } else { "ramsey" };
                    v.push(format!("coherence.kind=\"{k}\""));
                }
                if let Some(t) = target {
                    v.push(format!("coherence.target=\"{t}\""));
                }
            }
            _ => {}
        }
        v
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or configuration: exit 2.
    Config(String),
    /// A simulation failed: exit 3.
    Solver(String),
    /// Could not write results: exit 1.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
            CliError::Solver(m) => write!(f, "simulation failed: {m}"),
            CliError::Io(m) => write!(f, "output error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Json(_) => CliError::Io(e.to_string()),
            Error::Config(m) => CliError::Config(m),
            other => CliError::Solver(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn config_error(e: Error) -> CliError {
    match e {
        Error::Config(m) => CliError::Config(m),
        other => CliError::Config(other.to_string()),
    }
}

/// Resolve the configuration for `cli`: file, then `--set`, then flags.
pub fn load_config(cli: &Cli) -> CliResult<RunConfig> {
    let text = match &cli.config {
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?,
        None => String::new(),
    };
    let mut overrides = cli.overrides.clone();
    overrides.extend(cli.command.overrides());
    if let Some(s) = cli.seed {
        overrides.push(format!("seed={s}"));
    }
    if let Some(w) = cli.workers {
        overrides.push(format!("workers={w}"));
    }
    RunConfig::from_toml_with(&text, &overrides).map_err(config_error)
}

/// Parse `args`, run, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> CliResult<()> {
    let cfg = load_config(cli)?;
    let resolved = cfg.resolved().map_err(config_error)?;
    let mut net = cfg.network().map_err(config_error)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    let mut out = Output::new(&cli.out)?;
    out.text("config.toml", &resolved.to_toml())?;
    let started = Instant::now();
    let ctx = Ctx { cfg: &cfg, fail_cell: cli.fail_cell };

    let result = pool.install(|| -> CliResult<serde_json::Value> {
        if cfg.network.calibrate {
            calibrate(&mut net, &cfg)?;
        }
        match &cli.command {
            Command::Modes => modes(&net, &mut out),
            Command::Chevron { .. } => chevron(&ctx, &net, &mut out),
            Command::Transfer { .. } => run_transfer(&ctx, &net, &mut out),
            Command::DelayCal { .. } => delay_cal(&ctx, &net, &mut out),
            Command::Stirap { .. } => stirap(&ctx, &net, &mut out),
            Command::Bell => bell(&ctx, &net, &mut out),
            Command::Tomo => tomo(&ctx, &net, &mut out),
            Command::Optimize { resume, .. } => optimize(&ctx, &net, &mut out, *resume),
            Command::Coherence { .. } => coherence(&ctx, &net, &mut out),
        }
    });

    let (status, summary) = match &result {
        Ok(s) => ("ok", s.clone()),
        Err(e) => ("failed", json!({ "error": e.to_string() })),
    };
    let mut files = out.files().to_vec();
    files.push("metadata.json".into());
    let meta = json!({
        "version": version_stamp(),
        "command": cli.command.name(),
        "status": status,
        "seed": cfg.seed,
        "workers": pool.current_num_threads(),
        "wall_time_s": started.elapsed().as_secs_f64(),
        "config": resolved,
        "summary": summary,
        "outputs": files,
    });
    out.json("metadata.json", &meta)?;
    result.map(|_| ())
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    fail_cell: Option<usize>,
}

fn eps_or_max(net: &Network, q: usize, eps_mhz: f64) -> f64 {
    if eps_mhz > 0.0 {
        eps_mhz * MHZ
    } else {
        net.devices[q].eps_max
    }
}

fn calibrate(net: &mut Network, cfg: &RunConfig) -> CliResult<()> {
    for q in 0..2 {
        let e = net.devices[q].eps_max;
        let pts = linspace(0.3 * e, e, cfg.network.calibration_points);
        let map = calibrate_dc_map(net, q, &pts, &CalibrationOptions::default())?;
        log::info!("calibrated qubit {}: {:?}", q + 1, map.points());
        net.set_dc_map(q, Some(map));
    }
    Ok(())
}

/// Evaluate every cell on the current pool. A cell that errors or panics
/// aborts the sweep after the finished cells are flushed with a manifest.
fn sweep<T: Send>(
    ctx: &Ctx,
    out: &mut Output,
    name: &str,
    header: &[&str],
    n: usize,
    cell: impl Fn(usize) -> crate::Result<T> + Sync,
    rows: impl Fn(usize, &T) -> Vec<Vec<f64>>,
) -> CliResult<Vec<T>> {
    let results: Vec<std::result::Result<T, String>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let r = catch_unwind(AssertUnwindSafe(|| {
                if ctx.fail_cell == Some(i) {
                    panic!("injected failure in cell {i}");
                }
                cell(i)
            }));
            match r {
                Ok(Ok(v)) => Ok(v),
                Ok(Err(e)) => Err(e.to_string()),
                Err(p) => Err(p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "worker panicked".into())),
            }
        })
        .collect();

    let table: Vec<Vec<f64>> = results
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.as_ref().ok().map(|v| rows(i, v)))
        .flatten()
        .collect();
    out.csv(name, header, table)?;
    let failed: Vec<_> = results
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.as_ref().err().map(|e| json!({ "cell": i, "error": e })))
        .collect();
    if failed.is_empty() {
        return Ok(results.into_iter().map(|r| r.ok().expect("checked")).collect());
    }
    let completed: Vec<usize> = results.iter().enumerate().filter(|(_, r)| r.is_ok()).map(|(i, _)| i).collect();
    out.json(
        "manifest.json",
        &json!({ "file": name, "cells": n, "completed": completed, "failed": failed, "partial": true }),
    )?;
    Err(CliError::Solver(format!("{} of {n} sweep cells failed; partial results in {name}", failed.len())))
}

fn modes(net: &Network, out: &mut Output) -> CliResult<serde_json::Value> {
    let m = &net.modes;
    let nu_c = net.interconnect.nu_c;
    let det = m.detunings(nu_c);
    let mut rows = Vec::new();
    println!("mode  detuning (MHz)  cable share  g1 (MHz)  g2 (MHz)");
    for k in 0..3 {
        let tag = if k == m.dark_index { "dark" } else { "bright" };
        println!(
            "{k} {tag:>6}  {:>12.3}  {:>11.4}  {:>8.3}  {:>8.3}",
            det[k] / MHZ,
            m.cable_participation(k),
            m.couplings[0][k] / MHZ,
            m.couplings[1][k] / MHZ
        );
        rows.push(vec![
            k as f64,
            m.frequencies[k] / MHZ,
            det[k] / MHZ,
            m.cable_participation(k),
            m.couplings[0][k] / MHZ,
            m.couplings[1][k] / MHZ,
        ]);
    }
    out.csv("modes.csv", &["mode", "frequency_mhz", "detuning_mhz", "cable_share", "g1_mhz", "g2_mhz"], rows)?;
    Ok(json!({
        "detunings_mhz": det.map(|d| d / MHZ),
        "dark_index": m.dark_index,
        "dark_coupling_mhz": [net.dark_coupling(0) / MHZ, net.dark_coupling(1) / MHZ],
    }))
}

fn chevron(ctx: &Ctx, net: &Network, out: &mut Output) -> CliResult<serde_json::Value> {
    let c = &ctx.cfg.chevron;
    let q = c.qubit - 1;
    let eps = eps_or_max(net, q, c.eps);
    let freqs = linspace(c.freq_start * MHZ, c.freq_stop * MHZ, c.freq_points);
    let lengths = linspace(0.0, c.length_max * NS, c.length_points);
    let columns = sweep(
        ctx,
        out,
        "chevron.csv",
        &["frequency_mhz", "length_ns", "population"],
        freqs.len(),
        |i| chevron_scan(net, q, &freqs[i..=i], &lengths, eps, c.spectators).map(|r| (r.population[0].clone(), r.modes.len())),
        |i, (col, _)| col.iter().zip(&lengths).map(|(p, l)| vec![freqs[i] / MHZ, l / NS, *p]).collect(),
    )?;
    if columns.iter().all(|(_, n)| *n == 0) {
        log::warn!(
            "no mode has its sideband within {:.3}..{:.3} MHz; the chevron map is flat",
            c.freq_start,
            c.freq_stop
        );
    }
    let columns: Vec<Vec<f64>> = columns.into_iter().map(|(col, _)| col).collect();
    let (mut fi, mut best) = (0, f64::INFINITY);
    for (i, col) in columns.iter().enumerate() {
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        if mean < best {
            best = mean;
            fi = i;
        }
    }
    println!("deepest column at {:.3} MHz (mean population {best:.3})", freqs[fi] / MHZ);
    Ok(json!({ "qubit": c.qubit, "eps_mhz": eps / MHZ, "deepest_frequency_mhz": freqs[fi] / MHZ }))
}

fn run_transfer(ctx: &Ctx, net: &Network, out: &mut Output) -> CliResult<serde_json::Value> {
    let t = &ctx.cfg.transfer;
    let s = t.sender - 1;
    let mut p = TransferParams::standard(net, s);
    p.eps = [eps_or_max(net, 0, t.eps[0]), eps_or_max(net, 1, t.eps[1])];
    p.duration = t.duration * NS;
    p.samples = t.samples;
    p.delay = t.delay * NS;
    let r = transfer(net, &p)?;
    let rows = (0..r.times.len()).map(|k| vec![r.times[k] / NS, r.p_eg[k], r.p_ge[k], r.p_gg[k]]);
    out.csv("transfer.csv", &["time_ns", "p_eg", "p_ge", "p_gg"], rows)?;
    println!(
        "sender {}: peak transfer {:.4} at {:.1} ns (sender left {:.4}, lost {:.4})",
        t.sender,
        r.peak_fidelity,
        r.peak_time / NS,
        r.sender_at_peak,
        r.gg_at_peak
    );
    Ok(json!({
        "sender": t.sender,
        "peak_fidelity": r.peak_fidelity,
        "peak_time_ns": r.peak_time / NS,
        "sender_at_peak": r.sender_at_peak,
        "gg_at_peak": r.gg_at_peak,
    }))
}

fn delay_cal(ctx: &Ctx, net: &Network, out: &mut Output) -> CliResult<serde_json::Value> {
    let d = &ctx.cfg.delay;
    let s = d.sender - 1;
    let delays = linspace(d.delay_min * NS, d.delay_max * NS, d.delay_points);
    let lengths = linspace(d.length_max * NS / d.length_points as f64, d.length_max * NS, d.length_points);
    let eps = [net.devices[0].eps_max, net.devices[1].eps_max];
    let rows = sweep(
        ctx,
        out,
        "delay.csv",
        &["delay_ns", "length_ns", "sender_population"],
        delays.len(),
        |i| crate::protocols::delay_scan(net, s, eps, &delays[i..=i], &lengths).map(|m| m.population[0].clone()),
        |i, row| row.iter().zip(&lengths).map(|(p, l)| vec![delays[i] / NS, l / NS, *p]).collect(),
    )?;
    let center = symmetry_center(&delays, &rows)?;
    println!("symmetry center {:.2} ns", center / NS);
    Ok(json!({ "sender": d.sender, "center_ns": center / NS, "step_ns": (delays.get(1).unwrap_or(&delays[0]) - delays[0]) / NS }))
}

fn stirap(ctx: &Ctx, net: &Network, out: &mut Output) -> CliResult<serde_json::Value> {
    let c = &ctx.cfg.stirap;
    let s = c.sender - 1;
    let amp = if c.amplitude > 0.0 { c.amplitude * MHZ } else { net.devices[0].eps_max.min(net.devices[1].eps_max) };
    let sigmas = linspace(c.sigma_min * NS, c.sigma_max * NS, c.sigma_points);
    let delays = linspace(c.delay_min * NS, c.delay_max * NS, c.delay_points);
    let nd = delays.len();
    let values = sweep(
        ctx,
        out,
        "stirap.csv",
        &["sigma_ns", "delay_ns", "fidelity"],
        sigmas.len() * nd,
        |k| {
            let mut p = StirapParams::new(s, sigmas[k / nd], delays[k % nd], amp);
            p.dc_mode = c.dc_mode;
            stirap_transfer(net, &p)
        },
        |k, f| vec![vec![sigmas[k / nd] / NS, delays[k % nd] / NS, *f]],
    )?;
    let (k, best) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (k, &v)| if v > acc.1 { (k, v) } else { acc });
    println!("best {best:.4} at sigma {:.1} ns, delay {:.1} ns", sigmas[k / nd] / NS, delays[k % nd] / NS);
    Ok(json!({ "best_fidelity": best, "best_sigma_ns": sigmas[k / nd] / NS, "best_delay_ns": delays[k % nd] / NS }))
}

fn bell_params(ctx: &Ctx) -> BellParams {
    let b = &ctx.cfg.bell;
    BellParams {
        eps: b.eps.map(|v| v * MHZ),
        lengths: b.lengths.map(|v| v * NS),
        delay: b.delay * NS,
        phase_correction: None,
    }
}

fn bell(ctx: &Ctx, net: &Network, out: &mut Output) -> CliResult<serde_json::Value> {
    let r = bell_protocol(net, &bell_params(ctx))?;
    out.json("bell.json", &json!({ "raw": matrix_json(r.raw.matrix()), "corrected": matrix_json(r.rho.matrix()) }))?;
    println!("fidelity {:.4} after phase {:.4} rad; sender population {:.4}", r.fidelity, r.phase, r.sender_population());
    Ok(json!({ "fidelity": r.fidelity, "phase": r.phase, "sender_population": r.sender_population() }))
}

fn tomo(ctx: &Ctx, net: &Network, out: &mut Output) -> CliResult<serde_json::Value> {
    let t = &ctx.cfg.tomo;
    let model = ReadoutModel::with_error_rate(t.error_rate, t.shots);
    if t.random_states > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.seed);
        let states: Vec<_> = (0..t.random_states).map(|k| random_state(&mut rng, 1 + k % 4)).collect();
        let seed = ctx.cfg.seed;
        let dist = sweep(
            ctx,
            out,
            "roundtrip.csv",
            &["state", "rank", "trace_distance"],
            states.len(),
            |k| run_tomography(&states[k], &model, seed.wrapping_add(k as u64))?.mle.trace_distance(&states[k]),
            |k, d| vec![vec![k as f64, (1 + k % 4) as f64, *d]],
        )?;
        let mut sorted = dist.clone();
        sorted.sort_by(f64::total_cmp);
        let median = sorted[sorted.len() / 2];
        println!("median trace distance {median:.4} over {} states", dist.len());
        return Ok(json!({ "median_trace_distance": median }));
    }
    let r = bell_protocol(net, &bell_params(ctx))?;
    let res = run_tomography(&r.rho, &model, ctx.cfg.seed)?;
    let ideal = pauli_expectations(&r.rho);
    out.csv(
        "pauli.csv",
        &["index", "simulated", "measured"],
        (0..16).map(|k| vec![k as f64, ideal[k], res.pauli[k]]),
    )?;
    out.text("pauli_labels.txt", &(PAULI_LABELS.join("\n") + "\n"))?;
    out.json(
        "tomography.json",
        &json!({ "mle": matrix_json(res.mle.matrix()), "linear": matrix_json(&res.linear), "simulated": matrix_json(r.rho.matrix()) }),
    )?;
    let f = crate::quantum::state_fidelity(&res.mle, &crate::protocols::psi_plus())?;
    let d = res.mle.trace_distance(&r.rho)?;
    println!("reconstructed fidelity {f:.4} (simulated {:.4}), trace distance {d:.4}", r.fidelity);
    Ok(json!({ "fidelity": f, "simulated_fidelity": r.fidelity, "trace_distance": d }))
}

fn optimize(ctx: &Ctx, net: &Network, out: &mut Output, resume: bool) -> CliResult<serde_json::Value> {
    let o = &ctx.cfg.optimize;
    let exp = BellExperiment::new(net.clone(), o.shots, o.clipped, ctx.cfg.seed);
    let bounds = exp.default_box();
    let opts = OptimizerOptions {
        iterations: o.iterations,
        initial_points: o.initial_points,
        pool_size: o.pool_size,
        seed: ctx.cfg.seed,
        ..Default::default()
    };
    let trace_path = out.path("trace.jsonl");
    let history = if resume { read_trace(&trace_path)? } else { Vec::new() };
    if !resume {
        std::fs::write(&trace_path, "")?;
    }
    out.adopt("trace.jsonl");
    let mut file = std::fs::OpenOptions::new().append(true).create(true).open(&trace_path)?;
    let res = optimize_bell(&exp, &bounds, &opts, history, |r| {
        println!("iteration {:3}: best {:.4}", r.iteration, r.best_value);
        write_record(&mut file, r)
    })?;
    let p = &res.best_params;
    println!(
        "best eps ({:.1}, {:.1}) MHz, lengths ({:.1}, {:.1}) ns: fidelity {:.4} simulated, {:.4} measured",
        p.eps[0] / MHZ,
        p.eps[1] / MHZ,
        p.lengths[0] / NS,
        p.lengths[1] / NS,
        res.simulated_fidelity,
        res.measured_fidelity
    );
    Ok(json!({
        "best_objective": res.best_objective,
        "eps_mhz": p.eps.map(|v| v / MHZ),
        "lengths_ns": p.lengths.map(|v| v / NS),
        "simulated_fidelity": res.simulated_fidelity,
        "measured_fidelity": res.measured_fidelity,
        "sender_population": res.sender_population,
    }))
}

fn coherence(ctx: &Ctx, net: &Network, out: &mut Output) -> CliResult<serde_json::Value> {
    let c = &ctx.cfg.coherence;
    let target = match c.target.as_str() {
        "bright1" => ProbeTarget::Bright(0),
        "bright2" => ProbeTarget::Bright(1),
        _ => ProbeTarget::Dark,
    };
    let probe = CoherenceProbe {
        kind: c.kind,
        target,
        qubit: c.qubit - 1,
        eps: net.devices[c.qubit - 1].eps_max,
        waits: linspace(0.0, c.wait_max * NS, c.points),
    };
    let r = mode_coherence_probe(net, &probe)?;
    out.csv("coherence.csv", &["wait_ns", "signal"], r.waits.iter().zip(&r.signal).map(|(w, s)| vec![w / NS, *s]))?;
    let label = if c.kind == CoherenceKind::T1 { "T1" } else { "T2" };
    println!("{} {label} = {:.1} ns", c.target, r.fit.tau / NS);
    Ok(json!({ "target": c.target, "kind": label, "tau_ns": r.fit.tau / NS, "amplitude": r.fit.amplitude }))
}

/// Path of the config echo inside a result directory.
pub fn echoed_config(dir: &Path) -> PathBuf {
    dir.join("config.toml")
}
