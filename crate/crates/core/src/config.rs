//! Run configuration read from TOML. Frequencies are in MHz and times in ns;
//! the library works in Hz and seconds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{DcMode, DeviceParams, InterconnectParams, Network, NetworkOptions};
use crate::protocols::CoherenceKind;

const MHZ: f64 = 1e6;
/// Nanoseconds per second; times convert by division so round numbers
/// land on the nearest double.
const PER_NS: f64 = 1e9;

fn ns(v: f64) -> f64 {
    v / PER_NS
}

/// Overrides for one module. Missing keys keep the built-in table values.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeviceSection {
    pub nu_q: Option<f64>,
    pub alpha: Option<f64>,
    pub nu_r: Option<f64>,
    pub nu_c: Option<f64>,
    pub nu_m: Option<Vec<f64>>,
    pub g_qc: Option<f64>,
    pub g_spectator: Option<f64>,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    /// Frequency pull per squared modulation amplitude, 1/MHz.
    pub dc_curvature: Option<f64>,
    pub eps_max: Option<f64>,
}

impl DeviceSection {
    fn apply(&self, mut d: DeviceParams) -> DeviceParams {
        let f = |v: Option<f64>, old: f64, unit: f64| v.map_or(old, |v| v * unit);
        d.nu_q = f(self.nu_q, d.nu_q, MHZ);
        d.alpha = f(self.alpha, d.alpha, MHZ);
        d.nu_r = f(self.nu_r, d.nu_r, MHZ);
        d.nu_c = f(self.nu_c, d.nu_c, MHZ);
        if let Some(m) = &self.nu_m {
            d.nu_m = m.iter().map(|v| v * MHZ).collect();
        }
        d.g_qc = f(self.g_qc, d.g_qc, MHZ);
        d.g_spectator = f(self.g_spectator, d.g_spectator, MHZ);
        d.t1 = self.t1.map_or(d.t1, ns);
        d.t2 = self.t2.map_or(d.t2, ns);
        d.dc_curvature = self.dc_curvature.map_or(d.dc_curvature, |v| v / MHZ);
        d.eps_max = f(self.eps_max, d.eps_max, MHZ);
        d
    }

    fn echo(d: &DeviceParams) -> Self {
        let mhz = |v: f64| Some(in_units(v, v / MHZ, |c| c * MHZ));
        DeviceSection {
            nu_q: mhz(d.nu_q),
            alpha: mhz(d.alpha),
            nu_r: mhz(d.nu_r),
            nu_c: mhz(d.nu_c),
            nu_m: Some(d.nu_m.iter().map(|&v| in_units(v, v / MHZ, |c| c * MHZ)).collect()),
            g_qc: mhz(d.g_qc),
            g_spectator: mhz(d.g_spectator),
            t1: Some(in_units(d.t1, d.t1 * PER_NS, ns)),
            t2: Some(in_units(d.t2, d.t2 * PER_NS, ns)),
            dc_curvature: Some(in_units(d.dc_curvature, d.dc_curvature * MHZ, |c| c / MHZ)),
            eps_max: mhz(d.eps_max),
        }
    }
}

/// Shortest decimal near `naive` with `to_si(c) == si` exactly, so an
/// echoed config reproduces the run bit for bit.
fn in_units(si: f64, naive: f64, to_si: impl Fn(f64) -> f64) -> f64 {
    if !naive.is_finite() {
        return naive;
    }
    (1..=17)
        .filter_map(|digits| format!("{:.*e}", digits - 1, naive).parse::<f64>().ok())
        .find(|&c| to_si(c) == si)
        .unwrap_or(naive)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InterconnectSection {
    pub nu_c: Option<f64>,
    pub delta: Option<f64>,
    pub g_l: Option<f64>,
    /// Energy lifetime of each bright mode, ns.
    pub t1_bright: Option<f64>,
    pub t1_dark: Option<f64>,
    /// Ramsey time of the dark mode; 0 means lifetime limited.
    pub t2_dark: Option<f64>,
}

impl InterconnectSection {
    fn apply(&self, mut p: InterconnectParams) -> InterconnectParams {
        if let Some(v) = self.nu_c {
            p.nu_c = v * MHZ;
        }
        if let Some(v) = self.delta {
            p.delta = v * MHZ;
        }
        if let Some(v) = self.g_l {
            p.g_l = v * MHZ;
        }
        if let Some(v) = self.t1_bright {
            p.kappa_bright = 1.0 / ns(v);
        }
        if let Some(v) = self.t1_dark {
            p.kappa_dark = 1.0 / ns(v);
        }
        if let Some(v) = self.t2_dark {
            p.t2_dark = (v != 0.0).then_some(ns(v));
        }
        p
    }

    fn echo(p: &InterconnectParams) -> Self {
        InterconnectSection {
            nu_c: Some(in_units(p.nu_c, p.nu_c / MHZ, |c| c * MHZ)),
            delta: Some(in_units(p.delta, p.delta / MHZ, |c| c * MHZ)),
            g_l: Some(in_units(p.g_l, p.g_l / MHZ, |c| c * MHZ)),
            t1_bright: Some(in_units(p.kappa_bright, PER_NS / p.kappa_bright, |c| 1.0 / ns(c))),
            t1_dark: Some(in_units(p.kappa_dark, PER_NS / p.kappa_dark, |c| 1.0 / ns(c))),
            t2_dark: Some(p.t2_dark.map_or(0.0, |t| in_units(t, t * PER_NS, ns))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkSection {
    pub include_bright: bool,
    pub mode_levels: usize,
    pub loss: bool,
    pub dephasing: bool,
    pub flux_skew: [f64; 2],
    pub dc_mode: DcMode,
    pub rtol: f64,
    pub atol: f64,
    /// Calibrate the amplitude-to-frequency map numerically before running.
    pub calibrate: bool,
    pub calibration_points: usize,
}

impl Default for NetworkSection {
    fn default() -> Self {
        let o = NetworkOptions::default();
        NetworkSection {
            include_bright: o.include_bright,
            mode_levels: o.mode_levels,
            loss: o.loss,
            dephasing: o.dephasing,
            flux_skew: [0.0, 0.0],
            dc_mode: o.dc_mode,
            rtol: o.solver.rtol,
            atol: o.solver.atol,
            calibrate: false,
            calibration_points: 5,
        }
    }
}

/// Qubits are numbered 1 and 2 on every CLI surface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChevronSection {
    pub qubit: usize,
    pub freq_start: f64,
    pub freq_stop: f64,
    pub freq_points: usize,
    pub length_max: f64,
    pub length_points: usize,
    /// Modulation amplitude, MHz; 0 means the device maximum.
    pub eps: f64,
    pub spectators: bool,
}

impl Default for ChevronSection {
    fn default() -> Self {
        ChevronSection {
            qubit: 1,
            freq_start: 3040.0,
            freq_stop: 3160.0,
            freq_points: 61,
            length_max: 1000.0,
            length_points: 101,
            eps: 0.0,
            spectators: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransferSection {
    pub sender: usize,
    /// 0 means the device maximum.
    pub eps: [f64; 2],
    pub duration: f64,
    pub samples: usize,
    pub delay: f64,
}

impl Default for TransferSection {
    fn default() -> Self {
        TransferSection {
            sender: 1,
            eps: [0.0, 0.0],
            duration: 600.0,
            samples: 601,
            delay: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DelaySection {
    pub sender: usize,
    pub delay_min: f64,
    pub delay_max: f64,
    pub delay_points: usize,
    pub length_max: f64,
    pub length_points: usize,
}

impl Default for DelaySection {
    fn default() -> Self {
        DelaySection {
            sender: 1,
            delay_min: -60.0,
            delay_max: 60.0,
            delay_points: 25,
            length_max: 400.0,
            length_points: 41,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StirapSection {
    pub sender: usize,
    /// Peak modulation amplitude, MHz; 0 means the device maximum.
    pub amplitude: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub sigma_points: usize,
    /// Receiver lead over the sender, ns.
    pub delay_min: f64,
    pub delay_max: f64,
    pub delay_points: usize,
    pub dc_mode: DcMode,
}

impl Default for StirapSection {
    fn default() -> Self {
        StirapSection {
            sender: 1,
            amplitude: 0.0,
            sigma_min: 20.0,
            sigma_max: 200.0,
            sigma_points: 10,
            delay_min: 0.0,
            delay_max: 300.0,
            delay_points: 10,
            dc_mode: DcMode::PeakCompensated,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BellSection {
    pub eps: [f64; 2],
    pub lengths: [f64; 2],
    pub delay: f64,
}

impl Default for BellSection {
    fn default() -> Self {
        BellSection {
            eps: [360.0, 705.0],
            lengths: [115.0, 170.0],
            delay: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TomoSection {
    pub shots: usize,
    pub error_rate: f64,
    /// Reconstruct this many random states instead of the Bell state.
    pub random_states: usize,
}

impl Default for TomoSection {
    fn default() -> Self {
        TomoSection {
            shots: 10_000,
            error_rate: 0.05,
            random_states: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeSection {
    pub iterations: usize,
    pub initial_points: usize,
    pub pool_size: usize,
    pub shots: usize,
    pub clipped: bool,
}

impl Default for OptimizeSection {
    fn default() -> Self {
        OptimizeSection {
            iterations: 40,
            initial_points: 10,
            pool_size: 256,
            shots: 2000,
            clipped: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoherenceSection {
    pub kind: CoherenceKind,
    /// `dark`, `bright1` or `bright2`.
    pub target: String,
    pub qubit: usize,
    pub wait_max: f64,
    pub points: usize,
}

impl Default for CoherenceSection {
    fn default() -> Self {
        CoherenceSection {
            kind: CoherenceKind::T1,
            target: "dark".into(),
            qubit: 1,
            wait_max: 1500.0,
            points: 31,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// 0 uses every core.
    pub workers: usize,
    pub device1: DeviceSection,
    pub device2: DeviceSection,
    pub interconnect: InterconnectSection,
    pub network: NetworkSection,
    pub chevron: ChevronSection,
    pub transfer: TransferSection,
    pub delay: DelaySection,
    pub stirap: StirapSection,
    pub bell: BellSection,
    pub tomo: TomoSection,
    pub optimize: OptimizeSection,
    pub coherence: CoherenceSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 1,
            workers: 0,
            device1: DeviceSection::default(),
            device2: DeviceSection::default(),
            interconnect: InterconnectSection::default(),
            network: NetworkSection::default(),
            chevron: ChevronSection::default(),
            transfer: TransferSection::default(),
            delay: DelaySection::default(),
            stirap: StirapSection::default(),
            bell: BellSection::default(),
            tomo: TomoSection::default(),
            optimize: OptimizeSection::default(),
            coherence: CoherenceSection::default(),
        }
    }
}

/// 1-based line of `key` inside `[section]`, or of the section header.
fn locate(text: &str, section: &str, key: Option<&str>) -> Option<usize> {
    let mut current = String::new();
    let mut header = None;
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if let Some(name) = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            current = name.trim().to_string();
            if current == section {
                header = Some(i + 1);
            }
            continue;
        }
        if current == section {
            if let Some(k) = key {
                let lhs = t.split('=').next().unwrap_or("").trim();
                if lhs == k {
                    return Some(i + 1);
                }
            }
        }
    }
    header
}

impl RunConfig {
    /// Parse TOML text. Errors carry line and column.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate().map_err(|(section, key, msg)| {
            let at = locate(text, section, key)
                .map(|l| format!("line {l}: "))
                .unwrap_or_default();
            let key = key.map(|k| format!(".{k}")).unwrap_or_default();
            Error::Config(format!("{at}[{section}]{key}: {msg}"))
        })?;
        Ok(cfg)
    }

    /// Parse with `section.key=value` overrides applied first.
    pub fn from_toml_with(text: &str, overrides: &[String]) -> Result<Self> {
        if overrides.is_empty() {
            return Self::from_toml(text);
        }
        let mut table: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for o in overrides {
            let (path, value) = o
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override `{o}` is not key=value")))?;
            let value: toml::Value = toml::from_str::<toml::Table>(&format!("v = {value}"))
                .ok()
                .and_then(|mut t| t.remove("v"))
                .unwrap_or_else(|| toml::Value::String(value.to_string()));
            let mut slot = &mut table;
            let parts: Vec<&str> = path.trim().split('.').collect();
            for p in &parts[..parts.len() - 1] {
                slot = slot
                    .entry(p.to_string())
                    .or_insert_with(|| toml::Value::Table(toml::Table::new()))
                    .as_table_mut()
                    .ok_or_else(|| Error::Config(format!("`{p}` in override `{o}` is not a section")))?;
            }
            slot.insert(parts[parts.len() - 1].to_string(), value);
        }
        let merged = toml::to_string(&table).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_toml(&merged)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Copy with every device and interconnect value spelled out, so the
    /// echo does not depend on built-in defaults.
    pub fn resolved(&self) -> Result<Self> {
        let net = self.network()?;
        let mut out = self.clone();
        out.device1 = DeviceSection::echo(&net.devices[0]);
        out.device2 = DeviceSection::echo(&net.devices[1]);
        out.interconnect = InterconnectSection::echo(&net.interconnect);
        Ok(out)
    }

    fn validate(&self) -> std::result::Result<(), (&'static str, Option<&'static str>, String)> {
        let fail = |s: &'static str, k: &'static str, m: String| Err((s, Some(k), m));
        for (name, d) in [("device1", &self.device1), ("device2", &self.device2)] {
            let base = if name == "device1" { DeviceParams::module_one() } else { DeviceParams::module_two() };
            if let Err(e) = d.apply(base).validate() {
                let key = match &e {
                    Error::InvalidParameter { name, .. } => Some(*name),
                    _ => None,
                };
                return Err((name, key, e.to_string()));
            }
        }
        if let Err(e) = self.interconnect.apply(InterconnectParams::default()).validate() {
            return Err(("interconnect", None, e.to_string()));
        }
        if self.network.mode_levels < 2 {
            return fail("network", "mode_levels", "need at least two levels".into());
        }
        if !(self.network.rtol > 0.0 && self.network.atol > 0.0) {
            return fail("network", "rtol", "tolerances must be positive".into());
        }
        if self.network.calibrate && self.network.calibration_points < 2 {
            return fail("network", "calibration_points", "need at least two points".into());
        }
        for (s, q) in [
            ("chevron", self.chevron.qubit),
            ("transfer", self.transfer.sender),
            ("delay", self.delay.sender),
            ("stirap", self.stirap.sender),
            ("coherence", self.coherence.qubit),
        ] {
            if !(1..=2).contains(&q) {
                let key = if s == "chevron" || s == "coherence" { "qubit" } else { "sender" };
                return fail(s, key, format!("qubit must be 1 or 2, got {q}"));
            }
        }
        let axes: [(&'static str, &'static str, usize); 9] = [
            ("chevron", "freq_points", self.chevron.freq_points),
            ("chevron", "length_points", self.chevron.length_points),
            ("transfer", "samples", self.transfer.samples),
            ("delay", "delay_points", self.delay.delay_points),
            ("delay", "length_points", self.delay.length_points),
            ("stirap", "sigma_points", self.stirap.sigma_points),
            ("stirap", "delay_points", self.stirap.delay_points),
            ("coherence", "points", self.coherence.points),
            ("tomo", "shots", self.tomo.shots),
        ];
        for (s, k, n) in axes {
            if n == 0 {
                return fail(s, k, "axis must not be empty".into());
            }
        }
        let ranges: [(&'static str, &'static str, f64, f64); 3] = [
            ("chevron", "freq_stop", self.chevron.freq_start, self.chevron.freq_stop),
            ("delay", "delay_max", self.delay.delay_min, self.delay.delay_max),
            ("stirap", "sigma_max", self.stirap.sigma_min, self.stirap.sigma_max),
        ];
        for (s, k, lo, hi) in ranges {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return fail(s, k, format!("range [{lo}, {hi}] is empty or not finite"));
            }
        }
        if !(self.stirap.sigma_min > 0.0) {
            return fail("stirap", "sigma_min", "must be positive".into());
        }
        for (k, v) in [("length_max", self.chevron.length_max), ("eps", self.chevron.eps)] {
            if !(v.is_finite() && v >= 0.0) {
                return fail("chevron", k, "must be finite and non-negative".into());
            }
        }
        if !(self.transfer.duration > 0.0) {
            return fail("transfer", "duration", "must be positive".into());
        }
        if self.bell.lengths.iter().any(|&l| !(l > 0.0)) {
            return fail("bell", "lengths", "pulse lengths must be positive".into());
        }
        if !(0.0..0.5).contains(&self.tomo.error_rate) {
            return fail("tomo", "error_rate", "must lie in [0, 0.5)".into());
        }
        if self.optimize.iterations == 0 {
            return fail("optimize", "iterations", "must be at least one".into());
        }
        if !matches!(self.coherence.target.as_str(), "dark" | "bright1" | "bright2") {
            return fail("coherence", "target", format!("unknown target `{}`", self.coherence.target));
        }
        if !(self.coherence.wait_max > 0.0) {
            return fail("coherence", "wait_max", "must be positive".into());
        }
        Ok(())
    }

    /// Network built from the device, interconnect and network sections.
    /// Calibration, when requested, is left to the caller.
    pub fn network(&self) -> Result<Network> {
        let devices = [
            self.device1.apply(DeviceParams::module_one()),
            self.device2.apply(DeviceParams::module_two()),
        ];
        let ic = self.interconnect.apply(InterconnectParams::default());
        let n = &self.network;
        let mut opts = NetworkOptions {
            include_bright: n.include_bright,
            mode_levels: n.mode_levels,
            loss: n.loss,
            dephasing: n.dephasing,
            flux_skew: n.flux_skew.map(ns),
            dc_mode: n.dc_mode,
            ..Default::default()
        };
        opts.solver.rtol = n.rtol;
        opts.solver.atol = n.atol;
        Ok(Network::new(devices, ic)?.with_options(opts))
    }
}

/// `n` evenly spaced points over `[lo, hi]`; a single point sits at `lo`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default() {
        let c = RunConfig::from_toml("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.network().unwrap(), Network::standard());
    }

    #[test]
    fn units_convert_at_the_boundary() {
        let c = RunConfig::from_toml("[device1]\nt1 = 20000\nnu_q = 4800\n[interconnect]\ndelta = 3.0\n").unwrap();
        let n = c.network().unwrap();
        assert!((n.devices[0].t1 - 20e-6).abs() < 1e-18);
        assert!((n.devices[0].nu_q - 4.8e9).abs() < 1e-3);
        assert!((n.interconnect.delta - 3e6).abs() < 1e-6);
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = RunConfig::from_toml("seed = 3\n\n[transfer]\nsendr = 2\n").unwrap_err().to_string();
        assert!(err.contains("line 4"), "{err}");
        assert!(err.contains("sendr"), "{err}");
    }

    #[test]
    fn invalid_value_reports_line() {
        let err = RunConfig::from_toml("[device2]\nt1 = 1000\n\nt2 = 5000\n").unwrap_err().to_string();
        assert!(err.contains("line 4") && err.contains("device2"), "{err}");
        let err = RunConfig::from_toml("[stirap]\n\nsigma_points = 0\n").unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn echo_round_trips() {
        let c = RunConfig::from_toml("[device1]\nt1 = 20000\n[bell]\neps = [300.0, 700.0]\n").unwrap();
        let r = c.resolved().unwrap();
        let again = RunConfig::from_toml(&r.to_toml()).unwrap();
        assert_eq!(again, r);
        assert_eq!(again.network().unwrap(), c.network().unwrap());
        assert_eq!(r.device1.t2, Some(700.0));
        assert_eq!(r.interconnect.t1_bright, Some(200.0));
    }

    #[test]
    fn overrides_apply() {
        let c = RunConfig::from_toml_with("[transfer]\nsender = 1\n", &["transfer.sender=2".into(), "network.loss=false".into()]).unwrap();
        assert_eq!(c.transfer.sender, 2);
        assert!(!c.network.loss);
    }
}
