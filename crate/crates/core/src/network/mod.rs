//! Device parameters, interconnect normal modes and the sideband model.

mod dc_offset;
mod lab_frame;
mod modes;
pub(crate) mod params;
mod pulse;
mod sideband;

pub use dc_offset::{dc_offset_resonance, DcOffsetMap};
pub use lab_frame::{build_lab_frame_hamiltonian, LabFrameModel, LabMode, LabQubit};
pub use modes::{diagonalize_detuned, diagonalize_interconnect, NormalModeDecomposition};
pub use params::{DeviceParams, InterconnectParams};
pub use pulse::{FluxPulse, PulseShape, GAUSSIAN_TRUNCATION};
pub use sideband::{sideband_rate, DcMode, SidebandMode, SidebandModel, SidebandQubit};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{channels_from_coherence, CollapseChannel, SolverOptions, TimeDependentHamiltonian};
use crate::quantum::{annihilation, embed, HilbertSpace};

/// Subsystem labels of the transfer space, in order.
pub const QUBIT_LABELS: [&str; 2] = ["q1", "q2"];
pub const DARK_LABEL: &str = "dark";
pub const BRIGHT_LABELS: [&str; 2] = ["bright_lo", "bright_hi"];

/// Simulation switches shared by all protocols.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NetworkOptions {
    pub include_bright: bool,
    pub mode_levels: usize,
    /// Energy relaxation of qubits and modes.
    pub loss: bool,
    /// Pure dephasing of qubits and the dark mode.
    pub dephasing: bool,
    /// Hardware delay added to each qubit's flux line, seconds.
    pub flux_skew: [f64; 2],
    /// Per-qubit `(T1, T2)` used instead of the device values, e.g. fitted
    /// during-drive coherences.
    pub coherence_override: [Option<(f64, f64)>; 2],
    pub dc_mode: DcMode,
    pub solver: SolverOptions,
}

impl Default for NetworkOptions {
    fn default() -> Self {
        NetworkOptions {
            include_bright: true,
            mode_levels: 2,
            loss: true,
            dephasing: true,
            flux_skew: [0.0, 0.0],
            coherence_override: [None, None],
            dc_mode: DcMode::Instantaneous,
            solver: SolverOptions::default(),
        }
    }
}

/// Two modules joined by the cable, with everything needed to build the
/// transfer master equation.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    pub devices: [DeviceParams; 2],
    pub interconnect: InterconnectParams,
    pub modes: NormalModeDecomposition,
    pub options: NetworkOptions,
    dc_maps: [Option<DcOffsetMap>; 2],
}

impl Network {
    pub fn new(devices: [DeviceParams; 2], interconnect: InterconnectParams) -> Result<Self> {
        for d in &devices {
            d.validate()?;
        }
        interconnect.validate()?;
        let offsets = [
            devices[0].nu_c - interconnect.nu_c,
            devices[1].nu_c - interconnect.nu_c,
        ];
        let modes = diagonalize_detuned(&interconnect, offsets, [devices[0].g_qc, devices[1].g_qc]);
        Ok(Network {
            devices,
            interconnect,
            modes,
            options: NetworkOptions::default(),
            dc_maps: [None, None],
        })
    }

    /// Table parameters for both modules and the fitted interconnect.
    pub fn standard() -> Self {
        Self::new(
            [DeviceParams::module_one(), DeviceParams::module_two()],
            InterconnectParams::default(),
        )
        .expect("built-in parameters are valid")
    }

    pub fn with_options(mut self, options: NetworkOptions) -> Self {
        self.options = options;
        self
    }

    pub fn set_dc_map(&mut self, qubit: usize, map: Option<DcOffsetMap>) {
        self.dc_maps[qubit] = map;
    }

    pub fn dc_map(&self, qubit: usize) -> Option<&DcOffsetMap> {
        self.dc_maps[qubit].as_ref()
    }

    fn check_qubit(qubit: usize) -> Result<()> {
        if qubit > 1 {
            return Err(Error::InvalidSubsystem { index: qubit, len: 2 });
        }
        Ok(())
    }

    /// Modulation frequency putting `qubit` on resonance with the dark mode.
    /// Uses the calibrated map when present, the bare pull otherwise.
    pub fn resonance(&self, qubit: usize, eps: f64) -> Result<f64> {
        Self::check_qubit(qubit)?;
        match &self.dc_maps[qubit] {
            Some(map) => map.resonance(eps),
            None => Ok(self.bare_resonance(qubit, eps, self.modes.dark_frequency())),
        }
    }

    /// `nu_mode - nu_q - dc_shift(eps)`.
    pub fn bare_resonance(&self, qubit: usize, eps: f64, mode_frequency: f64) -> f64 {
        mode_frequency - self.devices[qubit].effective_frequency(eps)
    }

    pub fn dark_coupling(&self, qubit: usize) -> f64 {
        self.modes.couplings[qubit][self.modes.dark_index]
    }

    /// Dark-mode sideband rate at amplitude `eps`.
    pub fn dark_rate(&self, qubit: usize, eps: f64) -> Result<f64> {
        let omega = self.resonance(qubit, eps)?;
        sideband_rate(self.dark_coupling(qubit).abs(), eps, omega)
    }

    /// Amplitude giving dark-mode rate `g_eff`, using the bare resonance.
    pub fn amplitude_for_rate(&self, qubit: usize, g_eff: f64) -> Result<f64> {
        Self::check_qubit(qubit)?;
        let g = self.dark_coupling(qubit).abs();
        let dark = self.modes.dark_frequency();
        let rate = |eps: f64| {
            sideband_rate(g, eps, self.bare_resonance(qubit, eps, dark)).unwrap_or(f64::NAN)
        };
        let eps_max = self.devices[qubit].eps_max;
        if !(g_eff >= 0.0) || g_eff > rate(eps_max) {
            return Err(Error::param(
                "g_eff",
                format!("{g_eff:e} Hz is not reachable below eps_max = {eps_max:e} Hz"),
            ));
        }
        let (mut lo, mut hi) = (0.0, eps_max);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if rate(mid) < g_eff {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Square pulse on the dark-mode resonance. The configured flux skew of
    /// that qubit is added to `start`.
    pub fn square_pulse(&self, qubit: usize, eps: f64, start: f64, length: f64) -> Result<FluxPulse> {
        let omega = self.resonance(qubit, eps)?;
        FluxPulse::square(eps, omega, start + self.options.flux_skew[qubit], length)
    }

    pub fn gaussian_pulse(&self, qubit: usize, eps: f64, center: f64, sigma: f64) -> Result<FluxPulse> {
        let omega = self.resonance(qubit, eps)?;
        FluxPulse::gaussian(eps, omega, center + self.options.flux_skew[qubit], sigma)
    }

    pub fn space(&self) -> Result<HilbertSpace> {
        self.model([None, None]).space()
    }

    /// Index of the dark mode in [`Network::space`].
    pub fn dark_subsystem(&self) -> usize {
        2
    }

    pub fn model(&self, pulses: [Option<FluxPulse>; 2]) -> SidebandModel {
        self.sequence_model([
            pulses[0].into_iter().collect(),
            pulses[1].into_iter().collect(),
        ])
    }

    /// Model with a pulse train per qubit.
    pub fn sequence_model(&self, pulses: [Vec<FluxPulse>; 2]) -> SidebandModel {
        let mut pulses = pulses;
        let levels = self.options.mode_levels;
        let m = &self.modes;
        let mode = |label: &str, k: usize| SidebandMode {
            label: label.to_string(),
            frequency: m.frequencies[k],
            levels,
            couplings: vec![m.couplings[0][k], m.couplings[1][k]],
        };
        let mut modes = vec![mode(DARK_LABEL, m.dark_index)];
        if self.options.include_bright {
            for (label, k) in BRIGHT_LABELS.iter().zip(m.bright_indices()) {
                modes.push(mode(label, k));
            }
        }
        SidebandModel {
            qubits: (0..2)
                .map(|i| SidebandQubit {
                    label: QUBIT_LABELS[i].to_string(),
                    frequency: self.devices[i].nu_q,
                    dc_curvature: self.devices[i].dc_curvature,
                    pulses: std::mem::take(&mut pulses[i]),
                })
                .collect(),
            modes,
            frame: m.dark_frequency(),
            dc_mode: self.options.dc_mode,
        }
    }

    /// Rotating-frame transfer Hamiltonian for the given pulses.
    pub fn hamiltonian(&self, pulses: [Option<FluxPulse>; 2]) -> Result<TimeDependentHamiltonian> {
        self.model(pulses).hamiltonian()
    }

    pub fn qubit_coherence(&self, qubit: usize) -> (f64, f64) {
        self.options.coherence_override[qubit]
            .unwrap_or((self.devices[qubit].t1, self.devices[qubit].t2))
    }

    /// Dissipators for qubits and modes, honouring the loss and dephasing
    /// switches.
    pub fn channels(&self) -> Result<Vec<CollapseChannel>> {
        let space = self.space()?;
        let mut out = Vec::new();
        let filter = |chs: Vec<CollapseChannel>, t1_finite: bool| -> Vec<CollapseChannel> {
            // channels_from_coherence emits relaxation first when T1 is finite.
            chs.into_iter()
                .enumerate()
                .filter(|(k, _)| {
                    let relax = t1_finite && *k == 0;
                    if relax {
                        self.options.loss
                    } else {
                        self.options.dephasing
                    }
                })
                .map(|(_, c)| c)
                .collect()
        };
        for q in 0..2 {
            let (t1, t2) = self.qubit_coherence(q);
            out.extend(filter(channels_from_coherence(t1, t2, &space, q)?, t1.is_finite()));
        }
        let ic = &self.interconnect;
        let dark_t1 = if ic.kappa_dark > 0.0 { 1.0 / ic.kappa_dark } else { f64::INFINITY };
        let dark_t2 = ic.t2_dark.unwrap_or(2.0 * dark_t1);
        if dark_t2.is_finite() || dark_t1.is_finite() {
            out.extend(filter(
                channels_from_coherence(dark_t1, dark_t2, &space, self.dark_subsystem())?,
                dark_t1.is_finite(),
            ));
        }
        if self.options.include_bright && self.options.loss && ic.kappa_bright > 0.0 {
            for k in 0..2 {
                let a = embed(&annihilation(self.options.mode_levels)?, &space, 3 + k)?;
                out.push(CollapseChannel::new(a, ic.kappa_bright)?);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_dark_rate_is_about_two_megahertz() {
        let net = Network::standard();
        for q in 0..2 {
            let g = net.dark_rate(q, net.devices[q].eps_max).unwrap();
            assert!((g - 2.0e6).abs() < 0.1e6, "qubit {q}: {g}");
        }
    }

    #[test]
    fn amplitude_for_rate_inverts() {
        let net = Network::standard();
        let eps = net.amplitude_for_rate(0, 1.5e6).unwrap();
        assert!((net.dark_rate(0, eps).unwrap() - 1.5e6).abs() < 1.0);
        assert!(net.amplitude_for_rate(0, 5e6).is_err());
    }

    #[test]
    fn space_layout() {
        let mut net = Network::standard();
        assert_eq!(net.space().unwrap().dims(), &[2, 2, 2, 2, 2]);
        net.options.include_bright = false;
        assert_eq!(net.space().unwrap().dims(), &[2, 2, 2]);
    }

    #[test]
    fn channel_switches() {
        let mut net = Network::standard();
        // 2 qubits x (T1, T2), dark (T1, T2), 2 bright
        assert_eq!(net.channels().unwrap().len(), 8);
        net.options.dephasing = false;
        assert_eq!(net.channels().unwrap().len(), 5);
        net.options.dephasing = true;
        net.options.loss = false;
        assert_eq!(net.channels().unwrap().len(), 3);
    }
}
