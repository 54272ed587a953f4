use std::f64::consts::TAU;

use super::{DeviceParams, FluxPulse, InterconnectParams};
use crate::error::{Error, Result};
use crate::lindblad::TimeDependentHamiltonian;
use crate::quantum::{annihilation, embed, number, HilbertSpace, Operator};

#[derive(Clone, Debug, PartialEq)]
pub struct LabQubit {
    pub label: String,
    pub frequency: f64,
    /// Anharmonicity magnitude; the e-f transition sits this far below g-e.
    pub alpha: f64,
    pub dc_curvature: f64,
    pub levels: usize,
    pub pulse: Option<FluxPulse>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabMode {
    pub label: String,
    pub frequency: f64,
    pub levels: usize,
}

/// Un-rotated circuit Hamiltonian with full `(x + x^+)(y + y^+)` exchange.
///
/// Subsystems are the qubits followed by the modes; `couplings` are
/// `(a, b, g)` with indices into that combined list. The qubit frequency is
/// `nu_q + dc_shift(eps) + (eps / 2) cos(2 pi omega t)` while a pulse plays,
/// so `eps` is the peak-to-peak excursion and the first sideband has weight
/// `J1(eps / (2 omega))`.
#[derive(Clone, Debug, PartialEq)]
pub struct LabFrameModel {
    pub qubits: Vec<LabQubit>,
    pub modes: Vec<LabMode>,
    pub couplings: Vec<(usize, usize, f64)>,
}

impl LabFrameModel {
    pub fn space(&self) -> Result<HilbertSpace> {
        HilbertSpace::new(
            self.qubits
                .iter()
                .map(|q| (q.label.clone(), q.levels))
                .chain(self.modes.iter().map(|m| (m.label.clone(), m.levels))),
        )
    }

    pub fn hamiltonian(&self) -> Result<TimeDependentHamiltonian> {
        let space = self.space()?;
        let mut h = TimeDependentHamiltonian::zero(&space);
        let mut quads = Vec::with_capacity(space.len());
        for (i, q) in self.qubits.iter().enumerate() {
            let d = q.levels;
            let n_local = number(d)?;
            let id = Operator::identity(n_local.space());
            let anharm = &n_local * &(&n_local - &id);
            let local = &n_local.scale_real(TAU * q.frequency) - &anharm.scale_real(TAU * q.alpha / 2.0);
            h.add_static(&embed(&local, &space, i)?)?;
            if let Some(p) = q.pulse {
                p.validate()?;
                let curv = q.dc_curvature;
                let n = embed(&n_local, &space, i)?;
                h.add_term(
                    move |t| {
                        let e = p.envelope(t);
                        TAU * (-curv * e * e + 0.5 * e * (TAU * p.frequency * t).cos())
                    },
                    n,
                )?;
                h.add_breakpoints(p.breakpoints());
            }
        }
        let nq = self.qubits.len();
        for (k, m) in self.modes.iter().enumerate() {
            let n = embed(&number(m.levels)?, &space, nq + k)?;
            h.add_static(&n.scale_real(TAU * m.frequency))?;
        }
        for (idx, &d) in space.dims().iter().enumerate() {
            let a = embed(&annihilation(d)?, &space, idx)?;
            quads.push(&a + &a.dag());
        }
        for &(a, b, g) in &self.couplings {
            if a >= quads.len() || b >= quads.len() || a == b {
                return Err(Error::param("couplings", format!("invalid pair ({a}, {b})")));
            }
            h.add_static(&(&quads[a] * &quads[b]).scale_real(TAU * g))?;
        }
        Ok(h)
    }
}

/// Lab-frame model of both chips: qubits, the two communication resonators
/// and the cable mode in their bare basis.
pub fn build_lab_frame_hamiltonian(
    devices: &[DeviceParams; 2],
    interconnect: &InterconnectParams,
    pulses: [Option<FluxPulse>; 2],
    qubit_levels: usize,
    mode_levels: usize,
) -> Result<TimeDependentHamiltonian> {
    if qubit_levels < 2 || mode_levels < 2 {
        return Err(Error::InvalidDimension(qubit_levels.min(mode_levels)));
    }
    let qubits = devices
        .iter()
        .zip(pulses)
        .enumerate()
        .map(|(i, (d, pulse))| LabQubit {
            label: format!("q{}", i + 1),
            frequency: d.nu_q,
            alpha: d.alpha,
            dc_curvature: d.dc_curvature,
            levels: qubit_levels,
            pulse,
        })
        .collect();
    let modes = vec![
        LabMode { label: "c1".into(), frequency: devices[0].nu_c, levels: mode_levels },
        LabMode { label: "c2".into(), frequency: devices[1].nu_c, levels: mode_levels },
        LabMode { label: "cable".into(), frequency: interconnect.nu_cable(), levels: mode_levels },
    ];
    let couplings = vec![
        (0, 2, devices[0].g_qc),
        (1, 3, devices[1].g_qc),
        (2, 4, interconnect.g_l),
        (3, 4, interconnect.g_l),
    ];
    LabFrameModel { qubits, modes, couplings }.hamiltonian()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anharmonicity_sign() {
        let model = LabFrameModel {
            qubits: vec![LabQubit {
                label: "q".into(),
                frequency: 4.7685e9,
                alpha: 109.8e6,
                dc_curvature: 0.0,
                levels: 3,
                pulse: None,
            }],
            modes: vec![],
            couplings: vec![],
        };
        let h = model.hamiltonian().unwrap();
        let e = h.at(0.0).eigenvalues_hermitian();
        let rel = (e[2] - 2.0 * e[1] + TAU * 109.8e6) / (TAU * 109.8e6);
        assert!(rel.abs() < 1e-6);
    }

    #[test]
    fn static_without_pulses() {
        let d = [DeviceParams::module_one(), DeviceParams::module_two()];
        let h = build_lab_frame_hamiltonian(&d, &InterconnectParams::default(), [None, None], 2, 2).unwrap();
        assert!(h.terms().is_empty());
        assert!(h.at(0.0).is_hermitian(1e-9 * 1e11));
        assert!(build_lab_frame_hamiltonian(&d, &InterconnectParams::default(), [None, None], 1, 2).is_err());
    }
}
