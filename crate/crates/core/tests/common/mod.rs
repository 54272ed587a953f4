#![allow(dead_code)]

use qlink::lindblad::{evolve_with, Observable, SolverOptions, Trajectory};
use qlink::network::{
    DcMode, FluxPulse, LabFrameModel, LabMode, LabQubit, Network, SidebandMode, SidebandModel, SidebandQubit,
};
use qlink::protocols::{excitation_number, initial_state, joint_projector, time_grid};
use qlink::quantum::{embed, projector, DensityMatrix};
use qlink::special::bessel_j1_inverse;

pub const TAU: f64 = std::f64::consts::TAU;

/// Dark mode only, no dissipation, both qubits driven at the same rate.
pub fn lossless_network() -> (Network, [f64; 2], f64) {
    let mut net = Network::standard();
    net.options.loss = false;
    net.options.dephasing = false;
    net.options.include_bright = false;
    let g = (0..2)
        .map(|q| net.dark_rate(q, net.devices[q].eps_max).unwrap())
        .fold(f64::INFINITY, f64::min)
        * 0.999;
    let eps = [net.amplitude_for_rate(0, g).unwrap(), net.amplitude_for_rate(1, g).unwrap()];
    (net, eps, g)
}

/// `((1 - cos(sqrt 2 * 2 pi g t)) / 2)^2`
pub fn three_level_transfer(g: f64, t: f64) -> f64 {
    ((1.0 - (2f64.sqrt() * TAU * g * t).cos()) / 2.0).powi(2)
}

/// Simultaneous square pulses from t = 0, qubit 1 excited; observables
/// `P_ge` (receiver) and `N` (total excitation).
pub fn run_transfer(net: &Network, eps: [f64; 2], t_end: f64, n: usize, opts: &SolverOptions) -> Trajectory {
    let pulses = [
        Some(net.square_pulse(0, eps[0], 0.0, t_end * 1.01).unwrap()),
        Some(net.square_pulse(1, eps[1], 0.0, t_end * 1.01).unwrap()),
    ];
    let h = net.hamiltonian(pulses).unwrap();
    let rho0 = initial_state(net, [true, false]).unwrap();
    let obs = [
        Observable::new("P_ge", joint_projector(net, 0, 1).unwrap()),
        Observable::new("N", excitation_number(net).unwrap()),
    ];
    evolve_with(&h, &net.channels().unwrap(), &rho0, &time_grid(t_end, n), opts, &obs).unwrap()
}

/// Largest population difference between lab-frame and sideband evolution
/// on one qubit and one mode over one swap period.
pub fn rwa_max_deviation() -> f64 {
    let nu_q = 5.0e9;
    let detuning = 300e6;
    let g = 5e6;
    let g_eff = 1e6;
    let eps = 2.0 * detuning * bessel_j1_inverse(g_eff / g).unwrap();
    let period = 1.0 / (2.0 * g_eff);
    let pulse = FluxPulse::square(eps, detuning, 0.0, period * 1.01).unwrap();
    let times = time_grid(period, 101);
    let lab = LabFrameModel {
        qubits: vec![LabQubit {
            label: "q".into(),
            frequency: nu_q,
            alpha: 200e6,
            dc_curvature: 0.0,
            levels: 2,
            pulse: Some(pulse),
        }],
        modes: vec![LabMode { label: "m".into(), frequency: nu_q + detuning, levels: 2 }],
        couplings: vec![(0, 1, g)],
    };
    let rwa = SidebandModel {
        qubits: vec![SidebandQubit { label: "q".into(), frequency: nu_q, dc_curvature: 0.0, pulses: vec![pulse] }],
        modes: vec![SidebandMode { label: "m".into(), frequency: nu_q + detuning, levels: 2, couplings: vec![g] }],
        frame: nu_q + detuning,
        dc_mode: DcMode::Instantaneous,
    };
    let mut curves = Vec::new();
    for (h, max_step) in [(lab.hamiltonian().unwrap(), Some(0.02 / nu_q)), (rwa.hamiltonian().unwrap(), None)] {
        let space = h.space().clone();
        let rho0 = DensityMatrix::basis(&space, &[1, 0]).unwrap();
        let obs = [Observable::new("P_e", embed(&projector(2, 1).unwrap(), &space, 0).unwrap())];
        let opts = SolverOptions { rtol: 1e-9, atol: 1e-11, max_step, store_states: false, ..Default::default() };
        let traj = evolve_with(&h, &[], &rho0, &times, &opts, &obs).unwrap();
        curves.push(traj.observable("P_e").unwrap().to_vec());
    }
    curves[0].iter().zip(&curves[1]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}
