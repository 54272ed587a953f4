mod common;

use common::*;
use proptest::prelude::*;
use qlink::lindblad::{evolve_with, Observable, SolverOptions};
use qlink::network::{sideband_rate, DeviceParams, InterconnectParams, Network};
use qlink::protocols::{
    bell_protocol, excitation_number, initial_state, stirap_transfer, time_grid, transfer, BellParams, StirapParams,
    TransferParams,
};

fn closed(mut net: Network) -> Network {
    net.options.loss = false;
    net.options.dephasing = false;
    net
}

#[test]
fn excitation_conserved_for_every_pulse_shape() {
    let net = closed(Network::standard());
    let e = [net.devices[0].eps_max, net.devices[1].eps_max];
    let shapes = [
        [Some(net.square_pulse(0, e[0], 0.0, 120e-9).unwrap()), Some(net.square_pulse(1, e[1], 0.0, 250e-9).unwrap())],
        [Some(net.square_pulse(0, e[0], 30e-9, 100e-9).unwrap()), Some(net.square_pulse(1, e[1], 0.0, 80e-9).unwrap())],
        [Some(net.gaussian_pulse(0, e[0], 200e-9, 60e-9).unwrap()), Some(net.gaussian_pulse(1, e[1], 120e-9, 60e-9).unwrap())],
    ];
    let number = excitation_number(&net).unwrap();
    for pulses in shapes {
        for excited in [[true, false], [false, true], [true, true]] {
            let h = net.hamiltonian(pulses).unwrap();
            let rho0 = initial_state(&net, excited).unwrap();
            let obs = [Observable::new("N", number.clone())];
            let opts = SolverOptions { store_states: false, ..Default::default() };
            let traj = evolve_with(&h, &net.channels().unwrap(), &rho0, &time_grid(400e-9, 81), &opts, &obs).unwrap();
            let n0 = excited.iter().filter(|&&x| x).count() as f64;
            for n in traj.observable("N").unwrap() {
                assert!((n - n0).abs() < 1e-6, "N drifted to {n}");
            }
        }
    }
}

#[test]
fn bell_protocol_conserves_excitation_without_dissipation() {
    let net = closed(Network::standard());
    let r = bell_protocol(
        &net,
        &BellParams { eps: [360e6, 705e6], lengths: [115e-9, 170e-9], delay: 0.0, phase_correction: None },
    )
    .unwrap();
    let m = r.raw.matrix();
    // One excitation in total: the qubits can never both be excited.
    assert!(m[(3, 3)].re.abs() < 1e-6, "ee population {}", m[(3, 3)].re);
    assert!(m[(1, 1)].re + m[(2, 2)].re <= 1.0 + 1e-6);
    assert!(r.raw.min_eigenvalue() >= -1e-6);
    assert!((r.raw.trace() - 1.0).abs() < 1e-6);
}

#[test]
fn stirap_is_lossless_without_dissipation_on_the_dark_mode() {
    let mut net = closed(Network::standard());
    net.options.include_bright = false;
    let amp = net.devices[0].eps_max;
    let f = stirap_transfer(&net, &StirapParams::new(0, 150e-9, 150e-9, amp)).unwrap();
    assert!(f > 0.9, "adiabatic transfer {f}");
}

#[test]
fn identical_modules_transfer_symmetrically() {
    let d = DeviceParams::module_one();
    let net = Network::new([d.clone(), d], InterconnectParams::default()).unwrap();
    let a = transfer(&net, &TransferParams::standard(&net, 0)).unwrap();
    let b = transfer(&net, &TransferParams::standard(&net, 1)).unwrap();
    assert!((a.peak_fidelity - b.peak_fidelity).abs() < 1e-9, "{} vs {}", a.peak_fidelity, b.peak_fidelity);
    assert_eq!(a.peak_time, b.peak_time);
}

#[test]
fn transfer_beats_the_continuum_bound() {
    let net = Network::standard();
    for sender in 0..2 {
        let r = transfer(&net, &TransferParams::standard(&net, sender)).unwrap();
        assert!(r.peak_fidelity > 0.54, "sender {sender}: {}", r.peak_fidelity);
    }
}

#[test]
fn sideband_rate_peaks_at_first_bessel_maximum() {
    let omega = 3e9;
    let at = |x: f64| sideband_rate(35e6, 2.0 * omega * x, omega).unwrap();
    let peak = at(1.8412);
    for x in [0.5, 1.0, 1.5, 1.8, 1.9, 2.2, 3.0] {
        assert!(at(x) < peak, "x = {x}");
    }
    assert!(at(2.2) < at(2.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn network_hamiltonian_is_hermitian(
        t in 0.0f64..400e-9,
        f1 in 0.1f64..1.0,
        f2 in 0.1f64..1.0,
        len in 20e-9f64..300e-9,
        bright in any::<bool>(),
        levels in 2usize..4,
    ) {
        let mut net = Network::standard();
        net.options.include_bright = bright;
        net.options.mode_levels = levels;
        let pulses = [
            Some(net.square_pulse(0, f1 * net.devices[0].eps_max, 0.0, len).unwrap()),
            Some(net.gaussian_pulse(1, f2 * net.devices[1].eps_max, len, len / 4.0).unwrap()),
        ];
        let h = net.hamiltonian(pulses).unwrap();
        prop_assert!(h.at(t).is_hermitian(1e-9));
    }
}

#[test]
fn lossless_oracle_holds_at_two_hundred_points() {
    let (net, eps, g) = lossless_network();
    let t_end = 2.0 / (2f64.sqrt() * g);
    let opts = SolverOptions { rtol: 1e-10, atol: 1e-12, store_states: false, ..Default::default() };
    let traj = run_transfer(&net, eps, t_end, 200, &opts);
    let p = traj.observable("P_ge").unwrap();
    for (&t, &v) in traj.times.iter().zip(p) {
        assert!((v - three_level_transfer(g, t)).abs() < 1e-4, "t = {t}");
    }
}

#[test]
fn rotating_wave_model_tracks_lab_frame() {
    let d = rwa_max_deviation();
    assert!(d < 0.05, "deviation {d}");
}
