mod common;

use common::*;
use proptest::prelude::*;
use qlink::lindblad::{evolve_with, CollapseChannel, Observable, SolverOptions, TimeDependentHamiltonian};
use qlink::network::Network;
use qlink::quantum::{annihilation, number, sigma_minus, sigma_x, sigma_z, DensityMatrix, HilbertSpace};

fn benchmark() -> (Network, [f64; 2]) {
    let net = Network::standard();
    let g = (0..2)
        .map(|q| net.dark_rate(q, net.devices[q].eps_max).unwrap())
        .fold(f64::INFINITY, f64::min);
    let eps = [net.amplitude_for_rate(0, g).unwrap(), net.amplitude_for_rate(1, g).unwrap()];
    (net, eps)
}

#[test]
fn trace_and_positivity_along_transfer() {
    let (net, eps) = benchmark();
    let opts = SolverOptions { store_states: true, ..net.options.solver.clone() };
    let traj = run_transfer(&net, eps, 400e-9, 101, &opts);
    for rho in &traj.states {
        assert!((rho.trace() - 1.0).abs() <= 1e-6, "trace {}", rho.trace());
        assert!(rho.min_eigenvalue() >= -1e-6, "eigenvalue {}", rho.min_eigenvalue());
    }
}

#[test]
fn purity_conserved_without_dissipation() {
    let mut net = Network::standard();
    net.options.loss = false;
    net.options.dephasing = false;
    let eps = [net.devices[0].eps_max, net.devices[1].eps_max];
    let opts = SolverOptions { store_states: true, rtol: 1e-10, atol: 1e-12, ..Default::default() };
    let traj = run_transfer(&net, eps, 400e-9, 41, &opts);
    for rho in &traj.states {
        assert!((rho.purity() - 1.0).abs() <= 1e-6, "purity {}", rho.purity());
    }
}

#[test]
fn halving_max_step_leaves_final_state_unchanged() {
    let (net, eps) = benchmark();
    let run = |h: f64| {
        let opts = SolverOptions { max_step: Some(h), store_states: false, ..net.options.solver.clone() };
        run_transfer(&net, eps, 400e-9, 401, &opts)
    };
    // Output spacing is 1 ns, so both caps bind.
    let coarse = run(0.5e-9);
    let fine = run(0.25e-9);
    assert!(coarse.accepted_steps < fine.accepted_steps);
    let d = coarse.final_state.trace_distance(&fine.final_state).unwrap();
    assert!(d <= 1e-6, "step halving moved the final state by {d}");
}

#[test]
fn amplitude_decay_matches_exponential() {
    let space = HilbertSpace::single(2).unwrap();
    let gamma = 1e6;
    let ch = CollapseChannel::new(sigma_minus(), gamma).unwrap();
    let h = TimeDependentHamiltonian::zero(&space);
    let rho0 = DensityMatrix::basis(&space, &[1]).unwrap();
    let times = time_grid_s(5e-6, 51);
    let obs = [Observable::new("n", number(2).unwrap())];
    let traj = evolve_with(&h, &[ch], &rho0, &times, &SolverOptions::default(), &obs).unwrap();
    for (t, p) in times.iter().zip(traj.observable("n").unwrap()) {
        assert!((p - (-gamma * t).exp()).abs() < 1e-7);
    }
}

#[test]
fn ramsey_fringe_decays_at_dephasing_rate() {
    let space = HilbertSpace::single(2).unwrap();
    let gamma_phi = 2e5;
    let detuning = 3e6;
    // gamma_phi / 2 * D[sigma_z] dephases coherences at gamma_phi.
    let ch = CollapseChannel::new(sigma_z(), gamma_phi / 2.0).unwrap();
    let h = TimeDependentHamiltonian::constant(sigma_z().scale_real(TAU * detuning / 2.0));
    let plus = nalgebra::DVector::from_element(2, num_complex::Complex64::new(0.5f64.sqrt(), 0.0));
    let rho0 = DensityMatrix::from_ket(&space, &plus).unwrap();
    let times = time_grid_s(4e-6, 81);
    let obs = [Observable::new("x", sigma_x())];
    let traj = evolve_with(&h, &[ch], &rho0, &times, &SolverOptions::default(), &obs).unwrap();
    for (t, x) in times.iter().zip(traj.observable("x").unwrap()) {
        let expected = (-gamma_phi * t).exp() * (TAU * detuning * t).cos();
        assert!((x - expected).abs() < 1e-6, "t = {t}: {x} vs {expected}");
    }
}

fn time_grid_s(t_end: f64, n: usize) -> Vec<f64> {
    qlink::protocols::time_grid(t_end, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn damped_oscillator_stays_physical(
        kappa in 1e5f64..5e6,
        drive in 0.0f64..5e6,
        detuning in -5e6f64..5e6,
        n0 in 0usize..3,
    ) {
        let d = 4;
        let space = HilbertSpace::single(d).unwrap();
        let a = annihilation(d).unwrap();
        let h = number(d).unwrap().scale_real(TAU * detuning)
            .try_add(&a.try_add(&a.dag()).unwrap().scale_real(TAU * drive * 0.1)).unwrap();
        let h = TimeDependentHamiltonian::constant(h);
        let ch = CollapseChannel::new(a, kappa).unwrap();
        let rho0 = DensityMatrix::basis(&space, &[n0]).unwrap();
        let traj = evolve_with(&h, &[ch], &rho0, &time_grid_s(2e-6, 21), &SolverOptions::default(), &[]).unwrap();
        for rho in &traj.states {
            prop_assert!((rho.trace() - 1.0).abs() <= 1e-6);
            prop_assert!(rho.min_eigenvalue() >= -1e-6);
            prop_assert!(rho.matrix().iter().zip(rho.matrix().adjoint().iter()).all(|(x, y)| (x - y).norm() < 1e-9));
        }
    }
}
