//! Lab-frame integration against the sideband (rotating-wave) model on one
//! qubit and one mode.

use std::time::Instant;

use qlink::lindblad::{evolve_with, Observable, SolverOptions};
use qlink::network::{DcMode, FluxPulse, LabFrameModel, LabMode, LabQubit, SidebandMode, SidebandModel, SidebandQubit};
use qlink::protocols::time_grid;
use qlink::quantum::{embed, projector, DensityMatrix};
use qlink::special::bessel_j1_inverse;

fn main() -> qlink::Result<()> {
    let nu_q = 5.0e9;
    let detuning = 300e6;
    let g = 5e6;
    let g_eff = 1e6;
    let eps = 2.0 * detuning * bessel_j1_inverse(g_eff / g).expect("reachable rate");
    let period = 1.0 / (2.0 * g_eff);
    let pulse = FluxPulse::square(eps, detuning, 0.0, period * 1.01)?;
    let times = time_grid(period, 101);
    println!("eps = {:.1} MHz peak to peak, swap period {:.0} ns", eps / 1e6, period * 1e9);

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
        qubits: vec![SidebandQubit {
            label: "q".into(),
            frequency: nu_q,
            dc_curvature: 0.0,
            pulses: vec![pulse],
        }],
        modes: vec![SidebandMode {
            label: "m".into(),
            frequency: nu_q + detuning,
            levels: 2,
            couplings: vec![g],
        }],
        frame: nu_q + detuning,
        dc_mode: DcMode::Instantaneous,
    };

    let mut curves = Vec::new();
    for (name, h, max_step) in [
        ("lab", lab.hamiltonian()?, Some(0.02 / nu_q)),
        ("rwa", rwa.hamiltonian()?, None),
    ] {
        let space = h.space().clone();
        let rho0 = DensityMatrix::basis(&space, &[1, 0])?;
        let obs = [Observable::new("P_e", embed(&projector(2, 1)?, &space, 0)?)];
        let opts = SolverOptions { rtol: 1e-9, atol: 1e-11, max_step, store_states: false, ..Default::default() };
        let t0 = Instant::now();
        let traj = evolve_with(&h, &[], &rho0, &times, &opts, &obs)?;
        println!("{name}: {} steps in {:.2?}", traj.accepted_steps, t0.elapsed());
        curves.push(traj.observable("P_e").expect("recorded").to_vec());
    }

    let mut worst: f64 = 0.0;
    for (k, t) in times.iter().enumerate() {
        let d = (curves[0][k] - curves[1][k]).abs();
        worst = worst.max(d);
        if k % 10 == 0 {
            println!("t = {:5.0} ns  lab {:.4}  rwa {:.4}", t * 1e9, curves[0][k], curves[1][k]);
        }
    }
    println!("largest deviation {worst:.4}");
    Ok(())
}
