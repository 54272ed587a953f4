//! Adiabatic-transfer fidelity over Gaussian width and receiver lead, for
//! the measured coherences and for improved qubits.

use qlink::network::{DcMode, Network};
use qlink::protocols::{stirap_scan, transfer, TransferParams};

fn main() -> qlink::Result<()> {
    let sigmas: Vec<f64> = (0..12).map(|k| 20e-9 + 15e-9 * k as f64).collect();
    let delays: Vec<f64> = (0..12).map(|k| 25e-9 * k as f64).collect();
    for (label, coherence) in [("table coherences", None), ("T1 = T2 = 20 us", Some((20e-6, 20e-6)))] {
        let mut net = Network::standard();
        if let Some(c) = coherence {
            for d in net.devices.iter_mut() {
                d.t1 = c.0;
                d.t2 = c.1;
            }
        }
        let amp = net.devices[0].eps_max;
        let map = stirap_scan(&net, 0, amp, &sigmas, &delays, DcMode::PeakCompensated)?;
        let square = transfer(&net, &TransferParams::standard(&net, 0))?;
        println!(
            "{label}: best {:.4} at sigma {:.0} ns, lead {:.0} ns; square pulses {:.4}",
            map.best_fidelity,
            map.best_sigma * 1e9,
            map.best_delay * 1e9,
            square.peak_fidelity
        );
    }
    Ok(())
}
