//! Lifetime and Ramsey time of the link modes, probed by swapping the qubit
//! state in and out.

use qlink::network::Network;
use qlink::protocols::{mode_coherence_probe, CoherenceKind, CoherenceProbe, ProbeTarget};

fn main() -> qlink::Result<()> {
    let mut net = Network::standard();
    // Qubit decay would otherwise mix into the fitted mode times.
    for d in net.devices.iter_mut() {
        d.t1 = 1.0;
        d.t2 = 2.0;
    }
    let waits: Vec<f64> = (0..31).map(|k| 50e-9 * k as f64).collect();
    for (target, name) in [(ProbeTarget::Dark, "dark"), (ProbeTarget::Bright(0), "bright (low)")] {
        for kind in [CoherenceKind::T1, CoherenceKind::Ramsey] {
            let probe = CoherenceProbe { kind, target, qubit: 0, eps: net.devices[0].eps_max, waits: waits.clone() };
            let r = mode_coherence_probe(&net, &probe)?;
            println!("{name:>12} {kind:?}: {:.0} ns (swap {:.1} ns)", r.fit.tau * 1e9, r.swap_length * 1e9);
        }
    }
    Ok(())
}
