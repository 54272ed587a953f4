//! Bell state from a partial transfer: sweep the receiver length at fixed
//! sender settings and report the phase-corrected fidelity.

use qlink::network::Network;
use qlink::protocols::{bell_protocol, BellParams};

fn main() -> qlink::Result<()> {
    let net = Network::standard();
    let mut best = (0.0, 0.0);
    for k in 0..15 {
        let len2 = 120e-9 + 10e-9 * k as f64;
        let p = BellParams { eps: [360e6, 705e6], lengths: [115e-9, len2], delay: 0.0, phase_correction: None };
        let r = bell_protocol(&net, &p)?;
        println!(
            "receiver {:.0} ns: fidelity {:.4}, sender population {:.3}, phase {:+.3} rad",
            len2 * 1e9,
            r.fidelity,
            r.sender_population(),
            r.phase
        );
        if r.fidelity > best.0 {
            best = (r.fidelity, len2);
        }
    }
    println!("best {:.4} at {:.0} ns", best.0, best.1 * 1e9);
    Ok(())
}
