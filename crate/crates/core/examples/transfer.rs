//! Photon transfer between the two modules in both directions, with the
//! loss/dephasing error budget.

use std::time::Instant;

use qlink::network::Network;
use qlink::protocols::{transfer, TransferParams};

fn main() -> qlink::Result<()> {
    let net = Network::standard();
    for sender in 0..2 {
        let t0 = Instant::now();
        let r = transfer(&net, &TransferParams::standard(&net, sender))?;
        println!(
            "sender q{}: peak {:.4} at {:.1} ns (sender left {:.3}, gg {:.3}) [{:.2?}]",
            sender + 1,
            r.peak_fidelity,
            r.peak_time * 1e9,
            r.sender_at_peak,
            r.gg_at_peak,
            t0.elapsed()
        );
    }

    let mut loss_only = net.clone();
    loss_only.options.dephasing = false;
    let mut dephasing_only = net.clone();
    dephasing_only.options.loss = false;
    for (name, n) in [("loss only", &loss_only), ("dephasing only", &dephasing_only)] {
        let r = transfer(n, &TransferParams::standard(n, 0))?;
        println!("{name}: infidelity {:.4}", 1.0 - r.peak_fidelity);
    }
    Ok(())
}
