//! Recover a flux-line skew from the symmetry of the delay map.

use qlink::network::Network;
use qlink::protocols::delay_scan;

fn main() -> qlink::Result<()> {
    let mut net = Network::standard();
    net.options.flux_skew = [0.0, 10e-9];
    let eps = [net.devices[0].eps_max, net.devices[1].eps_max];
    let delays: Vec<f64> = (0..25).map(|k| -60e-9 + 5e-9 * k as f64).collect();
    let lengths: Vec<f64> = (1..=40).map(|k| 10e-9 * k as f64).collect();
    for sender in 0..2 {
        let map = delay_scan(&net, sender, eps, &delays, &lengths)?;
        println!("sender q{}: symmetry center {:+.1} ns", sender + 1, map.center()? * 1e9);
    }
    Ok(())
}
