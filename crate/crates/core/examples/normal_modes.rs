//! Hybridized modes of the two communication resonators and the cable.

use qlink::network::{diagonalize_detuned, InterconnectParams, Network};

fn main() {
    let net = Network::standard();
    let m = &net.modes;
    let nu_c = net.interconnect.nu_c;
    for (k, d) in m.detunings(nu_c).iter().enumerate() {
        let tag = if k == m.dark_index { "dark" } else { "bright" };
        println!(
            "{tag:>6}: {:+8.3} MHz  cable share {:.3}  g = ({:+.3}, {:+.3}) MHz",
            d / 1e6,
            m.cable_participation(k),
            m.couplings[0][k] / 1e6,
            m.couplings[1][k] / 1e6
        );
    }

    // A resonator mismatch lets the communication mode leak into the cable.
    let p = InterconnectParams::default();
    for mismatch in [0.0, 0.5e6, 1e6, 2e6, 4e6] {
        let d = diagonalize_detuned(&p, [mismatch / 2.0, -mismatch / 2.0], [50e6, 50e6]);
        println!("mismatch {:.1} MHz: dark cable share {:.4}", mismatch / 1e6, d.cable_participation(d.dark_index));
    }
}
