//! Sideband chevron of qubit 1 around the communication-mode resonance,
//! written as CSV to stdout.

use qlink::network::Network;
use qlink::protocols::chevron_scan;

fn main() -> qlink::Result<()> {
    let net = Network::standard();
    let eps = net.devices[0].eps_max;
    let center = net.resonance(0, eps)?;
    let freqs: Vec<f64> = (0..41).map(|k| center - 40e6 + 2e6 * k as f64).collect();
    let lengths: Vec<f64> = (0..81).map(|k| k as f64 * 10e-9).collect();
    let r = chevron_scan(&net, 0, &freqs, &lengths, eps, false)?;
    eprintln!("modes in band:");
    for m in &r.modes {
        eprintln!("  {:10} sideband at {:.2} MHz, coupling {:.3} MHz", m.label, m.resonance / 1e6, m.coupling / 1e6);
    }
    println!("frequency_mhz,length_ns,population");
    for (i, f) in r.frequencies.iter().enumerate() {
        for (j, l) in r.lengths.iter().enumerate() {
            println!("{},{},{:.5}", f / 1e6, l * 1e9, r.population[i][j]);
        }
    }
    Ok(())
}
