//! Gaussian-process search for the Bell-state pulse pair.
//!
//! `cargo run --release --example optimize_bell -- [iterations] [clipped]`

use qlink::network::Network;
use qlink::optimizer::{optimize_bell, BellExperiment, OptimizerOptions, Provenance};

fn main() -> qlink::Result<()> {
    env_logger::init();
    let mut args = std::env::args().skip(1);
    let iterations = args.next().and_then(|s| s.parse().ok()).unwrap_or(30);
    let clipped = args.next().is_some_and(|s| s == "clipped");

    let exp = BellExperiment::new(Network::standard(), 2000, clipped, 7);
    let bounds = exp.default_box();
    let opts = OptimizerOptions { iterations, seed: 7, ..Default::default() };
    let out = optimize_bell(&exp, &bounds, &opts, Vec::new(), |r| {
        let random_low = r
            .evaluations
            .iter()
            .filter(|e| e.provenance == Provenance::PureRandom)
            .filter_map(|e| e.value)
            .fold(f64::INFINITY, f64::min);
        println!("iter {:3}  best {:.4}  worst random {:.4}", r.iteration, r.best_value, random_low);
        Ok(())
    })?;

    let p = &out.best_params;
    println!("objective {}", if clipped { "clipped magnitude" } else { "phase-corrected fidelity" });
    println!(
        "eps = ({:.1}, {:.1}) MHz, lengths = ({:.1}, {:.1}) ns, ratio {:.2}",
        p.eps[0] / 1e6,
        p.eps[1] / 1e6,
        p.lengths[0] * 1e9,
        p.lengths[1] * 1e9,
        p.lengths[1] / p.lengths[0]
    );
    println!("simulated fidelity {:.4}", out.simulated_fidelity);
    println!("measured fidelity  {:.4}", out.measured_fidelity);
    println!("sender excited population {:.4}", out.sender_population);
    Ok(())
}
