use qlink::network::Network;
use qlink::optimizer::{optimize_bell, BellExperiment, OptimizerOptions, Provenance};
use qlink::protocols::bell_protocol;
use qlink::tomography::clipped_bell_objective;
use rayon::prelude::*;

#[test]
fn bell_search_never_drops_its_incumbent() {
    let exp = BellExperiment::new(Network::standard(), 500, false, 3);
    let opts = OptimizerOptions { iterations: 4, seed: 3, ..Default::default() };
    let mut best_random = f64::NEG_INFINITY;
    let mut last = f64::NEG_INFINITY;
    let out = optimize_bell(&exp, &exp.default_box(), &opts, Vec::new(), |r| {
        for e in r.evaluations.iter().filter(|e| e.provenance == Provenance::PureRandom) {
            best_random = best_random.max(e.value.unwrap());
        }
        assert!(r.best_value >= best_random);
        assert!(r.best_value >= last);
        last = r.best_value;
        Ok(())
    })
    .unwrap();
    assert_eq!(out.records.len(), 5);
    assert_eq!(out.records[0].evaluations.len(), 10);
    assert!(out.records[1..].iter().all(|r| r.evaluations.len() == 10));
    assert!(out.simulated_fidelity > 0.3);
}

/// Grid optimum under each score, compared by the sender population there.
#[test]
fn clipping_removes_the_sender_population_bias() {
    let net = Network::standard();
    let e = [net.devices[0].eps_max, net.devices[1].eps_max];
    let grid: Vec<[f64; 4]> = (0..5)
        .flat_map(|a| (0..16).flat_map(move |i| (0..16).map(move |j| {
            [e[0] * (0.5 + 0.125 * a as f64), e[1], 40e-9 + 8e-9 * i as f64, 80e-9 + 16e-9 * j as f64]
        })))
        .collect();
    let scored: Vec<(f64, f64, f64)> = grid
        .par_iter()
        .map(|x| {
            let r = bell_protocol(&net, &BellExperiment::params(x)).unwrap();
            (r.fidelity, clipped_bell_objective(r.raw.matrix()), r.sender_population())
        })
        .collect();
    let argmax = |key: fn(&(f64, f64, f64)) -> f64| {
        let k = (0..scored.len()).max_by(|&a, &b| key(&scored[a]).total_cmp(&key(&scored[b]))).unwrap();
        scored[k].2
    };
    let unclipped = argmax(|s| s.0);
    let clipped = argmax(|s| s.1);
    assert!(unclipped > 0.5, "unclipped optimum sender population {unclipped}");
    assert!(unclipped > clipped, "clipped {clipped} vs unclipped {unclipped}");
    assert!((clipped - 0.5).abs() < 0.03, "clipped optimum sender population {clipped}");
}
