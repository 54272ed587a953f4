//! Tomography round trip on random states with a noisy readout.

use qlink::tomography::{random_state, run_tomography, ReadoutModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> qlink::Result<()> {
    let model = ReadoutModel::with_error_rate(0.05, 10_000);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut distances = Vec::new();
    for k in 0..50 {
        let rank = rng.random_range(1..=4);
        let truth = random_state(&mut rng, rank);
        let res = run_tomography(&truth, &model, 1000 + k)?;
        let d = res.mle.trace_distance(&truth)?;
        println!("state {k:2} rank {rank}: trace distance {d:.4}");
        distances.push(d);
    }
    distances.sort_by(f64::total_cmp);
    println!("median trace distance {:.4}", distances[distances.len() / 2]);
    println!("confusion condition number {:.3}", model.confusion().condition_number());
    Ok(())
}
