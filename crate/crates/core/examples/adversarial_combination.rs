//! On the periodic adversarial pair a single walk often yields a
//! non-optimal alignment; combining many walks recovers an optimal script.
//!
//! cargo run --release --example adversarial_combination -- [k]

use edsketch::lab::{generate, Generator, InstanceSpec};
use edsketch::protocol::{combine_alignments, default_tau, ProtocolParams};
use edsketch::walk_sketch::simulate_walk;

fn main() {
    let k: usize = std::env::args().nth(1).map_or(8, |a| a.parse().expect("k"));
    let inst = generate(&InstanceSpec::new(Generator::PeriodicAdversarial { k }, 0, 2, 0)).unwrap();
    let n = inst.x.len();
    let optimum = inst.ground_truth.unwrap();
    println!("n = {n}, ed = {optimum}");

    let tau = default_tau(n, 2 * k, 0.1);
    let params = ProtocolParams::new(n, 2 * k, 0.1, 77).unwrap().with_tau(tau).unwrap();
    let alignments: Vec<_> = (0..tau as u64)
        .filter_map(|i| simulate_walk(&params.walk_params(i).unwrap(), &inst.x, &inst.y, None).ok())
        .collect();

    for w in [1, 2, 4, 16, alignments.len()] {
        let script = combine_alignments(&alignments[..w], n, n).unwrap();
        println!("{w:>4} walks -> script of length {}", script.len());
    }
}
