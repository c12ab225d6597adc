//! Two sets of segment tuples, one digest each; subtracting the digests and
//! peeling recovers the symmetric difference with signs.
//!
//! cargo run --release --example difference_digest -- [capacity] [difference]

use std::collections::BTreeSet;

use edsketch::recovery::{Decoded, DiffSketch, RecoveryParams, Sign, TupleKey};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn key(rng: &mut impl Rng) -> TupleKey {
    TupleKey {
        depth: rng.gen_range(0..12),
        index: rng.gen_range(1..4096),
        hash: rng.gen(),
        length: rng.gen_range(1..5000),
        alpha: rng.gen(),
        beta: rng.gen(),
    }
}

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let capacity = args.next().unwrap_or(200);
    let difference = args.next().unwrap_or(capacity);
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    let mut keys = BTreeSet::new();
    while keys.len() < 5000 + difference {
        keys.insert(key(&mut rng));
    }
    let keys: Vec<_> = keys.into_iter().collect();
    let (shared, rest) = keys.split_at(5000);
    let (only_a, only_b) = rest.split_at(difference / 2);

    let params = RecoveryParams::new(capacity, 99);
    println!("capacity {capacity}: {} cells, {} bytes per digest", params.cells(), params.encoded_len());
    let mut a = DiffSketch::new(params);
    let mut b = DiffSketch::new(params);
    shared.iter().chain(only_a).for_each(|k| a.insert(k));
    shared.iter().chain(only_b).for_each(|k| b.insert(k));

    match a.subtract(&b).unwrap().into_decoded() {
        Decoded::Recovered(diff) => {
            let plus = diff.iter().filter(|(_, s)| *s == Sign::Plus).count();
            println!("recovered {} keys: {plus} only in A, {} only in B", diff.len(), diff.len() - plus);
            assert!(diff.iter().all(|(k, s)| match s {
                Sign::Plus => only_a.contains(k),
                Sign::Minus => only_b.contains(k),
            }));
        }
        Decoded::Fail => println!("difference of {difference} keys is beyond capacity: fail"),
    }
}
