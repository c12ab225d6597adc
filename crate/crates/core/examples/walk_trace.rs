//! One random walk over a pair of strings: the shared cursor path, the
//! progress steps, and the matching edges it visits.
//!
//! cargo run --release --example walk_trace -- [n] [edits] [trace.csv]

use std::fs::File;

use edsketch::strings::{edit_distance_value, InputString};
use edsketch::walk::{walk_pair, walk_single, WalkRandomness};
use edsketch::walk_sketch::TreeShape;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(64, |a| a.parse().expect("n"));
    let edits: usize = args.get(1).map_or(3, |a| a.parse().expect("edits"));
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    let x: Vec<u32> = (0..n).map(|_| rng.gen_range(0..4)).collect();
    let mut y = x.clone();
    for _ in 0..edits {
        let i = rng.gen_range(0..y.len());
        y[i] = (y[i] + 1 + rng.gen_range(0..3)) % 4;
    }
    let (x, y) = (InputString::new(x), InputString::new(y));
    let m = TreeShape::for_length(n).m();
    println!("n = {n}, ed = {}, walk length m = {m}", edit_distance_value(&x, &y));

    let coins = WalkRandomness::new(42, 0);
    let trace = walk_pair(&x, &y, &coins, m);
    println!(
        "progress steps: {}, walks through: {}",
        trace.progress_steps(),
        trace.walks_through(n, n)
    );

    // Each party's walk alone gives the same cursors as the joint walk.
    let (_, alone) = walk_single(&x, &coins, m);
    assert_eq!(alone, trace.cursors_x);

    let mut shown = 0;
    for (t, (p, q)) in trace.states().enumerate() {
        if trace.progress_flags[t] && p <= n && q <= n && shown < 12 {
            println!("  step {:>4}: (p, q) = ({p}, {q}), x[p] = {}, y[q] = {}", t + 1, x.at(p), y.at(q));
            shown += 1;
        }
    }

    if let Some(path) = args.get(2) {
        trace.write_csv(File::create(path).expect("create csv")).expect("write csv");
        println!("trace written to {path}");
    }
}
