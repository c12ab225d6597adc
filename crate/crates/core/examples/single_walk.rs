//! One walk of the sketch: both parties stream their strings into a
//! segment-tree digest and the referee decodes an effective alignment.
//!
//! cargo run --release --example single_walk -- [n] [k]

use edsketch::strings::{greedy_optimal_matching, InputString};
use edsketch::walk_sketch::{decode_walk, encode_walk, WalkSketchParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let n = args.next().unwrap_or(512);
    let k = args.next().unwrap_or(2);
    let mut rng = ChaCha8Rng::seed_from_u64(3);

    let x: Vec<u32> = (0..n).map(|_| rng.gen_range(0..4)).collect();
    let mut y = x.clone();
    y.remove(n / 3);
    y.insert(2 * n / 3, 1);
    let (x, y) = (InputString::new(x), InputString::new(y));

    let capacity = WalkSketchParams::capacity_for(n, k, 8);
    for walk in 0..5 {
        let params = WalkSketchParams::new(n, capacity, 0.05, 0x5eed, walk).unwrap();
        let (sx, sy) = (encode_walk(&x, &params), encode_walk(&y, &params));
        print!("walk {walk}: sketch {} bytes, ", sx.encoded_len());
        match decode_walk(&params, &sx, &sy, None) {
            Ok(al) => {
                let optimal = greedy_optimal_matching(&x, &y);
                let shared = al.edges.edges().iter().filter(|&&e| optimal.contains(e)).count();
                println!(
                    "{} edges ({shared} optimal), {} + {} unmatched symbols, consistent: {}",
                    al.edges.len(),
                    al.g_x.len(),
                    al.g_y.len(),
                    al.agrees_with(&x, &y)
                );
            }
            Err(e) => println!("no alignment ({e})"),
        }
    }
}
