//! Exact sketch sizes across k, and the fitted exponent.
//!
//! cargo run --release --example sketch_sizes -- [n]

use edsketch::lab::{loglog_slope, sketch_sizes};
use edsketch::protocol::ProtocolParams;

fn main() {
    let n: usize = std::env::args().nth(1).map_or(4096, |a| a.parse().expect("n"));
    let ks = [1, 2, 4, 8, 16, 32];
    let sizes = sketch_sizes(n, 0.1, &ks).unwrap();
    println!("{:>4} {:>6} {:>9} {:>16}", "k", "tau", "capacity", "bytes");
    for &(k, bytes) in &sizes {
        let p = ProtocolParams::new(n, k, 0.1, 0).unwrap();
        println!("{k:>4} {:>6} {:>9} {bytes:>16}", p.tau, p.capacity());
    }
    let points: Vec<(f64, f64)> = sizes.iter().map(|&(k, b)| (k as f64, b as f64)).collect();
    println!("log-log slope over k: {:.3}", loglog_slope(&points));
}
