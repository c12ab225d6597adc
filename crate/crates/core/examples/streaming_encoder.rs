//! A party that sees its string one symbol at a time, never holding it, and
//! writes its sketch to disk for the referee.
//!
//! cargo run --release --example streaming_encoder -- [n] [k]

use edsketch::protocol::{referee_decode, FullSketch, PartyEncoder, ProtocolParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let n = args.next().unwrap_or(1024);
    let k = args.next().unwrap_or(2);
    let params = ProtocolParams::new(n, k, 0.1, 0xabcdef).unwrap();
    let dir = std::env::temp_dir();

    let mut paths = Vec::new();
    for (party, flip) in [("alice", None), ("bob", Some(n / 2))] {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut enc = PartyEncoder::new(params).unwrap();
        for i in 0..n {
            let c: u32 = rng.gen_range(0..4);
            enc.push(if Some(i) == flip { (c + 1) % 4 } else { c }).unwrap();
        }
        let bytes = enc.finish().unwrap().to_bytes();
        let path = dir.join(format!("{party}.edsk"));
        std::fs::write(&path, &bytes).unwrap();
        println!("{party}: {} bytes -> {}", bytes.len(), path.display());
        paths.push(path);
    }

    let read = |p: &std::path::PathBuf| FullSketch::from_bytes(&std::fs::read(p).unwrap()).unwrap();
    let verdict = referee_decode(&read(&paths[0]), &read(&paths[1]), None).unwrap();
    println!("{}", serde_json::to_string_pretty(&verdict).unwrap());
}
