//! Alice and Bob sketch two nearby strings; the referee recovers the exact
//! distance and an optimal script.
//!
//! cargo run --release --example protocol_roundtrip -- [n] [k]

use std::time::Instant;

use edsketch::protocol::{encode_party, referee_decode, run_protocol, ProtocolParams, Verdict};
use edsketch::strings::{apply_script, edit_distance_value, InputString};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let n = args.next().unwrap_or(2048);
    let k = args.next().unwrap_or(4);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);

    let x: Vec<u32> = (0..n).map(|_| rng.gen_range(0..4)).collect();
    let mut y = x.clone();
    for _ in 0..k / 2 {
        y.remove(rng.gen_range(0..y.len()));
        y.insert(rng.gen_range(0..=y.len()), rng.gen_range(0..4));
    }
    if k % 2 == 1 {
        let i = rng.gen_range(0..n);
        y[i] = (y[i] + 1) % 4;
    }
    let (x, y) = (InputString::new(x), InputString::new(y));
    println!("n = {n}, planted edits = {k}, true distance = {}", edit_distance_value(&x, &y));

    let params = ProtocolParams::new(n, k, 0.1, 0xfeed).unwrap();
    println!(
        "tau = {}, capacity per walk = {}, sketch size = {} bytes",
        params.tau,
        params.capacity(),
        params.sketch_bytes().unwrap()
    );

    let start = Instant::now();
    let outcome = run_protocol(&x, &y, &params, None).unwrap();
    println!(
        "walk-by-walk run: {} of {} walks decoded in {:?}",
        outcome.decoded_walks,
        params.tau,
        start.elapsed()
    );
    report(&x, &y, &outcome.verdict);

    if params.sketch_bytes().unwrap() < 256 << 20 {
        let start = Instant::now();
        let (sx, sy) = (encode_party(&x, &params).unwrap(), encode_party(&y, &params).unwrap());
        let verdict = referee_decode(&sx, &sy, None).unwrap();
        println!("full sketches: {:?}, same verdict: {}", start.elapsed(), verdict == outcome.verdict);
    }
}

fn report(x: &InputString, y: &InputString, verdict: &Verdict) {
    match verdict {
        Verdict::Result { distance, script } => {
            println!("referee: distance {distance}");
            for op in &script.ops {
                println!("  {op:?}");
            }
            assert_eq!(&apply_script(x, script).unwrap(), y);
        }
        Verdict::ErrorReport { reason } => println!("referee: error ({reason})"),
    }
}
