//! Every instance generator, with lengths and true distances.
//!
//! cargo run --release --example instance_families

use edsketch::lab::{generate, Generator, InstanceSpec};

fn main() {
    let families = [
        Generator::RandomEdits { edits: 5 },
        Generator::Independent,
        Generator::PeriodicAdversarial { k: 4 },
        Generator::HammingReductionBinary { bits: 8, d: 2 },
        Generator::HammingReductionLarge { bits: 64, d: 6 },
        Generator::SelfSimilar { period: 4, singletons: 3 },
    ];
    for g in families {
        let spec = InstanceSpec::new(g, 256, 4, 17);
        let inst = generate(&spec).unwrap();
        let head = |s: &edsketch::strings::InputString| {
            s.as_slice().iter().take(24).map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
        };
        println!("{}", serde_json::to_string(&spec).unwrap());
        println!("  n = {}, alphabet = {}, ed = {:?}", inst.x.len(), inst.alphabet.size(), inst.ground_truth);
        println!("  x: {} ...", head(&inst.x));
        println!("  y: {} ...", head(&inst.y));
    }
}
