//! Runs each registered Monte Carlo experiment at a small trial count and
//! prints its estimate with a 95% interval.
//!
//! cargo run --release --example experiments -- [trials]

use edsketch::lab::{experiments, run_experiment, ExperimentParams};

fn main() {
    let trials: u64 = std::env::args().nth(1).map_or(200, |a| a.parse().expect("trials"));
    for info in experiments() {
        let mut params = ExperimentParams::new(1).trials(trials.min(info.default_trials));
        if matches!(info.name, "roundtrip" | "error_soundness") {
            params = params.trials(10).set("n", 256.0).set("k", 2.0);
        }
        if info.name == "adversarial_excess" {
            params = params.trials(20).set("k", 4.0);
        }
        let r = run_experiment(info.name, &params).unwrap();
        println!(
            "{:<20} {:>6} trials  estimate {:.3}  [{:.3}, {:.3}]  {} ms",
            r.experiment, r.trials, r.estimate, r.ci_low, r.ci_high, r.runtime_ms
        );
        println!("{:<20} {}", "", info.summary);
    }
}
