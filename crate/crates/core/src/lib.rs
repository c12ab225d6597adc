//! Simultaneous sketches for exact edit distance.
//!
//! Two parties, Alice holding `x` and Bob holding `y`, each stream their
//! string once and send a short sketch to a referee. When `ed(x, y) <= k`
//! the referee recovers the distance and an optimal edit script; otherwise
//! it reports an error.

mod mix;

pub mod recovery;
pub mod rolling_hash;
pub mod strings;
pub mod walk;
pub mod walk_sketch;
pub mod protocol;
pub mod lab;
