use edsketch::protocol::{encode_party, referee_decode, run_protocol, FullSketch, PartyEncoder, ProtocolParams, Verdict};
use edsketch::recovery::{Decoded, DiffSketch, RecoveryParams, Sign, TupleKey};
use edsketch::strings::{
    apply_script, edit_distance, edit_distance_banded, edit_distance_value, greedy_optimal_matching, lcs_length,
    InputString,
};
use edsketch::walk::{walk_pair, walk_single, WalkRandomness};
use edsketch::walk_sketch::{decode_walk, encode_walk, simulate_walk, WalkSketchParams};
use proptest::prelude::*;

fn string(len: std::ops::Range<usize>, sigma: u32) -> impl Strategy<Value = InputString> {
    prop::collection::vec(0..sigma, len).prop_map(InputString::new)
}

/// Pairs of equal length: `y` is `x` with a few substitutions and an
/// equal number of insertions and deletions.
fn near_pair(n: usize, sigma: u32) -> impl Strategy<Value = (InputString, InputString)> {
    (
        prop::collection::vec(0..sigma, n),
        prop::collection::vec((0..n, 0..n, 0..sigma, any::<bool>()), 0..4),
    )
        .prop_map(move |(x, edits)| {
            let mut y = x.clone();
            for (i, j, c, indel) in edits {
                if indel {
                    y.remove(i);
                    y.insert(j, c);
                } else {
                    y[i] = c;
                }
            }
            (InputString::new(x), InputString::new(y))
        })
}

fn key() -> impl Strategy<Value = TupleKey> {
    (0u8..14, 1u32..5000, any::<u64>(), 1u32..9000, any::<bool>(), any::<bool>()).prop_map(
        |(depth, index, hash, length, alpha, beta)| TupleKey { depth, index, hash, length, alpha, beta },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn optimal_script_replays(x in string(0..30, 3), y in string(0..30, 3)) {
        let (d, script) = edit_distance(&x, &y);
        prop_assert_eq!(script.len(), d);
        prop_assert_eq!(apply_script(&x, &script).unwrap(), y.clone());
        prop_assert_eq!(d, edit_distance_value(&y, &x));
        prop_assert!(d >= x.len().abs_diff(y.len()));
        prop_assert!(d <= x.len() + y.len() - 2 * lcs_length(&x, &y));
    }

    #[test]
    fn banded_agrees_within_band(x in string(0..40, 2), y in string(0..40, 2), band in 0usize..12) {
        let d = edit_distance_value(&x, &y);
        match edit_distance_banded(&x, &y, band) {
            Some((b, script)) => {
                prop_assert_eq!(b, d);
                prop_assert_eq!(apply_script(&x, &script).unwrap(), y.clone());
            }
            None => prop_assert!(d > band),
        }
    }

    #[test]
    fn greedy_matching_is_optimal((x, y) in near_pair(30, 3)) {
        let m = greedy_optimal_matching(&x, &y);
        prop_assert!(m.respects(&x, &y));
        prop_assert_eq!(m.len(), lcs_length(&x, &y));
    }

    #[test]
    fn party_walks_agree_with_joint_walk(x in string(1..50, 4), y in string(1..50, 4), seed: u64, m in 1usize..200) {
        let coins = WalkRandomness::new(u128::from(seed), 3);
        let trace = walk_pair(&x, &y, &coins, m);
        prop_assert_eq!(&walk_single(&x, &coins, m).1, &trace.cursors_x);
        prop_assert_eq!(&walk_single(&y, &coins, m).1, &trace.cursors_y);
        prop_assert!(trace.progress_steps() <= m);
    }

    #[test]
    fn digest_recovers_signed_difference(
        a in prop::collection::btree_set(key(), 0..60),
        b in prop::collection::btree_set(key(), 0..60),
        seed: u64,
    ) {
        let params = RecoveryParams::new(120, seed);
        let sketch = |s: &std::collections::BTreeSet<TupleKey>| {
            let mut d = DiffSketch::new(params);
            s.iter().for_each(|k| d.insert(k));
            d
        };
        let (sa, sb) = (sketch(&a), sketch(&b));
        let mut expected: Vec<(TupleKey, Sign)> = a.difference(&b).map(|&k| (k, Sign::Plus))
            .chain(b.difference(&a).map(|&k| (k, Sign::Minus)))
            .collect();
        expected.sort();
        let forward = sa.subtract(&sb).unwrap().into_decoded();
        let backward = sb.subtract(&sa).unwrap().into_decoded();
        if let Decoded::Recovered(mut got) = forward {
            got.sort();
            prop_assert_eq!(&got, &expected);
            let Decoded::Recovered(mut neg) = backward else { panic!("decoding is not antisymmetric") };
            neg.iter_mut().for_each(|(_, s)| *s = s.negate());
            neg.sort();
            prop_assert_eq!(neg, expected);
        } else {
            prop_assert!(expected.len() > 60, "{} keys failed to decode", expected.len());
        }
    }

    #[test]
    fn walk_decoding_matches_simulation((x, y) in near_pair(40, 3), seed: u64, walk in 0u64..4) {
        let params = WalkSketchParams::new(40, WalkSketchParams::capacity_for(40, 3, 8), 0.05, u128::from(seed), walk).unwrap();
        let two_party = decode_walk(&params, &encode_walk(&x, &params), &encode_walk(&y, &params), None);
        let simulated = simulate_walk(&params, &x, &y, None);
        prop_assert_eq!(&two_party, &simulated);
        if let Ok(al) = two_party {
            prop_assert!(al.agrees_with(&x, &y));
        }
    }

    #[test]
    fn results_always_replay(x in string(24..25, 3), y in string(24..25, 3), seed: u64, k in 1usize..5) {
        let params = ProtocolParams::new(24, k, 0.2, u128::from(seed)).unwrap().with_tau(12).unwrap();
        let out = run_protocol(&x, &y, &params, None).unwrap();
        if let Verdict::Result { distance, script } = &out.verdict {
            prop_assert_eq!(script.len(), *distance);
            prop_assert!(*distance <= k);
            prop_assert_eq!(apply_script(&x, script).unwrap(), y.clone());
            prop_assert!(*distance >= edit_distance_value(&x, &y));
        }
    }

    #[test]
    fn streamed_and_batch_sketches_are_identical(s in string(32..33, 5), seed: u64) {
        let params = ProtocolParams::new(32, 2, 0.1, u128::from(seed)).unwrap().with_tau(3).unwrap();
        let batch = encode_party(&s, &params).unwrap();
        let mut enc = PartyEncoder::new(params).unwrap();
        s.as_slice().iter().for_each(|&c| enc.push(c).unwrap());
        let streamed = enc.finish().unwrap();
        prop_assert_eq!(&streamed, &batch);
        prop_assert_eq!(FullSketch::from_bytes(&batch.to_bytes()).unwrap(), batch);
    }
}

#[test]
fn full_sketches_and_walk_by_walk_runs_agree() {
    let x = InputString::new((0..64u32).map(|i| (i * 7 + i / 5) % 4).collect());
    let mut y = x.as_slice().to_vec();
    y.remove(10);
    y.insert(40, 3);
    let y = InputString::new(y);
    let params = ProtocolParams::new(64, 2, 0.1, 5).unwrap();
    let full = referee_decode(&encode_party(&x, &params).unwrap(), &encode_party(&y, &params).unwrap(), None).unwrap();
    assert_eq!(full, run_protocol(&x, &y, &params, None).unwrap().verdict);
    assert_eq!(full.distance(), Some(edit_distance_value(&x, &y)));
}
