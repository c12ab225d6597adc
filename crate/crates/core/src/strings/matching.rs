use super::{EditOp, EditScript, InputString, Matching, StringError};

/// The matching induced by a script: every character of x that survives
/// without being substituted or deleted, joined to where it lands in y.
pub fn matching_from_script(
    x: &InputString,
    y: &InputString,
    script: &EditScript,
) -> Result<Matching, StringError> {
    // Each slot carries the symbol and, for untouched originals, the x index.
    let mut slots: Vec<(u32, Option<usize>)> =
        x.as_slice().iter().enumerate().map(|(i, &c)| (c, Some(i + 1))).collect();
    for (k, op) in script.ops.iter().enumerate() {
        let len = slots.len();
        let (position, max) = match *op {
            EditOp::Insert { position, .. } => (position, len + 1),
            EditOp::Delete { position } | EditOp::Substitute { position, .. } => (position, len),
        };
        if position == 0 || position > max {
            return Err(StringError::PositionOutOfRange { op: k, position, max });
        }
        match *op {
            EditOp::Insert { position, symbol } => slots.insert(position - 1, (symbol, None)),
            EditOp::Delete { position } => {
                slots.remove(position - 1);
            }
            EditOp::Substitute { position, symbol } => slots[position - 1] = (symbol, None),
        }
    }
    if slots.len() != y.len() || slots.iter().zip(y.as_slice()).any(|(s, &c)| s.0 != c) {
        return Err(StringError::ScriptMismatch);
    }
    let edges = slots
        .iter()
        .enumerate()
        .filter_map(|(j, s)| s.1.map(|i| (i, j + 1)))
        .collect();
    Ok(Matching::new(edges).expect("surviving characters keep their relative order"))
}

/// The lexicographically smallest matching over all optimal scripts.
///
/// Edge sequences are compared element by element and a sequence that runs
/// out compares greater than any edge, so an earlier match always wins over
/// leaving characters unmatched.
///
/// Built from the suffix distance table: `first[i][j]` is the smallest edge
/// reachable from state `(i, j)` through optimal moves. Following those
/// first edges from `(1, 1)` yields the greedy matching in `O(n·m)`.
pub fn greedy_optimal_matching(x: &InputString, y: &InputString) -> Matching {
    let (n, m) = (x.len(), y.len());
    let width = m + 2;
    let at = |i: usize, j: usize| i * width + j;
    // suffix[i][j] = ed(x[i..], y[j..]) for 1 <= i <= n+1, 1 <= j <= m+1.
    let mut suffix = vec![0u32; (n + 2) * width];
    const NONE: u64 = u64::MAX;
    let mut first = vec![NONE; (n + 2) * width];
    for i in (1..=n + 1).rev() {
        for j in (1..=m + 1).rev() {
            let d = if i == n + 1 {
                (m + 1 - j) as u32
            } else if j == m + 1 {
                (n + 1 - i) as u32
            } else {
                let diag = suffix[at(i + 1, j + 1)] + u32::from(x.at(i) != y.at(j));
                diag.min(suffix[at(i + 1, j)] + 1).min(suffix[at(i, j + 1)] + 1)
            };
            suffix[at(i, j)] = d;
            if i <= n && j <= m && x.at(i) == y.at(j) && d == suffix[at(i + 1, j + 1)] {
                first[at(i, j)] = pack(i, j);
                continue;
            }
            let mut best = NONE;
            if i <= n && j <= m && d == suffix[at(i + 1, j + 1)] + 1 {
                best = best.min(first[at(i + 1, j + 1)]);
            }
            if i <= n && d == suffix[at(i + 1, j)] + 1 {
                best = best.min(first[at(i + 1, j)]);
            }
            if j <= m && d == suffix[at(i, j + 1)] + 1 {
                best = best.min(first[at(i, j + 1)]);
            }
            first[at(i, j)] = best;
        }
    }
    let mut edges = Vec::new();
    let (mut i, mut j) = (1, 1);
    while i <= n + 1 && j <= m + 1 {
        let e = first[at(i, j)];
        if e == NONE {
            break;
        }
        let (ei, ej) = unpack(e);
        edges.push((ei, ej));
        i = ei + 1;
        j = ej + 1;
    }
    Matching::new(edges).expect("greedy edges are increasing")
}

// (i, j) packed so that integer order is lexicographic order.
fn pack(i: usize, j: usize) -> u64 {
    ((i as u64) << 32) | j as u64
}

fn unpack(e: u64) -> (usize, usize) {
    ((e >> 32) as usize, (e & 0xffff_ffff) as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strings::edit_distance;
    use rand::distributions::uniform::SampleRange;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(text: &str) -> InputString {
        InputString::from_ascii(text)
    }

    fn random_string(rng: &mut impl Rng, len: impl SampleRange<usize>, sigma: u32) -> InputString {
        let len = rng.gen_range(len);
        InputString::new((0..len).map(|_| rng.gen_range(1..=sigma)).collect())
    }

    /// Every optimal alignment path, enumerated recursively; returns the set
    /// of matchings they induce.
    fn all_optimal_matchings(x: &[u32], y: &[u32]) -> Vec<Vec<(usize, usize)>> {
        fn ed(x: &[u32], y: &[u32]) -> usize {
            edit_distance(&InputString::from(x), &InputString::from(y)).0
        }
        fn go(
            x: &[u32],
            y: &[u32],
            i: usize,
            j: usize,
            budget: usize,
            path: &mut Vec<(usize, usize)>,
            out: &mut Vec<Vec<(usize, usize)>>,
        ) {
            if i == x.len() && j == y.len() {
                out.push(path.clone());
                return;
            }
            if ed(&x[i..], &y[j..]) > budget {
                return;
            }
            if i < x.len() && j < y.len() {
                if x[i] == y[j] {
                    path.push((i + 1, j + 1));
                    go(x, y, i + 1, j + 1, budget, path, out);
                    path.pop();
                }
                if budget > 0 {
                    go(x, y, i + 1, j + 1, budget - 1, path, out);
                }
            }
            if i < x.len() && budget > 0 {
                go(x, y, i + 1, j, budget - 1, path, out);
            }
            if j < y.len() && budget > 0 {
                go(x, y, i, j + 1, budget - 1, path, out);
            }
        }
        let budget = ed(x, y);
        let mut out = Vec::new();
        go(x, y, 0, 0, budget, &mut Vec::new(), &mut out);
        out
    }

    fn lex_key(m: &[(usize, usize)]) -> Vec<(usize, usize)> {
        // Running out compares greater than any edge.
        let mut k = m.to_vec();
        k.push((usize::MAX, usize::MAX));
        k
    }

    #[test]
    fn identity_script_gives_identity_matching() {
        let x = s("abc");
        let m = matching_from_script(&x, &x, &EditScript::default()).unwrap();
        assert_eq!(m.edges(), &[(1, 1), (2, 2), (3, 3)]);
    }

    #[test]
    fn single_delete() {
        let script = EditScript::new(vec![EditOp::Delete { position: 1 }]);
        let m = matching_from_script(&s("ab"), &s("b"), &script).unwrap();
        assert_eq!(m.edges(), &[(2, 1)]);
    }

    #[test]
    fn invalid_script_is_rejected() {
        let script = EditScript::new(vec![EditOp::Delete { position: 2 }]);
        assert_eq!(
            matching_from_script(&s("ab"), &s("b"), &script),
            Err(StringError::ScriptMismatch)
        );
    }

    #[test]
    fn optimal_script_edges_stay_near_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..300 {
            let x = random_string(&mut rng, 0..25, 3);
            let y = random_string(&mut rng, 0..25, 3);
            let (d, script) = edit_distance(&x, &y);
            let m = matching_from_script(&x, &y, &script).unwrap();
            let dels = script.ops.iter().filter(|o| !matches!(o, EditOp::Insert { .. })).count();
            assert_eq!(m.len(), x.len() - dels);
            assert!(m.respects(&x, &y));
            assert!(m.edges().iter().all(|&(i, j)| i.abs_diff(j) <= d));
        }
    }

    #[test]
    fn greedy_on_equal_strings_is_identity() {
        let x = s("abracadabra");
        assert_eq!(greedy_optimal_matching(&x, &x), Matching::identity(11));
    }

    #[test]
    fn greedy_swapped_pair() {
        assert_eq!(greedy_optimal_matching(&s("ba"), &s("ab")).edges(), &[(1, 2)]);
    }

    #[test]
    fn greedy_matches_exhaustive_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..400 {
            let x = random_string(&mut rng, 0..=8, 3);
            let y = random_string(&mut rng, 0..=8, 3);
            let all = all_optimal_matchings(x.as_slice(), y.as_slice());
            let best = all.iter().min_by_key(|m| lex_key(m)).unwrap();
            assert_eq!(greedy_optimal_matching(&x, &y).edges(), &best[..], "{x:?} {y:?}");
        }
    }

    #[test]
    fn greedy_extends_along_equal_diagonals() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..1000 {
            let x = random_string(&mut rng, 1..20, 3);
            let y = random_string(&mut rng, 1..20, 3);
            let m = greedy_optimal_matching(&x, &y);
            assert!(m.respects(&x, &y));
            for &(i, j) in m.edges() {
                if i < x.len() && j < y.len() && x.at(i + 1) == y.at(j + 1) {
                    assert!(m.contains((i + 1, j + 1)));
                }
            }
        }
    }

    #[test]
    fn greedy_is_induced_by_an_optimal_script() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let x = random_string(&mut rng, 0..30, 4);
            let y = random_string(&mut rng, 0..30, 4);
            let m = greedy_optimal_matching(&x, &y);
            // Cost of the cheapest script realising m: unmatched gaps cost max(gap_x, gap_y).
            let mut cost = 0;
            let (mut pi, mut pj) = (0, 0);
            for &(i, j) in m.edges().iter().chain(std::iter::once(&(x.len() + 1, y.len() + 1))) {
                cost += (i - pi - 1).max(j - pj - 1);
                pi = i;
                pj = j;
            }
            assert_eq!(cost, edit_distance(&x, &y).0);
        }
    }
}
