use super::{EditOp, EditScript, InputString};

const INF: u32 = u32::MAX / 2;

/// Wagner-Fischer: exact distance plus one optimal script.
///
/// The script lists edits right to left, so every position refers to the
/// original `x` and the edits can be applied in order.
pub fn edit_distance(x: &InputString, y: &InputString) -> (usize, EditScript) {
    let table = distance_table(x, y);
    let width = y.len() + 1;
    let distance = table[x.len() * width + y.len()] as usize;
    let script = traceback(x, y, |i, j| table[i * width + j]);
    (distance, script)
}

/// `ed(x[1..i], y[1..j])` for every prefix pair, row-major with row length
/// `|y| + 1`.
pub fn distance_table(x: &InputString, y: &InputString) -> Vec<u32> {
    let (n, m) = (x.len(), y.len());
    let width = m + 1;
    let mut table = vec![0u32; (n + 1) * width];
    for (j, cell) in table[..width].iter_mut().enumerate() {
        *cell = j as u32;
    }
    for i in 1..=n {
        let xi = x.at(i);
        table[i * width] = i as u32;
        for j in 1..=m {
            let diag = table[(i - 1) * width + j - 1] + u32::from(xi != y.at(j));
            let up = table[(i - 1) * width + j] + 1;
            let left = table[i * width + j - 1] + 1;
            table[i * width + j] = diag.min(up).min(left);
        }
    }
    table
}

/// Distance only, in two rows of memory.
pub fn edit_distance_value(x: &InputString, y: &InputString) -> usize {
    let (xs, ys) = (x.as_slice(), y.as_slice());
    let mut prev: Vec<u32> = (0..=ys.len() as u32).collect();
    let mut cur = vec![0u32; ys.len() + 1];
    for (i, &xi) in xs.iter().enumerate() {
        cur[0] = i as u32 + 1;
        for (j, &yj) in ys.iter().enumerate() {
            let diag = prev[j] + u32::from(xi != yj);
            cur[j + 1] = diag.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[ys.len()] as usize
}

/// Banded Wagner-Fischer restricted to `|i - j| <= bound`.
///
/// Returns `None` exactly when `ed(x, y) > bound`: every script with at most
/// `bound` edits keeps its matched pairs inside the band.
pub fn edit_distance_banded(
    x: &InputString,
    y: &InputString,
    bound: usize,
) -> Option<(usize, EditScript)> {
    let (n, m) = (x.len(), y.len());
    if n.abs_diff(m) > bound {
        return None;
    }
    let band = Band::new(bound);
    let mut table = vec![INF; (n + 1) * band.width];
    for i in 0..=n {
        let xi = x.at(i.max(1));
        for j in band.columns(i, m) {
            let value = if i == 0 {
                j as u32
            } else if j == 0 {
                i as u32
            } else {
                let diag = band.get(&table, i - 1, j - 1) + u32::from(xi != y.at(j));
                let up = band.get(&table, i - 1, j) + 1;
                let left = band.get(&table, i, j - 1) + 1;
                diag.min(up).min(left)
            };
            table[band.index(i, j)] = value;
        }
    }
    let distance = band.get(&table, n, m) as usize;
    if distance > bound {
        return None;
    }
    let script = traceback(x, y, |i, j| band.get(&table, i, j));
    Some((distance, script))
}

#[derive(Clone, Copy)]
struct Band {
    bound: usize,
    width: usize,
}

impl Band {
    fn new(bound: usize) -> Self {
        Self { bound, width: 2 * bound + 1 }
    }

    fn columns(&self, i: usize, m: usize) -> std::ops::RangeInclusive<usize> {
        i.saturating_sub(self.bound)..=(i + self.bound).min(m)
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.bound - i)
    }

    #[inline]
    fn get(&self, table: &[u32], i: usize, j: usize) -> u32 {
        if i.abs_diff(j) > self.bound {
            INF
        } else {
            table[self.index(i, j)]
        }
    }
}

fn traceback(x: &InputString, y: &InputString, d: impl Fn(usize, usize) -> u32) -> EditScript {
    let (mut i, mut j) = (x.len(), y.len());
    let mut ops = Vec::new();
    while i > 0 || j > 0 {
        let here = d(i, j);
        if i > 0 && j > 0 {
            let diag = d(i - 1, j - 1);
            if x.at(i) == y.at(j) && here == diag {
                i -= 1;
                j -= 1;
                continue;
            }
            if here == diag + 1 {
                ops.push(EditOp::Substitute { position: i, symbol: y.at(j) });
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && here == d(i - 1, j) + 1 {
            ops.push(EditOp::Delete { position: i });
            i -= 1;
        } else {
            debug_assert!(j > 0 && here == d(i, j - 1) + 1);
            ops.push(EditOp::Insert { position: i + 1, symbol: y.at(j) });
            j -= 1;
        }
    }
    EditScript::new(ops)
}

/// Length of a longest common subsequence.
pub fn lcs_length(x: &InputString, y: &InputString) -> usize {
    let (xs, ys) = (x.as_slice(), y.as_slice());
    let mut prev = vec![0u32; ys.len() + 1];
    let mut cur = vec![0u32; ys.len() + 1];
    for &xi in xs {
        for (j, &yj) in ys.iter().enumerate() {
            cur[j + 1] = if xi == yj {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[ys.len()] as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strings::apply_script;
    use rand::distributions::uniform::SampleRange;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(text: &str) -> InputString {
        InputString::from_ascii(text)
    }

    fn random_string(rng: &mut impl Rng, len: impl SampleRange<usize>, sigma: u32) -> InputString {
        let len = rng.gen_range(len);
        InputString::new((0..len).map(|_| rng.gen_range(0..sigma)).collect())
    }

    /// Exhaustive recursion over every edit at the first position; independent
    /// of the table-based implementations.
    fn naive(x: &[u32], y: &[u32]) -> usize {
        match (x.split_first(), y.split_first()) {
            (None, _) => y.len(),
            (_, None) => x.len(),
            (Some((a, xr)), Some((b, yr))) => {
                let sub = naive(xr, yr) + usize::from(a != b);
                sub.min(naive(xr, y) + 1).min(naive(x, yr) + 1)
            }
        }
    }

    #[test]
    fn identity_case() {
        let (d, script) = edit_distance(&s("abc"), &s("abc"));
        assert_eq!(d, 0);
        assert!(script.is_empty());
    }

    #[test]
    fn classic_pairs() {
        assert_eq!(edit_distance(&s("kitten"), &s("sitting")).0, 3);
        assert_eq!(edit_distance(&s(""), &s("abc")).0, 3);
        assert_eq!(edit_distance(&s("abc"), &s("")).0, 3);
        assert_eq!(edit_distance(&s("ba"), &s("ab")).0, 2);
    }

    #[test]
    fn agrees_with_naive_recursion() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let x = random_string(&mut rng, 0..7, 3);
            let y = random_string(&mut rng, 0..7, 3);
            let expected = naive(x.as_slice(), y.as_slice());
            let (d, script) = edit_distance(&x, &y);
            assert_eq!(d, expected);
            assert_eq!(edit_distance_value(&x, &y), expected);
            assert_eq!(script.len(), d);
            assert_eq!(apply_script(&x, &script).unwrap(), y);
        }
    }

    #[test]
    fn banded_matches_full_table() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..400 {
            let x = random_string(&mut rng, 0..30, 3);
            let y = random_string(&mut rng, 0..30, 3);
            let exact = edit_distance_value(&x, &y);
            for bound in [0usize, 1, 3, 8, 40] {
                match edit_distance_banded(&x, &y, bound) {
                    Some((d, script)) => {
                        assert!(exact <= bound);
                        assert_eq!(d, exact);
                        assert_eq!(script.len(), d);
                        assert_eq!(apply_script(&x, &script).unwrap(), y);
                    }
                    None => assert!(exact > bound),
                }
            }
        }
    }

    #[test]
    fn lcs_examples() {
        assert_eq!(lcs_length(&s("ab"), &s("ab")), 2);
        assert_eq!(lcs_length(&s("ab"), &s("ba")), 1);
        assert_eq!(lcs_length(&s("ab"), &s("")), 0);
        assert_eq!(lcs_length(&s("abcbdab"), &s("bdcaba")), 4);
    }

    /// Brute force over all subsequences of x.
    #[test]
    fn lcs_matches_subsequence_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let x = random_string(&mut rng, 0..9, 3);
            let y = random_string(&mut rng, 0..9, 3);
            let xs = x.as_slice();
            let mut best = 0;
            for mask in 0u32..(1 << xs.len()) {
                let sub: Vec<u32> = (0..xs.len()).filter(|b| mask >> b & 1 == 1).map(|b| xs[b]).collect();
                let mut it = y.as_slice().iter();
                if sub.iter().all(|c| it.any(|d| d == c)) {
                    best = best.max(sub.len());
                }
            }
            assert_eq!(lcs_length(&x, &y), best);
        }
    }
}
