use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{trial_rng, LabError};
use crate::strings::{
    apply_script, edit_distance_banded, edit_distance_value, Alphabet, EditOp, EditScript, InputString, Symbol,
};

/// Instance families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum Generator {
    /// `x` uniform, `y` is `x` after exactly `edits` planted edits that keep
    /// the length; the planted count is the true distance.
    RandomEdits { edits: usize },
    /// Two uniform strings.
    Independent,
    /// `x = A c B c d^2k A c`, `y = B c d^2k A c B c` with `c = c_1..c_{k-1}`.
    PeriodicAdversarial { k: usize },
    /// Weight-`K` bit vectors at Hamming distance `d`, every bit expanded to
    /// a `6N`-symbol binary block; `ed = 2 Ham`.
    HammingReductionBinary { bits: usize, d: usize },
    /// Bit `i` becomes the symbol `2i - X_i`; `ed = Ham`.
    HammingReductionLarge { bits: usize, d: usize },
    /// `x = y`, a random block of `period` symbols repeated, with
    /// `singletons` positions overwritten by symbols used nowhere else.
    /// Each overwrite leaves two more characters unmatched by the
    /// self-matching `(i + period, i)`, on top of the `2·period` at the ends.
    SelfSimilar { period: usize, singletons: usize },
}

impl Generator {
    /// Length forced by the construction, if any.
    pub fn natural_length(&self) -> Option<usize> {
        match *self {
            Generator::PeriodicAdversarial { k } => Some(5 * k),
            Generator::HammingReductionBinary { bits, .. } => Some(6 * bits * bits),
            Generator::HammingReductionLarge { bits, .. } => Some(bits),
            _ => None,
        }
    }

    /// Smallest alphabet the construction fits in.
    pub fn min_alphabet(&self) -> u64 {
        match *self {
            Generator::RandomEdits { .. } | Generator::Independent | Generator::HammingReductionBinary { .. } => 2,
            Generator::PeriodicAdversarial { k } => k as u64 + 3,
            Generator::HammingReductionLarge { bits, .. } => 2 * bits as u64 + 1,
            Generator::SelfSimilar { singletons, .. } => 4 + singletons as u64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    #[serde(flatten)]
    pub generator: Generator,
    pub n: usize,
    pub alphabet: u64,
    pub seed: u64,
}

impl InstanceSpec {
    /// A spec with the generator's natural length (or `n`) and smallest
    /// sufficient alphabet (at least `alphabet`).
    pub fn new(generator: Generator, n: usize, alphabet: u64, seed: u64) -> Self {
        Self {
            generator,
            n: generator.natural_length().unwrap_or(n),
            alphabet: alphabet.max(generator.min_alphabet()),
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub x: InputString,
    pub y: InputString,
    pub alphabet: Alphabet,
    pub planted: Option<EditScript>,
    pub ground_truth: Option<usize>,
}

/// Instances up to this length get an oracle distance when the
/// construction does not determine one.
pub const ORACLE_LIMIT: usize = 4096;

const RESAMPLE_LIMIT: usize = 1000;

pub fn generate(spec: &InstanceSpec) -> Result<Instance, LabError> {
    let invalid = |why: String| Err(LabError::InvalidSpec(why));
    let g = spec.generator;
    if let Some(len) = g.natural_length() {
        if spec.n != len {
            return invalid(format!("{g:?} has length {len}, not {}", spec.n));
        }
    }
    if spec.alphabet < g.min_alphabet() {
        return invalid(format!("{g:?} needs an alphabet of at least {}", g.min_alphabet()));
    }
    let alphabet = Alphabet::new(spec.alphabet).map_err(|e| LabError::InvalidSpec(e.to_string()))?;
    let sigma = Symbol::try_from(spec.alphabet).unwrap_or(Symbol::MAX);
    let mut rng = trial_rng(spec.seed, 0);
    let n = spec.n;
    let with_oracle = |x: InputString, y: InputString| {
        let truth = (n <= ORACLE_LIMIT).then(|| edit_distance_value(&x, &y));
        Instance { x, y, alphabet, planted: None, ground_truth: truth }
    };
    match g {
        Generator::RandomEdits { edits } => {
            if edits > n {
                return invalid(format!("{edits} edits do not fit in length {n}"));
            }
            for _ in 0..RESAMPLE_LIMIT {
                let x = uniform(&mut rng, n, sigma);
                let script = plant(&mut rng, &x, edits, sigma);
                let y = apply_script(&x, &script).expect("planted edits stay in range");
                if edit_distance_banded(&x, &y, edits).map(|(d, _)| d) == Some(edits) {
                    return Ok(Instance { x, y, alphabet, planted: Some(script), ground_truth: Some(edits) });
                }
            }
            invalid(format!("could not plant {edits} edits that stay optimal"))
        }
        Generator::Independent => {
            let x = uniform(&mut rng, n, sigma);
            let y = uniform(&mut rng, n, sigma);
            Ok(with_oracle(x, y))
        }
        Generator::PeriodicAdversarial { k } => {
            if k < 1 {
                return invalid("k must be at least 1".into());
            }
            let (a, b, d) = (1, 2, k as Symbol + 2);
            let c: Vec<Symbol> = (1..k as Symbol).map(|i| 2 + i).collect();
            let block = |head: Symbol| std::iter::once(head).chain(c.iter().copied());
            let run = std::iter::repeat_n(d, 2 * k);
            let x: Vec<Symbol> = block(a).chain(block(b)).chain(run.clone()).chain(block(a)).collect();
            let y: Vec<Symbol> = block(b).chain(run).chain(block(a)).chain(block(b)).collect();
            Ok(with_oracle(x.into(), y.into()))
        }
        Generator::HammingReductionBinary { bits, d } => {
            let (xb, yb) = weighted_pair(&mut rng, bits, d)?;
            let expand = |bits: &[bool]| -> InputString {
                let zero: Vec<Symbol> = block_of(bits.len(), false);
                let one: Vec<Symbol> = block_of(bits.len(), true);
                bits.iter().flat_map(|&b| if b { one.clone() } else { zero.clone() }).collect::<Vec<_>>().into()
            };
            let ham = xb.iter().zip(&yb).filter(|(a, b)| a != b).count();
            let (x, y) = (expand(&xb), expand(&yb));
            Ok(Instance { x, y, alphabet, planted: None, ground_truth: Some(2 * ham) })
        }
        Generator::HammingReductionLarge { bits, d } => {
            let (xb, yb) = weighted_pair(&mut rng, bits, d)?;
            let encode = |bits: &[bool]| -> InputString {
                bits.iter().enumerate().map(|(i, &b)| 2 * (i as Symbol + 1) - Symbol::from(b)).collect::<Vec<_>>().into()
            };
            let ham = xb.iter().zip(&yb).filter(|(a, b)| a != b).count();
            Ok(Instance { x: encode(&xb), y: encode(&yb), alphabet, planted: None, ground_truth: Some(ham) })
        }
        Generator::SelfSimilar { period, singletons } => {
            if period == 0 || singletons > n {
                return invalid("self-similar strings need a period and at most n singletons".into());
            }
            let block: Vec<Symbol> = (0..period).map(|_| rng.gen_range(1..=3)).collect();
            let mut x: Vec<Symbol> = (0..n).map(|i| block[i % period]).collect();
            for (s, at) in sample(&mut rng, n, singletons).into_iter().enumerate() {
                x[at] = 4 + s as Symbol;
            }
            let x = InputString::new(x);
            Ok(Instance { y: x.clone(), x, alphabet, planted: None, ground_truth: Some(0) })
        }
    }
}

fn uniform(rng: &mut impl Rng, n: usize, sigma: Symbol) -> InputString {
    (0..n).map(|_| rng.gen_range(0..sigma)).collect::<Vec<_>>().into()
}

/// `edits` random edits applied one after another: insertions and
/// deletions in equal number, substitutions for the rest. Needs
/// `edits <= |x|` so the string never runs empty.
fn plant(rng: &mut impl Rng, x: &InputString, edits: usize, sigma: Symbol) -> EditScript {
    let subs = edits % 2 + 2 * rng.gen_range(0..=edits / 2);
    let pairs = (edits - subs) / 2;
    let mut kinds: Vec<u8> = [vec![0; subs], vec![1; pairs], vec![2; pairs]].concat();
    for i in (1..kinds.len()).rev() {
        kinds.swap(i, rng.gen_range(0..=i));
    }
    let mut len = x.len();
    let mut current = x.as_slice().to_vec();
    let mut ops = Vec::with_capacity(edits);
    for kind in kinds {
        let op = match kind {
            0 => {
                let position = rng.gen_range(1..=len);
                let old = current[position - 1];
                let symbol = (old + rng.gen_range(1..sigma)) % sigma;
                EditOp::Substitute { position, symbol }
            }
            1 => EditOp::Insert { position: rng.gen_range(1..=len + 1), symbol: rng.gen_range(0..sigma) },
            _ => EditOp::Delete { position: rng.gen_range(1..=len) },
        };
        match op {
            EditOp::Insert { position, symbol } => {
                current.insert(position - 1, symbol);
                len += 1;
            }
            EditOp::Delete { position } => {
                current.remove(position - 1);
                len -= 1;
            }
            EditOp::Substitute { position, symbol } => current[position - 1] = symbol,
        }
        ops.push(op);
    }
    EditScript::new(ops)
}

/// `0^N 1 0^(2N-1) 1^(3N)` for a zero bit, `0^(2N-1) 1 0^N 1^(3N)` for a one.
fn block_of(bits: usize, one: bool) -> Vec<Symbol> {
    let (lead, tail) = if one { (2 * bits - 1, bits) } else { (bits, 2 * bits - 1) };
    let mut b = vec![0; lead];
    b.push(1);
    b.extend(std::iter::repeat_n(0, tail));
    b.extend(std::iter::repeat_n(1, 3 * bits));
    b
}

/// Two vectors with exactly `K = ceil(2d/3)` ones each and Hamming distance
/// the largest even value `<= d` that the weights allow.
fn weighted_pair(rng: &mut impl Rng, bits: usize, d: usize) -> Result<(Vec<bool>, Vec<bool>), LabError> {
    if bits == 0 || 8 * d > 3 * bits {
        return Err(LabError::InvalidSpec(format!("need 1 <= d <= 3N/8, got d = {d}, N = {bits}")));
    }
    let weight = (2 * d).div_ceil(3);
    let moved = (d / 2).min(weight).min(bits - weight);
    let order = sample(rng, bits, bits).into_vec();
    let (ones, zeros) = order.split_at(weight);
    let mut x = vec![false; bits];
    for &i in ones {
        x[i] = true;
    }
    let mut y = x.clone();
    for t in 0..moved {
        y[ones[t]] = false;
        y[zeros[t]] = true;
    }
    Ok((x, y))
}
