//! One walk's sketch: a segment tree over the walk output, every node
//! summarised by a 6-tuple, all tuples folded into a difference digest.
//!
//! The encoder is streaming: characters are pushed one at a time and the
//! walk advances whenever its cursor sits on the newest character. The
//! decoder subtracts two digests, learns which tree nodes differ and walks
//! down from the root to split the pre-images, turning every agreeing
//! subtree into matched pairs and every differing leaf into a literal
//! character.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::recovery::{Decoded, DiffSketch, RecoveryError, RecoveryParams, Sign, SparseDiff, TupleKey};
use crate::rolling_hash::{HashError, HashParams};
use crate::strings::{Alphabet, InputString, Matching, Symbol, PAD};
use crate::walk::{Coins, WalkRandomness};

/// Full binary tree over `m` output positions, `m` a power of two.
///
/// Node `(i, j)` at depth `i` covers positions
/// `1 + (j - 1)·m/2^i ..= j·m/2^i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeShape {
    m: usize,
    depth: u32,
}

impl TreeShape {
    /// Tree for strings of length `n`: `m` is the smallest power of two
    /// that is at least `3n`.
    pub fn for_length(n: usize) -> Self {
        Self::with_steps((3 * n).max(1).next_power_of_two()).expect("power of two")
    }

    pub fn with_steps(m: usize) -> Option<Self> {
        m.is_power_of_two().then(|| Self { m, depth: m.trailing_zeros() })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn node_count(&self) -> usize {
        2 * self.m - 1
    }

    pub fn segment(&self, depth: u32, index: usize) -> (usize, usize) {
        let width = self.m >> depth;
        (1 + (index - 1) * width, index * width)
    }
}

/// Everything both parties must agree on for one walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkSketchParams {
    n: usize,
    shape: TreeShape,
    coins: WalkRandomness,
    hash: HashParams,
    recovery: RecoveryParams,
}

impl WalkSketchParams {
    /// `capacity` is the digest's Δ; `eta` the walk's failure budget, of
    /// which `eta / (2(d+1)m)` goes to segment-hash collisions.
    pub fn new(n: usize, capacity: usize, eta: f64, seed: u128, walk_index: u64) -> Result<Self, HashError> {
        let shape = TreeShape::for_length(n);
        let collision = eta / (2.0 * f64::from(shape.depth + 1) * shape.m as f64);
        let hash = HashParams::derive(seed, walk_index, 1 << 32, shape.m, collision)?;
        Ok(Self {
            n,
            shape,
            coins: WalkRandomness::new(seed, walk_index),
            hash,
            recovery: RecoveryParams::for_walk(capacity, seed, walk_index),
        })
    }

    /// `Δ = 6(d+1)·c_walk·k²`.
    pub fn capacity_for(n: usize, k: usize, c_walk: usize) -> usize {
        let depth = TreeShape::for_length(n).depth as usize;
        6 * (depth + 1) * c_walk * k * k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn shape(&self) -> TreeShape {
        self.shape
    }

    pub fn coins(&self) -> WalkRandomness {
        self.coins
    }

    pub fn hash(&self) -> HashParams {
        self.hash
    }

    pub fn recovery(&self) -> RecoveryParams {
        self.recovery
    }

    /// Serialized size of one [`WalkSketch`].
    pub fn encoded_len(&self) -> usize {
        4 + self.recovery.encoded_len()
    }
}

/// Receiver of the tuples an encoder emits.
pub trait TupleSink {
    fn accept(&mut self, key: TupleKey);
}

impl TupleSink for DiffSketch {
    fn accept(&mut self, key: TupleKey) {
        self.insert(&key);
    }
}

impl TupleSink for Vec<TupleKey> {
    fn accept(&mut self, key: TupleKey) {
        self.push(key);
    }
}

#[derive(Debug, Clone, Copy)]
struct OpenNode {
    level: u32,
    hash: u64,
    first: usize,
    last: usize,
    alpha: bool,
    beta: bool,
}

/// Streaming encoder for one walk.
#[derive(Debug, Clone)]
pub struct WalkEncoder<S: TupleSink> {
    params: WalkSketchParams,
    sink: S,
    // base^(2^level), the scale for merging two nodes of that level.
    scales: Vec<u64>,
    stack: Vec<OpenNode>,
    received: usize,
    cursor: usize,
    prev_cursor: usize,
    step: usize,
}

impl WalkEncoder<DiffSketch> {
    pub fn new(params: WalkSketchParams) -> Self {
        Self::with_sink(params, DiffSketch::new(params.recovery))
    }

    pub fn finish(mut self) -> WalkSketch {
        let total_len = self.run_out();
        WalkSketch { total_len: total_len as u32, digest: self.sink }
    }
}

impl<S: TupleSink> WalkEncoder<S> {
    pub fn with_sink(params: WalkSketchParams, sink: S) -> Self {
        let mut scales = Vec::with_capacity(params.shape.depth as usize + 1);
        let mut s = params.hash.base();
        for _ in 0..=params.shape.depth {
            scales.push(s);
            s = params.hash.mul(s, s);
        }
        Self {
            params,
            sink,
            scales,
            stack: Vec::with_capacity(params.shape.depth as usize + 2),
            received: 0,
            cursor: 1,
            prev_cursor: 0,
            step: 0,
        }
    }

    /// Feeds the next character of the string.
    pub fn push(&mut self, c: Symbol) {
        self.received += 1;
        while self.cursor == self.received && self.step < self.params.shape.m {
            self.advance(c);
        }
    }

    pub fn push_all(&mut self, s: &[Symbol]) {
        for &c in s {
            self.push(c);
        }
    }

    /// Completes the walk over the zero padding and returns the sink with
    /// the total pre-image length.
    pub fn finish_into(mut self) -> (usize, S) {
        let total_len = self.run_out();
        (total_len, self.sink)
    }

    fn run_out(&mut self) -> usize {
        while self.step < self.params.shape.m {
            self.advance(PAD);
        }
        let root = self.stack[0];
        root.last - root.first + 1
    }

    fn advance(&mut self, c: Symbol) {
        let m = self.params.shape.m;
        self.step += 1;
        let t = self.step;
        let p = self.cursor;
        let next = p + usize::from(self.params.coins.coin(t as u64, c));
        let leaf = OpenNode {
            level: 0,
            hash: u64::from(c),
            first: p,
            last: p,
            alpha: t > 1 && self.prev_cursor == p,
            beta: t < m && next == p,
        };
        self.prev_cursor = p;
        self.cursor = next;
        self.emit(leaf, t);
        self.stack.push(leaf);
        while let [.., left, right] = self.stack[..] {
            if left.level != right.level {
                break;
            }
            self.stack.truncate(self.stack.len() - 2);
            let level = left.level + 1;
            let hash = self.params.hash.add(left.hash, self.params.hash.mul(right.hash, self.scales[left.level as usize]));
            let node = OpenNode {
                level,
                hash,
                first: left.first,
                last: right.last,
                alpha: left.alpha,
                beta: right.beta,
            };
            self.emit(node, t);
            self.stack.push(node);
        }
    }

    fn emit(&mut self, node: OpenNode, end: usize) {
        self.sink.accept(TupleKey {
            depth: (self.params.shape.depth - node.level) as u8,
            index: (end >> node.level) as u32,
            hash: node.hash,
            length: (node.last - node.first + 1) as u32,
            alpha: node.alpha,
            beta: node.beta,
        });
    }
}

/// All tuples of one string's tree, in emission order.
pub fn segment_tuples(s: &InputString, params: &WalkSketchParams) -> Vec<TupleKey> {
    let mut enc = WalkEncoder::with_sink(*params, Vec::with_capacity(params.shape.node_count()));
    enc.push_all(s.as_slice());
    enc.finish_into().1
}

/// What one party sends for one walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkSketch {
    pub total_len: u32,
    pub digest: DiffSketch,
}

pub fn encode_walk(s: &InputString, params: &WalkSketchParams) -> WalkSketch {
    let mut enc = WalkEncoder::new(*params);
    enc.push_all(s.as_slice());
    enc.finish()
}

impl WalkSketch {
    pub fn encoded_len(&self) -> usize {
        4 + self.digest.encoded_len()
    }

    pub fn write_to(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.total_len.to_le_bytes());
        self.digest.write_to(out);
    }

    pub fn read_from(bytes: &[u8]) -> Result<(Self, usize), RecoveryError> {
        let head = bytes.get(..4).ok_or(RecoveryError::Malformed("missing pre-image length"))?;
        let total_len = u32::from_le_bytes(head.try_into().unwrap());
        let (digest, used) = DiffSketch::read_from(&bytes[4..])?;
        Ok((Self { total_len, digest }, 4 + used))
    }
}

/// A matching plus the literal characters of positions it leaves
/// unmatched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectiveAlignment {
    pub n: usize,
    pub edges: Matching,
    pub g_x: BTreeMap<usize, Symbol>,
    pub g_y: BTreeMap<usize, Symbol>,
}

impl EffectiveAlignment {
    /// The alignment of a string with itself.
    pub fn identity(n: usize) -> Self {
        Self { n, edges: Matching::identity(n), g_x: BTreeMap::new(), g_y: BTreeMap::new() }
    }

    /// Whether the alignment agrees with the actual strings.
    pub fn agrees_with(&self, x: &InputString, y: &InputString) -> bool {
        self.edges.respects(x, y)
            && self.g_x.iter().all(|(&p, &c)| x.at(p) == c)
            && self.g_y.iter().all(|(&q, &c)| y.at(q) == c)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WalkDecodeError {
    #[error("walk stopped inside x: pre-image length {len} < {n}")]
    ShortX { len: usize, n: usize },
    #[error("walk stopped inside y: pre-image length {len} < {n}")]
    ShortY { len: usize, n: usize },
    #[error("difference digest did not decode")]
    DigestFail,
    #[error("sketches were built with different parameters")]
    ParamMismatch,
    #[error("decoded difference is inconsistent: {0}")]
    Corrupt(&'static str),
}

#[derive(Clone, Copy)]
struct NodePair {
    x: TupleKey,
    y: TupleKey,
}

struct Dfs<'a> {
    n: usize,
    depth: u8,
    marked: &'a Marked,
    alphabet: Option<Alphabet>,
    edges: Vec<(usize, usize)>,
    g_x: Vec<Option<Symbol>>,
    g_y: Vec<Option<Symbol>>,
    visits: usize,
}

/// Differing nodes, looked up by heap position `2^depth + index - 1`.
struct Marked {
    slot: Vec<u32>,
    pairs: Vec<NodePair>,
}

impl Marked {
    fn get(&self, (depth, index): (u8, u32)) -> Option<NodePair> {
        let at = (1usize << depth) + index as usize - 1;
        match self.slot[at] {
            u32::MAX => None,
            s => Some(self.pairs[s as usize]),
        }
    }

    fn len(&self) -> usize {
        self.pairs.len()
    }
}

impl Dfs<'_> {
    fn node(&mut self, i: u8, j: u32, sx: usize, ex: usize, sy: usize, ey: usize) -> Result<(), WalkDecodeError> {
        use WalkDecodeError::Corrupt;
        if sx > ex || sy > ey || sx == 0 || sy == 0 {
            return Err(Corrupt("empty pre-image range"));
        }
        let Some(pair) = self.marked.get((i, j)) else {
            if ex - sx != ey - sy {
                return Err(Corrupt("agreeing segment with unequal pre-images"));
            }
            let n = self.n;
            let both = (ex.min(n) + 1).saturating_sub(sx).min((ey.min(n) + 1).saturating_sub(sy));
            self.edges.extend((0..both).map(|o| (sx + o, sy + o)));
            for o in both..=ex - sx {
                let (p, q) = (sx + o, sy + o);
                if p <= n {
                    record(&mut self.g_x, p, PAD)?;
                }
                if q <= n {
                    record(&mut self.g_y, q, PAD)?;
                }
            }
            return Ok(());
        };
        self.visits += 1;
        if self.visits > self.marked.len() {
            return Err(Corrupt("revisited a marked node"));
        }
        if i == self.depth {
            if sx != ex || sy != ey {
                return Err(Corrupt("leaf with multi-character pre-image"));
            }
            let cx = self.symbol(pair.x.hash)?;
            let cy = self.symbol(pair.y.hash)?;
            if sx <= self.n {
                record(&mut self.g_x, sx, cx)?;
            }
            if sy <= self.n {
                record(&mut self.g_y, sy, cy)?;
            }
            return Ok(());
        }
        let (left, right) = ((i + 1, 2 * j - 1), (i + 1, 2 * j));
        if let Some(l) = self.marked.get(left) {
            let mx = (sx + l.x.length as usize).checked_sub(1).ok_or(Corrupt("zero length"))?;
            let my = (sy + l.y.length as usize).checked_sub(1).ok_or(Corrupt("zero length"))?;
            let (ox, oy) = (usize::from(!l.x.beta), usize::from(!l.y.beta));
            self.node(left.0, left.1, sx, mx, sy, my)?;
            self.node(right.0, right.1, mx + ox, ex, my + oy, ey)
        } else if let Some(r) = self.marked.get(right) {
            let mx = (ex + 1).checked_sub(r.x.length as usize).ok_or(Corrupt("right child too long"))?;
            let my = (ey + 1).checked_sub(r.y.length as usize).ok_or(Corrupt("right child too long"))?;
            let (ox, oy) = (usize::from(!r.x.alpha), usize::from(!r.y.alpha));
            let lx = mx.checked_sub(ox).ok_or(Corrupt("left child empty"))?;
            let ly = my.checked_sub(oy).ok_or(Corrupt("left child empty"))?;
            self.node(left.0, left.1, sx, lx, sy, ly)?;
            self.node(right.0, right.1, mx, ex, my, ey)
        } else {
            Err(WalkDecodeError::Corrupt("marked node with two agreeing children"))
        }
    }

    fn symbol(&self, hash: u64) -> Result<Symbol, WalkDecodeError> {
        let c = Symbol::try_from(hash).map_err(|_| WalkDecodeError::Corrupt("leaf symbol out of range"))?;
        match self.alphabet {
            Some(a) if !a.contains(c) => Err(WalkDecodeError::Corrupt("leaf symbol out of range")),
            _ => Ok(c),
        }
    }
}

fn record(map: &mut [Option<Symbol>], pos: usize, c: Symbol) -> Result<(), WalkDecodeError> {
    match map[pos].replace(c) {
        Some(old) if old != c => Err(WalkDecodeError::Corrupt("two symbols for one position")),
        _ => Ok(()),
    }
}

/// Referee-side decoding of one walk into an effective alignment.
///
/// `alphabet`, when known, lets the decoder reject leaf symbols outside it.
pub fn decode_walk(
    params: &WalkSketchParams,
    sx: &WalkSketch,
    sy: &WalkSketch,
    alphabet: Option<Alphabet>,
) -> Result<EffectiveAlignment, WalkDecodeError> {
    let n = params.n;
    let (lx, ly) = (sx.total_len as usize, sy.total_len as usize);
    if lx < n {
        return Err(WalkDecodeError::ShortX { len: lx, n });
    }
    if ly < n {
        return Err(WalkDecodeError::ShortY { len: ly, n });
    }
    if *sx.digest.params() != params.recovery || *sy.digest.params() != params.recovery {
        return Err(WalkDecodeError::ParamMismatch);
    }
    let diff = sx.digest.subtract(&sy.digest).map_err(|_| WalkDecodeError::ParamMismatch)?;
    alignment_from(params, lx, ly, diff.into_decoded(), alphabet)
}

/// Encodes and decodes one walk of both strings in memory.
///
/// Both encoders emit tree nodes in the same order, so the difference digest
/// is built from the tuples that differ node by node. By linearity it equals,
/// cell for cell, the difference of the two parties' digests, and the result
/// is the one [`decode_walk`] would return.
pub fn simulate_walk(
    params: &WalkSketchParams,
    x: &InputString,
    y: &InputString,
    alphabet: Option<Alphabet>,
) -> Result<EffectiveAlignment, WalkDecodeError> {
    let run = |s: &InputString| {
        let mut enc = WalkEncoder::with_sink(*params, Vec::with_capacity(params.shape.node_count()));
        enc.push_all(s.as_slice());
        enc.finish_into()
    };
    let ((lx, tx), (ly, ty)) = (run(x), run(y));
    if lx < params.n {
        return Err(WalkDecodeError::ShortX { len: lx, n: params.n });
    }
    if ly < params.n {
        return Err(WalkDecodeError::ShortY { len: ly, n: params.n });
    }
    let differing: Vec<_> = tx.iter().zip(&ty).filter(|(a, b)| a != b).collect();
    debug_assert!(tx.iter().zip(&ty).all(|(a, b)| (a.depth, a.index) == (b.depth, b.index)));
    // Peeling more than `capacity` keys is reported as a failure anyway.
    if 2 * differing.len() > params.recovery.capacity() {
        return Err(WalkDecodeError::DigestFail);
    }
    let mut diff = SparseDiff::new(params.recovery);
    for (a, b) in differing {
        diff.insert(a);
        diff.remove(b);
    }
    let decoded = diff.decode();
    alignment_from(params, lx, ly, decoded, alphabet)
}

fn alignment_from(
    params: &WalkSketchParams,
    lx: usize,
    ly: usize,
    decoded: Decoded,
    alphabet: Option<Alphabet>,
) -> Result<EffectiveAlignment, WalkDecodeError> {
    let n = params.n;
    let Decoded::Recovered(keys) = decoded else {
        return Err(WalkDecodeError::DigestFail);
    };
    let marked = pair_up(&keys, params.shape)?;
    let mut dfs = Dfs {
        n,
        depth: params.shape.depth as u8,
        marked: &marked,
        alphabet,
        edges: Vec::with_capacity(n),
        g_x: vec![None; n + 1],
        g_y: vec![None; n + 1],
        visits: 0,
    };
    dfs.node(0, 1, 1, lx, 1, ly)?;
    let Dfs { edges, mut g_x, mut g_y, .. } = dfs;
    let edges = Matching::new(edges).ok_or(WalkDecodeError::Corrupt("intersecting edges"))?;
    let (mut cover_x, mut cover_y) = (vec![false; n + 1], vec![false; n + 1]);
    for &(p, q) in edges.edges() {
        g_x[p] = None;
        g_y[q] = None;
        cover_x[p] = true;
        cover_y[q] = true;
    }
    let covered = |g: &[Option<Symbol>], cover: &[bool]| (1..=n).all(|p| cover[p] || g[p].is_some());
    if !covered(&g_x, &cover_x) || !covered(&g_y, &cover_y) {
        return Err(WalkDecodeError::Corrupt("alignment leaves positions uncovered"));
    }
    let literal = |g: Vec<Option<Symbol>>| -> BTreeMap<usize, Symbol> {
        g.into_iter().enumerate().filter_map(|(p, c)| Some((p, c?))).collect()
    };
    Ok(EffectiveAlignment { n, edges, g_x: literal(g_x), g_y: literal(g_y) })
}

fn pair_up(keys: &[(TupleKey, Sign)], shape: TreeShape) -> Result<Marked, WalkDecodeError> {
    let mut slot = vec![u32::MAX; 2 * shape.m];
    let mut sides: Vec<(Option<TupleKey>, Option<TupleKey>)> = Vec::new();
    for &(key, sign) in keys {
        let depth = u32::from(key.depth);
        if depth > shape.depth || key.index == 0 || u64::from(key.index) > 1u64 << depth || key.length == 0 {
            return Err(WalkDecodeError::Corrupt("tuple outside the tree"));
        }
        let at = (1usize << depth) + key.index as usize - 1;
        if slot[at] == u32::MAX {
            slot[at] = sides.len() as u32;
            sides.push((None, None));
        }
        let pair = &mut sides[slot[at] as usize];
        let side = match sign {
            Sign::Plus => &mut pair.0,
            Sign::Minus => &mut pair.1,
        };
        if side.replace(key).is_some() {
            return Err(WalkDecodeError::Corrupt("duplicate tuple for one node"));
        }
    }
    let pairs = sides
        .into_iter()
        .map(|pair| match pair {
            (Some(x), Some(y)) => Ok(NodePair { x, y }),
            _ => Err(WalkDecodeError::Corrupt("node differs on one side only")),
        })
        .collect::<Result<_, _>>()?;
    Ok(Marked { slot, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::{passes_through, preimage_of_segment, walk_pair, walk_single};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn random_string(rng: &mut impl Rng, len: usize, sigma: u32) -> InputString {
        InputString::new((0..len).map(|_| rng.gen_range(0..sigma)).collect())
    }

    fn mutate(rng: &mut impl Rng, x: &InputString, edits: usize, sigma: u32) -> InputString {
        let mut v = x.as_slice().to_vec();
        for _ in 0..edits {
            match rng.gen_range(0..3) {
                0 if !v.is_empty() => {
                    let i = rng.gen_range(0..v.len());
                    v[i] = (v[i] + 1) % sigma;
                }
                1 if !v.is_empty() => {
                    v.remove(rng.gen_range(0..v.len()));
                }
                _ => v.insert(rng.gen_range(0..=v.len()), rng.gen_range(0..sigma)),
            }
        }
        InputString::new(v)
    }

    fn params(n: usize, capacity: usize, seed: u128, walk: u64) -> WalkSketchParams {
        WalkSketchParams::new(n, capacity, 0.01, seed, walk).unwrap()
    }

    /// Tuples computed straight from a full walk trace, node by node.
    fn tuples_from_trace(s: &InputString, p: &WalkSketchParams) -> Vec<TupleKey> {
        let shape = p.shape();
        let (out, cursors) = walk_single(s, &p.coins(), shape.m());
        let mut all = Vec::new();
        for i in 0..=shape.depth() {
            for j in 1..=1usize << i {
                let (a, b) = shape.segment(i, j);
                let pre = preimage_of_segment(a, b, &cursors).unwrap();
                all.push(TupleKey {
                    depth: i as u8,
                    index: j as u32,
                    hash: p.hash().hash_of(&out[a - 1..b]).unwrap().value,
                    length: pre.len as u32,
                    alpha: pre.left_overlap,
                    beta: pre.right_overlap,
                });
            }
        }
        all.sort();
        all
    }

    #[test]
    fn tree_shape() {
        let t = TreeShape::for_length(100);
        assert_eq!((t.m(), t.depth()), (512, 9));
        assert_eq!(t.segment(0, 1), (1, 512));
        assert_eq!(t.segment(9, 3), (3, 3));
        assert_eq!(t.segment(1, 2), (257, 512));
        assert_eq!(TreeShape::for_length(0).m(), 1);
        assert!(TreeShape::with_steps(12).is_none());
    }

    #[test]
    fn streaming_tuples_match_trace_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for trial in 0..30 {
            let n = rng.gen_range(1..60);
            let s = random_string(&mut rng, n, 4);
            let p = params(n, 8, 77, trial);
            let mut streamed = segment_tuples(&s, &p);
            streamed.sort();
            assert_eq!(streamed, tuples_from_trace(&s, &p));
        }
    }

    #[test]
    fn total_len_is_final_cursor() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = random_string(&mut rng, 50, 3);
        let p = params(50, 8, 3, 0);
        let (_, cursors) = walk_single(&s, &p.coins(), p.shape().m());
        assert_eq!(encode_walk(&s, &p).total_len as usize, cursors[p.shape().m() - 1]);
    }

    #[test]
    fn equal_strings_give_identical_sketches() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = random_string(&mut rng, 200, 4);
        let p = params(200, 50, 9, 4);
        let (a, b) = (encode_walk(&s, &p), encode_walk(&s.clone(), &p));
        assert_eq!(a, b);
        assert_eq!(decode_walk(&p, &a, &b, None).unwrap(), EffectiveAlignment::identity(200));
    }

    #[test]
    fn serialization_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = random_string(&mut rng, 40, 4);
        let p = params(40, 20, 1, 1);
        let sk = encode_walk(&s, &p);
        let mut bytes = Vec::new();
        sk.write_to(&mut bytes);
        assert_eq!(bytes.len(), p.encoded_len());
        assert_eq!(WalkSketch::read_from(&bytes).unwrap(), (sk, bytes.len()));
    }

    #[test]
    fn tuple_difference_bounded_by_progress_steps() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..100 {
            let x = random_string(&mut rng, 300, 4);
            let edits = rng.gen_range(1..4);
            let y = mutate(&mut rng, &x, edits, 4);
            let n = x.len().max(y.len());
            let p = params(n, 8, 11, trial);
            let tx: HashSet<_> = segment_tuples(&x, &p).into_iter().collect();
            let ty: HashSet<_> = segment_tuples(&y, &p).into_iter().collect();
            let diff = tx.symmetric_difference(&ty).count();
            let trace = walk_pair(&x, &y, &p.coins(), p.shape().m());
            let bound = 2 * 3 * (p.shape().depth() as usize + 1) * trace.progress_steps();
            assert!(diff <= bound, "{diff} > {bound}");
        }
    }

    #[test]
    fn decoded_alignment_is_consistent_with_walk() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut decoded = 0;
        for trial in 0..200 {
            let n = 400;
            let x = random_string(&mut rng, n, 4);
            let mut y = x.as_slice().to_vec();
            let i = rng.gen_range(0..n);
            y[i] = (y[i] + 1 + rng.gen_range(0..3)) % 4;
            let y = InputString::new(y);
            let capacity = WalkSketchParams::capacity_for(n, 1, 8);
            let p = params(n, capacity, 21, trial);
            let (sx, sy) = (encode_walk(&x, &p), encode_walk(&y, &p));
            let trace = walk_pair(&x, &y, &p.coins(), p.shape().m());
            match decode_walk(&p, &sx, &sy, Some(Alphabet::new(4).unwrap())) {
                Ok(a) => {
                    decoded += 1;
                    assert!(a.agrees_with(&x, &y));
                    for &e in a.edges.edges() {
                        assert!(passes_through(&trace, e));
                    }
                    assert!(!a.edges.contains((i + 1, i + 1)));
                }
                Err(e) => assert!(
                    !trace.walks_through(n, n) || trace.progress_steps() > 8,
                    "{e} with {} progress steps",
                    trace.progress_steps()
                ),
            }
        }
        assert!(decoded >= 180, "{decoded}");
    }

    #[test]
    fn shifted_strings_decode() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 250;
        let mut ok = 0;
        for trial in 0..100 {
            let x = random_string(&mut rng, n, 3);
            let mut v = x.as_slice().to_vec();
            v.remove(rng.gen_range(0..n));
            v.insert(rng.gen_range(0..n), rng.gen_range(0..3));
            let y = InputString::new(v);
            let p = params(n, WalkSketchParams::capacity_for(n, 2, 8), 5, trial);
            if let Ok(a) = decode_walk(&p, &encode_walk(&x, &p), &encode_walk(&y, &p), None) {
                ok += 1;
                assert!(a.agrees_with(&x, &y));
                assert!(a.g_x.keys().chain(a.g_y.keys()).all(|&q| (1..=n).contains(&q)));
            }
        }
        assert!(ok >= 80, "{ok}");
    }

    #[test]
    fn far_strings_fail() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 500;
        let mut errors = 0;
        for trial in 0..50 {
            let x = random_string(&mut rng, n, 4);
            let y = random_string(&mut rng, n, 4);
            let p = params(n, WalkSketchParams::capacity_for(n, 2, 8), 8, trial);
            errors += usize::from(decode_walk(&p, &encode_walk(&x, &p), &encode_walk(&y, &p), None).is_err());
        }
        assert_eq!(errors, 50);
    }

    #[test]
    fn simulation_matches_two_party_decoding() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 300;
        for trial in 0..40 {
            let x = random_string(&mut rng, n, 4);
            let y = match trial % 4 {
                0 => x.clone(),
                1 => random_string(&mut rng, n, 4),
                _ => {
                    let mut v = x.as_slice().to_vec();
                    v.remove(rng.gen_range(0..n));
                    v.insert(rng.gen_range(0..n), rng.gen_range(0..4));
                    InputString::new(v)
                }
            };
            let p = params(n, WalkSketchParams::capacity_for(n, 1, 8), 4, trial);
            let (sx, sy) = (encode_walk(&x, &p), encode_walk(&y, &p));
            assert_eq!(simulate_walk(&p, &x, &y, None), decode_walk(&p, &sx, &sy, None));
        }
    }

    #[test]
    fn short_walk_is_reported() {
        let p = params(4, 8, 0, 0);
        let x = InputString::new(vec![1, 2, 3, 1]);
        let mut sx = encode_walk(&x, &p);
        let sy = sx.clone();
        sx.total_len = 3;
        assert_eq!(decode_walk(&p, &sx, &sy, None), Err(WalkDecodeError::ShortX { len: 3, n: 4 }));
    }
}
