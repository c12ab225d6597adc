//! Linear sketch of a set of segment-tree tuples that recovers the signed
//! symmetric difference of two sets when it is small, and reports failure
//! otherwise.
//!
//! The sketch is an invertible Bloom lookup table: every key lands in four
//! distinct cells and each cell keeps a signed count, the XOR of
//! its keys and the XOR of their checksums. Subtracting two tables leaves
//! only the keys on which the sets differ, which are peeled off one pure
//! cell at a time. A global tag, linear in the keys, catches peelings that
//! look complete but are not.

use std::cell::RefCell;

use thiserror::Error;

use crate::mix::{derive_key, domain, fmix64};
use crate::rolling_hash::MERSENNE_61;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RecoveryError {
    #[error("sketch parameters differ: {0:?} vs {1:?}")]
    ParamMismatch(RecoveryParams, RecoveryParams),
    #[error("tuple key has non-zero padding bits")]
    BadKeyPadding,
    #[error("sketch bytes truncated or malformed: {0}")]
    Malformed(&'static str),
}

/// One segment-tree node: `(depth, index, hash, pre-image length, α, β)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TupleKey {
    pub depth: u8,
    pub index: u32,
    pub hash: u64,
    pub length: u32,
    pub alpha: bool,
    pub beta: bool,
}

type Words = [u64; 3];

impl TupleKey {
    /// Canonical width: 8 + 32 + 64 + 32 + 1 + 1 bits, padded to 144.
    pub const BYTES: usize = 18;

    /// Little-endian fields in declaration order; α is bit 0 and β bit 1 of
    /// the last byte.
    pub fn to_bytes(&self) -> [u8; Self::BYTES] {
        words_to_bytes(&self.words())
    }

    pub fn from_bytes(bytes: &[u8; Self::BYTES]) -> Result<Self, RecoveryError> {
        Self::from_words(bytes_to_words(bytes)).ok_or(RecoveryError::BadKeyPadding)
    }

    fn words(&self) -> Words {
        [
            self.hash,
            u64::from(self.index) | u64::from(self.length) << 32,
            u64::from(self.depth) | u64::from(self.alpha) << 8 | u64::from(self.beta) << 9,
        ]
    }

    fn from_words(w: Words) -> Option<Self> {
        if w[2] >> 10 != 0 {
            return None;
        }
        Some(Self {
            depth: w[2] as u8,
            index: w[1] as u32,
            hash: w[0],
            length: (w[1] >> 32) as u32,
            alpha: w[2] >> 8 & 1 == 1,
            beta: w[2] >> 9 & 1 == 1,
        })
    }
}

fn words_to_bytes(w: &Words) -> [u8; TupleKey::BYTES] {
    let mut out = [0u8; TupleKey::BYTES];
    out[0] = w[2] as u8;
    out[1..5].copy_from_slice(&(w[1] as u32).to_le_bytes());
    out[5..13].copy_from_slice(&w[0].to_le_bytes());
    out[13..17].copy_from_slice(&((w[1] >> 32) as u32).to_le_bytes());
    out[17] = (w[2] >> 8) as u8;
    out
}

fn bytes_to_words(b: &[u8; TupleKey::BYTES]) -> Words {
    let index = u32::from_le_bytes(b[1..5].try_into().unwrap());
    let hash = u64::from_le_bytes(b[5..13].try_into().unwrap());
    let length = u32::from_le_bytes(b[13..17].try_into().unwrap());
    [hash, u64::from(index) | u64::from(length) << 32, u64::from(b[0]) | u64::from(b[17]) << 8]
}

/// Which side of a difference a recovered key came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    /// Present in the minuend only.
    Plus,
    /// Present in the subtrahend only.
    Minus,
}

impl Sign {
    fn of(count: i32) -> Self {
        if count > 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn negate(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    fn unit(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecoveryParams {
    capacity: usize,
    cells: usize,
    seed: u64,
}

impl RecoveryParams {
    /// Table sized for `capacity` differences: `⌈1.4·capacity⌉ + 8` cells.
    pub fn new(capacity: usize, seed: u64) -> Self {
        let cells = (capacity as u64 * 14).div_ceil(10) as usize + 8;
        Self { capacity, cells, seed }
    }

    pub fn for_walk(capacity: usize, shared_seed: u128, walk_index: u64) -> Self {
        Self::new(capacity, derive_key(shared_seed, domain::RECOVERY, walk_index))
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Serialized size of a sketch with these parameters.
    pub fn encoded_len(&self) -> usize {
        HEADER_BYTES + self.cells * CELL_BYTES
    }

    fn fingerprint(&self, w: &Words) -> u64 {
        let h = fmix64(self.seed ^ w[0]);
        let h = fmix64(h ^ w[1].wrapping_mul(0x9e37_79b9_7f4a_7c15));
        fmix64(h ^ w[2].wrapping_mul(0xc2b2_ae3d_27d4_eb4f))
    }

    /// Four distinct cells.
    fn locations(&self, fingerprint: u64) -> [usize; HASHES] {
        let mut out = [usize::MAX; HASHES];
        let mut filled = 0;
        let mut round = 0u64;
        while filled < HASHES {
            round += 1;
            let h = fmix64(fingerprint ^ round.wrapping_mul(0xd6e8_feb8_6659_fd93));
            for half in [h & 0xffff_ffff, h >> 32] {
                let loc = ((half * self.cells as u64) >> 32) as usize;
                if filled < HASHES && !out[..filled].contains(&loc) {
                    out[filled] = loc;
                    filled += 1;
                }
            }
        }
        out
    }

    fn checksum(&self, fingerprint: u64) -> u64 {
        fmix64(fingerprint ^ 0x2545_f491_4f6c_dd1d)
    }

    fn tag_term(&self, fingerprint: u64) -> u64 {
        let h = fmix64(fingerprint ^ 0x5851_f42d_4c95_7f2d);
        let folded = (h & MERSENNE_61) + (h >> 61);
        if folded >= MERSENNE_61 {
            folded - MERSENNE_61
        } else {
            folded
        }
    }
}

fn tag_add(tag: u64, term: u64, sign: Sign) -> u64 {
    let s = match sign {
        Sign::Plus => tag + term,
        Sign::Minus => tag + MERSENNE_61 - term,
    };
    if s >= MERSENNE_61 {
        s - MERSENNE_61
    } else {
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
struct Cell {
    count: i32,
    keys: Words,
    check: u64,
}

impl Cell {
    fn apply(&mut self, w: &Words, check: u64, delta: i32) {
        self.count += delta;
        self.keys[0] ^= w[0];
        self.keys[1] ^= w[1];
        self.keys[2] ^= w[2];
        self.check ^= check;
    }

    fn is_zero(&self) -> bool {
        *self == Cell::default()
    }
}

const HASHES: usize = 4;
const HEADER_BYTES: usize = 4 + 4 + 8 + 8;
const CELL_BYTES: usize = 4 + TupleKey::BYTES + 8;

/// Result of decoding a difference sketch. Failure is an ordinary outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decoded {
    Recovered(Vec<(TupleKey, Sign)>),
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffSketch {
    params: RecoveryParams,
    cells: Vec<Cell>,
    verify_tag: u64,
}

impl DiffSketch {
    pub fn new(params: RecoveryParams) -> Self {
        Self { params, cells: vec![Cell::default(); params.cells], verify_tag: 0 }
    }

    pub fn params(&self) -> &RecoveryParams {
        &self.params
    }

    pub fn insert(&mut self, key: &TupleKey) {
        self.update(key, Sign::Plus);
    }

    pub fn remove(&mut self, key: &TupleKey) {
        self.update(key, Sign::Minus);
    }

    fn update(&mut self, key: &TupleKey, sign: Sign) {
        let w = key.words();
        let f = self.params.fingerprint(&w);
        let check = self.params.checksum(f);
        for loc in self.params.locations(f) {
            self.cells[loc].apply(&w, check, sign.unit());
        }
        self.verify_tag = tag_add(self.verify_tag, self.params.tag_term(f), sign);
    }

    /// Cell-wise `self - other`.
    pub fn subtract(&self, other: &DiffSketch) -> Result<DiffSketch, RecoveryError> {
        if self.params != other.params {
            return Err(RecoveryError::ParamMismatch(self.params, other.params));
        }
        let cells = self
            .cells
            .iter()
            .zip(&other.cells)
            .map(|(a, b)| {
                let mut c = *a;
                c.apply(&b.keys, b.check, -b.count);
                c
            })
            .collect();
        Ok(DiffSketch {
            params: self.params,
            cells,
            verify_tag: (self.verify_tag + MERSENNE_61 - other.verify_tag) % MERSENNE_61,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.verify_tag == 0 && self.cells.iter().all(Cell::is_zero)
    }

    /// Peels the signed keys out of a difference sketch. Returns
    /// [`Decoded::Fail`] when peeling stalls, the global tag disagrees, or
    /// more than `capacity` keys come out.
    pub fn decode(&self) -> Decoded {
        peel(&self.params, &mut self.cells.clone(), self.verify_tag)
    }

    /// [`decode`](Self::decode) without copying the table.
    pub fn into_decoded(mut self) -> Decoded {
        peel(&self.params, &mut self.cells, self.verify_tag)
    }

    pub fn encoded_len(&self) -> usize {
        self.params.encoded_len()
    }

    /// Header (capacity, cell count, seed, tag) followed by packed cells.
    pub fn write_to(&self, out: &mut Vec<u8>) {
        out.reserve(self.encoded_len());
        out.extend_from_slice(&(self.params.capacity as u32).to_le_bytes());
        out.extend_from_slice(&(self.params.cells as u32).to_le_bytes());
        out.extend_from_slice(&self.params.seed.to_le_bytes());
        out.extend_from_slice(&self.verify_tag.to_le_bytes());
        for c in &self.cells {
            out.extend_from_slice(&c.count.to_le_bytes());
            out.extend_from_slice(&words_to_bytes(&c.keys));
            out.extend_from_slice(&c.check.to_le_bytes());
        }
    }

    /// Parses one sketch from the front of `bytes`; returns it and the
    /// number of bytes consumed.
    pub fn read_from(bytes: &[u8]) -> Result<(Self, usize), RecoveryError> {
        let header = bytes.get(..HEADER_BYTES).ok_or(RecoveryError::Malformed("short header"))?;
        let capacity = u32::from_le_bytes(header[0..4].try_into().unwrap()) as usize;
        let cells = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
        let seed = u64::from_le_bytes(header[8..16].try_into().unwrap());
        let verify_tag = u64::from_le_bytes(header[16..24].try_into().unwrap());
        if verify_tag >= MERSENNE_61 || cells < HASHES {
            return Err(RecoveryError::Malformed("bad header values"));
        }
        let params = RecoveryParams { capacity, cells, seed };
        let total = params.encoded_len();
        let body = bytes.get(HEADER_BYTES..total).ok_or(RecoveryError::Malformed("short cell array"))?;
        let mut table = Vec::with_capacity(cells);
        for raw in body.chunks_exact(CELL_BYTES) {
            let count = i32::from_le_bytes(raw[0..4].try_into().unwrap());
            let key: &[u8; TupleKey::BYTES] = raw[4..22].try_into().unwrap();
            if key[17] >> 2 != 0 {
                return Err(RecoveryError::BadKeyPadding);
            }
            let check = u64::from_le_bytes(raw[22..30].try_into().unwrap());
            table.push(Cell { count, keys: bytes_to_words(key), check });
        }
        Ok((Self { params, cells: table, verify_tag }, total))
    }
}

/// Cell storage the peeling decoder runs on.
trait CellStore {
    fn cell(&self, i: usize) -> Cell;
    fn cell_mut(&mut self, i: usize) -> &mut Cell;
    /// Indices of cells holding exactly one key, in a fixed order.
    fn pure_candidates(&self) -> Vec<usize>;
    fn all_zero(&self) -> bool;
}

impl CellStore for Vec<Cell> {
    fn cell(&self, i: usize) -> Cell {
        self[i]
    }

    fn cell_mut(&mut self, i: usize) -> &mut Cell {
        &mut self[i]
    }

    fn pure_candidates(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self[i].count.abs() == 1).collect()
    }

    fn all_zero(&self) -> bool {
        self.iter().all(Cell::is_zero)
    }
}

impl CellStore for SparseDiff {
    fn cell(&self, i: usize) -> Cell {
        self.cells[i]
    }

    fn cell_mut(&mut self, i: usize) -> &mut Cell {
        self.touch(i)
    }

    fn pure_candidates(&self) -> Vec<usize> {
        self.touched.iter().copied().filter(|&i| self.cells[i].count.abs() == 1).collect()
    }

    fn all_zero(&self) -> bool {
        self.touched.iter().all(|&i| self.cells[i].is_zero())
    }
}

fn peel(params: &RecoveryParams, work: &mut impl CellStore, verify_tag: u64) -> Decoded {
    let mut stack = work.pure_candidates();
    let mut out = Vec::new();
    let mut tag = 0u64;
    while let Some(i) = stack.pop() {
        let cell = work.cell(i);
        if cell.count.abs() != 1 {
            continue;
        }
        let f = params.fingerprint(&cell.keys);
        if params.checksum(f) != cell.check {
            continue;
        }
        let locations = params.locations(f);
        if !locations.contains(&i) {
            return Decoded::Fail;
        }
        let Some(key) = TupleKey::from_words(cell.keys) else {
            return Decoded::Fail;
        };
        let sign = Sign::of(cell.count);
        for loc in locations {
            let c = work.cell_mut(loc);
            c.apply(&cell.keys, cell.check, -sign.unit());
            if c.count.abs() == 1 {
                stack.push(loc);
            }
        }
        tag = tag_add(tag, params.tag_term(f), sign);
        out.push((key, sign));
        if out.len() > params.cells {
            return Decoded::Fail;
        }
    }
    if !work.all_zero() || tag != verify_tag || out.len() > params.capacity {
        return Decoded::Fail;
    }
    out.sort_unstable_by_key(|(k, s)| {
        u128::from(k.depth) << 97 | u128::from(k.index) << 65 | u128::from(k.hash) << 1 | u128::from(*s == Sign::Minus)
    });
    Decoded::Recovered(out)
}

/// A difference table that remembers which cells it touched. Decodes
/// exactly like the [`DiffSketch`] holding the same signed keys, at a cost
/// proportional to the number of keys rather than the table size. Tables
/// are recycled per thread.
#[derive(Debug)]
pub struct SparseDiff {
    params: RecoveryParams,
    cells: Vec<Cell>,
    touched: Vec<usize>,
    verify_tag: u64,
}

thread_local! {
    static SPARE_TABLES: RefCell<Vec<Vec<Cell>>> = const { RefCell::new(Vec::new()) };
}

impl SparseDiff {
    pub fn new(params: RecoveryParams) -> Self {
        let mut cells = SPARE_TABLES.with(|t| t.borrow_mut().pop()).unwrap_or_default();
        cells.resize(params.cells, Cell::default());
        Self { params, cells, touched: Vec::new(), verify_tag: 0 }
    }

    pub fn insert(&mut self, key: &TupleKey) {
        self.update(key, Sign::Plus);
    }

    pub fn remove(&mut self, key: &TupleKey) {
        self.update(key, Sign::Minus);
    }

    fn touch(&mut self, i: usize) -> &mut Cell {
        if self.cells[i].is_zero() {
            self.touched.push(i);
        }
        &mut self.cells[i]
    }

    fn update(&mut self, key: &TupleKey, sign: Sign) {
        let w = key.words();
        let f = self.params.fingerprint(&w);
        let check = self.params.checksum(f);
        for loc in self.params.locations(f) {
            self.touch(loc).apply(&w, check, sign.unit());
        }
        self.verify_tag = tag_add(self.verify_tag, self.params.tag_term(f), sign);
    }

    pub fn decode(mut self) -> Decoded {
        let (params, tag) = (self.params, self.verify_tag);
        peel(&params, &mut self, tag)
    }

    pub fn to_dense(&self) -> DiffSketch {
        DiffSketch { params: self.params, cells: self.cells.clone(), verify_tag: self.verify_tag }
    }
}

impl Drop for SparseDiff {
    fn drop(&mut self) {
        for &i in &self.touched {
            self.cells[i] = Cell::default();
        }
        let cells = std::mem::take(&mut self.cells);
        SPARE_TABLES.with(|t| {
            let mut t = t.borrow_mut();
            if t.len() < 4 {
                t.push(cells);
            }
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn random_key(rng: &mut impl Rng) -> TupleKey {
        TupleKey {
            depth: rng.gen_range(0..14),
            index: rng.gen_range(1..8192),
            hash: rng.gen(),
            length: rng.gen_range(1..6000),
            alpha: rng.gen(),
            beta: rng.gen(),
        }
    }

    fn sketch_of(params: RecoveryParams, keys: &BTreeSet<TupleKey>) -> DiffSketch {
        let mut s = DiffSketch::new(params);
        for k in keys {
            s.insert(k);
        }
        s
    }

    /// Two random sets sharing `common` keys with `only_a`/`only_b` extras.
    fn set_pair(
        rng: &mut impl Rng,
        common: usize,
        only_a: usize,
        only_b: usize,
    ) -> (BTreeSet<TupleKey>, BTreeSet<TupleKey>) {
        let mut pool = BTreeSet::new();
        while pool.len() < common + only_a + only_b {
            pool.insert(random_key(rng));
        }
        let pool: Vec<_> = pool.into_iter().collect();
        let mut a: BTreeSet<_> = pool[..common].iter().copied().collect();
        let mut b = a.clone();
        a.extend(&pool[common..common + only_a]);
        b.extend(&pool[common + only_a..]);
        (a, b)
    }

    fn oracle_difference(a: &BTreeSet<TupleKey>, b: &BTreeSet<TupleKey>) -> Vec<(TupleKey, Sign)> {
        let mut d: Vec<_> = a
            .difference(b)
            .map(|&k| (k, Sign::Plus))
            .chain(b.difference(a).map(|&k| (k, Sign::Minus)))
            .collect();
        d.sort_unstable_by_key(|(k, _)| *k);
        d
    }

    #[test]
    fn key_bytes_layout() {
        let k = TupleKey { depth: 3, index: 0x0102_0304, hash: 0x1122_3344_5566_7788, length: 9, alpha: true, beta: false };
        let b = k.to_bytes();
        assert_eq!(b[0], 3);
        assert_eq!(&b[1..5], &[4, 3, 2, 1]);
        assert_eq!(&b[5..13], &[0x88, 0x77, 0x66, 0x55, 0x44, 0x33, 0x22, 0x11]);
        assert_eq!(&b[13..17], &[9, 0, 0, 0]);
        assert_eq!(b[17], 0b01);
        assert_eq!(TupleKey::from_bytes(&b).unwrap(), k);
        let mut bad = b;
        bad[17] |= 0b100;
        assert_eq!(TupleKey::from_bytes(&bad), Err(RecoveryError::BadKeyPadding));
    }

    #[test]
    fn cell_count_formula() {
        assert_eq!(RecoveryParams::new(10, 0).cells(), 22);
        assert_eq!(RecoveryParams::new(0, 0).cells(), 8);
        assert_eq!(RecoveryParams::new(43_008, 0).cells(), 60_220);
    }

    #[test]
    fn self_difference_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (a, _) = set_pair(&mut rng, 200, 0, 0);
        let s = sketch_of(RecoveryParams::new(16, 5), &a);
        let d = s.subtract(&s).unwrap();
        assert!(d.is_zero());
        assert_eq!(d.decode(), Decoded::Recovered(vec![]));
    }

    #[test]
    fn singleton_minus_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let k = random_key(&mut rng);
        let params = RecoveryParams::new(4, 9);
        let mut s = DiffSketch::new(params);
        s.insert(&k);
        let d = s.subtract(&DiffSketch::new(params)).unwrap();
        assert_eq!(d.decode(), Decoded::Recovered(vec![(k, Sign::Plus)]));
    }

    #[test]
    fn linearity_is_cell_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (a, b) = set_pair(&mut rng, 100, 7, 5);
        let params = RecoveryParams::new(20, 77);
        let direct = sketch_of(params, &a).subtract(&sketch_of(params, &b)).unwrap();
        let mut signed = DiffSketch::new(params);
        for (k, s) in oracle_difference(&a, &b) {
            match s {
                Sign::Plus => signed.insert(&k),
                Sign::Minus => signed.remove(&k),
            }
        }
        assert_eq!(direct, signed);
    }

    #[test]
    fn insertion_order_is_irrelevant() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (a, _) = set_pair(&mut rng, 50, 0, 0);
        let params = RecoveryParams::new(8, 1);
        let forward = sketch_of(params, &a);
        let mut backward = DiffSketch::new(params);
        for k in a.iter().rev() {
            backward.insert(k);
        }
        assert_eq!(forward, backward);
    }

    #[test]
    fn parameter_mismatch_rejected() {
        let a = DiffSketch::new(RecoveryParams::new(8, 1));
        let b = DiffSketch::new(RecoveryParams::new(8, 2));
        assert!(matches!(a.subtract(&b), Err(RecoveryError::ParamMismatch(..))));
    }

    #[test]
    fn recovers_small_differences_with_signs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let capacity = 1000;
        for trial in 0..100 {
            let extra = if trial % 4 == 0 { capacity } else { rng.gen_range(0..=capacity) };
            let only_a = rng.gen_range(0..=extra);
            let (a, b) = set_pair(&mut rng, 1500, only_a, extra - only_a);
            let params = RecoveryParams::new(capacity, trial);
            let (sa, sb) = (sketch_of(params, &a), sketch_of(params, &b));
            let ab = sa.subtract(&sb).unwrap();
            assert_eq!(ab.decode(), Decoded::Recovered(oracle_difference(&a, &b)));
            let Decoded::Recovered(ba) = sb.subtract(&sa).unwrap().decode() else { panic!() };
            let Decoded::Recovered(ab) = ab.decode() else { panic!() };
            let negated: Vec<_> = ab.iter().map(|&(k, s)| (k, s.negate())).collect();
            assert_eq!(ba, negated);
        }
    }

    #[test]
    fn overload_fails() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let capacity = 25;
        let mut fails = 0;
        for trial in 0..300 {
            let (a, b) = set_pair(&mut rng, 100, 2 * capacity, 2 * capacity);
            let params = RecoveryParams::new(capacity, 1000 + trial);
            let d = sketch_of(params, &a).subtract(&sketch_of(params, &b)).unwrap();
            fails += usize::from(d.decode() == Decoded::Fail);
        }
        assert_eq!(fails, 300);
    }

    #[test]
    fn just_over_capacity_never_passes() {
        // Peeling may succeed, but the size cap still reports failure.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (a, b) = set_pair(&mut rng, 10, 3, 3);
        let params = RecoveryParams::new(5, 3);
        let d = sketch_of(params, &a).subtract(&sketch_of(params, &b)).unwrap();
        assert_eq!(d.decode(), Decoded::Fail);
    }

    #[test]
    fn sparse_table_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for trial in 0..60 {
            let capacity = 50;
            let extra = [0, 10, 50, 60, 200][trial % 5];
            let (a, b) = set_pair(&mut rng, 40, extra / 2, extra - extra / 2);
            let params = RecoveryParams::new(capacity, trial as u64);
            let dense = sketch_of(params, &a).subtract(&sketch_of(params, &b)).unwrap();
            let mut sparse = SparseDiff::new(params);
            for (k, s) in oracle_difference(&a, &b) {
                match s {
                    Sign::Plus => sparse.insert(&k),
                    Sign::Minus => sparse.remove(&k),
                }
            }
            assert_eq!(sparse.to_dense(), dense);
            assert_eq!(sparse.decode(), dense.decode());
            assert!(SparseDiff::new(params).to_dense().is_zero());
        }
    }

    #[test]
    fn serialization_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (a, b) = set_pair(&mut rng, 30, 4, 2);
        let params = RecoveryParams::new(10, 42);
        let d = sketch_of(params, &a).subtract(&sketch_of(params, &b)).unwrap();
        let mut bytes = Vec::new();
        d.write_to(&mut bytes);
        assert_eq!(bytes.len(), d.encoded_len());
        let (back, used) = DiffSketch::read_from(&bytes).unwrap();
        assert_eq!(used, bytes.len());
        assert_eq!(back, d);
        assert!(DiffSketch::read_from(&bytes[..bytes.len() - 1]).is_err());
    }
}
