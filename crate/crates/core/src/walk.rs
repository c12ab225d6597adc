//! The random walk on one string, or on a pair of strings under shared
//! coins.
//!
//! At step `t` the walk emits `s[p]` and then advances `p` by the coin
//! `r(t, s[p])`. Two walks that share coins and sit on equal characters move
//! together; the cursor gap only changes on *progress steps*, where the
//! emitted characters differ.

use std::io::Write;

use thiserror::Error;

use crate::mix::{derive_key, domain, fmix64};
use crate::strings::{InputString, Symbol};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WalkError {
    #[error("segment [{a}..{b}] is not inside 1..={m}")]
    SegmentOutOfRange { a: usize, b: usize, m: usize },
    #[error("cursor trace has {got} entries, expected m + 1 = {expected}")]
    TraceLength { got: usize, expected: usize },
}

/// Source of the shared coin `r(step, symbol)`.
pub trait Coins {
    fn coin(&self, step: u64, symbol: Symbol) -> bool;
}

/// Keyed pseudo-random coins: a deterministic function of
/// `(seed, walk_index, step, symbol)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkRandomness {
    seed: u128,
    walk_index: u64,
    key: u64,
}

impl WalkRandomness {
    pub fn new(seed: u128, walk_index: u64) -> Self {
        Self {
            seed,
            walk_index,
            key: derive_key(seed, domain::WALK_COINS, walk_index),
        }
    }

    pub fn seed(&self) -> u128 {
        self.seed
    }

    pub fn walk_index(&self) -> u64 {
        self.walk_index
    }
}

impl Coins for WalkRandomness {
    #[inline]
    fn coin(&self, step: u64, symbol: Symbol) -> bool {
        let h = fmix64(self.key ^ step.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let h = fmix64(h ^ u64::from(symbol).wrapping_mul(0xc2b2_ae3d_27d4_eb4f) ^ 0x5851_f42d_4c95_7f2d);
        h >> 63 == 1
    }
}

/// The same coin for every `(step, symbol)`.
#[derive(Debug, Clone, Copy)]
pub struct ConstantCoins(pub bool);

impl Coins for ConstantCoins {
    fn coin(&self, _: u64, _: Symbol) -> bool {
        self.0
    }
}

impl<C: Coins + ?Sized> Coins for &C {
    fn coin(&self, step: u64, symbol: Symbol) -> bool {
        (**self).coin(step, symbol)
    }
}

/// Runs `m` steps on `s`. Returns the output string and the cursor before
/// every step plus the final cursor (`m + 1` entries, starting at 1).
pub fn walk_single(s: &InputString, coins: &impl Coins, m: usize) -> (Vec<Symbol>, Vec<usize>) {
    let mut output = Vec::with_capacity(m);
    let mut cursors = Vec::with_capacity(m + 1);
    let mut p = 1usize;
    for t in 1..=m as u64 {
        let c = s.at(p);
        cursors.push(p);
        output.push(c);
        p += usize::from(coins.coin(t, c));
    }
    cursors.push(p);
    (output, cursors)
}

/// Full record of a walk pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkTrace {
    pub outputs_x: Vec<Symbol>,
    pub outputs_y: Vec<Symbol>,
    /// `cursors_x[t - 1]` is `p_t`; the last entry is the cursor after step `m`.
    pub cursors_x: Vec<usize>,
    pub cursors_y: Vec<usize>,
    pub progress_flags: Vec<bool>,
}

impl WalkTrace {
    pub fn steps(&self) -> usize {
        self.outputs_x.len()
    }

    pub fn progress_steps(&self) -> usize {
        self.progress_flags.iter().filter(|&&f| f).count()
    }

    /// Final cursors reach the ends of both strings.
    pub fn walks_through(&self, len_x: usize, len_y: usize) -> bool {
        let m = self.steps();
        self.cursors_x[m.saturating_sub(1)] >= len_x && self.cursors_y[m.saturating_sub(1)] >= len_y
    }

    /// `(p_t, q_t)` for `t = 1..=m`.
    pub fn states(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cursors_x[..self.steps()]
            .iter()
            .copied()
            .zip(self.cursors_y[..self.steps()].iter().copied())
    }

    /// CSV with header `step,p,q,out_x,out_y,progress`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "step,p,q,out_x,out_y,progress")?;
        for t in 0..self.steps() {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                t + 1,
                self.cursors_x[t],
                self.cursors_y[t],
                self.outputs_x[t],
                self.outputs_y[t],
                u8::from(self.progress_flags[t])
            )?;
        }
        Ok(())
    }
}

/// Two coupled walks sharing `coins`.
pub fn walk_pair(x: &InputString, y: &InputString, coins: &impl Coins, m: usize) -> WalkTrace {
    let (outputs_x, cursors_x) = walk_single(x, coins, m);
    let (outputs_y, cursors_y) = walk_single(y, coins, m);
    let progress_flags = outputs_x.iter().zip(&outputs_y).map(|(a, b)| a != b).collect();
    WalkTrace { outputs_x, outputs_y, cursors_x, cursors_y, progress_flags }
}

/// Pre-image of an output segment: the input range the cursor covered while
/// emitting output positions `a..=b`, and whether the cursor was shared with
/// the neighbouring output position on each side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Preimage {
    pub lo: usize,
    pub hi: usize,
    pub len: usize,
    pub left_overlap: bool,
    pub right_overlap: bool,
}

/// `cursors` is the `m + 1`-entry trajectory from [`walk_single`].
pub fn preimage_of_segment(a: usize, b: usize, cursors: &[usize]) -> Result<Preimage, WalkError> {
    let m = cursors.len().checked_sub(1).ok_or(WalkError::TraceLength { got: 0, expected: 1 })?;
    if a < 1 || a > b || b > m {
        return Err(WalkError::SegmentOutOfRange { a, b, m });
    }
    let p = |t: usize| cursors[t - 1];
    let (lo, hi) = (p(a), p(b));
    Ok(Preimage {
        lo,
        hi,
        len: hi - lo + 1,
        left_overlap: a > 1 && p(a - 1) == lo,
        right_overlap: b < m && p(b + 1) == hi,
    })
}

/// Whether the walk visits state `(u, v)` at the start of some step.
pub fn passes_through(trace: &WalkTrace, state: (usize, usize)) -> bool {
    trace.states().any(|s| s == state)
}

/// Step-at-a-time walk pair with O(1) state, for unbounded or early-stopped
/// simulations.
#[derive(Debug, Clone)]
pub struct PairWalker<'a, C: Coins> {
    x: &'a InputString,
    y: &'a InputString,
    coins: C,
    p: usize,
    q: usize,
    step: u64,
    progress: u64,
}

/// What happened in one step of a [`PairWalker`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepOutcome {
    /// State at the start of the step.
    pub from: (usize, usize),
    pub to: (usize, usize),
    pub progress: bool,
}

impl<'a, C: Coins> PairWalker<'a, C> {
    pub fn new(x: &'a InputString, y: &'a InputString, coins: C) -> Self {
        Self::starting_at(x, y, coins, (1, 1))
    }

    pub fn starting_at(x: &'a InputString, y: &'a InputString, coins: C, state: (usize, usize)) -> Self {
        Self { x, y, coins, p: state.0, q: state.1, step: 0, progress: 0 }
    }

    pub fn state(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    pub fn progress_steps(&self) -> u64 {
        self.progress
    }

    pub fn step(&mut self) -> StepOutcome {
        self.step += 1;
        let (a, b) = (self.x.at(self.p), self.y.at(self.q));
        let from = (self.p, self.q);
        let progress = a != b;
        self.progress += u64::from(progress);
        self.p += usize::from(self.coins.coin(self.step, a));
        self.q += usize::from(self.coins.coin(self.step, b));
        StepOutcome { from, to: (self.p, self.q), progress }
    }

    /// Steps until `stop` holds for the current state or `max_steps` have
    /// been taken. Returns whether `stop` fired.
    pub fn run_until(&mut self, max_steps: u64, mut stop: impl FnMut((usize, usize)) -> bool) -> bool {
        while self.step < max_steps {
            if stop(self.state()) {
                return true;
            }
            self.step();
        }
        stop(self.state())
    }
}
