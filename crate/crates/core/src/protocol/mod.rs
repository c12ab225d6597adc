//! The two-party protocol: Alice and Bob each encode `τ` independent walks
//! of their string, and the referee decodes every walk pair and combines
//! the resulting alignments.

mod combine;
mod wire;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub use combine::{combine_alignments, CombineError};
pub use wire::{encode_party, FullSketch, PartyEncoder, SketchHeader, HEADER_BYTES, MAGIC, VERSION};

use crate::rolling_hash::HashError;
use crate::strings::{Alphabet, EditScript, InputString};
use crate::walk_sketch::{decode_walk, simulate_walk, EffectiveAlignment, WalkDecodeError, WalkSketchParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("string has length {got}, the parameters say {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("the two sketches have different headers")]
    HeaderMismatch,
    #[error("malformed sketch: {0}")]
    Format(String),
    #[error(transparent)]
    Hash(#[from] HashError),
}

/// Default walk-count multiplier: `τ = ⌈4·k·ln(n/δ)⌉`.
pub const DEFAULT_TAU_FACTOR: f64 = 4.0;
/// Default progress-step budget multiplier: the digest holds
/// `6(d+1)·c_walk·k²` differences.
pub const DEFAULT_C_WALK: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProtocolParams {
    pub n: usize,
    pub k: usize,
    pub delta: f64,
    pub tau: usize,
    pub c_walk: usize,
    pub seed: u128,
}

impl ProtocolParams {
    /// Defaults for `τ` and `c_walk`.
    pub fn new(n: usize, k: usize, delta: f64, seed: u128) -> Result<Self, ProtocolError> {
        if n == 0 || k == 0 {
            return Err(ProtocolError::InvalidParams("n and k must be positive".into()));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(ProtocolError::InvalidParams(format!("delta {delta} is not in (0, 1)")));
        }
        if n > u32::MAX as usize / 4 {
            return Err(ProtocolError::InvalidParams(format!("n = {n} is too large")));
        }
        Ok(Self { n, k, delta, tau: default_tau(n, k, delta), c_walk: DEFAULT_C_WALK, seed })
    }

    pub fn with_tau(mut self, tau: usize) -> Result<Self, ProtocolError> {
        if tau == 0 || tau > u32::MAX as usize {
            return Err(ProtocolError::InvalidParams("tau must be in 1..2^32".into()));
        }
        self.tau = tau;
        Ok(self)
    }

    pub fn with_c_walk(mut self, c_walk: usize) -> Result<Self, ProtocolError> {
        if c_walk == 0 {
            return Err(ProtocolError::InvalidParams("c_walk must be positive".into()));
        }
        self.c_walk = c_walk;
        Ok(self)
    }

    /// Failure budget of one walk, `δ / (2τ)`.
    pub fn eta(&self) -> f64 {
        self.delta / (2.0 * self.tau as f64)
    }

    /// Digest capacity Δ of every walk.
    pub fn capacity(&self) -> usize {
        WalkSketchParams::capacity_for(self.n, self.k, self.c_walk)
    }

    pub fn walk_params(&self, walk_index: u64) -> Result<WalkSketchParams, ProtocolError> {
        self.walk_params_with_capacity(walk_index, self.capacity())
    }

    fn walk_params_with_capacity(&self, walk_index: u64, capacity: usize) -> Result<WalkSketchParams, ProtocolError> {
        Ok(WalkSketchParams::new(self.n, capacity, self.eta(), self.seed, walk_index)?)
    }

    /// Exact serialized size of one party's sketch.
    pub fn sketch_bytes(&self) -> Result<usize, ProtocolError> {
        Ok(HEADER_BYTES + self.tau * (4 + self.walk_params(0)?.encoded_len()))
    }
}

pub fn default_tau(n: usize, k: usize, delta: f64) -> usize {
    tau_for(DEFAULT_TAU_FACTOR, n, k, delta)
}

/// `⌈factor·k·ln(n/δ)⌉`, at least 1.
pub fn tau_for(factor: f64, n: usize, k: usize, delta: f64) -> usize {
    (factor * k as f64 * (n as f64 / delta).ln()).ceil().max(1.0) as usize
}

/// Why the referee declined to answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ErrorReason {
    /// Every walk failed to decode.
    NoWalkDecoded,
    /// The alignments only admit scripts longer than `k`.
    ExceedsBound { k: usize },
    /// The alignments contradict each other.
    Inconsistent { detail: String },
}

impl std::fmt::Display for ErrorReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ErrorReason::NoWalkDecoded => write!(f, "no walk decoded"),
            ErrorReason::ExceedsBound { k } => write!(f, "edit distance exceeds k = {k}"),
            ErrorReason::Inconsistent { detail } => write!(f, "inconsistent alignments: {detail}"),
        }
    }
}

/// The referee's answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Result { distance: usize, script: EditScript },
    ErrorReport { reason: ErrorReason },
}

impl Verdict {
    pub fn distance(&self) -> Option<usize> {
        match self {
            Verdict::Result { distance, .. } => Some(*distance),
            Verdict::ErrorReport { .. } => None,
        }
    }

    pub fn is_error(&self) -> bool {
        matches!(self, Verdict::ErrorReport { .. })
    }
}

/// Referee verdict from the alignments of the walks that decoded.
pub fn judge(alignments: &[EffectiveAlignment], n: usize, k: usize) -> Verdict {
    if alignments.is_empty() {
        return Verdict::ErrorReport { reason: ErrorReason::NoWalkDecoded };
    }
    match combine_alignments(alignments, n, k) {
        Ok(script) if script.len() <= k => Verdict::Result { distance: script.len(), script },
        Ok(_) | Err(CombineError::ExceedsBound(_)) => Verdict::ErrorReport { reason: ErrorReason::ExceedsBound { k } },
        Err(e) => Verdict::ErrorReport { reason: ErrorReason::Inconsistent { detail: e.to_string() } },
    }
}

/// Per-walk decoding results, in walk order.
pub fn decode_walks(
    sx: &FullSketch,
    sy: &FullSketch,
    alphabet: Option<Alphabet>,
) -> Result<Vec<Result<EffectiveAlignment, WalkDecodeError>>, ProtocolError> {
    if sx.header != sy.header || sx.walks.len() != sy.walks.len() {
        return Err(ProtocolError::HeaderMismatch);
    }
    let params = sx.params()?;
    if sx.walks.len() != params.tau {
        return Err(ProtocolError::Format("walk count differs from tau".into()));
    }
    sx.walks
        .par_iter()
        .zip(&sy.walks)
        .enumerate()
        .map(|(i, (wx, wy))| {
            let capacity = wx.digest.params().capacity();
            let wp = params.walk_params_with_capacity(i as u64, capacity)?;
            Ok(decode_walk(&wp, wx, wy, alphabet))
        })
        .collect()
}

/// Decodes two parties' sketches.
pub fn referee_decode(sx: &FullSketch, sy: &FullSketch, alphabet: Option<Alphabet>) -> Result<Verdict, ProtocolError> {
    let decoded = decode_walks(sx, sy, alphabet)?;
    let alignments: Vec<_> = decoded.into_iter().filter_map(Result::ok).collect();
    Ok(judge(&alignments, sx.header.n as usize, sx.header.k as usize))
}

/// Summary of an in-memory protocol run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub verdict: Verdict,
    pub decoded_walks: usize,
}

/// Runs both parties and the referee walk by walk, holding only one walk's
/// sketches at a time. Produces the same verdict as encoding both full
/// sketches and calling [`referee_decode`].
pub fn run_protocol(
    x: &InputString,
    y: &InputString,
    params: &ProtocolParams,
    alphabet: Option<Alphabet>,
) -> Result<RunOutcome, ProtocolError> {
    for s in [x, y] {
        if s.len() != params.n {
            return Err(ProtocolError::LengthMismatch { expected: params.n, got: s.len() });
        }
    }
    let decoded: Vec<Option<EffectiveAlignment>> = (0..params.tau as u64)
        .into_par_iter()
        .map(|i| {
            let wp = params.walk_params(i)?;
            Ok(simulate_walk(&wp, x, y, alphabet).ok())
        })
        .collect::<Result<_, ProtocolError>>()?;
    let alignments: Vec<_> = decoded.into_iter().flatten().collect();
    Ok(RunOutcome { decoded_walks: alignments.len(), verdict: judge(&alignments, params.n, params.k) })
}
