//! The sketch file: a fixed header followed by one record per walk.

use rayon::prelude::*;

use super::{ProtocolError, ProtocolParams};
use crate::strings::{InputString, Symbol};
use crate::walk_sketch::{WalkEncoder, WalkSketch};
use crate::recovery::DiffSketch;

pub const MAGIC: [u8; 4] = *b"EDSK";
pub const VERSION: u16 = 1;
/// magic, version, n, k, δ, τ, seed.
pub const HEADER_BYTES: usize = 4 + 2 + 8 + 4 + 8 + 4 + 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SketchHeader {
    pub version: u16,
    pub n: u64,
    pub k: u32,
    pub delta: f64,
    pub tau: u32,
    pub seed: u128,
}

impl SketchHeader {
    pub fn of(params: &ProtocolParams) -> Self {
        Self {
            version: VERSION,
            n: params.n as u64,
            k: params.k as u32,
            delta: params.delta,
            tau: params.tau as u32,
            seed: params.seed,
        }
    }

    fn write_to(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&self.version.to_le_bytes());
        out.extend_from_slice(&self.n.to_le_bytes());
        out.extend_from_slice(&self.k.to_le_bytes());
        out.extend_from_slice(&self.delta.to_le_bytes());
        out.extend_from_slice(&self.tau.to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
    }

    fn read_from(bytes: &[u8]) -> Result<Self, ProtocolError> {
        let h = bytes.get(..HEADER_BYTES).ok_or(ProtocolError::Format("short header".into()))?;
        if h[..4] != MAGIC {
            return Err(ProtocolError::Format("bad magic".into()));
        }
        let version = u16::from_le_bytes(h[4..6].try_into().unwrap());
        if version != VERSION {
            return Err(ProtocolError::Format(format!("unsupported version {version}")));
        }
        Ok(Self {
            version,
            n: u64::from_le_bytes(h[6..14].try_into().unwrap()),
            k: u32::from_le_bytes(h[14..18].try_into().unwrap()),
            delta: f64::from_le_bytes(h[18..26].try_into().unwrap()),
            tau: u32::from_le_bytes(h[26..30].try_into().unwrap()),
            seed: u128::from_le_bytes(h[30..46].try_into().unwrap()),
        })
    }
}

/// One party's message: the header and `τ` walk sketches.
#[derive(Debug, Clone, PartialEq)]
pub struct FullSketch {
    pub header: SketchHeader,
    pub walks: Vec<WalkSketch>,
}

impl FullSketch {
    /// Protocol parameters recorded in the header.
    pub fn params(&self) -> Result<ProtocolParams, ProtocolError> {
        let h = &self.header;
        ProtocolParams::new(h.n as usize, h.k as usize, h.delta, h.seed)?.with_tau(h.tau as usize)
    }

    pub fn encoded_len(&self) -> usize {
        HEADER_BYTES + self.walks.iter().map(|w| 4 + w.encoded_len()).sum::<usize>()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        self.header.write_to(&mut out);
        for w in &self.walks {
            out.extend_from_slice(&(w.encoded_len() as u32).to_le_bytes());
            w.write_to(&mut out);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ProtocolError> {
        let header = SketchHeader::read_from(bytes)?;
        let mut at = HEADER_BYTES;
        let mut walks = Vec::with_capacity(header.tau as usize);
        for _ in 0..header.tau {
            let len = bytes
                .get(at..at + 4)
                .map(|b| u32::from_le_bytes(b.try_into().unwrap()) as usize)
                .ok_or(ProtocolError::Format("missing walk record".into()))?;
            let record = bytes.get(at + 4..at + 4 + len).ok_or(ProtocolError::Format("short walk record".into()))?;
            let (walk, used) = WalkSketch::read_from(record).map_err(|e| ProtocolError::Format(e.to_string()))?;
            if used != len {
                return Err(ProtocolError::Format("walk record length mismatch".into()));
            }
            walks.push(walk);
            at += 4 + len;
        }
        if at != bytes.len() {
            return Err(ProtocolError::Format("trailing bytes".into()));
        }
        Ok(Self { header, walks })
    }
}

/// Push-one-character encoder for one party: all `τ` walk encoders
/// advance together.
pub struct PartyEncoder {
    params: ProtocolParams,
    walks: Vec<WalkEncoder<DiffSketch>>,
    buffer: Vec<Symbol>,
    received: usize,
}

const BLOCK: usize = 4096;

impl PartyEncoder {
    pub fn new(params: ProtocolParams) -> Result<Self, ProtocolError> {
        let walks = (0..params.tau as u64)
            .map(|i| Ok(WalkEncoder::new(params.walk_params(i)?)))
            .collect::<Result<_, ProtocolError>>()?;
        Ok(Self { params, walks, buffer: Vec::with_capacity(BLOCK), received: 0 })
    }

    pub fn push(&mut self, c: Symbol) -> Result<(), ProtocolError> {
        self.received += 1;
        if self.received > self.params.n {
            return Err(ProtocolError::LengthMismatch { expected: self.params.n, got: self.received });
        }
        self.buffer.push(c);
        if self.buffer.len() == BLOCK {
            self.flush();
        }
        Ok(())
    }

    // Characters are handed over in blocks so the walks can run in parallel.
    fn flush(&mut self) {
        let block = std::mem::take(&mut self.buffer);
        self.walks.par_iter_mut().for_each(|w| w.push_all(&block));
        self.buffer = block;
        self.buffer.clear();
    }

    pub fn finish(mut self) -> Result<FullSketch, ProtocolError> {
        if self.received != self.params.n {
            return Err(ProtocolError::LengthMismatch { expected: self.params.n, got: self.received });
        }
        self.flush();
        let walks = self.walks.into_par_iter().map(WalkEncoder::finish).collect();
        Ok(FullSketch { header: SketchHeader::of(&self.params), walks })
    }
}

/// Sketch of a whole string in one call.
pub fn encode_party(s: &InputString, params: &ProtocolParams) -> Result<FullSketch, ProtocolError> {
    let mut enc = PartyEncoder::new(*params)?;
    for &c in s.as_slice() {
        enc.push(c)?;
    }
    enc.finish()
}
