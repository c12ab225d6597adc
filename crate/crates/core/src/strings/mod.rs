//! Strings, edit scripts and matchings, plus the exact dynamic-programming
//! oracles that every probabilistic component is checked against.
//!
//! Positions are 1-based throughout, matching the protocol math. Reading an
//! [`InputString`] past its end yields the padding symbol `0`.

mod dp;
mod matching;

use std::fmt;
use std::io::{BufRead, Write};

use thiserror::Error;

pub use dp::{distance_table, edit_distance, edit_distance_banded, edit_distance_value, lcs_length};
pub use matching::{greedy_optimal_matching, matching_from_script};

/// One alphabet symbol. `0` doubles as the padding symbol.
pub type Symbol = u32;

/// The padding symbol read beyond the end of every string.
pub const PAD: Symbol = 0;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StringError {
    #[error("alphabet size must be at least 2, got {0}")]
    AlphabetTooSmall(u64),
    #[error("symbol {symbol} at position {position} is outside an alphabet of size {size}")]
    SymbolOutOfRange { position: usize, symbol: Symbol, size: u64 },
    #[error("edit #{op} has position {position}, valid range is 1..={max}")]
    PositionOutOfRange { op: usize, position: usize, max: usize },
    #[error("script does not transform x into y")]
    ScriptMismatch,
    #[error("malformed string file: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for StringError {
    fn from(e: std::io::Error) -> Self {
        StringError::Io(e.to_string())
    }
}

/// Alphabet `{0, 1, ..., size - 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet {
    size: u64,
}

impl Alphabet {
    pub fn new(size: u64) -> Result<Self, StringError> {
        if !(2..=(1u64 << 32)).contains(&size) {
            return Err(StringError::AlphabetTooSmall(size));
        }
        Ok(Self { size })
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn contains(&self, symbol: Symbol) -> bool {
        u64::from(symbol) < self.size
    }

    pub fn check(&self, s: &InputString) -> Result<(), StringError> {
        match s.symbols.iter().position(|&c| !self.contains(c)) {
            None => Ok(()),
            Some(i) => Err(StringError::SymbolOutOfRange {
                position: i + 1,
                symbol: s.symbols[i],
                size: self.size,
            }),
        }
    }
}

/// A finite string followed by infinitely many padding zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct InputString {
    symbols: Vec<Symbol>,
}

impl InputString {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Self { symbols }
    }

    /// Lowercase letters map to `1..=26`; anything else is rejected.
    /// Handy for tests and examples.
    pub fn from_ascii(text: &str) -> Self {
        Self::new(
            text.bytes()
                .map(|b| {
                    assert!(b.is_ascii_lowercase(), "from_ascii only accepts a-z");
                    Symbol::from(b - b'a' + 1)
                })
                .collect(),
        )
    }

    /// Logical length `n`.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// 1-based read with implicit zero padding.
    #[inline]
    pub fn at(&self, position: usize) -> Symbol {
        debug_assert!(position >= 1);
        self.symbols.get(position.wrapping_sub(1)).copied().unwrap_or(PAD)
    }

    pub fn as_slice(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn into_symbols(self) -> Vec<Symbol> {
        self.symbols
    }

    /// Reads the token format: `n alphabet_size` on the first line, then `n`
    /// space-separated symbols on the second.
    pub fn read_tokens<R: BufRead>(reader: R) -> Result<(Self, Alphabet), StringError> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| StringError::Format("missing header line".into()))??;
        let mut fields = header.split_whitespace();
        let n: usize = parse_field(fields.next(), "n")?;
        let size: u64 = parse_field(fields.next(), "alphabet_size")?;
        if fields.next().is_some() {
            return Err(StringError::Format("header has more than two fields".into()));
        }
        let alphabet = Alphabet::new(size)?;
        let body = match lines.next() {
            Some(line) => line?,
            None if n == 0 => String::new(),
            None => return Err(StringError::Format("missing symbol line".into())),
        };
        let symbols = body
            .split_whitespace()
            .map(|tok| {
                tok.parse::<Symbol>()
                    .map_err(|_| StringError::Format(format!("bad symbol token {tok:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if symbols.len() != n {
            return Err(StringError::Format(format!(
                "header announces {n} symbols, found {}",
                symbols.len()
            )));
        }
        let s = Self::new(symbols);
        alphabet.check(&s)?;
        Ok((s, alphabet))
    }

    pub fn write_tokens<W: Write>(&self, alphabet: Alphabet, mut out: W) -> Result<(), StringError> {
        alphabet.check(self)?;
        writeln!(out, "{} {}", self.len(), alphabet.size())?;
        let body: Vec<String> = self.symbols.iter().map(|c| c.to_string()).collect();
        writeln!(out, "{}", body.join(" "))?;
        Ok(())
    }
}

fn parse_field<T: std::str::FromStr>(tok: Option<&str>, name: &str) -> Result<T, StringError> {
    tok.ok_or_else(|| StringError::Format(format!("missing {name}")))?
        .parse()
        .map_err(|_| StringError::Format(format!("bad {name}")))
}

impl fmt::Debug for InputString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "InputString{:?}", self.symbols)
    }
}

impl From<Vec<Symbol>> for InputString {
    fn from(symbols: Vec<Symbol>) -> Self {
        Self::new(symbols)
    }
}

impl From<&[Symbol]> for InputString {
    fn from(symbols: &[Symbol]) -> Self {
        Self::new(symbols.to_vec())
    }
}

/// A single edit. Positions are 1-based and refer to the string as it is
/// when the edit is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum EditOp {
    /// Insert `symbol` so that it ends up at `position`.
    Insert { position: usize, symbol: Symbol },
    Delete { position: usize },
    Substitute { position: usize, symbol: Symbol },
}

impl EditOp {
    pub fn position(&self) -> usize {
        match *self {
            EditOp::Insert { position, .. }
            | EditOp::Delete { position }
            | EditOp::Substitute { position, .. } => position,
        }
    }
}

/// Ordered edits; applying them in order turns x into y.
#[derive(Debug, Clone, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub struct EditScript {
    pub ops: Vec<EditOp>,
}

impl EditScript {
    pub fn new(ops: Vec<EditOp>) -> Self {
        Self { ops }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

/// A non-intersecting bipartite matching between positions of x and y.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct Matching {
    edges: Vec<(usize, usize)>,
}

impl Matching {
    /// Sorts the edges and checks that they are non-intersecting.
    pub fn new(mut edges: Vec<(usize, usize)>) -> Option<Self> {
        edges.sort_unstable();
        edges.dedup();
        let ok = edges.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1);
        ok.then_some(Self { edges })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            edges: (1..=n).map(|i| (i, i)).collect(),
        }
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, edge: (usize, usize)) -> bool {
        self.edges.binary_search(&edge).is_ok()
    }

    /// Every edge joins equal characters.
    pub fn respects(&self, x: &InputString, y: &InputString) -> bool {
        self.edges.iter().all(|&(i, j)| x.at(i) == y.at(j))
    }
}

/// Applies `script` to `x` one edit at a time.
pub fn apply_script(x: &InputString, script: &EditScript) -> Result<InputString, StringError> {
    let mut out = x.symbols.clone();
    for (k, op) in script.ops.iter().enumerate() {
        let len = out.len();
        let (position, max) = match *op {
            EditOp::Insert { position, .. } => (position, len + 1),
            EditOp::Delete { position } | EditOp::Substitute { position, .. } => (position, len),
        };
        if position == 0 || position > max {
            return Err(StringError::PositionOutOfRange { op: k, position, max });
        }
        match *op {
            EditOp::Insert { position, symbol } => out.insert(position - 1, symbol),
            EditOp::Delete { position } => {
                out.remove(position - 1);
            }
            EditOp::Substitute { position, symbol } => out[position - 1] = symbol,
        }
    }
    Ok(InputString::new(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn padding_reads_zero() {
        let s = InputString::new(vec![3, 1]);
        assert_eq!(s.at(1), 3);
        assert_eq!(s.at(2), 1);
        assert_eq!(s.at(3), PAD);
        assert_eq!(s.at(1000), PAD);
    }

    #[test]
    fn alphabet_bounds() {
        assert!(Alphabet::new(1).is_err());
        assert!(Alphabet::new(2).is_ok());
        assert!(Alphabet::new(1 << 32).is_ok());
        let a = Alphabet::new(4).unwrap();
        assert!(a.check(&InputString::new(vec![0, 3])).is_ok());
        assert_eq!(
            a.check(&InputString::new(vec![0, 4])),
            Err(StringError::SymbolOutOfRange { position: 2, symbol: 4, size: 4 })
        );
    }

    #[test]
    fn apply_empty_script_is_identity() {
        let x = InputString::from_ascii("abc");
        assert_eq!(apply_script(&x, &EditScript::default()).unwrap(), x);
    }

    #[test]
    fn apply_single_substitution() {
        let x = InputString::from_ascii("ab");
        let s = EditScript::new(vec![EditOp::Substitute { position: 1, symbol: 3 }]);
        assert_eq!(apply_script(&x, &s).unwrap(), InputString::from_ascii("cb"));
    }

    #[test]
    fn apply_rejects_bad_positions() {
        let x = InputString::from_ascii("ab");
        for op in [
            EditOp::Delete { position: 0 },
            EditOp::Delete { position: 3 },
            EditOp::Substitute { position: 3, symbol: 1 },
            EditOp::Insert { position: 4, symbol: 1 },
        ] {
            assert!(matches!(
                apply_script(&x, &EditScript::new(vec![op])),
                Err(StringError::PositionOutOfRange { .. })
            ));
        }
        let append = EditScript::new(vec![EditOp::Insert { position: 3, symbol: 3 }]);
        assert_eq!(apply_script(&x, &append).unwrap(), InputString::from_ascii("abc"));
    }

    #[test]
    fn token_file_round_trip() {
        let x = InputString::new(vec![0, 3, 2, 2, 1]);
        let alphabet = Alphabet::new(4).unwrap();
        let mut buf = Vec::new();
        x.write_tokens(alphabet, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "5 4\n0 3 2 2 1\n");
        let (back, a) = InputString::read_tokens(&buf[..]).unwrap();
        assert_eq!(back, x);
        assert_eq!(a, alphabet);
    }

    #[test]
    fn token_file_errors() {
        assert!(InputString::read_tokens(&b"3 4\n1 2\n"[..]).is_err());
        assert!(InputString::read_tokens(&b"2 4\n1 9\n"[..]).is_err());
        assert!(InputString::read_tokens(&b"2\n1 1\n"[..]).is_err());
        assert!(InputString::read_tokens(&b""[..]).is_err());
        let (empty, _) = InputString::read_tokens(&b"0 2\n"[..]).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn matching_rejects_crossing_edges() {
        assert!(Matching::new(vec![(1, 2), (2, 1)]).is_none());
        assert!(Matching::new(vec![(1, 1), (1, 2)]).is_none());
        let m = Matching::new(vec![(3, 3), (1, 2)]).unwrap();
        assert_eq!(m.edges(), &[(1, 2), (3, 3)]);
    }
}
