//! Merges the effective alignments of many walks into one edit script.
//!
//! Every edge says "these two positions hold the same character", so edges
//! of all alignments are merged into equality classes, and the literal
//! characters from the `g` maps label whole classes. Edges present in every
//! alignment are kept as forced matches; the gaps between them are solved
//! by a banded edit-distance table over class labels.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::strings::{EditOp, EditScript, Symbol};
use crate::walk_sketch::EffectiveAlignment;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CombineError {
    #[error("no alignments to combine")]
    Empty,
    #[error("alignments disagree: {0}")]
    Inconsistent(&'static str),
    #[error("every script consistent with the alignments needs more than {0} edits")]
    ExceedsBound(usize),
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(size: usize) -> Self {
        Self { parent: (0..size as u32).collect() }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] as usize != a {
            let grand = self.parent[self.parent[a] as usize];
            self.parent[a] = grand;
            a = grand as usize;
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb) as u32;
        }
    }
}

/// Class label and known character of every position.
struct Labels {
    x: Vec<(usize, Option<Symbol>)>,
    y: Vec<(usize, Option<Symbol>)>,
}

impl Labels {
    fn equal(&self, i: usize, j: usize) -> bool {
        let (a, b) = (self.x[i - 1], self.y[j - 1]);
        a.0 == b.0 || (a.1.is_some() && a.1 == b.1)
    }

    fn y_symbol(&self, j: usize) -> Option<Symbol> {
        self.y[j - 1].1
    }
}

fn labels(alignments: &[EffectiveAlignment], n: usize) -> Result<Labels, CombineError> {
    let mut uf = UnionFind::new(2 * n);
    for a in alignments {
        for &(i, j) in a.edges.edges() {
            if i > n || j > n || i == 0 || j == 0 {
                return Err(CombineError::Inconsistent("edge outside 1..=n"));
            }
            uf.union(i - 1, n + j - 1);
        }
    }
    let mut symbol: Vec<Option<Symbol>> = vec![None; 2 * n];
    let mut assign = |uf: &mut UnionFind, node: usize, c: Symbol| {
        let root = uf.find(node);
        match symbol[root] {
            Some(old) if old != c => Err(CombineError::Inconsistent("one class, two characters")),
            _ => {
                symbol[root] = Some(c);
                Ok(())
            }
        }
    };
    for a in alignments {
        for (&i, &c) in &a.g_x {
            if i == 0 || i > n {
                return Err(CombineError::Inconsistent("literal outside 1..=n"));
            }
            assign(&mut uf, i - 1, c)?;
        }
        for (&j, &c) in &a.g_y {
            if j == 0 || j > n {
                return Err(CombineError::Inconsistent("literal outside 1..=n"));
            }
            assign(&mut uf, n + j - 1, c)?;
        }
    }
    let mut label = |node: usize| {
        let root = uf.find(node);
        (root, symbol[root])
    };
    let x = (0..n).map(&mut label).collect();
    let y = (n..2 * n).map(&mut label).collect();
    Ok(Labels { x, y })
}

/// Edges shared by every alignment.
fn common_edges(alignments: &[EffectiveAlignment]) -> Vec<(usize, usize)> {
    let mut common: BTreeSet<(usize, usize)> = alignments[0].edges.edges().iter().copied().collect();
    for a in &alignments[1..] {
        let here: BTreeSet<_> = a.edges.edges().iter().copied().collect();
        common.retain(|e| here.contains(e));
    }
    common.into_iter().collect()
}

/// A shortest script transforming x into y among those that keep every
/// common edge matched and only match positions known to be equal.
///
/// Ops are listed right to left in original x coordinates.
pub fn combine_alignments(
    alignments: &[EffectiveAlignment],
    n: usize,
    bound: usize,
) -> Result<EditScript, CombineError> {
    if alignments.is_empty() {
        return Err(CombineError::Empty);
    }
    let labels = labels(alignments, n)?;
    let anchors = common_edges(alignments);
    let mut ops = Vec::new();
    let mut budget = bound;
    let mut hi = (n + 1, n + 1);
    for &lo in anchors.iter().rev().chain(std::iter::once(&(0, 0))) {
        let used = solve_gap(&labels, lo, hi, budget, &mut ops)?.ok_or(CombineError::ExceedsBound(bound))?;
        budget -= used;
        hi = lo;
    }
    Ok(EditScript::new(ops))
}

const INF: u32 = u32::MAX / 2;

/// Banded table over the open rectangle between two anchors; appends the
/// gap's ops (right to left) and returns their count, or `None` when the
/// gap needs more than `budget` edits.
fn solve_gap(
    labels: &Labels,
    lo: (usize, usize),
    hi: (usize, usize),
    budget: usize,
    ops: &mut Vec<EditOp>,
) -> Result<Option<usize>, CombineError> {
    if hi.0 <= lo.0 || hi.1 <= lo.1 {
        return Err(CombineError::Inconsistent("common edges cross"));
    }
    let (rows, cols) = (hi.0 - lo.0 - 1, hi.1 - lo.1 - 1);
    if rows.abs_diff(cols) > budget {
        return Ok(None);
    }
    let width = 2 * budget + 1;
    let idx = |a: usize, b: usize| a * width + (b + budget - a);
    let in_band = |a: usize, b: usize| a.abs_diff(b) <= budget && b <= cols;
    let mut table = vec![INF; (rows + 1) * width];
    let get = |t: &[u32], a: usize, b: usize| if in_band(a, b) { t[idx(a, b)] } else { INF };
    for a in 0..=rows {
        for b in a.saturating_sub(budget)..=(a + budget).min(cols) {
            let (i, j) = (lo.0 + a, lo.1 + b);
            let value = if a == 0 && b == 0 {
                0
            } else {
                let mut best = INF;
                if a > 0 {
                    best = best.min(get(&table, a - 1, b) + 1);
                }
                if b > 0 && labels.y_symbol(j).is_some() {
                    best = best.min(get(&table, a, b - 1) + 1);
                }
                if a > 0 && b > 0 {
                    let diag = get(&table, a - 1, b - 1);
                    if labels.equal(i, j) {
                        best = best.min(diag);
                    } else if labels.y_symbol(j).is_some() {
                        best = best.min(diag + 1);
                    }
                }
                best
            };
            table[idx(a, b)] = value;
        }
    }
    let total = get(&table, rows, cols);
    if total as usize > budget {
        return Ok(None);
    }
    let (mut a, mut b) = (rows, cols);
    while a > 0 || b > 0 {
        let here = get(&table, a, b);
        let (i, j) = (lo.0 + a, lo.1 + b);
        if a > 0 && b > 0 {
            let diag = get(&table, a - 1, b - 1);
            if labels.equal(i, j) && here == diag {
                a -= 1;
                b -= 1;
                continue;
            }
            if let Some(c) = labels.y_symbol(j) {
                if !labels.equal(i, j) && here == diag + 1 {
                    ops.push(EditOp::Substitute { position: i, symbol: c });
                    a -= 1;
                    b -= 1;
                    continue;
                }
            }
        }
        if a > 0 && here == get(&table, a - 1, b) + 1 {
            ops.push(EditOp::Delete { position: i });
            a -= 1;
        } else {
            let c = labels.y_symbol(j).expect("insert step needs a known character");
            ops.push(EditOp::Insert { position: i + 1, symbol: c });
            b -= 1;
        }
    }
    Ok(Some(total as usize))
}
