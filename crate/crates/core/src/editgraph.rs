//! Indel-distance table and its typed-arc digraph. The extremal
//! backtracking routines read insertion candidates off the table.
//!
//! Rows index prefixes of `x` and columns index prefixes of `y`, so entry
//! `(i, j)` is the indel distance between `x[..i]` and `y[..j]`. Arcs always
//! point back toward `(0, 0)`:
//!
//! * type 1 (up): `(i, j) -> (i - 1, j)`, a symbol of `x` is dropped;
//! * type 2 (diagonal): `(i, j) -> (i - 1, j - 1)`, `x_i = y_j` matched;
//! * type 3 (left): `(i, j) -> (i, j - 1)`, a symbol of `y` is inserted.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seqcore::{self, IndexSet, Sequence};

/// The `(n + 1) x (m + 1)` indel-distance table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditMatrix {
    rows: usize,
    cols: usize,
    h: Vec<u32>,
}

impl EditMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.h[i * self.cols + j]
    }

    /// Distance between the full words.
    pub fn distance(&self) -> u32 {
        self.get(self.rows - 1, self.cols - 1)
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        self.h.chunks(self.cols).map(<[u32]>::to_vec).collect()
    }
}

impl fmt::Display for EditMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.h.chunks(self.cols) {
            let line: Vec<String> = row.iter().map(u32::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

fn check_alphabets(x: &Sequence, y: &Sequence) -> Result<()> {
    if x.alphabet_size() != y.alphabet_size() {
        return Err(Error::AlphabetMismatch(x.alphabet_size(), y.alphabet_size()));
    }
    Ok(())
}

/// Fills the indel-distance table row by row.
pub fn edit_matrix(x: &Sequence, y: &Sequence) -> Result<EditMatrix> {
    check_alphabets(x, y)?;
    let (n, m) = (x.len(), y.len());
    let cols = m + 1;
    let mut h = vec![0u32; (n + 1) * cols];
    for i in 0..=n {
        h[i * cols] = i as u32;
    }
    for j in 0..=m {
        h[j] = j as u32;
    }
    for i in 1..=n {
        for j in 1..=m {
            let mismatch = if x.at(i) != y.at(j) { 2 } else { 0 };
            let left = h[i * cols + j - 1] + 1;
            let up = h[(i - 1) * cols + j] + 1;
            let diag = h[(i - 1) * cols + j - 1] + mismatch;
            h[i * cols + j] = left.min(up).min(diag);
        }
    }
    Ok(EditMatrix { rows: n + 1, cols, h })
}

/// Smallest number of single-symbol insertions plus deletions turning `x`
/// into `y`.
pub fn indel_distance(x: &Sequence, y: &Sequence) -> Result<u32> {
    Ok(edit_matrix(x, y)?.distance())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ArcType {
    Up = 1,
    Diagonal = 2,
    Left = 3,
}

impl ArcType {
    pub fn number(self) -> u8 {
        self as u8
    }

    fn step(self, (i, j): (usize, usize)) -> (usize, usize) {
        match self {
            ArcType::Up => (i - 1, j),
            ArcType::Diagonal => (i - 1, j - 1),
            ArcType::Left => (i, j - 1),
        }
    }
}

/// The typed-arc digraph over the table's vertices.
///
/// Arc membership is stored as one flag per (vertex, type); the arc leaves
/// the vertex toward the origin as described in the module docs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EditGraph {
    rows: usize,
    cols: usize,
    up: Vec<bool>,
    diagonal: Vec<bool>,
    left: Vec<bool>,
}

impl EditGraph {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn has_arc(&self, (i, j): (usize, usize), kind: ArcType) -> bool {
        let v = i * self.cols + j;
        match kind {
            ArcType::Up => self.up[v],
            ArcType::Diagonal => self.diagonal[v],
            ArcType::Left => self.left[v],
        }
    }

    /// Outgoing arc types of a vertex, in type order.
    pub fn out_arcs(&self, v: (usize, usize)) -> impl Iterator<Item = ArcType> + '_ {
        [ArcType::Up, ArcType::Diagonal, ArcType::Left].into_iter().filter(move |&k| self.has_arc(v, k))
    }

    pub fn out_degree(&self, v: (usize, usize)) -> usize {
        self.out_arcs(v).count()
    }

    /// Arcs of one type as `(tail, head)` vertex pairs.
    pub fn arcs(&self, kind: ArcType) -> Vec<((usize, usize), (usize, usize))> {
        let mut out = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.has_arc((i, j), kind) {
                    out.push(((i, j), kind.step((i, j))));
                }
            }
        }
        out
    }
}

pub fn build_graph(x: &Sequence, y: &Sequence, h: &EditMatrix) -> Result<EditGraph> {
    check_alphabets(x, y)?;
    if h.rows != x.len() + 1 || h.cols != y.len() + 1 {
        return Err(Error::LengthMismatch { expected: (x.len() + 1) * (y.len() + 1), got: h.h.len() });
    }
    let (rows, cols) = (h.rows, h.cols);
    let size = rows * cols;
    let (mut up, mut diagonal, mut left) = (vec![false; size], vec![false; size], vec![false; size]);
    for i in 0..rows {
        for j in 0..cols {
            let v = i * cols + j;
            up[v] = i >= 1 && h.get(i, j) == h.get(i - 1, j) + 1;
            diagonal[v] = i >= 1 && j >= 1 && x.at(i) == y.at(j);
            left[v] = j >= 1 && h.get(i, j) == h.get(i, j - 1) + 1;
        }
    }
    Ok(EditGraph { rows, cols, up, diagonal, left })
}

/// A corner-to-corner path from `(n, m)` to `(0, 0)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DpPath {
    vertices: Vec<(usize, usize)>,
    arcs: Vec<ArcType>,
}

impl DpPath {
    pub fn vertices(&self) -> &[(usize, usize)] {
        &self.vertices
    }

    pub fn arcs(&self) -> &[ArcType] {
        &self.arcs
    }

    pub fn count(&self, kind: ArcType) -> usize {
        self.arcs.iter().filter(|&&a| a == kind).count()
    }

    fn steps(&self) -> impl Iterator<Item = ((usize, usize), ArcType)> + '_ {
        self.vertices.iter().copied().zip(self.arcs.iter().copied())
    }

    /// Whether every step is an arc of the recorded type in `g`.
    pub fn is_valid_in(&self, g: &EditGraph) -> bool {
        self.vertices.len() == self.arcs.len() + 1
            && self.vertices.first() == Some(&(g.rows - 1, g.cols - 1))
            && self.vertices.last() == Some(&(0, 0))
            && self
                .steps()
                .zip(self.vertices.iter().skip(1))
                .all(|((v, kind), &next)| g.has_arc(v, kind) && kind.step(v) == next)
    }

    /// Lowest and highest row visited in each column.
    fn column_span(&self, cols: usize) -> Vec<(usize, usize)> {
        let mut span = vec![(usize::MAX, 0); cols];
        for &(i, j) in &self.vertices {
            let s = &mut span[j];
            s.0 = s.0.min(i);
            s.1 = s.1.max(i);
        }
        span
    }
}

impl fmt::Display for DpPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.vertices.iter().map(|(i, j)| format!("v{i},{j}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Branch priorities of the two backtracking routines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Priority {
    /// Up, then diagonal, then left. Yields the minimum path.
    Bottom,
    /// Left, then diagonal, then up. Yields the maximum path.
    Top,
}

impl Priority {
    fn order(self) -> [ArcType; 3] {
        match self {
            Priority::Bottom => [ArcType::Up, ArcType::Diagonal, ArcType::Left],
            Priority::Top => [ArcType::Left, ArcType::Diagonal, ArcType::Up],
        }
    }
}

/// Greedy backtrack from `(n, m)` taking the first applicable branch in
/// `priority` order until both coordinates reach zero.
pub fn backtrack(x: &Sequence, y: &Sequence, h: &EditMatrix, priority: Priority) -> Result<DpPath> {
    check_alphabets(x, y)?;
    if h.rows != x.len() + 1 || h.cols != y.len() + 1 {
        return Err(Error::LengthMismatch { expected: (x.len() + 1) * (y.len() + 1), got: h.h.len() });
    }
    let (mut i, mut j) = (x.len(), y.len());
    let mut vertices = vec![(i, j)];
    let mut arcs = Vec::with_capacity(i + j);
    while i >= 1 || j >= 1 {
        let fired = priority.order().into_iter().find(|&kind| match kind {
            ArcType::Up => i >= 1 && h.get(i, j) == h.get(i - 1, j) + 1,
            ArcType::Diagonal => i >= 1 && j >= 1 && x.at(i) == y.at(j),
            ArcType::Left => j >= 1 && h.get(i, j) == h.get(i, j - 1) + 1,
        });
        // every vertex other than the origin has an outgoing arc
        let kind = fired.unwrap_or_else(|| panic!("no branch applies at v{i},{j}"));
        (i, j) = kind.step((i, j));
        vertices.push((i, j));
        arcs.push(kind);
    }
    Ok(DpPath { vertices, arcs })
}

/// Minimum path under the column-span order.
pub fn path_bot(x: &Sequence, y: &Sequence, h: &EditMatrix) -> Result<DpPath> {
    backtrack(x, y, h, Priority::Bottom)
}

/// Maximum path under the column-span order.
pub fn path_top(x: &Sequence, y: &Sequence, h: &EditMatrix) -> Result<DpPath> {
    backtrack(x, y, h, Priority::Top)
}

/// Column `j` of every left arc `(i, j) -> (i, j - 1)` on the path.
pub fn f_insert(p: &DpPath, m: usize) -> IndexSet {
    let idx: BTreeSet<usize> = p.steps().filter(|(_, k)| *k == ArcType::Left).map(|((_, j), _)| j).collect();
    IndexSet::new(m, idx).expect("left arcs leave distinct columns")
}

/// Row `i` of every up arc `(i, j) -> (i - 1, j)` on the path.
pub fn f_delete(p: &DpPath, n: usize) -> IndexSet {
    let idx: BTreeSet<usize> = p.steps().filter(|(_, k)| *k == ArcType::Up).map(|((i, _), _)| i).collect();
    IndexSet::new(n, idx).expect("up arcs leave distinct rows")
}

/// Insertion candidates from the two extremal backtracks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidates {
    pub s1: IndexSet,
    pub s2: IndexSet,
}

impl Candidates {
    pub fn union(&self) -> IndexSet {
        self.s1.union(&self.s2).expect("same bound")
    }
}

pub fn candidate_insertion_indices(x: &Sequence, y: &Sequence) -> Result<Candidates> {
    let h = edit_matrix(x, y)?;
    candidates_with_priorities(x, y, &h, Priority::Bottom, Priority::Top)
}

/// Candidate extraction with explicit priorities for each routine. The
/// decoder always uses `(Bottom, Top)`; other combinations exist for
/// mutation testing of the verifiers.
pub fn candidates_with_priorities(
    x: &Sequence,
    y: &Sequence,
    h: &EditMatrix,
    first: Priority,
    second: Priority,
) -> Result<Candidates> {
    let s1 = f_insert(&backtrack(x, y, h, first)?, y.len());
    let s2 = f_insert(&backtrack(x, y, h, second)?, y.len());
    Ok(Candidates { s1, s2 })
}

/// Positions `j` of `y` whose single deletion lands in the single-deletion
/// ball of `x`, by direct enumeration.
pub fn oracle_j(x: &Sequence, y: &Sequence) -> Result<IndexSet> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { expected: x.len(), got: y.len() });
    }
    check_alphabets(x, y)?;
    if y.is_empty() {
        return Ok(IndexSet::empty(0));
    }
    let ball = seqcore::deletion_ball(x, 1)?;
    let n = y.len();
    let mut hits = Vec::new();
    for j in 1..=n {
        let s = IndexSet::new(n, [j])?;
        if ball.contains(&seqcore::delete(y, &s)?) {
            hits.push(j);
        }
    }
    IndexSet::new(n, hits)
}

/// Default dimension cap for [`enumerate_paths`].
pub const DEFAULT_PATH_CAP: usize = 12;

/// Every corner-to-corner path of `g`, depth first with arcs explored in
/// type order. Fails when either side exceeds `cap` or more than `budget`
/// paths exist.
pub fn enumerate_paths(g: &EditGraph, cap: usize, budget: usize) -> Result<Vec<DpPath>> {
    let (n, m) = (g.rows - 1, g.cols - 1);
    if n > cap || m > cap {
        return Err(Error::Parameter(format!("path enumeration capped at {cap}, got {n}x{m}")));
    }
    let mut out = Vec::new();
    let mut vertices = vec![(n, m)];
    let mut arcs = Vec::new();
    walk(g, &mut vertices, &mut arcs, &mut out, budget)?;
    Ok(out)
}

fn walk(
    g: &EditGraph,
    vertices: &mut Vec<(usize, usize)>,
    arcs: &mut Vec<ArcType>,
    out: &mut Vec<DpPath>,
    budget: usize,
) -> Result<()> {
    let v = *vertices.last().unwrap();
    if v == (0, 0) {
        if out.len() == budget {
            return Err(Error::BudgetExceeded { needed: budget as u128 + 1, budget: budget as u128 });
        }
        out.push(DpPath { vertices: vertices.clone(), arcs: arcs.clone() });
        return Ok(());
    }
    for kind in [ArcType::Up, ArcType::Diagonal, ArcType::Left] {
        if g.has_arc(v, kind) {
            vertices.push(kind.step(v));
            arcs.push(kind);
            walk(g, vertices, arcs, out, budget)?;
            vertices.pop();
            arcs.pop();
        }
    }
    Ok(())
}

/// Column-span order: `p <= q` iff in every column both the lowest and the
/// highest row visited by `p` are at most those of `q`.
pub fn poset_leq(p: &DpPath, q: &DpPath) -> bool {
    let cols = p.vertices.iter().chain(&q.vertices).map(|&(_, j)| j + 1).max().unwrap_or(0);
    let (sp, sq) = (p.column_span(cols), q.column_span(cols));
    sp.iter().zip(&sq).all(|(a, b)| a.0 <= b.0 && a.1 <= b.1)
}
