//! Classical words over `Z_q` with their deletion and indel balls.
//! Also decides whether a word reveals its deletion positions.
//!
//! All index sets are 1-based. Position `i` of a word refers to its `i`-th
//! symbol, and an [`IndexSet`] carries the length of the word it indexes.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite word over the alphabet `Z_q`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Sequence {
    q: u32,
    symbols: Vec<u32>,
}

impl Sequence {
    pub fn new(q: u32, symbols: Vec<u32>) -> Result<Self> {
        if q == 0 {
            return Err(Error::EmptyAlphabet);
        }
        if let Some((pos, &s)) = symbols.iter().enumerate().find(|(_, &s)| s >= q) {
            return Err(Error::SymbolOutOfRange { symbol: s, position: pos + 1, q });
        }
        Ok(Sequence { q, symbols })
    }

    /// The empty word over `Z_q`.
    pub fn empty(q: u32) -> Result<Self> {
        Self::new(q, Vec::new())
    }

    pub fn alphabet_size(&self) -> u32 {
        self.q
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Symbol at 1-based position `i`.
    pub fn at(&self, i: usize) -> u32 {
        self.symbols[i - 1]
    }

    /// Same word viewed over a different alphabet.
    pub fn with_alphabet(&self, q: u32) -> Result<Self> {
        Self::new(q, self.symbols.clone())
    }

    fn from_raw(q: u32, symbols: Vec<u32>) -> Self {
        Sequence { q, symbols }
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.symbols.iter().join(","))
    }
}

/// A strictly increasing set of 1-based indices into a word of length `bound`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IndexSet {
    indices: Vec<usize>,
    bound: usize,
}

impl IndexSet {
    /// Builds an index set from indices in any order. Duplicates and indices
    /// outside `[1, bound]` are rejected.
    pub fn new(bound: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        for w in v.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateIndex(w[0]));
            }
        }
        if let Some(&bad) = v.iter().find(|&&i| i == 0 || i > bound) {
            return Err(Error::IndexOutOfRange { index: bad, bound });
        }
        Ok(IndexSet { indices: v, bound })
    }

    pub fn empty(bound: usize) -> Self {
        IndexSet { indices: Vec::new(), bound }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn union(&self, other: &IndexSet) -> Result<IndexSet> {
        if self.bound != other.bound {
            return Err(Error::BoundMismatch { expected: self.bound, got: other.bound });
        }
        let merged: BTreeSet<usize> = self.indices.iter().chain(&other.indices).copied().collect();
        Ok(IndexSet { indices: merged.into_iter().collect(), bound: self.bound })
    }

    /// All index sets of size `k` inside `[1, bound]`, in lexicographic order.
    pub fn all_of_size(bound: usize, k: usize) -> impl Iterator<Item = IndexSet> {
        (1..=bound).combinations(k).map(move |indices| IndexSet { indices, bound })
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.indices.iter().join(","))
    }
}

/// Removes the positions in `s` from `x`.
pub fn delete(x: &Sequence, s: &IndexSet) -> Result<Sequence> {
    if s.bound != x.len() {
        return Err(Error::BoundMismatch { expected: x.len(), got: s.bound });
    }
    Ok(delete_unchecked(x, &s.indices))
}

fn delete_unchecked(x: &Sequence, sorted: &[usize]) -> Sequence {
    let mut out = Vec::with_capacity(x.len() - sorted.len());
    let mut k = 0;
    for (i, &v) in x.symbols.iter().enumerate() {
        if k < sorted.len() && sorted[k] == i + 1 {
            k += 1;
        } else {
            out.push(v);
        }
    }
    Sequence::from_raw(x.q, out)
}

/// Inserts the symbols of `lambda` so that they occupy positions `s` of the
/// output, in order.
pub fn insert(x: &Sequence, s: &IndexSet, lambda: &Sequence) -> Result<Sequence> {
    if s.len() != lambda.len() {
        return Err(Error::LengthMismatch { expected: s.len(), got: lambda.len() });
    }
    if s.bound != x.len() + s.len() {
        return Err(Error::BoundMismatch { expected: x.len() + s.len(), got: s.bound });
    }
    if lambda.q != x.q {
        return Err(Error::AlphabetMismatch(x.q, lambda.q));
    }
    Ok(insert_unchecked(x, &s.indices, &lambda.symbols))
}

fn insert_unchecked(x: &Sequence, sorted: &[usize], lambda: &[u32]) -> Sequence {
    let total = x.len() + sorted.len();
    let mut out = Vec::with_capacity(total);
    let (mut k, mut src) = (0, 0);
    for pos in 1..=total {
        if k < sorted.len() && sorted[k] == pos {
            out.push(lambda[k]);
            k += 1;
        } else {
            out.push(x.symbols[src]);
            src += 1;
        }
    }
    Sequence::from_raw(x.q, out)
}

/// All words reachable from `x` by exactly `t` deletions.
pub fn deletion_ball(x: &Sequence, t: usize) -> Result<BTreeSet<Sequence>> {
    if t > x.len() {
        return Err(Error::Parameter(format!("t = {t} exceeds length {}", x.len())));
    }
    Ok(IndexSet::all_of_size(x.len(), t).map(|s| delete_unchecked(x, &s.indices)).collect())
}

/// All words obtained by `t` insertions followed by `t` deletions, minus `x`.
pub fn indel_ball(x: &Sequence, t: usize) -> Result<BTreeSet<Sequence>> {
    let n = x.len();
    let mut out = BTreeSet::new();
    let lambdas: Vec<Vec<u32>> = (0..t).map(|_| 0..x.q).multi_cartesian_product().collect();
    let lambdas = if t == 0 { vec![Vec::new()] } else { lambdas };
    for ins in IndexSet::all_of_size(n + t, t) {
        for lambda in &lambdas {
            let grown = insert_unchecked(x, &ins.indices, lambda);
            for del in IndexSet::all_of_size(n + t, t) {
                out.insert(delete_unchecked(&grown, &del.indices));
            }
        }
    }
    out.remove(x);
    Ok(out)
}

/// The periodic marker word `m_i = (i - 1) mod (t + 1)` over `Z_{t+1}`.
pub fn monotone_periodic(n: usize, t: usize) -> Sequence {
    let period = t + 1;
    Sequence::from_raw(period as u32, (0..n).map(|i| (i % period) as u32).collect())
}

/// Whether every size-`t` deletion pattern of `x` can be recovered from the
/// deleted word, i.e. `S -> D_S(x)` is injective on size-`t` index sets.
pub fn detects_deletions(x: &Sequence, t: usize) -> bool {
    if t > x.len() {
        return false;
    }
    let mut seen = BTreeSet::new();
    IndexSet::all_of_size(x.len(), t).all(|s| seen.insert(delete_unchecked(x, &s.indices)))
}

/// Every word in `Z_q^n` passing [`detects_deletions`] for `t`.
///
/// Fails with [`Error::BudgetExceeded`] when `q^n` exceeds `budget`.
pub fn enumerate_detecting(n: usize, q: u32, t: usize, budget: u128) -> Result<Vec<Sequence>> {
    let needed = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let words = (0..n).map(|_| 0..q).multi_cartesian_product();
    let words: Box<dyn Iterator<Item = Vec<u32>>> =
        if n == 0 { Box::new(std::iter::once(Vec::new())) } else { Box::new(words) };
    Ok(words.map(|s| Sequence::from_raw(q, s)).filter(|x| detects_deletions(x, t)).collect())
}

/// The `n - 1` words obtained by swapping positions `i` and `i + 1`.
///
/// Entry `i - 1` of the returned list is the swap at `i`.
pub fn transposition_family(x: &Sequence) -> Result<Vec<Sequence>> {
    if x.len() < 2 {
        return Err(Error::Parameter("transpositions need length >= 2".into()));
    }
    Ok((0..x.len() - 1)
        .map(|i| {
            let mut s = x.symbols.clone();
            s.swap(i, i + 1);
            Sequence::from_raw(x.q, s)
        })
        .collect())
}

/// Members of the single indel ball whose symbols at `i` and `i + 1` agree.
#[derive(Clone, Debug)]
pub struct AdjacentEqualFamily {
    /// `per_index[i - 1]` holds the words with `z_i = z_{i+1}`.
    pub per_index: Vec<BTreeSet<Sequence>>,
    pub union: BTreeSet<Sequence>,
}

pub fn adjacent_equal_family(x: &Sequence, t: usize) -> Result<AdjacentEqualFamily> {
    if !detects_deletions(x, t) {
        return Err(Error::Parameter(format!("{x} does not detect {t} deletions")));
    }
    let ball = indel_ball(x, 1)?;
    let n = x.len();
    let per_index: Vec<BTreeSet<Sequence>> =
        (1..n).map(|i| ball.iter().filter(|z| z.at(i) == z.at(i + 1)).cloned().collect()).collect();
    let union = per_index.iter().flatten().cloned().collect();
    Ok(AdjacentEqualFamily { per_index, union })
}
