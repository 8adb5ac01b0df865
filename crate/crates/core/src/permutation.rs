//! Orderings of a vertex subset and the feedback arc set cost they induce.
//!
//! Ranks are 0-based throughout: the first vertex of an order has rank 0.

use crate::error::{Error, Result};
use crate::tournament::{pair_count, Tournament};

const ABSENT: u32 = u32::MAX;

/// A bijection between the vertices of an active subset and ranks `0..N`.
#[derive(Clone, PartialEq, Eq)]
pub struct Permutation {
    order: Vec<usize>,
    rank: Vec<u32>,
}

impl std::fmt::Debug for Permutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_tuple("Permutation").field(&self.order).finish()
    }
}

impl Permutation {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let span = order.iter().copied().max().map_or(0, |m| m + 1);
        let mut rank = vec![ABSENT; span];
        for (r, &v) in order.iter().enumerate() {
            if rank[v] != ABSENT {
                return Err(Error::BadParam(format!("vertex {v} repeated in order")));
            }
            rank[v] = r as u32;
        }
        Ok(Permutation { order, rank })
    }

    /// The sorted order `0, 1, ..., n-1`.
    pub fn identity(n: usize) -> Self {
        Permutation { order: (0..n).collect(), rank: (0..n as u32).collect() }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn into_order(self) -> Vec<usize> {
        self.order
    }

    pub fn contains(&self, v: usize) -> bool {
        self.rank.get(v).is_some_and(|&r| r != ABSENT)
    }

    pub fn try_rank(&self, v: usize) -> Option<usize> {
        self.rank.get(v).copied().filter(|&r| r != ABSENT).map(|r| r as usize)
    }

    /// Rank of `v`. Panics if `v` is not in the subset.
    #[inline]
    pub fn rank(&self, v: usize) -> usize {
        let r = self.rank[v];
        assert!(r != ABSENT, "vertex {v} not in permutation");
        r as usize
    }

    #[inline]
    pub fn at(&self, r: usize) -> usize {
        self.order[r]
    }

    pub fn reversed(&self) -> Permutation {
        let mut order = self.order.clone();
        order.reverse();
        Permutation::new(order).expect("reversal keeps vertices distinct")
    }

    /// Keeps the relative order of the vertices for which `keep` holds.
    pub fn restrict(&self, mut keep: impl FnMut(usize) -> bool) -> Permutation {
        let order = self.order.iter().copied().filter(|&v| keep(v)).collect();
        Permutation::new(order).expect("subsequence keeps vertices distinct")
    }
}

/// Number of backward edges: pairs ranked `u` before `v` with `v -> u`.
pub fn cost(pi: &Permutation, t: &Tournament) -> u64 {
    order_cost(pi.order(), t)
}

/// [`cost`] on a bare vertex sequence.
pub fn order_cost(order: &[usize], t: &Tournament) -> u64 {
    let mut total = 0u64;
    for (i, &u) in order.iter().enumerate() {
        for &v in &order[i + 1..] {
            total += t.beats(v, u) as u64;
        }
    }
    total
}

/// An unordered pair whose orientation has been read off the stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResolvedPair {
    pub a: usize,
    pub b: usize,
    pub a_beats_b: bool,
}

impl ResolvedPair {
    pub fn resolve(t: &Tournament, a: usize, b: usize) -> Self {
        ResolvedPair { a, b, a_beats_b: t.beats(a, b) }
    }

    /// True when this pair is a backward edge under `rank`.
    #[inline]
    pub fn is_backward(&self, rank_a: usize, rank_b: usize) -> bool {
        (rank_a < rank_b) != self.a_beats_b
    }
}

/// Cost estimate from a multiset of sampled pairs, scaled by `C(N,2)/|E|`
/// with `N` the size of the permutation's own subset.
pub fn restricted_cost(pi: &Permutation, samples: &[ResolvedPair]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let backward = samples
        .iter()
        .filter(|s| s.a != s.b && s.is_backward(pi.rank(s.a), pi.rank(s.b)))
        .count();
    Ok(pair_count(pi.len()) as f64 / samples.len() as f64 * backward as f64)
}
