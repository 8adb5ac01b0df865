//! Dense tournament storage.
//!
//! Every unordered pair `{u, v}` with `u < v` owns one bit of a row-major
//! upper-triangle bitmap. A set bit means the lower index beats the higher
//! one (`u -> v`), a clear bit means `v -> u`.

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct Tournament {
    n: usize,
    bits: Vec<u64>,
}

impl std::fmt::Debug for Tournament {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Tournament").field("n", &self.n).finish_non_exhaustive()
    }
}

/// Number of unordered pairs on `n` vertices.
#[inline]
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Row-major index of the pair `{lo, hi}`, `lo < hi < n`.
#[inline]
pub fn pair_index(n: usize, lo: usize, hi: usize) -> usize {
    debug_assert!(lo < hi && hi < n);
    lo * n - lo * (lo + 1) / 2 + (hi - lo - 1)
}

/// Inverse of [`pair_index`].
pub fn pair_from_index(n: usize, mut idx: usize) -> (usize, usize) {
    let mut lo = 0;
    loop {
        let row = n - lo - 1;
        if idx < row {
            return (lo, lo + 1 + idx);
        }
        idx -= row;
        lo += 1;
    }
}

impl Tournament {
    /// Builds a tournament from a predicate `beats(lo, hi)` queried once per
    /// pair with `lo < hi`.
    pub fn from_fn(n: usize, mut lower_beats_higher: impl FnMut(usize, usize) -> bool) -> Self {
        let words = pair_count(n).div_ceil(64);
        let mut bits = vec![0u64; words];
        let mut idx = 0usize;
        for lo in 0..n {
            for hi in lo + 1..n {
                if lower_beats_higher(lo, hi) {
                    bits[idx / 64] |= 1 << (idx % 64);
                }
                idx += 1;
            }
        }
        Tournament { n, bits }
    }

    /// Builds a tournament from a list of directed edges. Every pair must
    /// appear exactly once.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let total = pair_count(n);
        let mut seen = vec![false; total];
        let mut bits = vec![0u64; total.div_ceil(64)];
        let mut count = 0usize;
        for (u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(Error::BadParam(format!("edge {u}->{v} invalid for n={n}")));
            }
            let (lo, hi) = if u < v { (u, v) } else { (v, u) };
            let idx = pair_index(n, lo, hi);
            if seen[idx] {
                return Err(Error::BadParam(format!("pair {{{lo},{hi}}} oriented twice")));
            }
            seen[idx] = true;
            count += 1;
            if u < v {
                bits[idx / 64] |= 1 << (idx % 64);
            }
        }
        if count != total {
            return Err(Error::BadParam(format!("{} of {total} pairs unoriented", total - count)));
        }
        Ok(Tournament { n, bits })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `W(u, v)` as a boolean: true iff the edge `u -> v` is present.
    #[inline]
    pub fn beats(&self, u: usize, v: usize) -> bool {
        if u == v {
            return false;
        }
        if u < v {
            self.lower_beats(pair_index(self.n, u, v))
        } else {
            !self.lower_beats(pair_index(self.n, v, u))
        }
    }

    /// `W(u, v)` as an integer weight.
    #[inline]
    pub fn w(&self, u: usize, v: usize) -> i64 {
        self.beats(u, v) as i64
    }

    /// Orientation bit of pair index `idx`.
    #[inline]
    pub fn lower_beats(&self, idx: usize) -> bool {
        (self.bits[idx / 64] >> (idx % 64)) & 1 == 1
    }

    /// Directed edge for pair index `idx`, as `(from, to)`.
    pub fn edge_at(&self, idx: usize) -> (usize, usize) {
        let (lo, hi) = pair_from_index(self.n, idx);
        if self.lower_beats(idx) {
            (lo, hi)
        } else {
            (hi, lo)
        }
    }

    /// All directed edges in row-major pair order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |lo| (lo + 1..n).map(move |hi| (lo, hi))).enumerate().map(
            move |(idx, (lo, hi))| {
                if self.lower_beats(idx) {
                    (lo, hi)
                } else {
                    (hi, lo)
                }
            },
        )
    }

    pub fn indegree(&self, v: usize) -> usize {
        (0..self.n).filter(|&u| self.beats(u, v)).count()
    }

    /// Induced sub-tournament on `vertices`; local vertex `i` is `vertices[i]`.
    pub fn restrict(&self, vertices: &[usize]) -> Tournament {
        Tournament::from_fn(vertices.len(), |a, b| self.beats(vertices[a], vertices[b]))
    }

    pub(crate) fn raw_bits(&self) -> &[u64] {
        &self.bits
    }

    pub(crate) fn from_raw_bits(n: usize, bits: Vec<u64>) -> Self {
        Tournament { n, bits }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_index_round_trip() {
        let n = 7;
        let mut idx = 0;
        for lo in 0..n {
            for hi in lo + 1..n {
                assert_eq!(pair_index(n, lo, hi), idx);
                assert_eq!(pair_from_index(n, idx), (lo, hi));
                idx += 1;
            }
        }
        assert_eq!(idx, pair_count(n));
    }

    #[test]
    fn antisymmetric_and_irreflexive() {
        let t = Tournament::from_fn(9, |a, b| (a * 7 + b * 3) % 5 < 2);
        for u in 0..9 {
            assert!(!t.beats(u, u));
            for v in 0..9 {
                if u != v {
                    assert_eq!(t.w(u, v) + t.w(v, u), 1);
                }
            }
        }
    }

    #[test]
    fn from_edges_rejects_duplicates_and_gaps() {
        assert!(Tournament::from_edges(3, [(0, 1), (1, 0), (1, 2), (2, 0)]).is_err());
        assert!(Tournament::from_edges(3, [(0, 1), (1, 2)]).is_err());
        let t = Tournament::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(t.beats(2, 0));
        assert_eq!(t.edges().collect::<Vec<_>>(), vec![(0, 1), (2, 0), (1, 2)]);
    }

    #[test]
    fn restrict_maps_local_ids() {
        let t = Tournament::from_fn(5, |_, _| true);
        let sub = t.restrict(&[4, 1, 3]);
        // 4 loses to 1 and 3 in the transitive order
        assert!(sub.beats(1, 0));
        assert!(sub.beats(1, 2));
        assert!(sub.beats(2, 0));
    }
}
