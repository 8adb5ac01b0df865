//! Single vertex moves and their cost algebra.
//!
//! A move `(u -> j)` takes `u` out of the order and reinserts it at rank `j`;
//! the vertices it passes over shift one place toward `u`'s old rank. All
//! improvement functions here are positive when the move lowers the cost.

use crate::error::{Error, Result};
use crate::permutation::{cost, Permutation};
use crate::tournament::Tournament;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Move {
    pub vertex: usize,
    pub target: usize,
}

impl Move {
    pub fn new(vertex: usize, target: usize) -> Self {
        Move { vertex, target }
    }

    /// `d = |j - rank(u)|`.
    pub fn length(&self, pi: &Permutation) -> usize {
        self.target.abs_diff(pi.rank(self.vertex))
    }

    /// Ranks passed over by the move, inclusive on both ends of the moving
    /// vertex's path.
    pub fn span(&self, pi: &Permutation) -> (usize, usize) {
        let r = pi.rank(self.vertex);
        (r.min(self.target), r.max(self.target))
    }
}

/// `l = ceil(log2 d)`, with `l = 0` for `d <= 1`.
#[inline]
pub fn log_length(d: usize) -> u32 {
    if d <= 1 {
        0
    } else {
        usize::BITS - (d - 1).leading_zeros()
    }
}

/// Moves applied simultaneously. Movers are pairwise distinct.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MoveSet {
    moves: Vec<Move>,
}

impl MoveSet {
    pub fn new(moves: Vec<Move>) -> Result<Self> {
        let mut seen: Vec<usize> = moves.iter().map(|m| m.vertex).collect();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateMover(w[0]));
        }
        Ok(MoveSet { moves })
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn contains(&self, m: &Move) -> bool {
        self.moves.contains(m)
    }

    pub fn without(&self, m: &Move) -> MoveSet {
        MoveSet { moves: self.moves.iter().copied().filter(|x| x != m).collect() }
    }
}

pub fn apply_move(pi: &Permutation, m: Move) -> Permutation {
    let r = pi.rank(m.vertex);
    assert!(m.target < pi.len(), "target {} outside 0..{}", m.target, pi.len());
    let mut order = pi.order().to_vec();
    order.remove(r);
    order.insert(m.target, m.vertex);
    Permutation::new(order).expect("move keeps vertices distinct")
}

/// Applies every move of `moves` at once.
///
/// Unmoved vertices keep the key `(rank, 0)`. A mover bound for `j` gets
/// `(j, -1)` when moving left and `(j, +1)` when moving right, so it lands on
/// the correct side of the vertex currently at `j`. Equal keys fall back to
/// the original rank.
pub fn apply_moves_parallel(pi: &Permutation, moves: &MoveSet) -> Permutation {
    Permutation::new(parallel_order(pi.order(), |v| pi.rank(v), moves.moves()))
        .expect("parallel move keeps vertices distinct")
}

/// Core of [`apply_moves_parallel`] over a bare order and rank lookup.
pub(crate) fn parallel_order(
    order: &[usize],
    rank: impl Fn(usize) -> usize,
    moves: &[Move],
) -> Vec<usize> {
    let mut keys: Vec<(usize, i8, usize)> =
        order.iter().enumerate().map(|(r, _)| (r, 0i8, r)).collect();
    for m in moves {
        let r = rank(m.vertex);
        assert!(m.target < order.len(), "target {} outside 0..{}", m.target, order.len());
        let side = match m.target.cmp(&r) {
            std::cmp::Ordering::Less => -1,
            std::cmp::Ordering::Equal => 0,
            std::cmp::Ordering::Greater => 1,
        };
        keys[r] = (m.target, side, r);
    }
    keys.sort_unstable();
    keys.into_iter().map(|(_, _, r)| order[r]).collect()
}

/// Exact cost improvement of `(u -> j)`.
pub fn test_move(pi: &Permutation, t: &Tournament, u: usize, j: usize) -> i64 {
    let r = pi.rank(u);
    if j > r {
        (r + 1..=j).map(|k| pi.at(k)).map(|v| t.w(v, u) - t.w(u, v)).sum()
    } else {
        (j..r).map(|k| pi.at(k)).map(|v| t.w(u, v) - t.w(v, u)).sum()
    }
}

/// One sampled comparison between a moving vertex and a partner.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrientedSample {
    pub partner: usize,
    pub partner_beats: bool,
}

impl OrientedSample {
    /// Contribution of the sample to the improvement of moving past the
    /// partner in the given direction.
    #[inline]
    pub fn sign(&self, rightward: bool) -> i64 {
        if self.partner_beats == rightward {
            1
        } else {
            -1
        }
    }
}

/// Unbiased estimate of [`test_move`] from partners sampled uniformly in the
/// move range: `d / |E| * sum of signs`.
pub fn test_move_sampled(
    pi: &Permutation,
    u: usize,
    j: usize,
    samples: &[OrientedSample],
) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let r = pi.rank(u);
    let (lo, hi) = if j > r { (r + 1, j) } else { (j, r.saturating_sub(1)) };
    let rightward = j > r;
    let mut sum = 0i64;
    for s in samples {
        let rv = pi.rank(s.partner);
        if j == r || rv < lo || rv > hi {
            return Err(Error::BadParam(format!(
                "partner {} at rank {rv} outside move range of ({u} -> {j})",
                s.partner
            )));
        }
        sum += s.sign(rightward);
    }
    Ok(j.abs_diff(r) as f64 * sum as f64 / samples.len() as f64)
}

/// Observed improvement of `m` inside the batch `moves`:
/// `cost(pi_{M \ m}) - cost(pi_M)`.
pub fn test_move_observed(
    pi: &Permutation,
    t: &Tournament,
    moves: &MoveSet,
    m: &Move,
) -> Result<i64> {
    if !moves.contains(m) {
        return Err(Error::MoveNotInSet(m.vertex));
    }
    let with = cost(&apply_moves_parallel(pi, moves), t) as i64;
    let without = cost(&apply_moves_parallel(pi, &moves.without(m)), t) as i64;
    Ok(without - with)
}
