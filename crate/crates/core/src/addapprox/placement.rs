//! Bucket placements scored from a cut decomposition.
//!
//! A placement assigns each of the `N` indices to one of `ℓ` ordered
//! buckets. With `A = W - Wᵀ`, the cross-bucket backward edges number
//! `(P - S)/2` where `P` counts cross-bucket pairs and
//! `S = Σ_{b(i) < b(j)} A(i, j)`. Replacing `A` by the decomposition gives
//! the estimated placement cost.

use serde::{Deserialize, Serialize};

use super::cut::{CutDecomposition, Matrix};

/// Largest number of balanced assignments enumerated exhaustively.
pub const EXHAUSTIVE_CAP: u128 = 1 << 20;
pub const EXHAUSTIVE_MAX_N: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Exhaustive,
    Greedy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlacementParams {
    pub buckets: usize,
    /// Bucket capacities; the first `N mod ℓ` buckets take one extra.
    pub sizes: Vec<usize>,
    pub mode: SearchMode,
}

fn multinomial(sizes: &[usize]) -> u128 {
    let mut acc: u128 = 1;
    let mut total = 0u128;
    for &s in sizes {
        for k in 1..=s as u128 {
            total += 1;
            acc = acc.saturating_mul(total) / k;
        }
    }
    acc
}

impl PlacementParams {
    /// `ℓ = min(N, ⌈1/β⌉)` balanced buckets.
    pub fn new(n: usize, beta: f64) -> Self {
        let buckets = n.min((1.0 / beta).ceil() as usize).max(1);
        let sizes: Vec<usize> = (0..buckets).map(|b| n / buckets + (b < n % buckets) as usize).collect();
        let mode = if n <= EXHAUSTIVE_MAX_N && multinomial(&sizes) <= EXHAUSTIVE_CAP {
            SearchMode::Exhaustive
        } else {
            SearchMode::Greedy
        };
        PlacementParams { buckets, sizes, mode }
    }

    /// Bucket of each position when the buckets tile `0..N` in order.
    pub fn tiling(&self) -> Vec<usize> {
        self.sizes.iter().enumerate().flat_map(|(b, &s)| std::iter::repeat_n(b, s)).collect()
    }
}

fn cross_pairs(assign: &[usize], buckets: usize) -> f64 {
    let mut sizes = vec![0usize; buckets];
    for &b in assign {
        sizes[b] += 1;
    }
    let n = assign.len();
    let same: usize = sizes.iter().map(|s| s * s).sum();
    ((n * n - same) / 2) as f64
}

/// Estimated cross-bucket backward edges, from rectangle/bucket
/// intersection counts only.
pub fn placement_cost(assign: &[usize], buckets: usize, d: &CutDecomposition) -> f64 {
    let mut s = 0.0;
    let mut rs = vec![0usize; buckets];
    let mut cs = vec![0usize; buckets];
    for r in &d.rectangles {
        rs.fill(0);
        cs.fill(0);
        for &i in &r.rows {
            rs[assign[i]] += 1;
        }
        for &j in &r.cols {
            cs[assign[j]] += 1;
        }
        let mut below = 0usize;
        let mut acc = 0usize;
        for b in 0..buckets {
            acc += below * cs[b];
            below += rs[b];
        }
        s += r.density * acc as f64;
    }
    (cross_pairs(assign, buckets) - s) / 2.0
}

/// The same objective evaluated on a dense signed matrix.
pub fn bucketed_cost(assign: &[usize], buckets: usize, a: &Matrix) -> f64 {
    let n = assign.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if assign[i] < assign[j] {
                s += a.get(i, j);
            }
        }
    }
    (cross_pairs(assign, buckets) - s) / 2.0
}

/// `D(i, j)` summed over rectangles.
fn pair_weights(d: &CutDecomposition, n: usize) -> Vec<f64> {
    let mut w = vec![0.0; n * n];
    for r in &d.rectangles {
        for &i in &r.rows {
            for &j in &r.cols {
                w[i * n + j] += r.density;
            }
        }
    }
    w
}

fn exhaustive(n: usize, params: &PlacementParams, w: &[f64]) -> Vec<usize> {
    struct Dfs<'a> {
        n: usize,
        w: &'a [f64],
        left: Vec<usize>,
        assign: Vec<usize>,
        best: (f64, Vec<usize>),
    }
    impl Dfs<'_> {
        fn go(&mut self, i: usize, score: f64) {
            if i == self.n {
                if score > self.best.0 + 1e-12 {
                    self.best = (score, self.assign.clone());
                }
                return;
            }
            for b in 0..self.left.len() {
                if self.left[b] == 0 {
                    continue;
                }
                let mut gain = 0.0;
                for k in 0..i {
                    let bk = self.assign[k];
                    if bk < b {
                        gain += self.w[k * self.n + i];
                    } else if b < bk {
                        gain += self.w[i * self.n + k];
                    }
                }
                self.left[b] -= 1;
                self.assign[i] = b;
                self.go(i + 1, score + gain);
                self.left[b] += 1;
            }
        }
    }
    let mut dfs = Dfs {
        n,
        w,
        left: params.sizes.clone(),
        assign: vec![0; n],
        best: (f64::NEG_INFINITY, params.tiling()),
    };
    dfs.go(0, 0.0);
    dfs.best.1
}

/// Single-element swaps between buckets until none improves `S`.
fn swap_search(n: usize, w: &[f64], mut assign: Vec<usize>) -> Vec<usize> {
    // contribution of i given the others: Σ_k [b(i)<b(k)] w(i,k) + [b(k)<b(i)] w(k,i)
    let gain_at = |assign: &[usize], i: usize, b: usize, skip: usize| -> f64 {
        (0..n)
            .filter(|&k| k != i && k != skip)
            .map(|k| {
                let bk = assign[k];
                if b < bk {
                    w[i * n + k]
                } else if bk < b {
                    w[k * n + i]
                } else {
                    0.0
                }
            })
            .sum()
    };
    let mut improved = true;
    let mut sweeps = 0;
    while improved && sweeps < 64 {
        improved = false;
        sweeps += 1;
        for i in 0..n {
            for j in i + 1..n {
                let (bi, bj) = (assign[i], assign[j]);
                if bi == bj {
                    continue;
                }
                let pair = |bi: usize, bj: usize| {
                    if bi < bj {
                        w[i * n + j]
                    } else {
                        w[j * n + i]
                    }
                };
                let before = gain_at(&assign, i, bi, j) + gain_at(&assign, j, bj, i) + pair(bi, bj);
                let after = gain_at(&assign, i, bj, j) + gain_at(&assign, j, bi, i) + pair(bj, bi);
                if after > before + 1e-9 {
                    assign.swap(i, j);
                    improved = true;
                }
            }
        }
    }
    assign
}

/// Best bucket assignment found for `d`. `start` lists the indices in the
/// order used to seed the greedy search.
pub fn search_placement(d: &CutDecomposition, params: &PlacementParams, start: &[usize]) -> Vec<usize> {
    let n = start.len();
    let w = pair_weights(d, n);
    match params.mode {
        SearchMode::Exhaustive => exhaustive(n, params, &w),
        SearchMode::Greedy => {
            let mut assign = vec![0; n];
            for (&i, b) in start.iter().zip(params.tiling()) {
                assign[i] = b;
            }
            swap_search(n, &w, assign)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::addapprox::cut::CutRectangle;
    use crate::generate::{generate, GeneratorSpec};

    fn exact(a: &Matrix) -> CutDecomposition {
        let n = a.rows();
        CutDecomposition {
            rows: n,
            cols: n,
            rectangles: (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|&(i, j)| a.get(i, j) != 0.0)
                .map(|(i, j)| CutRectangle { rows: vec![i], cols: vec![j], density: a.get(i, j) })
                .collect(),
        }
    }

    #[test]
    fn single_bucket_costs_nothing() {
        let t = generate(&GeneratorSpec::uniform(8, 2)).unwrap();
        let a = Matrix::signed_comparison(&t, &(0..8).collect::<Vec<_>>());
        assert_eq!(placement_cost(&[0; 8], 1, &exact(&a)), 0.0);
    }

    #[test]
    fn exact_decomposition_matches_bucketed_cost() {
        let t = generate(&GeneratorSpec::uniform(12, 3)).unwrap();
        let a = Matrix::signed_comparison(&t, &(0..12).collect::<Vec<_>>());
        let params = PlacementParams::new(12, 0.25);
        let assign: Vec<usize> = (0..12).map(|i| (i * 7) % 4).collect();
        let d = exact(&a);
        assert!((placement_cost(&assign, params.buckets, &d) - bucketed_cost(&assign, 4, &a)).abs() < 1e-9);
    }

    #[test]
    fn bucketed_cost_counts_backward_edges() {
        let t = generate(&GeneratorSpec::transitive(6)).unwrap();
        let a = Matrix::signed_comparison(&t, &(0..6).collect::<Vec<_>>());
        assert_eq!(bucketed_cost(&[0, 0, 1, 1, 2, 2], 3, &a), 0.0);
        assert_eq!(bucketed_cost(&[2, 2, 1, 1, 0, 0], 3, &a), 12.0);
    }

    #[test]
    fn modes_and_sizes() {
        let p = PlacementParams::new(9, 0.15);
        assert_eq!(p.buckets, 7);
        assert_eq!(p.sizes, vec![2, 2, 1, 1, 1, 1, 1]);
        assert_eq!(p.mode, SearchMode::Exhaustive);
        assert_eq!(PlacementParams::new(16, 0.15).mode, SearchMode::Greedy);
        assert_eq!(PlacementParams::new(3, 0.5).buckets, 2);
    }

    #[test]
    fn exhaustive_finds_transitive_order() {
        let t = generate(&GeneratorSpec::transitive(8)).unwrap();
        let a = Matrix::signed_comparison(&t, &(0..8).collect::<Vec<_>>());
        let params = PlacementParams::new(8, 0.25);
        let start: Vec<usize> = (0..8).rev().collect();
        let assign = search_placement(&exact(&a), &params, &start);
        assert_eq!(bucketed_cost(&assign, params.buckets, &a), 0.0);
        let mut greedy = params.clone();
        greedy.mode = SearchMode::Greedy;
        let assign = search_placement(&exact(&a), &greedy, &start);
        assert_eq!(bucketed_cost(&assign, params.buckets, &a), 0.0);
    }
}
