//! Recursive pivot partitioning over the edge stream.
//!
//! Each level draws `k = ⌈n^{1/p}⌉` pivots per active block, keeps the
//! pivot–block edges in one shared pass, orders the pivots and bins every
//! other vertex into a gap between consecutive pivots. Bins become the
//! blocks of the next level. Blocks at the last level, or with at most
//! `k + 1` vertices, keep all their edges and are ordered in memory.

use rand::seq::index::sample;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::offline::{ham_path_offline_by, kwiksort_by};
use crate::error::Result;
use crate::par;
use crate::ptas::node_rng;
use crate::stream::{EdgeFilter, EdgeStream};
use crate::tournament::Tournament;

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Binning {
    /// Pivots on an insertion path; each vertex takes the least-loaded slot
    /// `q_i -> v -> q_{i+1}`, ties to the left.
    HamSlot,
    /// Pivots in quicksort order by draw priority; each vertex descends the
    /// pivot tree.
    KwikSort,
}

#[derive(Clone, Debug)]
pub struct PivotConfig {
    pub p: usize,
    pub seed: u64,
    pub binning: Binning,
    pub parallel: bool,
    pub redo_factor: f64,
    pub max_redo: usize,
}

impl PivotConfig {
    pub fn new(p: usize, seed: u64, binning: Binning) -> Self {
        PivotConfig { p, seed, binning, parallel: true, redo_factor: 4.0, max_redo: 8 }
    }

    fn phase(&self, level: usize) -> String {
        match self.binning {
            Binning::HamSlot => format!("ham-level-{level}"),
            Binning::KwikSort => format!("kwik-level-{level}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PivotLevel {
    pub level: usize,
    pub blocks: usize,
    pub pivot_blocks: usize,
    pub full_blocks: usize,
    pub retained_edges: usize,
    pub redo_passes: usize,
    pub redo_blocks: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PivotOutcome {
    pub order: Vec<usize>,
    pub levels: Vec<PivotLevel>,
    /// Blocks re-pivoted because a bin was oversize.
    pub redo_count: usize,
    /// Blocks accepted oversize after `max_redo` attempts.
    pub redo_capped: usize,
}

/// Smallest `k` with `k^p ≥ n`.
pub fn pivots_per_block(n: usize, p: usize) -> usize {
    let mut k = (n.max(1) as f64).powf(1.0 / p.max(1) as f64).floor() as usize;
    while (k as f64).powi(p as i32) < n as f64 {
        k += 1;
    }
    k.max(1)
}

#[derive(Clone, Copy, Debug)]
enum Entry {
    V(usize),
    B(usize),
}

struct Block {
    id: u64,
    vertices: Vec<usize>,
}

/// Either pivots to bin around, or every edge.
enum Plan {
    Full,
    Pivots(Vec<usize>),
}

enum Piece {
    V(usize),
    Bin(usize),
}

struct Solved {
    pieces: Vec<Piece>,
    bins: Vec<Vec<usize>>,
    oversize: bool,
}

fn draw_pivots(cfg: &PivotConfig, block: &Block, k: usize, attempt: usize) -> Vec<usize> {
    let mut rng: ChaCha8Rng = node_rng(cfg.seed ^ attempt as u64, block.id, b"pivots");
    let mut idx: Vec<usize> = sample(&mut rng, block.vertices.len(), k).into_vec();
    idx.iter_mut().for_each(|i| *i = block.vertices[*i]);
    idx
}

struct Scratch {
    block_of: Vec<u32>,
    local_of: Vec<u32>,
    pivot_slot: Vec<u32>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch { block_of: vec![NONE; n], local_of: vec![NONE; n], pivot_slot: vec![NONE; n] }
    }
}

/// One pass serving `which` blocks under `plans`; returns each block's edges
/// in local ids.
type Edges = Vec<(usize, usize)>;

fn collect(
    stream: &mut EdgeStream,
    phase: &str,
    blocks: &[Block],
    which: &[usize],
    plans: &[Plan],
    s: &mut Scratch,
) -> Result<(Vec<Edges>, usize)> {
    s.block_of.fill(NONE);
    s.pivot_slot.fill(NONE);
    let mut full = vec![false; blocks.len()];
    for (&b, plan) in which.iter().zip(plans) {
        for (i, &v) in blocks[b].vertices.iter().enumerate() {
            s.block_of[v] = b as u32;
            s.local_of[v] = i as u32;
        }
        match plan {
            Plan::Full => full[b] = true,
            Plan::Pivots(piv) => {
                for (i, &q) in piv.iter().enumerate() {
                    s.pivot_slot[q] = i as u32;
                }
            }
        }
    }
    let (block_of, pivot_slot) = (&s.block_of, &s.pivot_slot);
    let mut filter = EdgeFilter::new("pivot-edges", |u: usize, v: usize| {
        let b = block_of[u];
        b != NONE && b == block_of[v] && (full[b as usize] || pivot_slot[u] != NONE || pivot_slot[v] != NONE)
    });
    stream.run_pass(phase, &mut [&mut filter])?;
    let words = filter.edges.len();
    let mut slot = vec![usize::MAX; blocks.len()];
    for (k, &b) in which.iter().enumerate() {
        slot[b] = k;
    }
    let mut per = vec![Vec::new(); which.len()];
    for (u, v) in filter.edges {
        let b = s.block_of[u] as usize;
        per[slot[b]].push((s.local_of[u] as usize, s.local_of[v] as usize));
    }
    Ok((per, words))
}

fn solve_block(cfg: &PivotConfig, block: &Block, plan: &Plan, edges: &[(usize, usize)]) -> Result<Solved> {
    let size = block.vertices.len();
    let piv_local: Vec<usize> = match plan {
        Plan::Full => {
            let t = Tournament::from_edges(size, edges.iter().copied())?;
            let local: Vec<usize> = (0..size).collect();
            let beats = |a: usize, b: usize| t.beats(a, b);
            let order = match cfg.binning {
                Binning::HamSlot => ham_path_offline_by(&local, beats),
                Binning::KwikSort => kwiksort_by(&local, &beats, &mut node_rng(cfg.seed, block.id, b"kwik")),
            };
            let pieces = order.into_iter().map(|i| Piece::V(block.vertices[i])).collect();
            return Ok(Solved { pieces, bins: Vec::new(), oversize: false });
        }
        Plan::Pivots(piv) => {
            let pos: std::collections::HashMap<usize, usize> =
                block.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            piv.iter().map(|q| pos[q]).collect()
        }
    };
    let k = piv_local.len();
    let mut pslot = vec![NONE; size];
    for (i, &l) in piv_local.iter().enumerate() {
        pslot[l] = i as u32;
    }
    // beats[l * k + i]: local vertex l beats pivot i
    let mut beats = vec![false; size * k];
    for &(u, v) in edges {
        if pslot[v] != NONE {
            beats[u * k + pslot[v] as usize] = true;
        }
    }
    let pivot_beats = |i: usize, j: usize| beats[piv_local[i] * k + j];
    // pivot order as pivot indices
    let path: Vec<usize> = match cfg.binning {
        Binning::HamSlot => ham_path_offline_by(&(0..k).collect::<Vec<_>>(), pivot_beats),
        Binning::KwikSort => {
            fn qs(list: &[usize], b: &impl Fn(usize, usize) -> bool, out: &mut Vec<usize>) {
                let Some((&root, rest)) = list.split_first() else { return };
                let (l, r): (Vec<usize>, Vec<usize>) = rest.iter().partition(|&&x| b(x, root));
                qs(&l, b, out);
                out.push(root);
                qs(&r, b, out);
            }
            let mut out = Vec::with_capacity(k);
            qs(&(0..k).collect::<Vec<_>>(), &pivot_beats, &mut out);
            out
        }
    };
    let mut bins: Vec<Vec<usize>> = vec![Vec::new(); k + 1];
    for (l, &v) in block.vertices.iter().enumerate() {
        if pslot[l] != NONE {
            continue;
        }
        let row = &beats[l * k..(l + 1) * k];
        let gap = match cfg.binning {
            Binning::HamSlot => {
                let valid = |s: usize| (s == 0 || !row[path[s - 1]]) && (s == k || row[path[s]]);
                (0..=k)
                    .filter(|&s| valid(s))
                    .min_by_key(|&s| (bins[s].len(), s))
                    .expect("a tournament always admits a slot")
            }
            Binning::KwikSort => {
                let (mut lo, mut hi) = (0, k);
                while lo < hi {
                    // highest priority = earliest drawn pivot in the range
                    let m = (lo..hi).min_by_key(|&m| path[m]).unwrap();
                    if row[path[m]] {
                        hi = m;
                    } else {
                        lo = m + 1;
                    }
                }
                lo
            }
        };
        bins[gap].push(v);
    }
    let expected = (size - k) as f64 / (k + 1) as f64;
    let oversize = cfg.binning == Binning::HamSlot
        && bins.iter().any(|b| b.len() as f64 > cfg.redo_factor * expected.max(1.0));
    let mut pieces = Vec::with_capacity(2 * k + 1);
    for s in 0..=k {
        pieces.push(Piece::Bin(s));
        if s < k {
            pieces.push(Piece::V(block.vertices[piv_local[path[s]]]));
        }
    }
    Ok(Solved { pieces, bins, oversize })
}

/// Orders all vertices of the stream by recursive pivot partitioning.
pub fn pivot_order(stream: &mut EdgeStream, cfg: &PivotConfig) -> Result<PivotOutcome> {
    let n = stream.n();
    let k = pivots_per_block(n, cfg.p);
    let mut out = PivotOutcome { order: Vec::new(), levels: Vec::new(), redo_count: 0, redo_capped: 0 };
    if n == 0 {
        return Ok(out);
    }
    stream.meter_mut().hold(n);
    let mut scratch = Scratch::new(n);
    let mut layout = vec![Entry::B(0)];
    let mut blocks = vec![Block { id: 1, vertices: (0..n).collect() }];
    let mut next_id = 2u64;

    for level in 1..=cfg.p.max(1) {
        if blocks.is_empty() {
            break;
        }
        let mut rec = PivotLevel { level, blocks: blocks.len(), ..Default::default() };
        let mut plans: Vec<Plan> = blocks
            .iter()
            .map(|b| {
                if level >= cfg.p || b.vertices.len() <= k + 1 {
                    Plan::Full
                } else {
                    Plan::Pivots(draw_pivots(cfg, b, k, 0))
                }
            })
            .collect();
        rec.full_blocks = plans.iter().filter(|p| matches!(p, Plan::Full)).count();
        rec.pivot_blocks = blocks.len() - rec.full_blocks;
        let all: Vec<usize> = (0..blocks.len()).collect();
        let (edges, words) = collect(stream, &cfg.phase(level), &blocks, &all, &plans, &mut scratch)?;
        rec.retained_edges = words;
        let jobs: Vec<(usize, Vec<(usize, usize)>)> = edges.into_iter().enumerate().collect();
        let mut solved: Vec<Solved> = par::map(cfg.parallel, jobs, |(b, e)| solve_block(cfg, &blocks[b], &plans[b], &e))
            .into_iter()
            .collect::<Result<_>>()?;
        stream.meter_mut().release(words);

        let mut attempt = 0;
        loop {
            let pending: Vec<usize> = (0..blocks.len()).filter(|&b| solved[b].oversize).collect();
            if pending.is_empty() {
                break;
            }
            if attempt >= cfg.max_redo {
                out.redo_capped += pending.len();
                break;
            }
            attempt += 1;
            out.redo_count += pending.len();
            rec.redo_passes += 1;
            rec.redo_blocks += pending.len();
            let redo_plans: Vec<Plan> =
                pending.iter().map(|&b| Plan::Pivots(draw_pivots(cfg, &blocks[b], k, attempt))).collect();
            let (edges, words) = collect(stream, "ham-redo", &blocks, &pending, &redo_plans, &mut scratch)?;
            let jobs: Vec<(usize, Vec<(usize, usize)>)> = edges.into_iter().enumerate().collect();
            let redone: Vec<Solved> = par::map(cfg.parallel, jobs, |(i, e)| {
                solve_block(cfg, &blocks[pending[i]], &redo_plans[i], &e)
            })
            .into_iter()
            .collect::<Result<_>>()?;
            stream.meter_mut().release(words);
            for ((&b, s), plan) in pending.iter().zip(redone).zip(redo_plans) {
                solved[b] = s;
                plans[b] = plan;
            }
        }

        let mut next_blocks = Vec::new();
        let mut next_layout = Vec::with_capacity(layout.len());
        for e in layout {
            match e {
                Entry::V(v) => next_layout.push(Entry::V(v)),
                Entry::B(b) => {
                    let s = &mut solved[b];
                    for piece in &s.pieces {
                        match *piece {
                            Piece::V(v) => next_layout.push(Entry::V(v)),
                            Piece::Bin(i) => {
                                let bin = std::mem::take(&mut s.bins[i]);
                                match bin.len() {
                                    0 => {}
                                    1 => next_layout.push(Entry::V(bin[0])),
                                    _ => {
                                        next_layout.push(Entry::B(next_blocks.len()));
                                        next_blocks.push(Block { id: next_id, vertices: bin });
                                        next_id += 1;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        layout = next_layout;
        blocks = next_blocks;
        out.levels.push(rec);
    }
    debug_assert!(blocks.is_empty());
    out.order = layout
        .into_iter()
        .map(|e| match e {
            Entry::V(v) => v,
            Entry::B(_) => unreachable!("last level keeps every block whole"),
        })
        .collect();
    stream.meter_mut().release(n);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GeneratorSpec};
    use crate::hamscc::offline::validate_ham_path;
    use crate::stream::StreamOrder;

    #[test]
    fn pivots_per_block_is_ceiling_root() {
        assert_eq!(pivots_per_block(1024, 2), 32);
        assert_eq!(pivots_per_block(1025, 2), 33);
        assert_eq!(pivots_per_block(1000, 3), 10);
        assert_eq!(pivots_per_block(7, 1), 7);
    }

    #[test]
    fn both_binnings_give_paths() {
        for (seed, binning) in [(1, Binning::HamSlot), (2, Binning::KwikSort)] {
            for p in 1..=3 {
                let t = generate(&GeneratorSpec::uniform(300, seed)).unwrap();
                let mut s = EdgeStream::new(t.clone(), StreamOrder::Canonical);
                let out = pivot_order(&mut s, &PivotConfig::new(p, seed, binning)).unwrap();
                assert!(validate_ham_path(&out.order, &t), "{binning:?} p={p}");
                let redo: usize = out.levels.iter().map(|l| l.redo_passes).sum();
                assert_eq!(s.meter().passes(), out.levels.len() + redo);
                assert_eq!(s.meter().current_words(), 0);
            }
        }
    }
}
