//! The recursive partitioning driver, scheduled level by level.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::PtasConfig;
use super::indegree::indegree_approx;
use super::level::{draw_level_ensembles, level_schedule, LevelSchedule, TopDraw};
use super::local_improve::{approx_local_improve_until, AliLedger};
use super::node_rng;
use crate::addapprox::add_approx_mfas;
use crate::attribution::{attribute_costs, CostAttribution, RecursionTrace, TraceNode};
use crate::error::{Error, Result};
use crate::oracle::brute_force;
use crate::par;
use crate::permutation::{Permutation, ResolvedPair};
use crate::stream::{EdgeFilter, EdgeStream, MeterReport};
use crate::tournament::{pair_count, Tournament};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeafKind {
    Brute,
    AddApprox,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub level: usize,
    pub tops: usize,
    pub nodes: usize,
    pub ensemble_words: usize,
    pub pool_words: usize,
}

/// Inherited-sample coverage of one node, measured when it starts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeptRecord {
    pub size: usize,
    pub level: usize,
    pub top: bool,
    pub vertices: usize,
    /// Vertices whose current ensemble keeps at least the floor inside the node.
    pub at_floor: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PtasLedger {
    pub profile: String,
    pub levels: Vec<LevelRecord>,
    pub local_improve: AliLedger,
    pub brute_leaves: usize,
    pub addapprox_leaves: usize,
    pub addapprox_fallbacks: usize,
    pub base_case_passes: usize,
    pub kept_floor: usize,
    pub kept: Vec<KeptRecord>,
}

#[derive(Clone, Debug)]
pub struct PtasOutput {
    pub permutation: Permutation,
    pub trace: RecursionTrace,
    pub attribution: CostAttribution,
    pub meter: MeterReport,
    pub ledger: PtasLedger,
}

struct Task {
    path: u64,
    order: Vec<usize>,
}

struct Leaf {
    path: u64,
    kind: LeafKind,
    order: Vec<usize>,
}

#[derive(Default)]
struct TopOutcome {
    trace: Vec<TraceNode>,
    leaves: Vec<Leaf>,
    deferred: Vec<Task>,
    ali: AliLedger,
    kept: Vec<KeptRecord>,
    nodes: usize,
}

struct Ctx<'a> {
    n: usize,
    level: usize,
    schedule: &'a LevelSchedule,
    config: &'a PtasConfig,
}

impl Ctx<'_> {
    fn leaf_or_task(&self, path: u64, order: Vec<usize>) -> std::result::Result<Leaf, Task> {
        if order.len() <= self.config.brute_floor(self.n) {
            Ok(Leaf { path, kind: LeafKind::Brute, order })
        } else {
            Err(Task { path, order })
        }
    }

    /// Ensembles a node may consume: the unread supply split evenly over the
    /// longest chain of nodes that can still follow it inside the level.
    fn share(&self, size: usize, draw: &TopDraw, cursor: usize) -> usize {
        let Some(e) = draw.ensemble.as_ref() else { return 0 };
        let floor = self.schedule.thresholds[self.level].max(1.0);
        let chain = ((size as f64 / floor).ln() / 1.5f64.ln()).max(0.0).ceil() as usize + 1;
        (e.supply().saturating_sub(cursor) / chain).max(1)
    }

    fn kept(&self, pi: &Permutation, draw: &TopDraw, cursor: usize, top: bool) -> Option<KeptRecord> {
        let e = draw.ensemble.as_ref()?;
        if cursor >= e.supply() {
            return None;
        }
        let floor = self.config.kept_floor(self.n);
        let at_floor = pi
            .order()
            .iter()
            .filter(|&&v| {
                let kept = e.samples(v, cursor).map_or(0, |s| s.filter(|s| pi.contains(s.partner)).count());
                kept >= floor
            })
            .count();
        Some(KeptRecord { size: pi.len(), level: self.level, top, vertices: pi.len(), at_floor })
    }

    fn process(
        &self,
        task: Task,
        pool: Vec<ResolvedPair>,
        draw: &TopDraw,
        cursor: usize,
        top: bool,
        out: &mut TopOutcome,
    ) -> Result<()> {
        out.nodes += 1;
        let size = task.order.len();
        let config = self.config;
        let pi = Permutation::new(task.order)?;
        let pool: Vec<ResolvedPair> = if top {
            pool
        } else {
            pool.into_iter().filter(|p| pi.contains(p.a) && pi.contains(p.b)).collect()
        };
        let estimate: Vec<ResolvedPair> = pool.iter().copied().take(config.cost_samples(self.n)).collect();
        if !estimate.is_empty() {
            let backward = estimate.iter().filter(|p| p.is_backward(pi.rank(p.a), pi.rank(p.b))).count();
            let c = pair_count(size) as f64 * backward as f64 / estimate.len() as f64;
            if c >= config.high_cost(size) {
                out.leaves.push(Leaf { path: task.path, kind: LeafKind::AddApprox, order: pi.into_order() });
                return Ok(());
            }
        }
        if let Some(k) = self.kept(&pi, draw, cursor, top) {
            out.kept.push(k);
        }
        let mut rng = node_rng(config.seed, task.path, b"improve");
        let mut cursor = cursor;
        let limit = cursor + self.share(size, draw, cursor);
        let (pi, ali) = approx_local_improve_until(
            pi,
            self.n,
            draw.ensemble.as_ref(),
            &mut cursor,
            limit,
            config,
            &mut rng,
            None,
        )?;
        out.ali.absorb(&ali);
        let lo = size.div_ceil(3).max(1);
        let hi = (2 * size / 3).clamp(lo, size - 1);
        let k = rng.random_range(lo..=hi);
        let order = pi.into_order();
        let (left, right) = (order[..k].to_vec(), order[k..].to_vec());
        out.trace.push(TraceNode::Internal { id: task.path as usize, left: left.clone(), right: right.clone() });
        for (path, part) in [(task.path * 2, left), (task.path * 2 + 1, right)] {
            match self.leaf_or_task(path, part) {
                Ok(leaf) => out.leaves.push(leaf),
                Err(child) => {
                    if child.order.len() as f64 >= self.schedule.thresholds[self.level] - 1e-9 {
                        self.process(child, pool.clone(), draw, cursor, false, out)?;
                    } else {
                        out.deferred.push(child);
                    }
                }
            }
        }
        Ok(())
    }
}

/// In-order key of a node path: the bits below the leading one, left
/// aligned.
fn inorder_key(path: u64) -> u128 {
    let depth = 63 - path.leading_zeros();
    let below = (path ^ (1 << depth)) as u128;
    if depth == 0 {
        0
    } else {
        below << (127 - depth)
    }
}

/// Indegree pass, `p` level passes, then one pass collecting every leaf's
/// internal edges.
pub fn run_ptas(stream: &mut EdgeStream, config: &PtasConfig) -> Result<PtasOutput> {
    config.validate()?;
    let n = stream.n();
    let p = config.passes;
    let schedule = level_schedule(n, p);
    let pi0 = indegree_approx(stream)?;
    let mut ledger = PtasLedger {
        profile: config.profile.name.clone(),
        kept_floor: config.kept_floor(n),
        ..Default::default()
    };
    let mut trace = RecursionTrace::default();
    let mut leaves = Vec::new();
    let mut frontier: Vec<Vec<Task>> = (0..=p).map(|_| Vec::new()).collect();
    if n > 0 {
        let ctx = Ctx { n, level: 1, schedule: &schedule, config };
        match ctx.leaf_or_task(1, pi0.into_order()) {
            Ok(leaf) => leaves.push(leaf),
            Err(task) => frontier[schedule.level_of(n)?].push(task),
        }
    }
    for level in 1..=p {
        let tasks = std::mem::take(&mut frontier[level]);
        for t in &tasks {
            schedule.check(t.order.len(), level)?;
        }
        let tops: Vec<(u64, Vec<usize>)> = tasks.into_iter().map(|t| (t.path, t.order)).collect();
        let draws = draw_level_ensembles(stream, &schedule, level, &tops, config)?;
        let words: usize = draws.iter().map(TopDraw::words).sum();
        let mut record = LevelRecord {
            level,
            tops: tops.len(),
            nodes: 0,
            ensemble_words: draws.iter().map(|d| d.ensemble.as_ref().map_or(0, |e| e.words())).sum(),
            pool_words: draws.iter().map(|d| d.pool.len()).sum(),
        };
        let ctx = Ctx { n, level, schedule: &schedule, config };
        let outcomes = par::map(config.parallel, tops.into_iter().zip(draws).collect(), |((path, order), mut draw)| {
            let mut out = TopOutcome::default();
            let pool = std::mem::take(&mut draw.pool);
            ctx.process(Task { path, order }, pool, &draw, 0, true, &mut out).map(|_| out)
        });
        stream.meter_mut().release(words);
        for out in outcomes {
            let out = out?;
            record.nodes += out.nodes;
            trace.nodes.extend(out.trace);
            leaves.extend(out.leaves);
            ledger.local_improve.absorb(&out.ali);
            ledger.kept.extend(out.kept);
            for task in out.deferred {
                // children that leave a level always move to a deeper one
                let l = schedule.level_of(task.order.len())?;
                if l <= level {
                    let (lo, hi) = schedule.band(level + 1);
                    return Err(Error::LevelOverflow { size: task.order.len(), level: l, lo, hi });
                }
                frontier[l].push(task);
            }
        }
        ledger.levels.push(record);
    }
    let solved = solve_leaves(stream, leaves, config, &mut ledger)?;
    let mut ordered: Vec<(u128, Vec<usize>)> = Vec::with_capacity(solved.len());
    for (leaf, order) in solved {
        ledger.brute_leaves += (leaf.kind == LeafKind::Brute) as usize;
        ledger.addapprox_leaves += (leaf.kind == LeafKind::AddApprox) as usize;
        trace.nodes.push(TraceNode::Leaf { id: leaf.path as usize, vertices: order.clone() });
        ordered.push((inorder_key(leaf.path), order));
    }
    ordered.sort_by_key(|x| x.0);
    let permutation = Permutation::new(ordered.into_iter().flat_map(|x| x.1).collect())?;
    let attribution = attribute_costs(&trace, &permutation, stream.oracle_tournament())?;
    Ok(PtasOutput { permutation, trace, attribution, meter: stream.meter().report(), ledger })
}

fn solve_leaves(
    stream: &mut EdgeStream,
    leaves: Vec<Leaf>,
    config: &PtasConfig,
    ledger: &mut PtasLedger,
) -> Result<Vec<(Leaf, Vec<usize>)>> {
    if leaves.is_empty() {
        return Ok(Vec::new());
    }
    let n = stream.n();
    let mut group = vec![u32::MAX; n];
    let mut local = vec![0u32; n];
    for (g, leaf) in leaves.iter().enumerate() {
        for (i, &v) in leaf.order.iter().enumerate() {
            group[v] = g as u32;
            local[v] = i as u32;
        }
    }
    let mut collect = EdgeFilter::new("leaf-edges", |u: usize, v: usize| group[u] == group[v]);
    stream.run_pass("base-case", &mut [&mut collect])?;
    ledger.base_case_passes += 1;
    let words = collect.edges.len();
    let mut per_leaf: Vec<Vec<(usize, usize)>> = vec![Vec::new(); leaves.len()];
    for (u, v) in collect.edges {
        per_leaf[group[u] as usize].push((local[u] as usize, local[v] as usize));
    }
    let eps = config.epsilon;
    let eta = (n.max(2) as f64).powi(-4);
    let solved = par::map(config.parallel, leaves.into_iter().zip(per_leaf).collect(), |(leaf, edges)| {
        let size = leaf.order.len();
        let t = Tournament::from_edges(size, edges)?;
        let local_ids: Vec<usize> = (0..size).collect();
        let (order, fallback) = match leaf.kind {
            LeafKind::Brute => (brute_force(&t, &local_ids)?.1.into_order(), false),
            LeafKind::AddApprox => {
                let mut rng = node_rng(config.seed, leaf.path, b"addapprox");
                let out = add_approx_mfas(&t, &local_ids, eps.powi(3), eta, &mut rng)?;
                (out.order, out.fallback)
            }
        };
        let global = order.into_iter().map(|i| leaf.order[i]).collect();
        Ok::<_, Error>((leaf, global, fallback))
    });
    stream.meter_mut().release(words);
    let mut out = Vec::with_capacity(solved.len());
    for s in solved {
        let (leaf, order, fallback) = s?;
        ledger.addapprox_fallbacks += fallback as usize;
        out.push((leaf, order));
    }
    Ok(out)
}
