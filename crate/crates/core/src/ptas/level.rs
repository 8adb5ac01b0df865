//! Condensing the recursion into `p` level passes.
//!
//! Level `η` holds the nodes of size in `[T_η, T_{η-1})` with
//! `T_η = n^{1-η/p}`. The nodes that open a level (its tops) draw inflated
//! ensembles and a cost-estimate pool in one shared pass; every descendant
//! that stays in the level reads from its top.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::PtasConfig;
use super::ensemble::SampleEnsemble;
use super::node_rng;
use crate::error::{Error, Result};
use crate::par;
use crate::permutation::ResolvedPair;
use crate::stream::{EdgeStream, PairResolver};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSchedule {
    pub n: usize,
    pub p: usize,
    /// `T_0 = n, …, T_p = 1`.
    pub thresholds: Vec<f64>,
}

impl LevelSchedule {
    /// `[T_η, T_{η-1}]`.
    pub fn band(&self, level: usize) -> (f64, f64) {
        (self.thresholds[level], self.thresholds[level - 1])
    }

    /// Smallest `η ≥ 1` with `size ≥ T_η`.
    pub fn level_of(&self, size: usize) -> Result<usize> {
        if size == 0 || size > self.n {
            return Err(Error::LevelOverflow { size, level: 0, lo: 1.0, hi: self.n as f64 });
        }
        let level = (1..=self.p)
            .find(|&η| size as f64 >= self.thresholds[η] - 1e-9)
            .expect("T_p = 1 admits every size");
        Ok(level)
    }

    /// Checks that a node of `size` may be handled at `level`.
    pub fn check(&self, size: usize, level: usize) -> Result<()> {
        if self.level_of(size)? != level {
            let (lo, hi) = self.band(level);
            return Err(Error::LevelOverflow { size, level, lo, hi });
        }
        Ok(())
    }
}

pub fn level_schedule(n: usize, p: usize) -> LevelSchedule {
    let thresholds = (0..=p)
        .map(|η| if η == p { 1.0 } else { (n.max(1) as f64).powf(1.0 - η as f64 / p as f64) })
        .collect();
    LevelSchedule { n, p, thresholds }
}

/// A level top and the samples its subtree may read.
#[derive(Debug)]
pub struct TopDraw {
    pub ensemble: Option<SampleEnsemble>,
    /// Cost-estimate pairs, in draw order.
    pub pool: Vec<ResolvedPair>,
}

impl TopDraw {
    pub fn words(&self) -> usize {
        self.ensemble.as_ref().map_or(0, |e| e.words()) + self.pool.len()
    }
}

/// Pool pairs per vertex for a top of `top` vertices: enough that a
/// descendant of size `T_η` still finds `cost_samples` pairs inside itself.
fn pool_per_vertex(config: &PtasConfig, schedule: &LevelSchedule, level: usize, top: usize) -> usize {
    let n = schedule.n;
    let floor = schedule.thresholds[level].max((config.brute_floor(n) + 1) as f64);
    (config.cost_samples(n) as f64 * top as f64 / (floor * floor)).ceil() as usize
}

/// Draws the ensembles and cost pools of every top of `level` and resolves
/// them in one pass. `tops` pairs each node's path with its vertices.
pub fn draw_level_ensembles(
    stream: &mut EdgeStream,
    schedule: &LevelSchedule,
    level: usize,
    tops: &[(u64, Vec<usize>)],
    config: &PtasConfig,
) -> Result<Vec<TopDraw>> {
    let n = schedule.n;
    let floor = config.brute_floor(n);
    let mut draws = par::map(config.parallel, tops.iter().collect(), |(path, vertices)| {
        let size = vertices.len();
        if size <= floor {
            return (TopDraw { ensemble: None, pool: Vec::new() }, Vec::new());
        }
        let mut rng: ChaCha8Rng = node_rng(config.seed, *path, b"draw");
        let per = pool_per_vertex(config, schedule, level, size);
        let mut pool_pairs = Vec::with_capacity(per * size);
        for (s, &v) in vertices.iter().enumerate() {
            for _ in 0..per {
                let mut k = rng.random_range(0..size - 1);
                if k >= s {
                    k += 1;
                }
                pool_pairs.push((v, vertices[k]));
            }
        }
        let ensemble = (size as f64 > config.skip_threshold(n)).then(|| {
            SampleEnsemble::draw(
                vertices,
                config.ensemble_count(n),
                config.ensemble_size(n, size),
                &mut rng,
            )
        });
        (TopDraw { ensemble, pool: Vec::new() }, pool_pairs)
    });
    let requests = draws.iter().flat_map(|(d, pool)| {
        pool.iter().copied().chain(d.ensemble.iter().flat_map(|e| e.requests()))
    });
    let mut resolver = PairResolver::new(n, requests);
    stream.run_pass(&format!("level-{level}"), &mut [&mut resolver])?;
    let resolver = &resolver;
    draws = par::map(config.parallel, draws, |(mut d, pool)| {
        if let Some(e) = d.ensemble.as_mut() {
            e.resolve(resolver);
        }
        d.pool = pool
            .into_iter()
            .map(|(a, b)| ResolvedPair { a, b, a_beats_b: resolver.beats(a, b) })
            .collect();
        (d, Vec::new())
    });
    Ok(draws.into_iter().map(|(d, _)| d).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bands_cover_every_size() {
        let s = level_schedule(1024, 2);
        assert_eq!(s.level_of(1024).unwrap(), 1);
        assert_eq!(s.level_of(32).unwrap(), 1);
        assert_eq!(s.level_of(31).unwrap(), 2);
        assert_eq!(s.level_of(1).unwrap(), 2);
        assert!(s.level_of(0).is_err());
        assert!(matches!(s.check(20, 1), Err(Error::LevelOverflow { .. })));
    }

    #[test]
    fn single_level_and_log_levels() {
        let s = level_schedule(512, 1);
        assert!((1..=512).all(|k| s.level_of(k).unwrap() == 1));
        // p = log2 n: every band halves
        let s = level_schedule(512, 9);
        for η in 1..=9 {
            let (lo, hi) = s.band(η);
            assert!((hi / lo - 2.0).abs() < 1e-9);
        }
    }
}
