//! Pre-drawn sample ensembles `E_{v,i}`.
//!
//! For every vertex `v` of the drawing node and every index `i < supply`,
//! `E_{v,i}` holds `size` partners drawn uniformly from the node's other
//! vertices, together with the orientation of each pair once a pass has
//! resolved it.

use rand::Rng;

use crate::error::{Error, Result};
use crate::moves::OrientedSample;
use crate::permutation::Permutation;
use crate::stream::PairResolver;
use crate::tournament::Tournament;

const ABSENT: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct SampleEnsemble {
    vertices: Vec<usize>,
    slot: Vec<u32>,
    count: usize,
    size: usize,
    partners: Vec<u32>,
    partner_beats: Vec<u64>,
}

impl SampleEnsemble {
    /// Draws partner ids for every vertex of `vertices`; orientations are
    /// unresolved until [`SampleEnsemble::resolve`].
    pub fn draw(vertices: &[usize], count: usize, size: usize, rng: &mut impl Rng) -> Self {
        let span = vertices.iter().copied().max().map_or(0, |m| m + 1);
        let mut slot = vec![ABSENT; span];
        for (s, &v) in vertices.iter().enumerate() {
            slot[v] = s as u32;
        }
        let size = if vertices.len() < 2 { 0 } else { size };
        let total = vertices.len() * count * size;
        let mut partners = Vec::with_capacity(total);
        let others = vertices.len().saturating_sub(1);
        for s in 0..vertices.len() {
            for _ in 0..count * size {
                let mut k = rng.random_range(0..others);
                if k >= s {
                    k += 1;
                }
                partners.push(vertices[k] as u32);
            }
        }
        SampleEnsemble {
            vertices: vertices.to_vec(),
            slot,
            count,
            size,
            partners,
            partner_beats: vec![0; total.div_ceil(64)],
        }
    }

    /// Draws and resolves against a tournament held in memory.
    pub fn from_tournament(
        t: &Tournament,
        vertices: &[usize],
        count: usize,
        size: usize,
        rng: &mut impl Rng,
    ) -> Self {
        let mut e = Self::draw(vertices, count, size, rng);
        e.fill(|a, b| t.beats(a, b));
        e
    }

    /// Every `(vertex, partner)` pair that needs an orientation.
    pub fn requests(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let per = self.count * self.size;
        self.partners
            .iter()
            .enumerate()
            .map(move |(k, &w)| (self.vertices[k / per], w as usize))
    }

    pub fn resolve(&mut self, resolver: &PairResolver) {
        self.fill(|a, b| resolver.beats(a, b));
    }

    fn fill(&mut self, beats: impl Fn(usize, usize) -> bool) {
        let per = self.count * self.size;
        for (k, &w) in self.partners.iter().enumerate() {
            if beats(w as usize, self.vertices[k / per]) {
                self.partner_beats[k / 64] |= 1 << (k % 64);
            }
        }
    }

    pub fn supply(&self) -> usize {
        self.count
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Stored samples, one word each.
    pub fn words(&self) -> usize {
        self.partners.len()
    }

    pub fn covers(&self, v: usize) -> bool {
        self.slot.get(v).is_some_and(|&s| s != ABSENT)
    }

    /// `E_{v,i}`.
    pub fn samples(&self, v: usize, i: usize) -> Result<impl Iterator<Item = OrientedSample> + '_> {
        if i >= self.count {
            return Err(Error::EnsembleExhausted { cursor: i, supply: self.count });
        }
        let s = *self
            .slot
            .get(v)
            .filter(|&&s| s != ABSENT)
            .ok_or_else(|| Error::BadParam(format!("vertex {v} has no ensemble")))?
            as usize;
        let start = (s * self.count + i) * self.size;
        Ok((start..start + self.size).map(|k| OrientedSample {
            partner: self.partners[k] as usize,
            partner_beats: self.partner_beats[k / 64] >> (k % 64) & 1 == 1,
        }))
    }
}

/// Samples whose partner currently sits inside the move range of `(u -> j)`.
pub fn get_sample(
    pi: &Permutation,
    samples: impl IntoIterator<Item = OrientedSample>,
    u: usize,
    j: usize,
) -> Vec<OrientedSample> {
    let r = pi.rank(u);
    let (lo, hi) = if j > r { (r + 1, j) } else { (j, r) };
    samples
        .into_iter()
        .filter(|s| match pi.try_rank(s.partner) {
            Some(q) => j != r && q >= lo && q <= hi && q != r,
            None => false,
        })
        .collect()
}
