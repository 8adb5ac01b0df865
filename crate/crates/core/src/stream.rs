//! Read-once edge streams with pass and space metering.
//!
//! Streaming algorithms see a tournament only through [`EdgeStream::run_pass`].
//! Each pass delivers every directed edge once to every registered
//! [`EdgeConsumer`]; at the end of the pass each consumer declares how many
//! words it kept, and the [`Meter`] adds them to the running total until the
//! algorithm releases them. One word is one stored oriented pair or one
//! counter.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::Ingested;
use crate::permutation::ResolvedPair;
use crate::tournament::{pair_count, pair_from_index, pair_index, Tournament};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StreamOrder {
    /// File order, or row-major pair order for generated instances.
    #[default]
    Canonical,
    /// Canonical order shuffled by a seeded generator.
    Shuffle(u64),
    /// All out-edges of vertex 0, then of vertex 1, and so on.
    BySource,
}

impl fmt::Display for StreamOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StreamOrder::Canonical => f.write_str("canonical"),
            StreamOrder::Shuffle(seed) => write!(f, "shuffle:{seed}"),
            StreamOrder::BySource => f.write_str("by-source"),
        }
    }
}

impl FromStr for StreamOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "canonical" => Ok(StreamOrder::Canonical),
            "by-source" => Ok(StreamOrder::BySource),
            _ => s
                .strip_prefix("shuffle:")
                .and_then(|seed| seed.parse().ok())
                .map(StreamOrder::Shuffle)
                .ok_or_else(|| Error::BadParam(format!("unknown stream order `{s}`"))),
        }
    }
}

/// Receives the edges of one pass.
pub trait EdgeConsumer {
    fn name(&self) -> &str;

    /// Called once per directed edge `from -> to`.
    fn on_edge(&mut self, from: usize, to: usize);

    /// Words kept after the pass. `None` means the consumer did not say, which
    /// the stream treats as an error.
    fn retained_words(&self) -> Option<usize>;
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub passes: usize,
    /// Words declared by the consumers of this phase, summed over its passes.
    pub words: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeterReport {
    pub passes: usize,
    pub peak_words: usize,
    pub phase_breakdown: BTreeMap<String, PhaseReport>,
}

#[derive(Clone, Debug, Default)]
pub struct Meter {
    passes: usize,
    current: usize,
    peak: usize,
    phases: BTreeMap<String, PhaseReport>,
}

impl Meter {
    pub fn passes(&self) -> usize {
        self.passes
    }

    pub fn current_words(&self) -> usize {
        self.current
    }

    pub fn peak_words(&self) -> usize {
        self.peak
    }

    /// Counts words kept outside a pass, e.g. state derived from earlier
    /// passes.
    pub fn hold(&mut self, words: usize) {
        self.current += words;
        self.peak = self.peak.max(self.current);
    }

    pub fn release(&mut self, words: usize) {
        self.current = self.current.saturating_sub(words);
    }

    pub fn phase(&self, name: &str) -> Option<&PhaseReport> {
        self.phases.get(name)
    }

    pub fn report(&self) -> MeterReport {
        MeterReport {
            passes: self.passes,
            peak_words: self.peak,
            phase_breakdown: self.phases.clone(),
        }
    }

    fn end_pass(&mut self, phase: &str, words: usize) {
        self.passes += 1;
        let entry = self.phases.entry(phase.to_string()).or_default();
        entry.passes += 1;
        entry.words += words;
        self.hold(words);
    }
}

pub fn meter_report(meter: &Meter) -> MeterReport {
    meter.report()
}

enum Sequence {
    RowMajor,
    BySource,
    Explicit(Vec<(u32, u32)>),
}

pub struct EdgeStream {
    t: Tournament,
    seq: Sequence,
    meter: Meter,
}

impl EdgeStream {
    pub fn new(t: Tournament, order: StreamOrder) -> Self {
        Self::build(t, None, order)
    }

    /// Keeps the file's edge order as the canonical order.
    pub fn from_ingested(ingested: Ingested, order: StreamOrder) -> Self {
        let row_major = ingested.edge_order.iter().enumerate().all(|(i, &p)| i == p);
        let file_order = (!row_major).then_some(ingested.edge_order);
        Self::build(ingested.tournament, file_order, order)
    }

    fn build(t: Tournament, file_order: Option<Vec<usize>>, order: StreamOrder) -> Self {
        let n = t.n();
        let directed = |idx: usize| {
            let (lo, hi) = pair_from_index(n, idx);
            if t.lower_beats(idx) {
                (lo as u32, hi as u32)
            } else {
                (hi as u32, lo as u32)
            }
        };
        let seq = match order {
            StreamOrder::Canonical => match file_order {
                Some(ids) => Sequence::Explicit(ids.into_iter().map(directed).collect()),
                None => Sequence::RowMajor,
            },
            StreamOrder::BySource => Sequence::BySource,
            StreamOrder::Shuffle(seed) => {
                let mut edges: Vec<(u32, u32)> = match file_order {
                    Some(ids) => ids.into_iter().map(directed).collect(),
                    None => t.edges().map(|(u, v)| (u as u32, v as u32)).collect(),
                };
                edges.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
                Sequence::Explicit(edges)
            }
        };
        EdgeStream { t, seq, meter: Meter::default() }
    }

    pub fn n(&self) -> usize {
        self.t.n()
    }

    pub fn meter(&self) -> &Meter {
        &self.meter
    }

    pub fn meter_mut(&mut self) -> &mut Meter {
        &mut self.meter
    }

    /// Unmetered access to the backing tournament. Reserved for oracles,
    /// cost audits and tests; algorithms must not call it.
    pub fn oracle_tournament(&self) -> &Tournament {
        &self.t
    }

    pub fn into_tournament(self) -> Tournament {
        self.t
    }

    /// One full traversal.
    pub fn run_pass(&mut self, phase: &str, consumers: &mut [&mut dyn EdgeConsumer]) -> Result<()> {
        let mut deliver = |u: usize, v: usize| {
            for c in consumers.iter_mut() {
                c.on_edge(u, v);
            }
        };
        let t = &self.t;
        match &self.seq {
            Sequence::RowMajor => {
                let mut idx = 0;
                for lo in 0..t.n() {
                    for hi in lo + 1..t.n() {
                        if t.lower_beats(idx) {
                            deliver(lo, hi);
                        } else {
                            deliver(hi, lo);
                        }
                        idx += 1;
                    }
                }
            }
            Sequence::BySource => {
                for u in 0..t.n() {
                    for v in 0..t.n() {
                        if u != v && t.beats(u, v) {
                            deliver(u, v);
                        }
                    }
                }
            }
            Sequence::Explicit(edges) => {
                for &(u, v) in edges {
                    deliver(u as usize, v as usize);
                }
            }
        }
        let mut words = 0;
        for c in consumers.iter() {
            words += c
                .retained_words()
                .ok_or_else(|| Error::ConsumerRetentionUndeclared(c.name().to_string()))?;
        }
        self.meter.end_pass(phase, words);
        Ok(())
    }
}

/// Counts edges and keeps nothing.
#[derive(Debug, Default)]
pub struct EdgeCounter {
    pub count: usize,
}

impl EdgeConsumer for EdgeCounter {
    fn name(&self) -> &str {
        "edge-counter"
    }

    fn on_edge(&mut self, _: usize, _: usize) {
        self.count += 1;
    }

    fn retained_words(&self) -> Option<usize> {
        Some(0)
    }
}

/// One counter per vertex.
#[derive(Debug)]
pub struct IndegreeCounter {
    pub indegree: Vec<usize>,
}

impl IndegreeCounter {
    pub fn new(n: usize) -> Self {
        IndegreeCounter { indegree: vec![0; n] }
    }
}

impl EdgeConsumer for IndegreeCounter {
    fn name(&self) -> &str {
        "indegree"
    }

    fn on_edge(&mut self, _: usize, to: usize) {
        self.indegree[to] += 1;
    }

    fn retained_words(&self) -> Option<usize> {
        Some(self.indegree.len())
    }
}

/// Keeps every edge accepted by a predicate.
pub struct EdgeFilter<F> {
    name: String,
    keep: F,
    pub edges: Vec<(usize, usize)>,
}

impl<F: FnMut(usize, usize) -> bool> EdgeFilter<F> {
    pub fn new(name: impl Into<String>, keep: F) -> Self {
        EdgeFilter { name: name.into(), keep, edges: Vec::new() }
    }
}

impl<F: FnMut(usize, usize) -> bool> EdgeConsumer for EdgeFilter<F> {
    fn name(&self) -> &str {
        &self.name
    }

    fn on_edge(&mut self, from: usize, to: usize) {
        if (self.keep)(from, to) {
            self.edges.push((from, to));
        }
    }

    fn retained_words(&self) -> Option<usize> {
        Some(self.edges.len())
    }
}

/// Resolves the orientation of a pre-drawn multiset of unordered pairs.
///
/// Requested pairs are marked in a bitmap before the pass; during the pass
/// each marked pair records its orientation at its rank among the marked
/// pairs. Retention is the size of the request multiset.
pub struct PairResolver {
    n: usize,
    requested: Vec<u64>,
    prefix: Vec<u32>,
    orientation: Vec<u64>,
    requests: usize,
}

impl PairResolver {
    pub fn new(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut requested = vec![0u64; pair_count(n).div_ceil(64)];
        let mut requests = 0;
        for (a, b) in pairs {
            assert!(a != b && a < n && b < n, "bad pair request ({a}, {b})");
            let idx = pair_index(n, a.min(b), a.max(b));
            requested[idx / 64] |= 1 << (idx % 64);
            requests += 1;
        }
        let mut prefix = Vec::with_capacity(requested.len());
        let mut acc = 0u32;
        for w in &requested {
            prefix.push(acc);
            acc += w.count_ones();
        }
        PairResolver {
            n,
            requested,
            prefix,
            orientation: vec![0; (acc as usize).div_ceil(64)],
            requests,
        }
    }

    #[inline]
    fn slot(&self, idx: usize) -> Option<usize> {
        let word = self.requested[idx / 64];
        let bit = 1u64 << (idx % 64);
        (word & bit != 0)
            .then(|| self.prefix[idx / 64] as usize + (word & (bit - 1)).count_ones() as usize)
    }

    /// Orientation of a requested pair. Panics on pairs that were not
    /// requested.
    #[inline]
    pub fn beats(&self, a: usize, b: usize) -> bool {
        let (lo, hi) = (a.min(b), a.max(b));
        let s = self
            .slot(pair_index(self.n, lo, hi))
            .unwrap_or_else(|| panic!("pair ({a}, {b}) was not requested"));
        let lower_wins = self.orientation[s / 64] >> (s % 64) & 1 == 1;
        lower_wins == (a == lo)
    }

    pub fn requests(&self) -> usize {
        self.requests
    }
}

impl EdgeConsumer for PairResolver {
    fn name(&self) -> &str {
        "pair-resolver"
    }

    #[inline]
    fn on_edge(&mut self, from: usize, to: usize) {
        let (lo, hi) = (from.min(to), from.max(to));
        if let Some(s) = self.slot(pair_index(self.n, lo, hi)) {
            if from == lo {
                self.orientation[s / 64] |= 1 << (s % 64);
            }
        }
    }

    fn retained_words(&self) -> Option<usize> {
        Some(self.requests)
    }
}

/// Draws `k` uniform pairs of distinct vertices (with repetition) and
/// resolves them in one pass.
pub fn sample_pairs(
    stream: &mut EdgeStream,
    k: usize,
    rng: &mut impl Rng,
    phase: &str,
) -> Result<Vec<ResolvedPair>> {
    let n = stream.n();
    if k > 0 && n < 2 {
        return Err(Error::BadParam(format!("cannot sample pairs from {n} vertices")));
    }
    let pairs: Vec<(usize, usize)> = (0..k)
        .map(|_| {
            let a = rng.random_range(0..n);
            let mut b = rng.random_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            (a, b)
        })
        .collect();
    let mut resolver = PairResolver::new(n, pairs.iter().copied());
    stream.run_pass(phase, &mut [&mut resolver])?;
    Ok(pairs
        .into_iter()
        .map(|(a, b)| ResolvedPair { a, b, a_beats_b: resolver.beats(a, b) })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GeneratorSpec};

    struct Forgetful;

    impl EdgeConsumer for Forgetful {
        fn name(&self) -> &str {
            "forgetful"
        }
        fn on_edge(&mut self, _: usize, _: usize) {}
        fn retained_words(&self) -> Option<usize> {
            None
        }
    }

    #[test]
    fn fresh_meter_is_zero() {
        let r = meter_report(&Meter::default());
        assert_eq!((r.passes, r.peak_words), (0, 0));
    }

    #[test]
    fn empty_pass_counts() {
        let mut s = EdgeStream::new(generate(&GeneratorSpec::uniform(10, 0)).unwrap(), StreamOrder::Canonical);
        s.run_pass("nothing", &mut []).unwrap();
        assert_eq!(s.meter().passes(), 1);
        assert_eq!(s.meter().peak_words(), 0);
    }

    #[test]
    fn every_order_delivers_every_pair_once() {
        let t = generate(&GeneratorSpec::uniform(100, 3)).unwrap();
        for order in [StreamOrder::Canonical, StreamOrder::Shuffle(5), StreamOrder::BySource] {
            let mut s = EdgeStream::new(t.clone(), order);
            let mut seen = vec![0u8; pair_count(100)];
            let mut check = EdgeFilter::new("check", |u: usize, v: usize| {
                assert!(t.beats(u, v));
                seen[pair_index(100, u.min(v), u.max(v))] += 1;
                false
            });
            let mut count = EdgeCounter::default();
            s.run_pass("p", &mut [&mut check, &mut count]).unwrap();
            drop(check);
            assert_eq!(count.count, 4950);
            assert!(seen.iter().all(|&c| c == 1));
        }
    }

    #[test]
    fn indegree_pass_on_transitive() {
        let mut s = EdgeStream::new(generate(&GeneratorSpec::transitive(8)).unwrap(), StreamOrder::Canonical);
        let mut c = IndegreeCounter::new(8);
        s.run_pass("indegree", &mut [&mut c]).unwrap();
        assert_eq!(c.indegree, (0..8).collect::<Vec<_>>());
        let r = s.meter().report();
        assert_eq!((r.passes, r.peak_words), (1, 8));
        assert_eq!(r.phase_breakdown["indegree"].passes, 1);
    }

    #[test]
    fn undeclared_retention_is_an_error() {
        let mut s = EdgeStream::new(generate(&GeneratorSpec::transitive(4)).unwrap(), StreamOrder::Canonical);
        assert!(matches!(
            s.run_pass("x", &mut [&mut Forgetful]),
            Err(Error::ConsumerRetentionUndeclared(_))
        ));
    }

    #[test]
    fn sampled_pairs_match_backing_orientation() {
        let t = generate(&GeneratorSpec::uniform(30, 2)).unwrap();
        let mut s = EdgeStream::new(t.clone(), StreamOrder::Shuffle(1));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let got = sample_pairs(&mut s, 2000, &mut rng, "sample").unwrap();
        assert_eq!(got.len(), 2000);
        for p in &got {
            assert_eq!(p.a_beats_b, t.beats(p.a, p.b));
        }
        assert_eq!(s.meter().peak_words(), 2000);
        assert!(sample_pairs(&mut s, 0, &mut rng, "sample").unwrap().is_empty());
        assert_eq!(s.meter().current_words(), 2000);
    }

    #[test]
    fn all_pairs_reconstruct_the_tournament() {
        let n = 12;
        let t = generate(&GeneratorSpec::uniform(n, 8)).unwrap();
        let mut s = EdgeStream::new(t.clone(), StreamOrder::BySource);
        let pairs: Vec<_> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let mut r = PairResolver::new(n, pairs.iter().copied());
        s.run_pass("all", &mut [&mut r]).unwrap();
        let back = Tournament::from_fn(n, |a, b| r.beats(a, b));
        assert_eq!(back, t);
    }

    #[test]
    fn stream_order_parsing() {
        for s in ["canonical", "by-source", "shuffle:17"] {
            assert_eq!(s.parse::<StreamOrder>().unwrap().to_string(), s);
        }
        assert!("shuffle:x".parse::<StreamOrder>().is_err());
    }
}
