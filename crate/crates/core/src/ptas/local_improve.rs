//! Sampled local search by batches of long single vertex moves.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::PtasConfig;
use super::ensemble::SampleEnsemble;
use crate::error::{Error, Result};
use crate::moves::{apply_moves_parallel, Move, MoveSet};
use crate::par;
use crate::permutation::Permutation;

/// Candidate moves grouped by vertex as inclusive target-rank intervals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Candidates {
    entries: Vec<(usize, Vec<(usize, usize)>)>,
}

impl Candidates {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of moves.
    pub fn len(&self) -> usize {
        self.entries
            .iter()
            .flat_map(|(_, iv)| iv.iter())
            .map(|&(a, b)| b - a + 1)
            .sum()
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn targets(&self, v: usize) -> &[(usize, usize)] {
        self.entries
            .iter()
            .find(|e| e.0 == v)
            .map_or(&[][..], |e| &e.1[..])
    }

    pub fn moves(&self) -> Vec<Move> {
        self.entries
            .iter()
            .flat_map(|(v, iv)| iv.iter().flat_map(move |&(a, b)| (a..=b).map(move |j| Move::new(*v, j))))
            .collect()
    }

    pub fn contains(&self, m: &Move) -> bool {
        self.targets(m.vertex).iter().any(|&(a, b)| a <= m.target && m.target <= b)
    }

    /// Moves present in both sets, keeping `self`'s vertex order.
    pub fn intersect(&self, other: &Candidates) -> Candidates {
        let mut entries = Vec::new();
        for (v, iv) in &self.entries {
            let jv = other.targets(*v);
            let mut out = Vec::new();
            let (mut a, mut b) = (0, 0);
            while a < iv.len() && b < jv.len() {
                let lo = iv[a].0.max(jv[b].0);
                let hi = iv[a].1.min(jv[b].1);
                if lo <= hi {
                    out.push((lo, hi));
                }
                if iv[a].1 < jv[b].1 {
                    a += 1;
                } else {
                    b += 1;
                }
            }
            if !out.is_empty() {
                entries.push((*v, out));
            }
        }
        Candidates { entries }
    }
}

/// Target intervals of `u` whose filtered sample mean sign beats
/// `threshold`, restricted to move lengths `d >= min_len`.
fn scan_vertex(
    pi: &Permutation,
    u: usize,
    samples: impl Iterator<Item = crate::moves::OrientedSample>,
    min_len: usize,
    threshold: f64,
) -> Vec<(usize, usize)> {
    let n = pi.len() as i64;
    let r = pi.rank(u) as i64;
    let min_len = min_len as i64;
    let mut right: Vec<(i64, i64)> = Vec::new();
    let mut left: Vec<(i64, i64)> = Vec::new();
    for s in samples {
        let Some(q) = pi.try_rank(s.partner) else { continue };
        let q = q as i64;
        if q > r {
            right.push((q, s.sign(true)));
        } else if q < r {
            left.push((q, s.sign(false)));
        }
    }
    let mut out = Vec::new();
    right.sort_unstable();
    let (mut cnt, mut sum) = (0i64, 0i64);
    let mut k = 0;
    while k < right.len() {
        let q = right[k].0;
        while k < right.len() && right[k].0 == q {
            cnt += 1;
            sum += right[k].1;
            k += 1;
        }
        let next = right.get(k).map_or(n, |x| x.0);
        let lo = q.max(r + min_len);
        let hi = next - 1;
        if lo <= hi && sum as f64 > threshold * cnt as f64 {
            out.push((lo as usize, hi as usize));
        }
    }
    left.sort_unstable_by(|a, b| b.cmp(a));
    let mut left_out = Vec::new();
    let (mut cnt, mut sum) = (0i64, 0i64);
    let mut k = 0;
    while k < left.len() {
        let q = left[k].0;
        while k < left.len() && left[k].0 == q {
            cnt += 1;
            sum += left[k].1;
            k += 1;
        }
        let next = left.get(k).map_or(-1, |x| x.0);
        let lo = next + 1;
        let hi = q.min(r - min_len);
        if lo <= hi && sum as f64 > threshold * cnt as f64 {
            left_out.push((lo as usize, hi as usize));
        }
    }
    left_out.reverse();
    left_out.extend(out);
    let mut merged: Vec<(usize, usize)> = Vec::with_capacity(left_out.len());
    for (a, b) in left_out {
        match merged.last_mut() {
            Some(last) if last.1 + 1 == a => last.1 = b,
            _ => merged.push((a, b)),
        }
    }
    merged
}

/// All long moves `(u -> j)` whose estimate from `E_{u,cursor}` exceeds
/// `threshold · d`, i.e. whose filtered mean sign exceeds `threshold`.
/// Moves with an empty filtered sample are left out.
pub fn get_moves(
    pi: &Permutation,
    ensemble: &SampleEnsemble,
    cursor: usize,
    min_len: usize,
    threshold: f64,
    parallel: bool,
) -> Result<Candidates> {
    if cursor >= ensemble.supply() {
        return Err(Error::EnsembleExhausted { cursor, supply: ensemble.supply() });
    }
    let scanned = par::map(parallel && pi.len() >= 256, pi.order().to_vec(), |u| {
        let samples = ensemble.samples(u, cursor)?;
        Ok::<_, Error>((u, scan_vertex(pi, u, samples, min_len, threshold)))
    });
    let mut entries = Vec::new();
    for e in scanned {
        let e: (usize, Vec<(usize, usize)>) = e?;
        if !e.1.is_empty() {
            entries.push(e);
        }
    }
    Ok(Candidates { entries })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AliLedger {
    /// Calls that returned at once because the node was small.
    pub skipped: usize,
    pub calls: usize,
    pub outer_iterations: usize,
    pub rounds: usize,
    pub batches: usize,
    pub moves_applied: usize,
    /// Largest ensemble index reached.
    pub max_cursor: usize,
    /// Calls that stopped because the ensemble supply ran out.
    pub exhausted: usize,
}

impl AliLedger {
    pub fn absorb(&mut self, o: &AliLedger) {
        self.skipped += o.skipped;
        self.calls += o.calls;
        self.outer_iterations += o.outer_iterations;
        self.rounds += o.rounds;
        self.batches += o.batches;
        self.moves_applied += o.moves_applied;
        self.max_cursor = self.max_cursor.max(o.max_cursor);
        self.exhausted += o.exhausted;
    }
}

/// Draws `M₃` from `M₂`: every candidate is kept with probability `f`, and a
/// vertex with several kept targets keeps its lowest one.
///
/// Returns `None` when `M₂` is empty. Otherwise returns a non-empty batch
/// together with the number of empty draws that precede it; with `π` and the
/// cursor fixed those draws are independent repeats, so they are skipped in
/// one geometric step and the batch is drawn conditioned on being non-empty.
fn sample_batch(m2: &Candidates, f: f64, rng: &mut impl Rng) -> Option<(usize, MoveSet)> {
    let totals: Vec<usize> = m2.entries.iter().map(|(_, iv)| iv.iter().map(|&(a, b)| b - a + 1).sum()).collect();
    if totals.iter().all(|&t| t == 0) {
        return None;
    }
    let pick = |(v, iv): &(usize, Vec<(usize, usize)>), mut k: usize| {
        for &(a, b) in iv {
            if k <= b - a {
                return Move::new(*v, a + k);
            }
            k -= b - a + 1;
        }
        unreachable!("index below the candidate count")
    };
    if f >= 1.0 {
        let moves = m2.entries.iter().zip(&totals).filter(|(_, &t)| t > 0).map(|(e, _)| pick(e, 0)).collect();
        return Some((0, MoveSet::new(moves).expect("one move per vertex")));
    }
    let log_q = (-f).ln_1p();
    // log P(vertex keeps nothing)
    let log_none: Vec<f64> = totals.iter().map(|&t| t as f64 * log_q).collect();
    let mut suffix = vec![0.0; log_none.len() + 1];
    for i in (0..log_none.len()).rev() {
        suffix[i] = suffix[i + 1] + log_none[i];
    }
    let p_hit = -suffix[0].exp_m1();
    let skipped = if p_hit >= 1.0 {
        0
    } else {
        let u: f64 = rng.random();
        ((-u).ln_1p() / (-p_hit).ln_1p()).floor().min(usize::MAX as f64 / 2.0) as usize
    };
    let mut moves = Vec::new();
    for (i, e) in m2.entries.iter().enumerate() {
        let p_v = -log_none[i].exp_m1();
        let p = if moves.is_empty() { p_v / -suffix[i].exp_m1() } else { p_v };
        if p_v <= 0.0 || rng.random::<f64>() >= p {
            continue;
        }
        // first kept index, conditioned on one being kept
        let u: f64 = rng.random();
        let k = ((-u * p_v).ln_1p() / log_q).floor() as usize;
        moves.push(pick(e, k.min(totals[i] - 1)));
    }
    debug_assert!(!moves.is_empty());
    Some((skipped, MoveSet::new(moves).expect("one move per vertex")))
}

/// Applies batches of sampled long moves until no move clears the full
/// threshold.
///
/// `cursor` indexes the first fresh ensemble and is advanced past every
/// ensemble that informed an applied batch. `observe` sees each batch with
/// the permutation it is applied to.
/// Callback seeing the order and the move set of every applied batch.
pub type Observer<'a> = &'a mut dyn FnMut(&Permutation, &MoveSet);

pub fn approx_local_improve(
    pi: Permutation,
    n: usize,
    ensemble: Option<&SampleEnsemble>,
    cursor: &mut usize,
    config: &PtasConfig,
    rng: &mut impl Rng,
    observe: Option<Observer<'_>>,
) -> Result<(Permutation, AliLedger)> {
    approx_local_improve_until(pi, n, ensemble, cursor, usize::MAX, config, rng, observe)
}

/// [`approx_local_improve`] reading no ensemble at or past `limit`.
#[allow(clippy::too_many_arguments)]
pub fn approx_local_improve_until(
    mut pi: Permutation,
    n: usize,
    ensemble: Option<&SampleEnsemble>,
    cursor: &mut usize,
    limit: usize,
    config: &PtasConfig,
    rng: &mut impl Rng,
    mut observe: Option<Observer<'_>>,
) -> Result<(Permutation, AliLedger)> {
    let mut ledger = AliLedger { calls: 1, ..Default::default() };
    let size = pi.len();
    let Some(ensemble) = ensemble.filter(|_| size as f64 > config.skip_threshold(n)) else {
        ledger.skipped = 1;
        return Ok((pi, ledger));
    };
    let limit = limit.min(ensemble.supply());
    let min_len = config.min_move_length(n, size);
    let full = config.threshold(n, 1.0);
    let half = config.threshold(n, 0.5);
    let rounds = config.inner_rounds(n);
    let fraction = config.batch_fraction(n);
    let parallel = config.parallel;
    'outer: loop {
        if *cursor >= limit {
            ledger.exhausted = 1;
            break;
        }
        if get_moves(&pi, ensemble, *cursor, min_len, full, parallel)?.is_empty() {
            break;
        }
        ledger.outer_iterations += 1;
        let m1 = get_moves(&pi, ensemble, *cursor, min_len, half, parallel)?;
        // nothing applied since m1 was computed
        let mut fresh = true;
        let mut r = 0;
        while r < rounds {
            if *cursor >= limit {
                ledger.exhausted = 1;
                break 'outer;
            }
            let m2 = if fresh { m1.clone() } else { m1.intersect(&get_moves(&pi, ensemble, *cursor, min_len, half, parallel)?) };
            let Some((skipped, m3)) = sample_batch(&m2, fraction, rng) else {
                ledger.rounds += rounds - r;
                break;
            };
            if fresh {
                // unchanged state: the empty rounds may run through whole iterations
                let at = r + skipped;
                ledger.outer_iterations += at / rounds;
                ledger.rounds += skipped;
                r = at % rounds;
            } else if r + skipped >= rounds {
                ledger.rounds += rounds - r;
                break;
            } else {
                ledger.rounds += skipped;
                r += skipped;
            }
            ledger.rounds += 1;
            r += 1;
            if let Some(f) = observe.as_mut() {
                f(&pi, &m3);
            }
            pi = apply_moves_parallel(&pi, &m3);
            ledger.batches += 1;
            ledger.moves_applied += m3.len();
            *cursor += 1;
            fresh = false;
        }
    }
    ledger.max_cursor = *cursor;
    Ok((pi, ledger))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GeneratorSpec};
    use crate::moves::test_move_sampled;
    use crate::ptas::ensemble::get_sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Interval scan agrees with evaluating every `(u, j)` directly.
    #[test]
    fn scan_matches_direct_enumeration() {
        let t = generate(&GeneratorSpec::planted(60, 0.3, 5)).unwrap();
        let verts: Vec<usize> = (0..60).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = SampleEnsemble::from_tournament(&t, &verts, 2, 40, &mut rng);
        let pi = Permutation::new((0..60).rev().collect()).unwrap();
        for (min_len, thr) in [(1, 0.0), (5, 0.05), (17, 0.2)] {
            let got = get_moves(&pi, &e, 1, min_len, thr, false).unwrap();
            let mut want = Vec::new();
            for &u in pi.order() {
                for j in 0..60usize {
                    let d = j.abs_diff(pi.rank(u));
                    if d < min_len {
                        continue;
                    }
                    let s = get_sample(&pi, e.samples(u, 1).unwrap(), u, j);
                    if s.is_empty() {
                        continue;
                    }
                    if test_move_sampled(&pi, u, j, &s).unwrap() > thr * d as f64 {
                        want.push(Move::new(u, j));
                    }
                }
            }
            assert_eq!(got.moves(), want);
        }
    }

    #[test]
    fn exhausted_cursor() {
        let t = generate(&GeneratorSpec::uniform(20, 1)).unwrap();
        let verts: Vec<usize> = (0..20).collect();
        let e = SampleEnsemble::from_tournament(&t, &verts, 2, 4, &mut ChaCha8Rng::seed_from_u64(0));
        let pi = Permutation::identity(20);
        assert!(matches!(
            get_moves(&pi, &e, 2, 1, 0.0, false),
            Err(Error::EnsembleExhausted { .. })
        ));
    }

    #[test]
    fn intersect_intervals() {
        let a = Candidates { entries: vec![(3, vec![(0, 4), (8, 12)]), (5, vec![(1, 1)])] };
        let b = Candidates { entries: vec![(3, vec![(2, 9)]), (7, vec![(0, 3)])] };
        let c = a.intersect(&b);
        assert_eq!(c.entries, vec![(3, vec![(2, 4), (8, 9)])]);
        assert_eq!(c.len(), 5);
    }

    #[test]
    fn sorted_transitive_is_left_alone() {
        let n = 300;
        let t = generate(&GeneratorSpec::transitive(n)).unwrap();
        let verts: Vec<usize> = (0..n).collect();
        let config = PtasConfig::new(0.4, 1, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let e = SampleEnsemble::from_tournament(&t, &verts, 8, 64, &mut rng);
        let mut cursor = 0;
        let (pi, ledger) = approx_local_improve(
            Permutation::identity(n),
            n,
            Some(&e),
            &mut cursor,
            &config,
            &mut rng,
            None,
        )
        .unwrap();
        assert_eq!(pi, Permutation::identity(n));
        assert_eq!((ledger.moves_applied, cursor), (0, 0));
    }

    #[test]
    fn batch_keeps_lowest_target() {
        let m2 = Candidates { entries: vec![(1, vec![(3, 5), (9, 9)]), (2, vec![(0, 0)])] };
        let (skipped, m3) = sample_batch(&m2, 1.0, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(skipped, 0);
        assert_eq!(m3.moves(), &[Move::new(1, 3), Move::new(2, 0)]);
        assert!(sample_batch(&Candidates { entries: vec![] }, 0.5, &mut ChaCha8Rng::seed_from_u64(0)).is_none());
    }

    /// The conditioned draw matches plain per-candidate coins restricted to
    /// non-empty outcomes.
    #[test]
    fn conditioned_batch_matches_rejection() {
        let m2 = Candidates { entries: vec![(1, vec![(0, 2)]), (4, vec![(5, 5)]), (6, vec![(1, 3)])] };
        let f = 0.2;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let trials = 40_000;
        let mut direct = std::collections::BTreeMap::new();
        let mut kept = 0;
        while kept < trials {
            let mut moves = Vec::new();
            for (v, iv) in &m2.entries {
                let targets: Vec<usize> = iv.iter().flat_map(|&(a, b)| a..=b).collect();
                if let Some(&j) = targets.iter().find(|_| rng.random::<f64>() < f) {
                    moves.push((*v, j));
                }
            }
            if !moves.is_empty() {
                *direct.entry(moves).or_insert(0usize) += 1;
                kept += 1;
            }
        }
        let mut drawn = std::collections::BTreeMap::new();
        let mut skips = 0usize;
        for _ in 0..trials {
            let (s, m3) = sample_batch(&m2, f, &mut rng).unwrap();
            skips += s;
            let key: Vec<(usize, usize)> = m3.moves().iter().map(|m| (m.vertex, m.target)).collect();
            *drawn.entry(key).or_insert(0usize) += 1;
        }
        for (k, &c) in &direct {
            let d = *drawn.get(k).unwrap_or(&0) as f64;
            let sd = (c as f64).sqrt().max(5.0);
            assert!((d - c as f64).abs() < 5.0 * sd, "{k:?}: {d} vs {c}");
        }
        // P(empty) = 0.8^7
        let p_empty = 0.8f64.powi(7);
        let mean_skip = skips as f64 / trials as f64;
        assert!((mean_skip - p_empty / (1.0 - p_empty)).abs() < 0.03);
    }
}
