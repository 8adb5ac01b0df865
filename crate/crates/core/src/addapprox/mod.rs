//! Additive approximation for feedback arc set via cut decompositions of the
//! signed comparison matrix.

pub mod cut;
pub mod decomposition;
pub mod placement;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use cut::{cut_norm_exhaustive, CutDecomposition, CutRectangle, Matrix};
pub use decomposition::{get_cut_decomposition, CdParams, DECOMPOSITION_CAP};
pub use placement::{bucketed_cost, placement_cost, search_placement, PlacementParams, SearchMode};

use crate::error::{Error, Result};
use crate::ptas::indegree_order;
use crate::tournament::Tournament;

pub const RETRIES: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fallback {
    /// Every attempt reached `t_0` rectangles.
    DecompositionFailure,
    /// The vertex set exceeds [`DECOMPOSITION_CAP`].
    BeyondDeskScale,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AddApproxOutcome {
    /// The input vertex ids, reordered.
    pub order: Vec<usize>,
    pub fallback: bool,
    pub fallback_reason: Option<Fallback>,
    /// Decomposition accuracy, `β/3`.
    pub epsilon: f64,
    pub attempts: usize,
    pub rectangles: usize,
    pub buckets: usize,
    pub mode: Option<SearchMode>,
    /// Estimated cross-bucket cost of the chosen placement.
    pub placement_cost: Option<f64>,
}

/// Decomposition with up to [`RETRIES`] fresh-seed retries.
pub fn decompose_with_retries(
    a: &Matrix,
    params: &CdParams,
    rng: &mut impl Rng,
) -> Result<(CutDecomposition, usize)> {
    let mut last = Error::DecompositionFailure(params.t0);
    for attempt in 1..=RETRIES + 1 {
        let mut sub = ChaCha8Rng::seed_from_u64(rng.random());
        match get_cut_decomposition(a, params, &mut sub) {
            Ok(d) => return Ok((d, attempt)),
            Err(e @ Error::DecompositionFailure(_)) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// Orders `vertices` with cost at most `OPT + βN²` with probability at least
/// `1 - η` when the decomposition succeeds; otherwise falls back to the
/// indegree order and flags it.
pub fn add_approx_mfas(
    t: &Tournament,
    vertices: &[usize],
    beta: f64,
    eta: f64,
    rng: &mut impl Rng,
) -> Result<AddApproxOutcome> {
    if !(beta > 0.0 && beta < 1.0) || !(eta > 0.0 && eta < 1.0) {
        return Err(Error::BadParam(format!("beta and eta must lie in (0, 1), got {beta}, {eta}")));
    }
    let n = vertices.len();
    let epsilon = beta / 3.0;
    let params = CdParams::new(epsilon, eta)?;
    let place = PlacementParams::new(n, beta);
    let mut out = AddApproxOutcome {
        order: Vec::new(),
        fallback: false,
        fallback_reason: None,
        epsilon,
        attempts: 0,
        rectangles: 0,
        buckets: place.buckets,
        mode: None,
        placement_cost: None,
    };
    if n <= 1 {
        out.order = vertices.to_vec();
        return Ok(out);
    }
    let fallback = |mut out: AddApproxOutcome, why: Fallback| {
        out.order = indegree_order(t, vertices);
        out.fallback = true;
        out.fallback_reason = Some(why);
        out
    };
    if n > DECOMPOSITION_CAP {
        return Ok(fallback(out, Fallback::BeyondDeskScale));
    }
    let a = Matrix::signed_comparison(t, vertices);
    let (d, attempts) = match decompose_with_retries(&a, &params, rng) {
        Ok(x) => x,
        Err(Error::DecompositionFailure(_)) => {
            out.attempts = RETRIES + 1;
            return Ok(fallback(out, Fallback::DecompositionFailure));
        }
        Err(e) => return Err(e),
    };
    out.attempts = attempts;
    out.rectangles = d.len();

    // greedy start: indegree order cut into consecutive buckets
    let slot: std::collections::HashMap<usize, usize> =
        vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let start: Vec<usize> = indegree_order(t, vertices).into_iter().map(|v| slot[&v]).collect();
    let assign = search_placement(&d, &place, &start);
    out.mode = Some(place.mode);
    out.placement_cost = Some(placement_cost(&assign, place.buckets, &d));

    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); place.buckets];
    for (i, &b) in assign.iter().enumerate() {
        buckets[b].push(vertices[i]);
    }
    out.order = buckets.iter().flat_map(|b| indegree_order(t, b)).collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GeneratorSpec};
    use crate::permutation::{cost, Permutation};

    #[test]
    fn transitive_twelve() {
        let t = generate(&GeneratorSpec::transitive(12)).unwrap();
        let v: Vec<usize> = (0..12).collect();
        let out = add_approx_mfas(&t, &v, 0.15, 0.1, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let c = cost(&Permutation::new(out.order).unwrap(), &t);
        assert!(c as f64 <= 0.15 * 144.0);
    }

    #[test]
    fn three_cycle() {
        let t = generate(&GeneratorSpec::cycle(3)).unwrap();
        let out = add_approx_mfas(&t, &[0, 1, 2], 0.5, 0.1, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let pi = Permutation::new(out.order).unwrap();
        assert!(cost(&pi, &t) as f64 <= 1.0 + 0.5 * 9.0);
    }

    #[test]
    fn subset_ids_and_fallback_beyond_cap() {
        let t = generate(&GeneratorSpec::uniform(80, 5)).unwrap();
        let v: Vec<usize> = (10..80).collect();
        let out = add_approx_mfas(&t, &v, 0.3, 0.1, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!(out.fallback);
        assert_eq!(out.fallback_reason, Some(Fallback::BeyondDeskScale));
        let mut sorted = out.order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, v);
    }
}
