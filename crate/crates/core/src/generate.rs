//! Seeded instance generators. Not metered: they build the backing
//! tournament that a stream later serves.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tournament::Tournament;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum GeneratorKind {
    /// `i -> j` for every `i < j`.
    Transitive,
    /// Transitive except the wrap edge `n-1 -> 0`, which closes the cycle
    /// `0 -> 1 -> ... -> n-1 -> 0`.
    Cycle,
    /// Every pair oriented by a fair coin.
    Uniform,
    /// Transitive with each pair flipped independently with probability `q`.
    Planted { q: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub kind: GeneratorKind,
    pub n: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn transitive(n: usize) -> Self {
        GeneratorSpec { kind: GeneratorKind::Transitive, n, seed: 0 }
    }

    pub fn cycle(n: usize) -> Self {
        GeneratorSpec { kind: GeneratorKind::Cycle, n, seed: 0 }
    }

    pub fn uniform(n: usize, seed: u64) -> Self {
        GeneratorSpec { kind: GeneratorKind::Uniform, n, seed }
    }

    pub fn planted(n: usize, q: f64, seed: u64) -> Self {
        GeneratorSpec { kind: GeneratorKind::Planted { q }, n, seed }
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<Tournament> {
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let t = match spec.kind {
        GeneratorKind::Transitive => Tournament::from_fn(n, |_, _| true),
        GeneratorKind::Cycle => Tournament::from_fn(n, |lo, hi| !(lo == 0 && hi == n - 1 && n > 2)),
        GeneratorKind::Uniform => Tournament::from_fn(n, |_, _| rng.random_bool(0.5)),
        GeneratorKind::Planted { q } => {
            if !(0.0..=0.5).contains(&q) {
                return Err(Error::BadParam(format!("planted flip probability {q} outside [0, 1/2]")));
            }
            Tournament::from_fn(n, |_, _| !rng.random_bool(q))
        }
    };
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permutation::{cost, Permutation};

    #[test]
    fn transitive_sorted_is_free() {
        let t = generate(&GeneratorSpec::transitive(5)).unwrap();
        assert_eq!(cost(&Permutation::identity(5), &t), 0);
    }

    #[test]
    fn planted_zero_equals_transitive() {
        for n in [0, 1, 7, 30] {
            assert_eq!(
                generate(&GeneratorSpec::planted(n, 0.0, 99)).unwrap(),
                generate(&GeneratorSpec::transitive(n)).unwrap()
            );
        }
    }

    #[test]
    fn cycle_has_single_back_edge() {
        let t = generate(&GeneratorSpec::cycle(6)).unwrap();
        assert!(t.beats(5, 0));
        assert_eq!(cost(&Permutation::identity(6), &t), 1);
    }

    #[test]
    fn planted_rejects_bad_q() {
        assert!(matches!(generate(&GeneratorSpec::planted(5, 0.7, 0)), Err(Error::BadParam(_))));
        assert!(generate(&GeneratorSpec::planted(5, -0.1, 0)).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate(&GeneratorSpec::planted(40, 0.3, 5)).unwrap();
        assert_eq!(a, generate(&GeneratorSpec::planted(40, 0.3, 5)).unwrap());
        assert_ne!(a, generate(&GeneratorSpec::planted(40, 0.3, 6)).unwrap());
    }
}
