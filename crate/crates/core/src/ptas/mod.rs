//! The `(1+ε)`-approximation pipeline for feedback arc set on tournaments:
//! an indegree sort, recursive partitioning with sampled local improvement
//! scheduled into `p` level passes, and exact or additive solvers at the
//! leaves. Also hosts the KwikSort baseline.

pub mod config;
pub mod ensemble;
pub mod indegree;
pub mod kwiksort;
pub mod level;
pub mod local_improve;
pub mod recurse;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use config::{Profile, PtasConfig};
pub use ensemble::{get_sample, SampleEnsemble};
pub use indegree::{indegree_approx, indegree_order};
pub use kwiksort::kwiksort_baseline;
pub use level::{draw_level_ensembles, level_schedule, LevelSchedule};
pub use local_improve::{approx_local_improve, approx_local_improve_until, get_moves, AliLedger, Candidates};
pub use recurse::{run_ptas, KeptRecord, LeafKind, PtasLedger, PtasOutput};

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for one recursion node and purpose, a pure function of
/// `(seed, path, tag)`.
pub(crate) fn node_rng(seed: u64, path: u64, tag: &[u8]) -> ChaCha8Rng {
    let mut h = splitmix(seed);
    h = splitmix(h ^ path);
    for &b in tag {
        h = splitmix(h ^ b as u64);
    }
    ChaCha8Rng::seed_from_u64(h)
}
