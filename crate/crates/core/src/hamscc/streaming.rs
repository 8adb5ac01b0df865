use serde::{Deserialize, Serialize};

use super::pivot::{pivot_order, Binning, PivotConfig, PivotLevel};
use crate::error::{Error, Result};
use crate::stream::{EdgeStream, MeterReport};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HamPathOutput {
    pub path: Vec<usize>,
    pub meter: MeterReport,
    pub levels: Vec<PivotLevel>,
    pub redo_count: usize,
    pub redo_capped: usize,
}

/// Hamiltonian path in `p` level passes plus any redo passes.
pub fn ham_path_streaming(stream: &mut EdgeStream, p: usize, seed: u64) -> Result<HamPathOutput> {
    ham_path_streaming_with(stream, &PivotConfig::new(p, seed, Binning::HamSlot))
}

pub fn ham_path_streaming_with(stream: &mut EdgeStream, cfg: &PivotConfig) -> Result<HamPathOutput> {
    if cfg.p == 0 {
        return Err(Error::BadParam("passes must be at least 1".into()));
    }
    let out = pivot_order(stream, cfg)?;
    Ok(HamPathOutput {
        path: out.order,
        meter: stream.meter().report(),
        levels: out.levels,
        redo_count: out.redo_count,
        redo_capped: out.redo_capped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GeneratorSpec};
    use crate::hamscc::offline::{ham_path_offline, validate_ham_path};
    use crate::stream::StreamOrder;

    #[test]
    fn single_pass_is_offline_insertion() {
        let t = generate(&GeneratorSpec::uniform(120, 8)).unwrap();
        let mut s = EdgeStream::new(t.clone(), StreamOrder::Shuffle(1));
        let out = ham_path_streaming(&mut s, 1, 0).unwrap();
        assert_eq!(out.path, ham_path_offline(&t, &(0..120).collect::<Vec<_>>()));
        assert_eq!(out.meter.passes, 1);
    }

    #[test]
    fn transitive_gives_sorted_order() {
        let t = generate(&GeneratorSpec::transitive(1024)).unwrap();
        let mut s = EdgeStream::new(t.clone(), StreamOrder::Canonical);
        let out = ham_path_streaming(&mut s, 2, 5).unwrap();
        assert!(validate_ham_path(&out.path, &t));
        assert_eq!(out.path, (0..1024).collect::<Vec<_>>());
    }

    #[test]
    fn zero_passes_rejected() {
        let t = generate(&GeneratorSpec::transitive(4)).unwrap();
        assert!(ham_path_streaming(&mut EdgeStream::new(t, StreamOrder::Canonical), 0, 0).is_err());
    }
}
