use crate::error::Result;
use crate::hamscc::{pivot_order, Binning, PivotConfig};
use crate::permutation::Permutation;
use crate::stream::EdgeStream;

/// KwikSort with pivot levels condensed into `p` passes.
pub fn kwiksort_baseline(stream: &mut EdgeStream, p: usize, seed: u64) -> Result<Permutation> {
    let out = pivot_order(stream, &PivotConfig::new(p.max(1), seed, Binning::KwikSort))?;
    Permutation::new(out.order)
}
