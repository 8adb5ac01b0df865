//! Hamiltonian paths and strongly connected components of tournaments in
//! few passes.

pub mod offline;
pub mod pivot;
pub mod scc;
pub mod streaming;

pub use offline::{ham_path_offline, kwiksort_by, validate_ham_path};
pub use pivot::{pivot_order, pivots_per_block, Binning, PivotConfig, PivotLevel, PivotOutcome};
pub use scc::{scc_from_path, tarjan_oracle, SccPartition};
pub use streaming::{ham_path_streaming, ham_path_streaming_with, HamPathOutput};
