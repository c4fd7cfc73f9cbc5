//! Universal structures `H_n`, kernel amalgams, ordered sums and the
//! certificates that stand in for brute force on large builds.

pub mod certify;
pub mod hn;
pub mod kernel;

pub use certify::{certify_cover_property, certify_no_large_complete, CompleteReport, CoverReport};
pub use hn::{
    build_graph_hn, build_tournament_hn, graph_hn_size, hn_size, LayeredStructure, Provenance,
    DEFAULT_BUILD_CAP,
};
pub use kernel::{kernel_amalgam, ordered_sum, verify_kernel_bound, KernelAmalgam, KernelMode, KernelReport, SumKind};
