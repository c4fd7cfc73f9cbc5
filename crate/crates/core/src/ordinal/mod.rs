//! Ordinals below ε₀ in Cantor normal form, and the closed-form ranks of
//! countable ordinals and of `ℤ·α`.

pub mod cnf;
pub mod parse;
pub mod rank;

pub use cnf::{floor_log2, BigOrdinal, Cnf, Coefficient, Ordinal};
pub use parse::parse_ordinal;
pub use rank::{
    certify_successor_steps, finite_concatenation_check, h_recurrence, hausdorff_vd, hausdorff_vd_z,
    random_cnf, rank_of_ordinal, rank_of_reversed_ordinal, rank_of_z_times, rp_witness, split_omega_multiple,
    CutStep, RankValue, RankWitness, SuccessorReport,
};
