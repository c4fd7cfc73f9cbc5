//! Finite relational structures, class oracles and one-point extension types.

pub mod amalgam;
pub mod canon;
pub mod embed;
pub mod oracle;
pub mod random;
pub mod signature;
pub mod structure;
pub mod types;

pub use amalgam::free_amalgam;
pub use canon::{canonical_code, canonical_structure, enumerate_structures, isomorphic};
pub use embed::{automorphisms, embeds, find_embedding};
pub use oracle::ClassOracle;
pub use signature::{Relation, Signature};
pub use structure::{FiniteStructure, StructureDocument};
pub use types::{
    apply_type, enumerate_extension_types, good_types, is_good, realizations, type_of_point,
    ExtensionType, DEFAULT_TYPE_BUDGET,
};
