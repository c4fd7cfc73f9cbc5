//! Exact computation of the rank function on finite relational structures.

pub mod constructions;
pub mod error;
pub mod orders;
pub mod ordinal;
pub mod rank;
pub mod structures;
pub mod suites;

pub use error::{Error, Result};
pub use ordinal::{BigOrdinal, Ordinal, RankValue};
pub use structures::{ClassOracle, ExtensionType, FiniteStructure, Signature};
