//! Finite fields, matrix rings over them, subfield embeddings and the
//! unit subgroups attached to an embedding.

mod embedding;
mod field;
mod ring;
mod units;

pub use embedding::SubfieldEmbedding;
pub use field::{is_prime, FiniteField, DEFAULT_FIELD_CAP};
pub use ring::{FiniteRing, DEFAULT_RING_CAP};
pub use units::{core_field, core_field_full, normalizer, Normalizer, SubgroupOfUnits};
