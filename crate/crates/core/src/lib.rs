//! Chain geometries `Σ(K,R)` over finite rings `R` with a distinguished,
//! not necessarily central, subfield `K`.
//!
//! The crate is `no_std` and only needs `alloc`. Everything is exhaustive
//! table arithmetic: rings are stored as dense multiplication/addition
//! tables together with a faithful matrix representation over their prime
//! field, points of the projective line are canonical pairs of ring
//! element ids, and chains are sorted lists of point ids.
//!
//! Module map:
//!
//! * [`algebra`]: finite fields, matrix rings, subfield embeddings,
//!   normalizers and the core field.
//! * [`projline`]: the projective line `P(R)`, the distant relation and the
//!   right action of `GL₂(R)`.
//! * [`chains`]: the chain geometry itself, chains through triples,
//!   maximal cliques of the distant graph.
//! * [`residue`]: residues, compatibility classes, affine models and trace
//!   spaces.
//! * [`incidence`]: the chain space axioms on arbitrary incidence
//!   structures.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod algebra;
pub mod chains;
mod error;
pub mod incidence;
mod linalg;
pub mod projline;
pub mod residue;

pub use algebra::{
    FiniteField, FiniteRing, Normalizer, SubfieldEmbedding, SubgroupOfUnits, DEFAULT_FIELD_CAP, DEFAULT_RING_CAP,
};
pub use chains::{Chain, ChainGeometry};
pub use error::{Error, Result};
pub use incidence::IncidenceStructure;
pub use projline::{Mat2, PointId, ProjectiveLine};
pub use residue::{AffineSpaceModel, Residue};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Dense id of a ring element. `0` is the zero element and `1` the identity.
pub type Elem = u16;
