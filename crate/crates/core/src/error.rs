use core::fmt;

use crate::Elem;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    NotPrime(u32),
    InvalidDegree,
    CapExceeded {
        what: &'static str,
        size: u64,
        cap: u64,
    },
    /// `x² − t·x − s` has a root in the base field.
    ReducibleQuadratic {
        s: u32,
        t: u32,
    },
    NoQuadraticExtension,
    /// The given subfield degree does not divide the field degree.
    NotASubfield,
    InvalidEmbedding(&'static str),
    NotAUnit(Elem),
    NotInvertible,
    NotAPoint(Elem, Elem),
    /// The orbit of `R(1,0)` and the brute force point oracle disagree.
    OrbitMismatch {
        orbit: usize,
        oracle: usize,
    },
    NotDistant,
    NotOnChain,
    InvalidSubfield(&'static str),
    NotALine,
    InvalidStructure(&'static str),
    NoAffineModel(u32),
    NonTransitiveCompatibility,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPrime(p) => write!(f, "{p} is not prime"),
            Error::InvalidDegree => f.write_str("degree must be positive"),
            Error::CapExceeded { what, size, cap } => {
                write!(f, "{what} of size {size} exceeds cap {cap}")
            }
            Error::ReducibleQuadratic { s, t } => {
                write!(f, "x^2 - {t}x - {s} is reducible over the base field")
            }
            Error::NoQuadraticExtension => f.write_str("no irreducible x^2 - tx - s exists"),
            Error::NotASubfield => f.write_str("subfield degree must divide the field degree"),
            Error::InvalidEmbedding(why) => write!(f, "invalid subfield embedding: {why}"),
            Error::NotAUnit(r) => write!(f, "ring element {r} is not a unit"),
            Error::NotInvertible => f.write_str("matrix is not in GL2(R)"),
            Error::NotAPoint(a, b) => write!(f, "pair ({a},{b}) is not a point of P(R)"),
            Error::OrbitMismatch { orbit, oracle } => {
                write!(f, "generator orbit has {orbit} points but the oracle finds {oracle}")
            }
            Error::NotDistant => f.write_str("points are not pairwise distant"),
            Error::NotOnChain => f.write_str("chain does not pass through the base point"),
            Error::InvalidSubfield(why) => write!(f, "invalid scalar subfield: {why}"),
            Error::NotALine => f.write_str("set is not a line of the affine model"),
            Error::InvalidStructure(why) => write!(f, "invalid incidence structure: {why}"),
            Error::NoAffineModel(p) => write!(f, "no affine model proposed at point {p}"),
            Error::NonTransitiveCompatibility => f.write_str("compatibility relation is not transitive"),
        }
    }
}

impl core::error::Error for Error {}
