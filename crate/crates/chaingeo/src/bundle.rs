//! On-disk instance bundle: the ring, embedding and projective line tables.

use serde::{Deserialize, Serialize};

use crate::config::SCHEMA_VERSION;
use crate::instance::{Instance, InstanceSummary};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingTables {
    pub characteristic: u32,
    /// Coefficients of the base field modulus, constant term first.
    pub base_modulus: Vec<u32>,
    pub matrix_size: usize,
    /// Matrix entries (row-major base-field ids) of every element id.
    pub entries: Vec<Vec<u32>>,
    pub add: Vec<Vec<u16>>,
    pub mul: Vec<Vec<u16>>,
    pub units: Vec<u16>,
    pub center: Vec<u16>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bundle {
    pub schema_version: u32,
    pub instance: InstanceSummary,
    pub ring: RingTables,
    /// Image of the field element with id `k` at position `k`.
    pub embedding: Vec<u16>,
    pub normalizer: Vec<u16>,
    pub core_field: Vec<u16>,
    /// Canonical pair of each point id.
    pub points: Vec<(u16, u16)>,
    /// Point ids of the standard chain `C`.
    pub standard_chain: Vec<u32>,
}

impl Bundle {
    pub fn new(inst: &Instance) -> Self {
        let g = &inst.geometry;
        let r = g.ring();
        let f = r.base_field();
        let table =
            |op: &dyn Fn(u16, u16) -> u16| r.elements().map(|a| r.elements().map(|b| op(a, b)).collect()).collect();
        Bundle {
            schema_version: SCHEMA_VERSION,
            instance: inst.summary(),
            ring: RingTables {
                characteristic: r.characteristic(),
                base_modulus: f.modulus().to_vec(),
                matrix_size: r.matrix_size(),
                entries: r.elements().map(|a| r.entries(a)).collect(),
                add: table(&|a, b| r.add(a, b)),
                mul: table(&|a, b| r.mul(a, b)),
                units: r.units().to_vec(),
                center: r.center().to_vec(),
            },
            embedding: g.embedding().field().elements().map(|k| g.embedding().map(k)).collect(),
            normalizer: g.normalizer().subgroup.elements().to_vec(),
            core_field: g.core_field().to_vec(),
            points: g.line().points().to_vec(),
            standard_chain: g.standard_chain().points().to_vec(),
        }
    }
}
