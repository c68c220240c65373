//! Standalone axiom checks for incidence structures given as JSON.

use chaingeo_core::incidence::{self, IncidenceStructure};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureFile {
    pub points: usize,
    pub blocks: Vec<Vec<u32>>,
    #[serde(default = "default_triple_cap")]
    pub triple_cap: u64,
}

fn default_triple_cap() -> u64 {
    incidence::DEFAULT_TRIPLE_CAP
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub points: usize,
    pub blocks: usize,
    pub cs1: bool,
    pub cs2_existence: bool,
    pub cs2_uniqueness: bool,
    /// Always `null`: CS3 needs an affine model for every residue, which an
    /// abstract structure does not come with.
    pub cs3: Option<bool>,
}

pub fn check_structure(text: &str) -> CliResult<AxiomReport> {
    let file: StructureFile = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    let s = IncidenceStructure::new(file.points, file.blocks)?;
    let (cs2_existence, cs2_uniqueness) = incidence::check_cs2(&s, file.triple_cap)?;
    Ok(AxiomReport {
        points: s.point_count(),
        blocks: s.blocks().len(),
        cs1: incidence::check_cs1(&s),
        cs2_existence,
        cs2_uniqueness,
        cs3: None,
    })
}
