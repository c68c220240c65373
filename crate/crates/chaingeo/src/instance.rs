use chaingeo_core::{ChainGeometry, FiniteField, FiniteRing, SubfieldEmbedding};
use serde::{Deserialize, Serialize};

use crate::config::{InstanceConfig, Kind};
use crate::error::CliResult;

/// A chain geometry built from a validated configuration.
pub struct Instance {
    pub config: InstanceConfig,
    pub geometry: ChainGeometry,
}

/// The instance as echoed in bundles and reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub config: InstanceConfig,
    pub ring: String,
    pub ring_size: usize,
    pub subfield_size: usize,
    pub points: usize,
    /// `(s, t)` actually used for a quadratic embedding.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadratic: Option<(u32, u32)>,
}

impl Instance {
    pub fn build(config: &InstanceConfig) -> CliResult<Self> {
        config.validate()?;
        let base = FiniteField::new(config.p, config.degree)?;
        let cap = config.caps.ring;
        let (ring, embedding) = match config.kind {
            Kind::MatrixQuadratic => {
                let ring = FiniteRing::matrix_ring_with_cap(&base, 2, cap)?;
                let emb = match (config.s, config.t) {
                    (Some(s), Some(t)) => SubfieldEmbedding::quadratic(&ring, s, t)?,
                    _ => SubfieldEmbedding::default_quadratic(&ring)?,
                };
                (ring, emb)
            }
            Kind::Field => {
                let ring = FiniteRing::matrix_ring_with_cap(&base, 1, cap)?;
                let sub = config.subdegree.unwrap_or(config.degree);
                let emb = SubfieldEmbedding::subfield_of_field(&ring, sub)?;
                (ring, emb)
            }
            Kind::MatrixRingFull => {
                let ring = FiniteRing::matrix_ring_with_cap(&base, config.n.unwrap_or(2), cap)?;
                let emb = SubfieldEmbedding::scalars(&ring)?;
                (ring, emb)
            }
        };
        log::debug!("built {} with |K| = {}", ring.name(), embedding.image().len());
        let geometry = ChainGeometry::new(ring, embedding)?;
        Ok(Instance {
            config: config.clone(),
            geometry,
        })
    }

    pub fn summary(&self) -> InstanceSummary {
        let g = &self.geometry;
        InstanceSummary {
            config: self.config.clone(),
            ring: g.ring().name(),
            ring_size: g.ring().size(),
            subfield_size: g.embedding().image().len(),
            points: g.line().len(),
            quadratic: g.embedding().quadratic_parameters(),
        }
    }
}
