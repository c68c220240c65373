use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Largest `q` accepted for `matrix-quadratic` without `allow_large`.
pub const DESK_SCALE_Q: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    /// `R = M(2×2, GF(q))`, `K = GF(q²)` via `i² = s + t·i`.
    MatrixQuadratic,
    /// `R = GF(p^degree)`, `K = GF(p^subdegree)`.
    Field,
    /// `R = M(n×n, GF(q))`, `K` the scalar matrices.
    MatrixRingFull,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Caps {
    pub ring: usize,
    pub chains: usize,
    pub cliques: usize,
    /// Pairwise-distant triples for the CS2 scan.
    pub triples: u64,
    /// Below this many distant triples chain counts are exhaustive.
    pub exhaustive_triples: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            ring: chaingeo_core::DEFAULT_RING_CAP,
            chains: chaingeo_core::chains::DEFAULT_CHAIN_CAP,
            cliques: chaingeo_core::chains::DEFAULT_CLIQUE_CAP,
            triples: chaingeo_core::incidence::DEFAULT_TRIPLE_CAP,
            exhaustive_triples: 10_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Samples {
    pub triples: usize,
    pub group_elements: usize,
    /// Random `(a 0; c d)` tested against the normalizer criterion.
    pub lower_triangular: usize,
}

impl Default for Samples {
    fn default() -> Self {
        Samples {
            triples: 1000,
            group_elements: 50,
            lower_triangular: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub kind: Kind,
    pub p: u32,
    #[serde(default = "one")]
    pub degree: u32,
    /// Matrix size for `matrix-ring-full`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Degree of `K` over the prime field for `field`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subdegree: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<u32>,
    #[serde(default)]
    pub caps: Caps,
    #[serde(default)]
    pub samples: Samples,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub allow_large: bool,
}

fn one() -> u32 {
    1
}

impl InstanceConfig {
    pub fn matrix_quadratic(p: u32) -> Self {
        InstanceConfig {
            kind: Kind::MatrixQuadratic,
            p,
            degree: 1,
            n: None,
            subdegree: None,
            s: None,
            t: None,
            caps: Caps::default(),
            samples: Samples::default(),
            seed: 0,
            allow_large: false,
        }
    }

    pub fn field(p: u32, degree: u32, subdegree: u32) -> Self {
        InstanceConfig {
            kind: Kind::Field,
            degree,
            subdegree: Some(subdegree),
            ..Self::matrix_quadratic(p)
        }
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let config: Self =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    /// `q = p^degree`, the order of the base field.
    pub fn q(&self) -> u64 {
        (self.p as u64).saturating_pow(self.degree)
    }

    /// Parameter checks that need no arithmetic; primality and
    /// irreducibility are checked while building.
    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.p < 2 {
            return bad(format!("p = {} is not a prime", self.p));
        }
        if self.degree == 0 {
            return bad("degree must be at least 1".into());
        }
        if self.s.is_some() != self.t.is_some() {
            return bad("s and t must be given together".into());
        }
        let q = self.q();
        let n = self.n.unwrap_or(2) as u32;
        let ring_size = match self.kind {
            Kind::MatrixQuadratic => q.saturating_pow(4),
            Kind::Field => q,
            Kind::MatrixRingFull => q.saturating_pow(n * n),
        };
        if ring_size > self.caps.ring as u64 {
            return bad(format!("|R| = {ring_size} exceeds the ring cap {}", self.caps.ring));
        }
        match self.kind {
            Kind::MatrixQuadratic => {
                if self.n.is_some() || self.subdegree.is_some() {
                    return bad("matrix-quadratic takes neither n nor subdegree".into());
                }
                if q > DESK_SCALE_Q as u64 && !self.allow_large {
                    return bad(format!("q = {q} is above desk scale; set allow_large"));
                }
            }
            Kind::Field => {
                let sub = self.subdegree.unwrap_or(self.degree);
                if sub == 0 || !self.degree.is_multiple_of(sub) {
                    return bad(format!("subdegree {sub} does not divide degree {}", self.degree));
                }
                if self.n.is_some() || self.s.is_some() {
                    return bad("field takes neither n nor s, t".into());
                }
            }
            Kind::MatrixRingFull => {
                if n == 0 {
                    return bad("n must be at least 1".into());
                }
                if self.subdegree.is_some() || self.s.is_some() {
                    return bad("matrix-ring-full takes neither subdegree nor s, t".into());
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let c: InstanceConfig = serde_json::from_str(r#"{"kind":"matrix-quadratic","p":3}"#).unwrap();
        assert_eq!(c, InstanceConfig::matrix_quadratic(3));
        c.validate().unwrap();
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut c = InstanceConfig::matrix_quadratic(5);
        assert!(c.validate().is_err());
        c.allow_large = true;
        c.validate().unwrap();
        c.caps.ring = 100;
        assert!(c.validate().is_err());

        let mut c = InstanceConfig::matrix_quadratic(2);
        c.s = Some(1);
        assert!(c.validate().is_err());

        assert!(InstanceConfig::field(3, 2, 3).validate().is_err());
        assert!(serde_json::from_str::<InstanceConfig>(r#"{"kind":"ring","p":2}"#).is_err());
        assert!(serde_json::from_str::<InstanceConfig>(r#"{"kind":"field","p":2,"extra":1}"#).is_err());
    }
}
