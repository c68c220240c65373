//! Finite incidence structures and the chain space axioms CS1–CS3.
//!
//! CS3 needs an affine model for every residue. Recognising an abstract
//! partial affine space is out of scope, so a [`ResidueModels`] provider
//! supplies coordinates and candidate models per point.

use alloc::vec;
use alloc::vec::Vec;

use fixedbitset::FixedBitSet;

use crate::algebra::FiniteRing;
use crate::chains::ChainGeometry;
use crate::error::{Error, Result};
use crate::projline::PointId;
use crate::residue::{model_for_unit, partial_affine_check, AffineSpaceModel, Block};
use crate::Elem;

pub const DEFAULT_TRIPLE_CAP: u64 = 20_000_000;

#[derive(Clone, Debug)]
pub struct IncidenceStructure {
    n_points: usize,
    blocks: Vec<Vec<PointId>>,
    /// Blocks through each point.
    blocks_of: Vec<FixedBitSet>,
    /// Two points are joined when they are different and share a block.
    joined: Vec<FixedBitSet>,
}

impl IncidenceStructure {
    /// Blocks are sorted and deduplicated; empty or out-of-range blocks are
    /// rejected.
    pub fn new(n_points: usize, blocks: Vec<Vec<PointId>>) -> Result<Self> {
        let mut blocks: Vec<Vec<PointId>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        blocks.sort();
        blocks.dedup();
        if blocks.iter().any(|b| b.is_empty()) {
            return Err(Error::InvalidStructure("empty block"));
        }
        if blocks.iter().flatten().any(|&p| p as usize >= n_points) {
            return Err(Error::InvalidStructure("block refers to a missing point"));
        }
        let mut blocks_of = vec![FixedBitSet::with_capacity(blocks.len()); n_points];
        let mut joined = vec![FixedBitSet::with_capacity(n_points); n_points];
        for (i, b) in blocks.iter().enumerate() {
            for &p in b {
                blocks_of[p as usize].insert(i);
                for &q in b {
                    if p != q {
                        joined[p as usize].insert(q as usize);
                    }
                }
            }
        }
        Ok(IncidenceStructure {
            n_points,
            blocks,
            blocks_of,
            joined,
        })
    }

    /// Points and chains of `Σ(K,R)`.
    pub fn from_chain_geometry(g: &ChainGeometry, chain_cap: usize) -> Result<Self> {
        let chains = g.all_chains(chain_cap)?;
        Self::new(
            g.line().len(),
            chains.into_iter().map(|c| c.points().to_vec()).collect(),
        )
    }

    pub fn point_count(&self) -> usize {
        self.n_points
    }

    /// Sorted blocks.
    pub fn blocks(&self) -> &[Vec<PointId>] {
        &self.blocks
    }

    pub fn blocks_through(&self, p: PointId) -> impl Iterator<Item = usize> + '_ {
        self.blocks_of[p as usize].ones()
    }

    /// Number of blocks containing all of `pts`.
    pub fn blocks_containing(&self, pts: &[PointId]) -> usize {
        let Some((&first, rest)) = pts.split_first() else {
            return self.blocks.len();
        };
        let mut acc = self.blocks_of[first as usize].clone();
        for &p in rest {
            acc.intersect_with(&self.blocks_of[p as usize]);
        }
        acc.count_ones(..)
    }

    /// The derived distant relation.
    pub fn joined(&self, p: PointId, q: PointId) -> bool {
        self.joined[p as usize].contains(q as usize)
    }

    pub fn joined_set(&self, p: PointId) -> &FixedBitSet {
        &self.joined[p as usize]
    }

    /// Number of pairwise-joined triples `p < q < r`.
    pub fn joined_triple_count(&self) -> u64 {
        let mut n = 0u64;
        for p in 0..self.n_points {
            for q in self.joined[p].ones().filter(|&q| q > p) {
                n += self.joined[p].intersection(&self.joined[q]).filter(|&r| r > q).count() as u64;
            }
        }
        n
    }
}

/// CS1: every point is on a block and every block has at least three points.
pub fn check_cs1(s: &IncidenceStructure) -> bool {
    s.blocks_of.iter().all(|b| !b.is_clear()) && s.blocks.iter().all(|b| b.len() >= 3)
}

/// CS2 split into existence (every pairwise-joined triple lies on a block)
/// and uniqueness (on at most one block).
pub fn check_cs2(s: &IncidenceStructure, cap: u64) -> Result<(bool, bool)> {
    let triples = s.joined_triple_count();
    if triples > cap {
        return Err(Error::CapExceeded {
            what: "pairwise-distant triples",
            size: triples,
            cap,
        });
    }
    let (mut exists, mut unique) = (true, true);
    let mut pq = FixedBitSet::with_capacity(s.blocks.len());
    for p in 0..s.n_points {
        for q in s.joined[p].ones().filter(|&q| q > p) {
            pq.clone_from(&s.blocks_of[p]);
            pq.intersect_with(&s.blocks_of[q]);
            for r in s.joined[p].intersection(&s.joined[q]).filter(|&r| r > q) {
                match pq.intersection(&s.blocks_of[r]).take(2).count() {
                    0 => exists = false,
                    1 => {}
                    _ => unique = false,
                }
                if !exists && !unique {
                    return Ok((false, false));
                }
            }
        }
    }
    Ok((exists, unique))
}

/// Coordinates and candidate affine models for the residues of a structure.
pub trait ResidueModels {
    fn ring(&self) -> &FiniteRing;
    /// For each point of the structure its coordinate in `Σ_p`, `None` for
    /// `p` itself and for points not in the residue.
    fn coordinates(&self, p: PointId) -> Result<Vec<Option<Elem>>>;
    fn candidate_models(&self, p: PointId) -> Result<Vec<AffineSpaceModel>>;
}

/// Residue at `p` is transported to `∞` along `γ`; the candidates are the
/// models `A(u⁻¹Ku, R)` over a transversal of `N` in `R*`.
impl ResidueModels for ChainGeometry {
    fn ring(&self) -> &FiniteRing {
        ChainGeometry::ring(self)
    }

    fn coordinates(&self, p: PointId) -> Result<Vec<Option<Elem>>> {
        let (r, l) = (ChainGeometry::ring(self), self.line());
        let w = l.witness_from_infinity(r, p);
        let perm = l.permutation(r, &w)?;
        let mut coords = vec![None; l.len()];
        for x in r.elements() {
            let q = l.point_of(x, 1).ok_or(Error::NotAPoint(x, 1))?;
            coords[perm[q as usize] as usize] = Some(x);
        }
        Ok(coords)
    }

    fn candidate_models(&self, _p: PointId) -> Result<Vec<AffineSpaceModel>> {
        self.transversal().iter().map(|&u| model_for_unit(self, u)).collect()
    }
}

/// The blocks of `Σ_p` in the coordinates supplied by `models`.
pub fn residue_blocks(s: &IncidenceStructure, p: PointId, coords: &[Option<Elem>]) -> Result<Vec<Block>> {
    s.blocks_through(p)
        .map(|i| {
            let mut b = s.blocks[i]
                .iter()
                .filter(|&&x| x != p)
                .map(|&x| coords[x as usize].ok_or(Error::InvalidStructure("residue point without coordinate")))
                .collect::<Result<Vec<Elem>>>()?;
            b.sort_unstable();
            Ok(b)
        })
        .collect()
}

/// CS3: at every point the whole block set of the residue is a partial
/// affine space for one of the candidate models. Without a provider the
/// answer is indeterminate and reported as [`Error::NoAffineModel`].
pub fn check_cs3(s: &IncidenceStructure, models: Option<&dyn ResidueModels>) -> Result<bool> {
    let Some(models) = models else {
        return Err(Error::NoAffineModel(0));
    };
    for p in 0..s.n_points as PointId {
        let coords = models.coordinates(p)?;
        let blocks = residue_blocks(s, p, &coords)?;
        let candidates = models.candidate_models(p)?;
        if candidates.is_empty() {
            return Err(Error::NoAffineModel(p));
        }
        let ok = candidates
            .iter()
            .any(|m| partial_affine_check(models.ring(), &blocks, m).is_partial_affine());
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// CS1 ∧ CS2 ∧ CS3, short-circuiting in that order.
pub fn is_chain_space_axiomatic(
    s: &IncidenceStructure,
    models: Option<&dyn ResidueModels>,
    triple_cap: u64,
) -> Result<bool> {
    if !check_cs1(s) {
        return Ok(false);
    }
    let (exists, unique) = check_cs2(s, triple_cap)?;
    if !(exists && unique) {
        return Ok(false);
    }
    check_cs3(s, models)
}
