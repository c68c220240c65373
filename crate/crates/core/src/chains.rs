//! The chain geometry `Σ(K,R) = (P(R), C^Γ)`.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use fixedbitset::FixedBitSet;

use crate::algebra::{core_field, normalizer, FiniteRing, Normalizer, SubfieldEmbedding};
use crate::error::{Error, Result};
use crate::projline::{gl2_generators, Mat2, PointId, ProjectiveLine};
use crate::Elem;

/// Default cap on the size of the chain orbit built by [`ChainGeometry::all_chains`].
pub const DEFAULT_CHAIN_CAP: usize = 200_000;
/// Default cap on `|P(R)|` for clique enumeration.
pub const DEFAULT_CLIQUE_CAP: usize = 500;

/// A chain, stored as its sorted point ids.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Chain(Vec<PointId>);

impl Chain {
    pub fn from_points(mut points: Vec<PointId>) -> Self {
        points.sort_unstable();
        points.dedup();
        Chain(points)
    }

    pub fn points(&self) -> &[PointId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: PointId) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    /// Image under a point permutation.
    pub fn permuted(&self, perm: &[PointId]) -> Chain {
        Chain::from_points(self.0.iter().map(|&p| perm[p as usize]).collect())
    }
}

/// `Σ(K,R)` together with the data most queries need: the
/// normalizer `N`, a right transversal of `R*/N` and the core field `F`.
#[derive(Clone, Debug)]
pub struct ChainGeometry {
    ring: FiniteRing,
    embedding: SubfieldEmbedding,
    line: ProjectiveLine,
    normalizer: Normalizer,
    transversal: Vec<Elem>,
    core_field: Vec<Elem>,
    standard: Chain,
    generators: Vec<Mat2>,
}

impl ChainGeometry {
    pub fn new(ring: FiniteRing, embedding: SubfieldEmbedding) -> Result<Self> {
        let line = ProjectiveLine::build(&ring)?;
        Ok(Self::with_line(ring, embedding, line))
    }

    pub fn with_line(ring: FiniteRing, embedding: SubfieldEmbedding, line: ProjectiveLine) -> Self {
        let normalizer = normalizer(&ring, &embedding);
        let transversal = normalizer.subgroup.right_coset_transversal(&ring);
        let core_field = core_field(&ring, &embedding, &normalizer);
        // P(K) ↪ P(R): K(k,1) ↦ R(k,1) and K(1,0) ↦ R(1,0).
        let mut pts: Vec<PointId> = embedding
            .image()
            .iter()
            .map(|&k| line.point_of(k, 1).expect("R(k,1) is a point"))
            .collect();
        pts.push(line.infinity());
        let standard = Chain::from_points(pts);
        let generators = gl2_generators(&ring);
        ChainGeometry {
            ring,
            embedding,
            line,
            normalizer,
            transversal,
            core_field,
            standard,
            generators,
        }
    }

    pub fn ring(&self) -> &FiniteRing {
        &self.ring
    }

    pub fn embedding(&self) -> &SubfieldEmbedding {
        &self.embedding
    }

    pub fn line(&self) -> &ProjectiveLine {
        &self.line
    }

    pub fn normalizer(&self) -> &Normalizer {
        &self.normalizer
    }

    /// Right coset representatives of `N` in `R*`, starting with `1`.
    pub fn transversal(&self) -> &[Elem] {
        &self.transversal
    }

    /// `F = ⋂ u⁻¹Ku`, sorted.
    pub fn core_field(&self) -> &[Elem] {
        &self.core_field
    }

    pub fn generators(&self) -> &[Mat2] {
        &self.generators
    }

    /// The standard chain `C = P(K) ⊆ P(R)`.
    pub fn standard_chain(&self) -> &Chain {
        &self.standard
    }

    /// `D·γ`.
    pub fn chain_image(&self, chain: &Chain, m: &Mat2) -> Result<Chain> {
        let perm = self.line.permutation(&self.ring, m)?;
        Ok(chain.permuted(&perm))
    }

    /// `C^ω` for `ω = diag(u,u)`, `u` running over the transversal of `R*/N`.
    pub fn chains_through_standard_triple(&self) -> Vec<Chain> {
        self.transversal
            .iter()
            .map(|&u| {
                self.chain_image(&self.standard, &Mat2::diag(u, u))
                    .expect("diag(u,u) is invertible")
            })
            .collect()
    }

    /// Chains through three pairwise distant points: the standard fan moved
    /// by a transitivity witness.
    pub fn chains_through_triple(&self, p: PointId, q: PointId, r: PointId) -> Result<Vec<Chain>> {
        let w = self.line.transitivity_witness(&self.ring, p, q, r)?;
        let perm = self.line.permutation(&self.ring, &w)?;
        let mut out: Vec<Chain> = self
            .chains_through_standard_triple()
            .iter()
            .map(|c| c.permuted(&perm))
            .collect();
        out.sort();
        Ok(out)
    }

    /// The chain orbit `C^Γ`, sorted, as long as it has at most `cap` chains.
    pub fn all_chains(&self, cap: usize) -> Result<Vec<Chain>> {
        let perms: Vec<Vec<PointId>> = self
            .generators
            .iter()
            .map(|g| self.line.permutation(&self.ring, g))
            .collect::<Result<_>>()?;
        let mut seen = BTreeSet::from([self.standard.clone()]);
        let mut frontier = vec![self.standard.clone()];
        while let Some(c) = frontier.pop() {
            for perm in &perms {
                let img = c.permuted(perm);
                if !seen.contains(&img) {
                    if seen.len() >= cap {
                        return Err(Error::CapExceeded {
                            what: "chain orbit",
                            size: seen.len() as u64 + 1,
                            cap: cap as u64,
                        });
                    }
                    seen.insert(img.clone());
                    frontier.push(img);
                }
            }
        }
        Ok(seen.into_iter().collect())
    }

    /// Intersection of all chains through `p, q, r`.
    pub fn triple_intersection(&self, p: PointId, q: PointId, r: PointId) -> Result<Vec<PointId>> {
        let chains = self.chains_through_triple(p, q, r)?;
        let mut acc: Vec<PointId> = chains[0].points().to_vec();
        for c in &chains[1..] {
            acc.retain(|&x| c.contains(x));
        }
        Ok(acc)
    }

    /// `P(F)·γ` for the transitivity witness `γ` of `p, q, r`.
    pub fn f_chain(&self, p: PointId, q: PointId, r: PointId) -> Result<Vec<PointId>> {
        let w = self.line.transitivity_witness(&self.ring, p, q, r)?;
        let mut pts: Vec<PointId> = self
            .core_field
            .iter()
            .map(|&f| self.line.point_of(f, 1).expect("R(f,1) is a point"))
            .chain(core::iter::once(self.line.infinity()))
            .map(|x| self.line.act_unchecked(&self.ring, x, &w))
            .collect();
        pts.sort_unstable();
        Ok(pts)
    }

    /// Exactly one chain through each pairwise distant triple, i.e. `K*` is
    /// normal in `R*`.
    pub fn is_chain_space(&self) -> bool {
        self.normalizer.is_normal
    }

    /// `PGL₂(R)` acts sharply 3-distant-transitively iff `R* ⊆ Z(R)`.
    pub fn is_sharply_3_transitive(&self) -> bool {
        self.ring.units().iter().all(|&u| self.ring.is_central(u))
    }

    /// Whether every `diag(u,u)`, `u ∈ R*`, acts trivially on `P(R)`.
    pub fn standard_triple_stabilizer_is_trivial(&self) -> bool {
        self.ring.units().iter().all(|&u| {
            let m = Mat2::diag(u, u);
            self.line.ids().all(|p| self.line.act_unchecked(&self.ring, p, &m) == p)
        })
    }

    /// All maximal sets of pairwise distant points (Bron–Kerbosch with
    /// pivoting on bitsets), each sorted, in sorted order.
    pub fn maximal_distant_cliques(&self, cap: usize) -> Result<Vec<Vec<PointId>>> {
        let n = self.line.len();
        if n > cap {
            return Err(Error::CapExceeded {
                what: "clique search on P(R)",
                size: n as u64,
                cap: cap as u64,
            });
        }
        let adj: Vec<&FixedBitSet> = self.line.ids().map(|p| self.line.distant_set(p)).collect();
        let mut out = Vec::new();
        let mut candidates = FixedBitSet::with_capacity(n);
        candidates.insert_range(..);
        bron_kerbosch(
            &adj,
            &mut Vec::new(),
            candidates,
            FixedBitSet::with_capacity(n),
            &mut out,
        );
        for c in &mut out {
            c.sort_unstable();
        }
        out.sort();
        Ok(out)
    }
}

fn bron_kerbosch(
    adj: &[&FixedBitSet],
    current: &mut Vec<PointId>,
    mut candidates: FixedBitSet,
    mut excluded: FixedBitSet,
    out: &mut Vec<Vec<PointId>>,
) {
    if candidates.is_clear() {
        if excluded.is_clear() {
            out.push(current.clone());
        }
        return;
    }
    let pivot = candidates
        .ones()
        .chain(excluded.ones())
        .max_by_key(|&u| candidates.intersection(adj[u]).count())
        .expect("candidates is nonempty");
    let mut branch = candidates.clone();
    branch.difference_with(adj[pivot]);
    for v in branch.ones() {
        let mut next_cand = candidates.clone();
        next_cand.intersect_with(adj[v]);
        let mut next_excl = excluded.clone();
        next_excl.intersect_with(adj[v]);
        current.push(v as PointId);
        bron_kerbosch(adj, current, next_cand, next_excl, out);
        current.pop();
        candidates.set(v, false);
        excluded.insert(v);
    }
}
