use alloc::vec;
use alloc::vec::Vec;

use super::embedding::SubfieldEmbedding;
use super::ring::FiniteRing;
use crate::error::{Error, Result};
use crate::Elem;

/// A subgroup of `R*`, stored as a sorted list of unit ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupOfUnits {
    elems: Vec<Elem>,
}

impl SubgroupOfUnits {
    /// Checks closure under products and inverses.
    pub fn new(ring: &FiniteRing, mut elems: Vec<Elem>) -> Result<Self> {
        elems.sort_unstable();
        elems.dedup();
        if elems.binary_search(&1).is_err() {
            return Err(Error::InvalidEmbedding("subgroup must contain 1"));
        }
        let mut member = vec![false; ring.size()];
        for &u in &elems {
            if !ring.is_unit(u) {
                return Err(Error::NotAUnit(u));
            }
            member[u as usize] = true;
        }
        for &a in &elems {
            if !member[ring.inverse(a)? as usize] {
                return Err(Error::InvalidEmbedding("subgroup not closed under inverses"));
            }
            for &b in &elems {
                if !member[ring.mul(a, b) as usize] {
                    return Err(Error::InvalidEmbedding("subgroup not closed under products"));
                }
            }
        }
        Ok(SubgroupOfUnits { elems })
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, u: Elem) -> bool {
        self.elems.binary_search(&u).is_ok()
    }

    /// Representatives of the right cosets `N·u`, starting with `1` and
    /// then in increasing id order of the smallest unseen unit.
    pub fn right_coset_transversal(&self, ring: &FiniteRing) -> Vec<Elem> {
        let mut covered = vec![false; ring.size()];
        let mut reps = Vec::new();
        for u in core::iter::once(1).chain(ring.units().iter().copied()) {
            if covered[u as usize] {
                continue;
            }
            reps.push(u);
            for &n in &self.elems {
                covered[ring.mul(n, u) as usize] = true;
            }
        }
        reps
    }
}

/// `N = N_{R*}(K*)` together with the flag "`K*` is normal in `R*`".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalizer {
    pub subgroup: SubgroupOfUnits,
    /// `N = R*`, equivalently `u⁻¹·K·u = K` for every unit `u`.
    pub is_normal: bool,
}

/// Units `n` with `n⁻¹·K_img·n = K_img`, by testing every unit.
pub fn normalizer(ring: &FiniteRing, emb: &SubfieldEmbedding) -> Normalizer {
    let elems: Vec<Elem> = ring
        .units()
        .iter()
        .copied()
        .filter(|&n| {
            let ni = ring.inv(n).expect("unit");
            emb.image().iter().all(|&k| emb.contains(ring.mul(ring.mul(ni, k), n)))
        })
        .collect();
    let is_normal = elems.len() == ring.units().len();
    Normalizer {
        subgroup: SubgroupOfUnits::new(ring, elems).expect("a normalizer is a subgroup"),
        is_normal,
    }
}

fn intersect_conjugates(ring: &FiniteRing, emb: &SubfieldEmbedding, units: impl Iterator<Item = Elem>) -> Vec<Elem> {
    let mut keep: Vec<bool> = (0..ring.size()).map(|r| emb.contains(r as Elem)).collect();
    for u in units {
        let conj = ring.conjugate_set(emb.image(), u).expect("unit");
        let mut in_conj = vec![false; ring.size()];
        for c in conj {
            in_conj[c as usize] = true;
        }
        for (k, flag) in keep.iter_mut().enumerate() {
            *flag &= in_conj[k];
        }
    }
    ring.elements().filter(|&r| keep[r as usize]).collect()
}

/// The core field `F = ⋂ u⁻¹·K·u`, with `u` running over a right coset
/// transversal of `N` in `R*`.
pub fn core_field(ring: &FiniteRing, emb: &SubfieldEmbedding, normalizer: &Normalizer) -> Vec<Elem> {
    let reps = normalizer.subgroup.right_coset_transversal(ring);
    intersect_conjugates(ring, emb, reps.into_iter())
}

/// The core field intersected over all of `R*`.
pub fn core_field_full(ring: &FiniteRing, emb: &SubfieldEmbedding) -> Vec<Elem> {
    intersect_conjugates(ring, emb, ring.units().iter().copied())
}
