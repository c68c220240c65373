use alloc::vec;
use alloc::vec::Vec;

use super::field::FiniteField;
use super::ring::FiniteRing;
use crate::error::{Error, Result};
use crate::Elem;

/// An injective unital ring homomorphism `K → R` from a finite field into a
/// finite ring. Only the image `K_img ⊆ R` matters for the geometry; the map
/// itself is kept so that field arithmetic can be transported.
#[derive(Clone, Debug)]
pub struct SubfieldEmbedding {
    field: FiniteField,
    map: Vec<Elem>,
    image: Vec<Elem>,
    in_image: Vec<bool>,
    quadratic: Option<(u32, u32)>,
}

impl SubfieldEmbedding {
    /// Validates `map` (indexed by field id) as a unital ring embedding.
    pub fn new(field: FiniteField, ring: &FiniteRing, map: Vec<Elem>) -> Result<Self> {
        if map.len() != field.order() as usize {
            return Err(Error::InvalidEmbedding("map length differs from |K|"));
        }
        if map.iter().any(|&r| r as usize >= ring.size()) {
            return Err(Error::InvalidEmbedding("image outside the ring"));
        }
        if map[0] != 0 || map[1] != 1 {
            return Err(Error::InvalidEmbedding("0 and 1 must be preserved"));
        }
        for a in field.elements() {
            for b in field.elements() {
                let (ma, mb) = (map[a as usize], map[b as usize]);
                if map[field.add(a, b) as usize] != ring.add(ma, mb) {
                    return Err(Error::InvalidEmbedding("map is not additive"));
                }
                if map[field.mul(a, b) as usize] != ring.mul(ma, mb) {
                    return Err(Error::InvalidEmbedding("map is not multiplicative"));
                }
            }
        }
        let mut image = map.clone();
        image.sort_unstable();
        image.dedup();
        if image.len() != map.len() {
            return Err(Error::InvalidEmbedding("map is not injective"));
        }
        if image.iter().any(|&r| r != 0 && !ring.is_unit(r)) {
            return Err(Error::InvalidEmbedding("nonzero image element is not a unit"));
        }
        let mut in_image = vec![false; ring.size()];
        for &r in &image {
            in_image[r as usize] = true;
        }
        Ok(SubfieldEmbedding {
            field,
            map,
            image,
            in_image,
            quadratic: None,
        })
    }

    /// `GF(q²) → M(2×2, GF(q))`, `a + b·i ↦ (a b; b·s a+b·t)` where
    /// `i² = s + t·i`.
    pub fn quadratic(ring: &FiniteRing, s: u32, t: u32) -> Result<Self> {
        if ring.matrix_size() != 2 {
            return Err(Error::InvalidEmbedding("quadratic embedding needs a 2x2 matrix ring"));
        }
        let f = ring.base_field();
        if s >= f.order() || t >= f.order() {
            return Err(Error::InvalidEmbedding("s and t must be base field elements"));
        }
        if !f.quadratic_roots(s, t).is_empty() {
            return Err(Error::ReducibleQuadratic { s, t });
        }
        let k = FiniteField::new(f.characteristic(), 2 * f.degree())?;
        let phi = k.embedding_of(f)?;
        let (ks, kt) = (phi[s as usize], phi[t as usize]);
        let i = k
            .elements()
            .find(|&x| k.mul(x, x) == k.add(ks, k.mul(kt, x)))
            .ok_or(Error::ReducibleQuadratic { s, t })?;

        let mut map = vec![0; k.order() as usize];
        for a in f.elements() {
            for b in f.elements() {
                let elem = k.add(phi[a as usize], k.mul(phi[b as usize], i));
                let matrix = [a, b, f.mul(b, s), f.add(a, f.mul(b, t))];
                map[elem as usize] = ring.from_entries(&matrix);
            }
        }
        let mut e = Self::new(k, ring, map)?;
        e.quadratic = Some((s, t));
        Ok(e)
    }

    /// Quadratic embedding with the smallest valid `(s, t)`.
    pub fn default_quadratic(ring: &FiniteRing) -> Result<Self> {
        let (s, t) = ring.base_field().smallest_irreducible_quadratic()?;
        Self::quadratic(ring, s, t)
    }

    /// The base field of `M(n×n, GF(q))` as scalar matrices.
    pub fn scalars(ring: &FiniteRing) -> Result<Self> {
        let f = ring.base_field().clone();
        let n = ring.matrix_size();
        let map = f
            .elements()
            .map(|a| {
                let entries: Vec<u32> = (0..n * n).map(|ij| if ij / n == ij % n { a } else { 0 }).collect();
                ring.from_entries(&entries)
            })
            .collect();
        Self::new(f, ring, map)
    }

    /// `GF(p^d) ⊆ GF(p^m)` for a field ring `GF(p^m)`, `d | m`.
    pub fn subfield_of_field(ring: &FiniteRing, degree: u32) -> Result<Self> {
        if ring.matrix_size() != 1 {
            return Err(Error::InvalidEmbedding("subfield embedding needs a field ring"));
        }
        let big = ring.base_field();
        let sub = FiniteField::new(big.characteristic(), degree)?;
        let map = big.embedding_of(&sub)?.into_iter().map(|x| x as Elem).collect();
        Self::new(sub, ring, map)
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    /// Image of a field element.
    pub fn map(&self, k: u32) -> Elem {
        self.map[k as usize]
    }

    /// `K_img`, sorted.
    pub fn image(&self) -> &[Elem] {
        &self.image
    }

    /// `K_img \ {0}`, sorted.
    pub fn image_units(&self) -> &[Elem] {
        &self.image[1..]
    }

    pub fn contains(&self, r: Elem) -> bool {
        self.in_image[r as usize]
    }

    /// `(s, t)` when built by [`SubfieldEmbedding::quadratic`].
    pub fn quadratic_parameters(&self) -> Option<(u32, u32)> {
        self.quadratic
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(p: u32) -> FiniteRing {
        FiniteRing::matrix_ring(&FiniteField::new(p, 1).unwrap(), 2).unwrap()
    }

    #[test]
    fn gf4_in_m2_gf2() {
        let r = m2(2);
        let e = SubfieldEmbedding::quadratic(&r, 1, 1).unwrap();
        assert_eq!(e.image().len(), 4);
        assert_eq!(e.image_units().len(), 3);
        assert!(e.image_units().iter().all(|&u| r.is_unit(u)));
    }

    #[test]
    fn gf9_in_m2_gf3_is_closed() {
        let r = m2(3);
        let e = SubfieldEmbedding::quadratic(&r, 2, 0).unwrap();
        assert_eq!(e.image().len(), 9);
        for &a in e.image() {
            for &b in e.image() {
                assert!(e.contains(r.mul(a, b)));
                assert!(e.contains(r.add(a, b)));
            }
        }
        assert_eq!(e.image_units().iter().filter(|&&u| r.is_unit(u)).count(), 8);
    }

    #[test]
    fn reducible_quadratic_is_rejected() {
        let r = m2(2);
        assert_eq!(
            SubfieldEmbedding::quadratic(&r, 1, 0).unwrap_err(),
            Error::ReducibleQuadratic { s: 1, t: 0 }
        );
    }

    #[test]
    fn default_quadratic_parameters() {
        assert_eq!(
            SubfieldEmbedding::default_quadratic(&m2(2))
                .unwrap()
                .quadratic_parameters(),
            Some((1, 1))
        );
        assert_eq!(
            SubfieldEmbedding::default_quadratic(&m2(3))
                .unwrap()
                .quadratic_parameters(),
            Some((1, 1))
        );
    }

    #[test]
    fn scalars_and_subfields() {
        let r = m2(3);
        let e = SubfieldEmbedding::scalars(&r).unwrap();
        assert_eq!(e.image(), r.center());

        let gf16 = FiniteRing::matrix_ring(&FiniteField::new(2, 4).unwrap(), 1).unwrap();
        let sub = SubfieldEmbedding::subfield_of_field(&gf16, 2).unwrap();
        assert_eq!(sub.image().len(), 4);
        assert!(SubfieldEmbedding::subfield_of_field(&gf16, 3).is_err());
    }

    #[test]
    fn non_homomorphisms_are_rejected() {
        let r = m2(2);
        let f = FiniteField::new(2, 2).unwrap();
        // a permutation of units that does not respect multiplication
        let good = SubfieldEmbedding::quadratic(&r, 1, 1).unwrap();
        let mut map: Vec<Elem> = f.elements().map(|k| good.map(k)).collect();
        map.swap(2, 3);
        map.swap(1, 2);
        assert!(SubfieldEmbedding::new(f, &r, map).is_err());
    }
}
