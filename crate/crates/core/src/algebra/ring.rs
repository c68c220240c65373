use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::field::FiniteField;
use crate::error::{Error, Result};
use crate::Elem;

/// Default upper bound on `|R|` for [`FiniteRing::matrix_ring`].
pub const DEFAULT_RING_CAP: usize = 10_000;

/// Hard limit imposed by the `u16` element ids.
const MAX_RING_SIZE: usize = 1 << 16;

/// A finite ring `M(n×n, GF(q))` stored as dense tables.
///
/// Element ids follow the row-major base-`q` encoding of the matrix
/// entries, except that the ids of the identity and of the matrix encoded
/// as `1` are swapped so that `0` is zero and `1` is one.
#[derive(Clone, Debug)]
pub struct FiniteRing {
    base: FiniteField,
    n: usize,
    size: usize,
    identity_code: u32,
    add: Vec<Elem>,
    mul: Vec<Elem>,
    neg: Vec<Elem>,
    inv: Vec<Option<Elem>>,
    units: Vec<Elem>,
    center: Vec<Elem>,
    rep_dim: usize,
    rep: Vec<u32>,
    additive_gens: Vec<Elem>,
    unit_gens: Vec<Elem>,
}

impl FiniteRing {
    pub fn matrix_ring(base: &FiniteField, n: usize) -> Result<Self> {
        Self::matrix_ring_with_cap(base, n, DEFAULT_RING_CAP)
    }

    pub fn matrix_ring_with_cap(base: &FiniteField, n: usize, cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDegree);
        }
        let q = base.order() as u64;
        let size = (n * n) as u32;
        let size = q.checked_pow(size).unwrap_or(u64::MAX);
        let cap = cap.min(MAX_RING_SIZE);
        if size > cap as u64 {
            return Err(Error::CapExceeded {
                what: "ring",
                size,
                cap: cap as u64,
            });
        }
        let size = size as usize;
        let q = q as u32;
        let identity_code = (0..n).map(|i| q.pow((i * n + i) as u32)).sum::<u32>();

        let relabel = |x: u32| match x {
            1 => identity_code,
            c if c == identity_code => 1,
            c => c,
        };
        let entries: Vec<Vec<u32>> = (0..size as u32)
            .map(|id| {
                let mut code = relabel(id);
                (0..n * n)
                    .map(|_| {
                        let e = code % q;
                        code /= q;
                        e
                    })
                    .collect()
            })
            .collect();
        let encode = |m: &[u32]| -> Elem {
            let code = m.iter().rev().fold(0u32, |acc, &e| acc * q + e);
            relabel(code) as Elem
        };

        let mut add = vec![0; size * size];
        let mut mul = vec![0; size * size];
        let mut buf = vec![0u32; n * n];
        for (a, ea) in entries.iter().enumerate() {
            for (b, eb) in entries.iter().enumerate() {
                for k in 0..n * n {
                    buf[k] = base.add(ea[k], eb[k]);
                }
                add[a * size + b] = encode(&buf);
                for i in 0..n {
                    for j in 0..n {
                        buf[i * n + j] = (0..n).fold(0, |acc, k| base.add(acc, base.mul(ea[i * n + k], eb[k * n + j])));
                    }
                }
                mul[a * size + b] = encode(&buf);
            }
        }
        let neg = entries
            .iter()
            .map(|e| encode(&e.iter().map(|&x| base.neg(x)).collect::<Vec<_>>()))
            .collect();

        // Regular representation of GF(p^m) over GF(p): row r holds the
        // coefficients of x^r * z.
        let m = base.degree() as usize;
        let p = base.characteristic();
        let field_rep: Vec<Vec<u32>> = base
            .elements()
            .map(|z| (0..m).flat_map(|r| base.digits(base.mul(p.pow(r as u32), z))).collect())
            .collect();
        let rep_dim = n * m;
        let mut rep = vec![0u32; size * rep_dim * rep_dim];
        for (id, e) in entries.iter().enumerate() {
            let block = &mut rep[id * rep_dim * rep_dim..(id + 1) * rep_dim * rep_dim];
            for i in 0..n {
                for j in 0..n {
                    let fr = &field_rep[e[i * n + j] as usize];
                    for r in 0..m {
                        for c in 0..m {
                            block[(i * m + r) * rep_dim + j * m + c] = fr[r * m + c];
                        }
                    }
                }
            }
        }

        let mut ring = FiniteRing {
            base: base.clone(),
            n,
            size,
            identity_code,
            add,
            mul,
            neg,
            inv: Vec::new(),
            units: Vec::new(),
            center: Vec::new(),
            rep_dim,
            rep,
            additive_gens: Vec::new(),
            unit_gens: Vec::new(),
        };
        ring.inv = ring.elements().map(|a| ring.search_inverse(a)).collect();
        ring.units = ring.elements().filter(|&a| ring.inv[a as usize].is_some()).collect();
        ring.center = ring
            .elements()
            .filter(|&z| ring.elements().all(|r| ring.mul(r, z) == ring.mul(z, r)))
            .collect();
        ring.additive_gens = ring.greedy_generators(ring.elements(), |r, a, b| r.add(a, b), 0);
        ring.unit_gens = ring.greedy_generators(ring.units.clone().into_iter(), |r, a, b| r.mul(a, b), 1);
        Ok(ring)
    }

    /// The field `GF(q)` viewed as the ring `M(1×1, GF(q))`; ids coincide with
    /// field ids.
    pub fn field_ring(base: &FiniteField) -> Result<Self> {
        Self::matrix_ring(base, 1)
    }

    fn search_inverse(&self, a: Elem) -> Option<Elem> {
        self.elements().find(|&s| self.mul(a, s) == 1 && self.mul(s, a) == 1)
    }

    /// Greedy generating set: walk `candidates` in order and keep every
    /// element not yet in the closure of the kept ones under `op`.
    fn greedy_generators(
        &self,
        candidates: impl Iterator<Item = Elem>,
        op: impl Fn(&Self, Elem, Elem) -> Elem,
        identity: Elem,
    ) -> Vec<Elem> {
        let mut member = vec![false; self.size];
        member[identity as usize] = true;
        let mut closure = vec![identity];
        let mut gens = Vec::new();
        for c in candidates {
            if member[c as usize] {
                continue;
            }
            gens.push(c);
            let mut i = 0;
            while i < closure.len() {
                let x = closure[i];
                for &g in &gens {
                    let y = op(self, x, g);
                    if !member[y as usize] {
                        member[y as usize] = true;
                        closure.push(y);
                    }
                }
                i += 1;
            }
        }
        gens
    }

    pub fn name(&self) -> String {
        let q = self.base.order();
        if self.n == 1 {
            format!("GF({q})")
        } else {
            format!("M({n}x{n},GF({q}))", n = self.n)
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.size).map(|a| a as Elem)
    }

    pub fn base_field(&self) -> &FiniteField {
        &self.base
    }

    pub fn matrix_size(&self) -> usize {
        self.n
    }

    pub fn characteristic(&self) -> u32 {
        self.base.characteristic()
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.add[a as usize * self.size + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mul[a as usize * self.size + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn is_unit(&self, a: Elem) -> bool {
        self.inv[a as usize].is_some()
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        self.inv[a as usize]
    }

    pub fn inverse(&self, a: Elem) -> Result<Elem> {
        self.inv(a).ok_or(Error::NotAUnit(a))
    }

    /// `R*`, sorted by id.
    pub fn units(&self) -> &[Elem] {
        &self.units
    }

    /// `Z(R)`, sorted by id.
    pub fn center(&self) -> &[Elem] {
        &self.center
    }

    pub fn is_central(&self, a: Elem) -> bool {
        self.center.binary_search(&a).is_ok()
    }

    /// `u⁻¹·s·u`.
    pub fn conjugate(&self, s: Elem, u: Elem) -> Result<Elem> {
        let ui = self.inverse(u)?;
        Ok(self.mul(self.mul(ui, s), u))
    }

    /// `u⁻¹·S·u`, sorted.
    pub fn conjugate_set(&self, set: &[Elem], u: Elem) -> Result<Vec<Elem>> {
        let ui = self.inverse(u)?;
        let mut out: Vec<Elem> = set.iter().map(|&s| self.mul(self.mul(ui, s), u)).collect();
        out.sort_unstable();
        Ok(out)
    }

    /// An additive generating set of `R`.
    pub fn additive_generators(&self) -> &[Elem] {
        &self.additive_gens
    }

    /// A generating set of the unit group `R*`.
    pub fn unit_generators(&self) -> &[Elem] {
        &self.unit_gens
    }

    /// Matrix entries (row-major base field ids) of an element.
    pub fn entries(&self, a: Elem) -> Vec<u32> {
        let q = self.base.order();
        let mut code = match a as u32 {
            1 => self.identity_code,
            c if c == self.identity_code => 1,
            c => c,
        };
        (0..self.n * self.n)
            .map(|_| {
                let e = code % q;
                code /= q;
                e
            })
            .collect()
    }

    /// Element with the given row-major entries.
    pub fn from_entries(&self, entries: &[u32]) -> Elem {
        let q = self.base.order();
        let code = entries.iter().rev().fold(0u32, |acc, &e| acc * q + e);
        (match code {
            1 => self.identity_code,
            c if c == self.identity_code => 1,
            c => c,
        }) as Elem
    }

    /// Dimension `d` of the faithful representation `R → M(d×d, GF(p))`.
    pub fn rep_dim(&self) -> usize {
        self.rep_dim
    }

    /// Image of `a` under the faithful representation, row-major.
    pub fn rep(&self, a: Elem) -> &[u32] {
        let d2 = self.rep_dim * self.rep_dim;
        &self.rep[a as usize * d2..(a as usize + 1) * d2]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(q_p: u32, q_n: u32) -> FiniteRing {
        FiniteRing::matrix_ring(&FiniteField::new(q_p, q_n).unwrap(), 2).unwrap()
    }

    #[test]
    fn unit_counts_of_2x2_matrix_rings() {
        let r2 = m2(2, 1);
        assert_eq!(r2.size(), 16);
        assert_eq!(r2.units().len(), 6);
        let r3 = m2(3, 1);
        assert_eq!(r3.size(), 81);
        assert_eq!(r3.units().len(), (9 - 1) * (9 - 3));
    }

    #[test]
    fn center_is_the_scalars() {
        let r = m2(2, 1);
        assert_eq!(r.center(), &[0, 1]);
        let r3 = m2(3, 1);
        let scalars: Vec<Elem> = (0..3).map(|a| r3.from_entries(&[a, 0, 0, a])).collect();
        let mut sorted = scalars.clone();
        sorted.sort();
        assert_eq!(r3.center(), &sorted[..]);
    }

    #[test]
    fn zero_and_one_ids() {
        for r in [m2(2, 1), m2(3, 1)] {
            assert_eq!(r.entries(0), vec![0, 0, 0, 0]);
            assert_eq!(r.entries(1), vec![1, 0, 0, 1]);
            for a in r.elements() {
                assert_eq!(r.mul(1, a), a);
                assert_eq!(r.mul(a, 1), a);
                assert_eq!(r.add(0, a), a);
                assert_eq!(r.from_entries(&r.entries(a)), a);
            }
        }
    }

    #[test]
    fn ring_axioms_exhaustive_small() {
        let r = m2(2, 1);
        for a in r.elements() {
            assert_eq!(r.add(a, r.neg(a)), 0);
            for b in r.elements() {
                assert_eq!(r.add(a, b), r.add(b, a));
                for c in r.elements() {
                    assert_eq!(r.mul(r.mul(a, b), c), r.mul(a, r.mul(b, c)));
                    assert_eq!(r.mul(a, r.add(b, c)), r.add(r.mul(a, b), r.mul(a, c)));
                    assert_eq!(r.mul(r.add(a, b), c), r.add(r.mul(a, c), r.mul(b, c)));
                }
            }
        }
    }

    #[test]
    fn representation_is_an_injective_homomorphism() {
        for r in [
            m2(2, 1),
            m2(3, 1),
            FiniteRing::field_ring(&FiniteField::new(2, 2).unwrap()).unwrap(),
            m2(2, 2),
        ] {
            let d = r.rep_dim();
            let p = r.characteristic() as u64;
            let mut seen = alloc::collections::BTreeSet::new();
            for a in r.elements() {
                assert!(seen.insert(r.rep(a).to_vec()));
            }
            for a in r.elements().step_by(3) {
                for b in r.elements().step_by(5) {
                    let (ra, rb) = (r.rep(a), r.rep(b));
                    let prod: Vec<u32> = (0..d * d)
                        .map(|ij| {
                            let (i, j) = (ij / d, ij % d);
                            ((0..d).map(|k| ra[i * d + k] as u64 * rb[k * d + j] as u64).sum::<u64>() % p) as u32
                        })
                        .collect();
                    assert_eq!(prod, r.rep(r.mul(a, b)));
                    let sum: Vec<u32> = ra.iter().zip(rb).map(|(&x, &y)| ((x + y) as u64 % p) as u32).collect();
                    assert_eq!(sum, r.rep(r.add(a, b)));
                }
            }
        }
    }

    #[test]
    fn generators_generate() {
        let r = m2(3, 1);
        let mut member = vec![false; r.size()];
        member[0] = true;
        let mut stack = vec![0];
        while let Some(x) = stack.pop() {
            for &g in r.additive_generators() {
                let y = r.add(x, g);
                if !member[y as usize] {
                    member[y as usize] = true;
                    stack.push(y);
                }
            }
        }
        assert!(member.iter().all(|&m| m));

        let mut member = vec![false; r.size()];
        member[1] = true;
        let mut stack = vec![1];
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &g in r.unit_generators() {
                let y = r.mul(x, g);
                if !member[y as usize] {
                    member[y as usize] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        assert_eq!(count, r.units().len());
    }

    #[test]
    fn inverse_and_conjugation() {
        let r = m2(2, 1);
        assert_eq!(r.inverse(1), Ok(1));
        assert_eq!(r.inverse(0), Err(Error::NotAUnit(0)));
        for &u in r.units() {
            let ui = r.inverse(u).unwrap();
            assert_eq!(r.mul(u, ui), 1);
            assert_eq!(r.conjugate_set(r.center(), u).unwrap(), r.center());
        }
    }

    #[test]
    fn cap_is_enforced() {
        let f = FiniteField::new(5, 1).unwrap();
        assert!(matches!(
            FiniteRing::matrix_ring_with_cap(&f, 2, 100),
            Err(Error::CapExceeded { .. })
        ));
    }
}
