use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Default upper bound on `pⁿ` for [`FiniteField::new`].
pub const DEFAULT_FIELD_CAP: u32 = 1 << 16;

/// The finite field `GF(pⁿ)`.
///
/// Elements are ids `0..pⁿ`; the id of `c₀ + c₁x + … + cₙ₋₁xⁿ⁻¹` is
/// `c₀ + c₁p + … + cₙ₋₁pⁿ⁻¹`, so the prime subfield occupies ids `0..p` in
/// every field of characteristic `p`. Multiplication goes through
/// discrete log tables with respect to the smallest primitive element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteField {
    p: u32,
    degree: u32,
    order: u32,
    /// Monic modulus, lowest coefficient first (`degree + 1` entries).
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FiniteField {
    pub fn new(p: u32, degree: u32) -> Result<Self> {
        Self::with_cap(p, degree, DEFAULT_FIELD_CAP)
    }

    /// Builds `GF(p^degree)` with the smallest monic irreducible modulus,
    /// where polynomials are ordered by their element id encoding.
    pub fn with_cap(p: u32, degree: u32, cap: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if degree == 0 {
            return Err(Error::InvalidDegree);
        }
        let order = (p as u64).checked_pow(degree).unwrap_or(u64::MAX);
        if order > cap as u64 {
            return Err(Error::CapExceeded {
                what: "field",
                size: order,
                cap: cap as u64,
            });
        }
        let order = order as u32;
        let modulus = (0..order)
            .map(|code| {
                let mut poly = digits(code, p, degree as usize);
                poly.push(1);
                poly
            })
            .find(|poly| is_irreducible(poly, p))
            .expect("an irreducible polynomial of every degree exists");

        let mut field = FiniteField {
            p,
            degree,
            order,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
        };
        field.build_log_tables();
        Ok(field)
    }

    fn build_log_tables(&mut self) {
        let n = self.order as usize - 1;
        for g in 1..self.order {
            let mut exp = Vec::with_capacity(n);
            let mut log = vec![u32::MAX; self.order as usize];
            let mut cur = 1u32;
            let mut primitive = true;
            for i in 0..n {
                if log[cur as usize] != u32::MAX {
                    primitive = false;
                    break;
                }
                log[cur as usize] = i as u32;
                exp.push(cur);
                cur = self.poly_mul(cur, g);
            }
            if primitive && cur == 1 {
                self.exp = exp;
                self.log = log;
                return;
            }
        }
        unreachable!("the multiplicative group of a finite field is cyclic");
    }

    /// Schoolbook product of two elements reduced by the modulus.
    pub(crate) fn poly_mul(&self, a: u32, b: u32) -> u32 {
        let n = self.degree as usize;
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u64; 2 * n - 1];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % self.p as u64;
            }
        }
        let prod: Vec<u32> = prod.into_iter().map(|c| c as u32).collect();
        let rem = poly_rem(&prod, &self.modulus, self.p);
        self.from_digits(&rem)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn elements(&self) -> core::ops::Range<u32> {
        0..self.order
    }

    /// Coefficients `c₀..cₙ₋₁` of an element.
    pub fn digits(&self, a: u32) -> Vec<u32> {
        digits(a, self.p, self.degree as usize)
    }

    pub fn from_digits(&self, coeffs: &[u32]) -> u32 {
        coeffs.iter().rev().fold(0u32, |acc, &c| acc * self.p + c % self.p)
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.degree {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        let mut a = a;
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.degree {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.order as usize - 1;
        self.exp[(self.log[a as usize] as usize + self.log[b as usize] as usize) % n]
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let n = self.order as usize - 1;
        Some(self.exp[(n - self.log[a as usize] as usize) % n])
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = (self.order - 1) as u64;
        self.exp[((self.log[a as usize] as u64 * (e % n)) % n) as usize]
    }

    pub fn frobenius(&self, a: u32) -> u32 {
        self.pow(a, self.p as u64)
    }

    /// Roots of `x² − t·x − s` in this field.
    pub fn quadratic_roots(&self, s: u32, t: u32) -> Vec<u32> {
        self.elements()
            .filter(|&x| self.sub(self.sub(self.mul(x, x), self.mul(t, x)), s) == 0)
            .collect()
    }

    /// Smallest `(s, t)` such that `x² − t·x − s` is irreducible.
    pub fn smallest_irreducible_quadratic(&self) -> Result<(u32, u32)> {
        self.elements()
            .flat_map(|s| self.elements().map(move |t| (s, t)))
            .find(|&(s, t)| self.quadratic_roots(s, t).is_empty())
            .ok_or(Error::NoQuadraticExtension)
    }

    /// Injective ring homomorphism `sub → self`, sending the generator `x`
    /// of `sub` to the smallest root of its modulus in `self`.
    pub fn embedding_of(&self, sub: &FiniteField) -> Result<Vec<u32>> {
        if sub.p != self.p || !self.degree.is_multiple_of(sub.degree) {
            return Err(Error::NotASubfield);
        }
        let eval = |poly: &[u32], beta: u32| poly.iter().rev().fold(0u32, |acc, &c| self.add(self.mul(acc, beta), c));
        let beta = self
            .elements()
            .find(|&b| eval(&sub.modulus, b) == 0)
            .ok_or(Error::NotASubfield)?;
        Ok(sub.elements().map(|a| eval(&sub.digits(a), beta)).collect())
    }
}

fn digits(mut a: u32, p: u32, n: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(a % p);
        a /= p;
    }
    out
}

/// Remainder of `a` modulo the monic polynomial `m` over `GF(p)`, padded to
/// `deg m` coefficients.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let dm = m.len() - 1;
    let mut r = a.to_vec();
    for i in (dm..r.len()).rev() {
        let lead = r[i] as u64;
        if lead == 0 {
            continue;
        }
        for (j, &c) in m.iter().enumerate() {
            let sub = (lead * c as u64 % p as u64) as u32;
            r[i - dm + j] = (r[i - dm + j] + p - sub) % p;
        }
    }
    r.resize(dm, 0);
    r
}

fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let n = poly.len() - 1;
    for d in 1..=n / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut divisor = digits(code as u32, p, d);
            divisor.push(1);
            if poly_rem(poly, &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_fields() {
        let f = FiniteField::new(2, 1).unwrap();
        assert_eq!(f.order(), 2);
        assert_eq!(f.elements().collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(f.mul(1, 1), 1);
        assert_eq!(f.add(1, 1), 0);

        let f5 = FiniteField::new(5, 1).unwrap();
        for a in 1..5 {
            assert_eq!(f5.mul(a, f5.inv(a).unwrap()), 1);
            assert_eq!((a * f5.inv(a).unwrap()) % 5, 1);
        }
    }

    #[test]
    fn gf4_has_the_unique_irreducible_modulus() {
        let f = FiniteField::new(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        // x * x = x + 1
        assert_eq!(f.mul(2, 2), 3);
    }

    #[test]
    fn gf9_nonzero_elements_satisfy_x8() {
        let f = FiniteField::new(3, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1]);
        for x in 1..9 {
            let mut acc = 1;
            for _ in 0..8 {
                acc = f.poly_mul(acc, x);
            }
            assert_eq!(acc, 1, "x = {x}");
            assert_eq!(f.pow(x, 8), 1);
        }
    }

    #[test]
    fn log_tables_match_schoolbook_product() {
        for (p, n) in [(2, 3), (3, 2), (5, 2), (2, 4), (7, 1)] {
            let f = FiniteField::new(p, n).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.mul(a, b), f.poly_mul(a, b));
                }
            }
        }
    }

    #[test]
    fn field_axioms_and_frobenius() {
        let f = FiniteField::new(2, 3).unwrap();
        let mut images = Vec::new();
        for a in f.elements() {
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
            assert_eq!(f.add(a, f.neg(a)), 0);
            images.push(f.frobenius(a));
            for b in f.elements() {
                assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
                assert_eq!(f.frobenius(f.mul(a, b)), f.mul(f.frobenius(a), f.frobenius(b)));
            }
        }
        images.sort();
        images.dedup();
        assert_eq!(images.len(), 8);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(FiniteField::new(4, 1), Err(Error::NotPrime(4)));
        assert_eq!(FiniteField::new(3, 0), Err(Error::InvalidDegree));
        assert!(matches!(FiniteField::new(2, 17), Err(Error::CapExceeded { .. })));
        assert!(FiniteField::new(2, 16).is_ok());
    }

    #[test]
    fn subfield_embedding_is_a_homomorphism() {
        let big = FiniteField::new(2, 4).unwrap();
        let sub = FiniteField::new(2, 2).unwrap();
        let map = big.embedding_of(&sub).unwrap();
        for a in sub.elements() {
            for b in sub.elements() {
                assert_eq!(map[sub.add(a, b) as usize], big.add(map[a as usize], map[b as usize]));
                assert_eq!(map[sub.mul(a, b) as usize], big.mul(map[a as usize], map[b as usize]));
            }
        }
        assert!(big.embedding_of(&FiniteField::new(2, 3).unwrap()).is_err());
    }

    #[test]
    fn quadratic_irreducibility() {
        let f2 = FiniteField::new(2, 1).unwrap();
        assert_eq!(f2.smallest_irreducible_quadratic(), Ok((1, 1)));
        assert!(!f2.quadratic_roots(1, 0).is_empty());
        let f3 = FiniteField::new(3, 1).unwrap();
        assert!(f3.quadratic_roots(2, 0).is_empty());
    }
}
