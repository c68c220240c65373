//! The projective line `P(R)` over a finite ring.
//!
//! Points are free cyclic submodules `R(a,b)` of `R²` admitting a free
//! cyclic complement. `GL₂(R)` acts from the right on row vectors:
//! `R(a,b)·γ`. Each point is stored as the lexicographically smallest pair
//! among its unit multiples `(u·a, u·b)`, so point identity is integer
//! identity.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use fixedbitset::FixedBitSet;

use crate::algebra::FiniteRing;
use crate::error::{Error, Result};
use crate::linalg::rank_mod_p;
use crate::Elem;

pub type PointId = u32;

const NONE: PointId = PointId::MAX;

/// Rings up to this size get the orbit/oracle cross-check by default.
pub const ORACLE_CHECK_LIMIT: usize = 256;

/// A 2×2 matrix `(a b; c d)` over `R`, acting on row vectors from the right.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mat2 {
    pub a: Elem,
    pub b: Elem,
    pub c: Elem,
    pub d: Elem,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(1, 0, 0, 1);
    /// `(0 1; 1 0)`, exchanging `R(1,0)` and `R(0,1)`.
    pub const SWAP: Mat2 = Mat2::new(0, 1, 1, 0);

    pub const fn new(a: Elem, b: Elem, c: Elem, d: Elem) -> Self {
        Mat2 { a, b, c, d }
    }

    pub const fn diag(a: Elem, d: Elem) -> Self {
        Mat2::new(a, 0, 0, d)
    }

    pub fn mul(&self, o: &Mat2, r: &FiniteRing) -> Mat2 {
        Mat2::new(
            r.add(r.mul(self.a, o.a), r.mul(self.b, o.c)),
            r.add(r.mul(self.a, o.b), r.mul(self.b, o.d)),
            r.add(r.mul(self.c, o.a), r.mul(self.d, o.c)),
            r.add(r.mul(self.c, o.b), r.mul(self.d, o.d)),
        )
    }

    /// `(x, y)·self`.
    #[inline]
    pub fn apply(&self, (x, y): (Elem, Elem), r: &FiniteRing) -> (Elem, Elem) {
        (
            r.add(r.mul(x, self.a), r.mul(y, self.c)),
            r.add(r.mul(x, self.b), r.mul(y, self.d)),
        )
    }

    /// Membership in `GL₂(R)`, decided by the rank of the image under the
    /// faithful representation of `R` over its prime field.
    pub fn is_invertible(&self, r: &FiniteRing) -> bool {
        gl2_invertible(r, self)
    }

    /// Two-sided inverse, or `None` outside `GL₂(R)`.
    ///
    /// Finite rings have stable rank 1, so for an invertible matrix some
    /// `a + t·c` is a unit; after that row operation the inverse follows
    /// from the Schur complement `d' − c·a'⁻¹·b'`.
    pub fn inverse(&self, r: &FiniteRing) -> Option<Mat2> {
        let t = r.elements().find(|&t| r.is_unit(r.add(self.a, r.mul(t, self.c))))?;
        let shear = Mat2::new(1, t, 0, 1);
        let m = shear.mul(self, r);
        let ai = r.inv(m.a)?;
        let s = r.sub(m.d, r.mul(r.mul(m.c, ai), m.b));
        let si = r.inv(s)?;
        let ai_b_si = r.mul(r.mul(ai, m.b), si);
        let si_c_ai = r.mul(r.mul(si, m.c), ai);
        let m_inv = Mat2::new(
            r.add(ai, r.mul(ai_b_si, r.mul(m.c, ai))),
            r.neg(ai_b_si),
            r.neg(si_c_ai),
            si,
        );
        let inv = m_inv.mul(&shear, r);
        (self.mul(&inv, r) == Mat2::IDENTITY && inv.mul(self, r) == Mat2::IDENTITY).then_some(inv)
    }
}

/// Rank of the `k×2k` block `[ρ(x) ρ(y)]` (stacked for each pair in `rows`).
fn block_rank(r: &FiniteRing, rows: &[(Elem, Elem)]) -> usize {
    let d = r.rep_dim();
    let cols = 2 * d;
    let mut m = vec![0u32; rows.len() * d * cols];
    for (blk, &(x, y)) in rows.iter().enumerate() {
        let (rx, ry) = (r.rep(x), r.rep(y));
        for i in 0..d {
            let row = &mut m[(blk * d + i) * cols..(blk * d + i + 1) * cols];
            row[..d].copy_from_slice(&rx[i * d..(i + 1) * d]);
            row[d..].copy_from_slice(&ry[i * d..(i + 1) * d]);
        }
    }
    rank_mod_p(&mut m, rows.len() * d, cols, r.characteristic())
}

/// `m ∈ GL₂(R)`: full rank of the `2d×2d` image over the prime field.
pub fn gl2_invertible(r: &FiniteRing, m: &Mat2) -> bool {
    block_rank(r, &[(m.a, m.b), (m.c, m.d)]) == 2 * r.rep_dim()
}

/// Exhaustive search for `(c, d)` with `(a b; c d) ∈ GL₂(R)`.
pub fn find_completion(r: &FiniteRing, a: Elem, b: Elem) -> Option<(Elem, Elem)> {
    r.elements()
        .flat_map(|c| r.elements().map(move |d| (c, d)))
        .find(|&(c, d)| gl2_invertible(r, &Mat2::new(a, b, c, d)))
}

/// Whether `R(a,b)` is a point of `P(R)`.
///
/// A rank-deficient row `[ρ(a) ρ(b)]` cannot be completed, which settles
/// most negative cases at once; otherwise a completion is searched for.
pub fn is_point(r: &FiniteRing, a: Elem, b: Elem) -> bool {
    if block_rank(r, &[(a, b)]) < r.rep_dim() {
        return false;
    }
    find_completion(r, a, b).is_some()
}

/// Lexicographically smallest unit multiple `(u·a, u·b)`.
pub fn canonical_pair(r: &FiniteRing, a: Elem, b: Elem) -> (Elem, Elem) {
    r.units()
        .iter()
        .map(|&u| (r.mul(u, a), r.mul(u, b)))
        .min()
        .expect("1 is a unit")
}

/// Elementary matrices `(1 x; 0 1)`, `(1 0; x 1)` for `x` in an additive
/// generating set, and `diag(u, 1)` for `u` in a generating set of `R*`.
/// Since finite rings have stable rank 1 these generate `GL₂(R)`.
pub fn gl2_generators(r: &FiniteRing) -> Vec<Mat2> {
    let mut gens = Vec::new();
    for &x in r.additive_generators() {
        gens.push(Mat2::new(1, x, 0, 1));
        gens.push(Mat2::new(1, 0, x, 1));
    }
    for &u in r.unit_generators() {
        gens.push(Mat2::diag(u, 1));
    }
    gens
}

/// `P(R)` with its distant relation.
#[derive(Clone, Debug)]
pub struct ProjectiveLine {
    ring_size: usize,
    points: Vec<(Elem, Elem)>,
    /// Point id of every admissible pair, `NONE` elsewhere; `|R|²` entries.
    index: Vec<PointId>,
    distant: Vec<FixedBitSet>,
    oracle_checked: bool,
}

impl ProjectiveLine {
    /// Builds `P(R)`, running the oracle cross-check when
    /// `|R| ≤ ORACLE_CHECK_LIMIT`.
    pub fn build(r: &FiniteRing) -> Result<Self> {
        Self::build_with(r, r.size() <= ORACLE_CHECK_LIMIT)
    }

    /// Orbit of `R(1,0)` under [`gl2_generators`], canonicalized and sorted.
    /// With `cross_check`, every pair of `R²` is tested with [`is_point`]
    /// and the two point sets must coincide.
    pub fn build_with(r: &FiniteRing, cross_check: bool) -> Result<Self> {
        let n = r.size();
        let gens = gl2_generators(r);
        let mut index = vec![NONE; n * n];
        let mut points: Vec<(Elem, Elem)> = Vec::new();
        let register = |pair: (Elem, Elem), points: &mut Vec<_>, index: &mut Vec<PointId>| {
            let id = points.len() as PointId;
            let canon = canonical_pair(r, pair.0, pair.1);
            points.push(canon);
            for &u in r.units() {
                let (x, y) = (r.mul(u, canon.0), r.mul(u, canon.1));
                index[x as usize * n + y as usize] = id;
            }
        };
        register((1, 0), &mut points, &mut index);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let p = points[i];
            for g in &gens {
                let (x, y) = g.apply(p, r);
                if index[x as usize * n + y as usize] == NONE {
                    register((x, y), &mut points, &mut index);
                    queue.push_back(points.len() - 1);
                }
            }
        }

        points.sort_unstable();
        for (id, &(a, b)) in points.iter().enumerate() {
            for &u in r.units() {
                index[r.mul(u, a) as usize * n + r.mul(u, b) as usize] = id as PointId;
            }
        }

        if cross_check {
            let mut oracle = 0;
            let mut agree = true;
            for a in r.elements() {
                for b in r.elements() {
                    let found = is_point(r, a, b);
                    oracle += found as usize;
                    agree &= found == (index[a as usize * n + b as usize] != NONE);
                }
            }
            let admissible = index.iter().filter(|&&id| id != NONE).count();
            if oracle != admissible || !agree {
                return Err(Error::OrbitMismatch {
                    orbit: admissible,
                    oracle,
                });
            }
        }

        let len = points.len();
        let mut distant = vec![FixedBitSet::with_capacity(len); len];
        for i in 0..len {
            for j in i + 1..len {
                let (p, q) = (points[i], points[j]);
                if gl2_invertible(r, &Mat2::new(p.0, p.1, q.0, q.1)) {
                    distant[i].insert(j);
                    distant[j].insert(i);
                }
            }
        }

        Ok(ProjectiveLine {
            ring_size: n,
            points,
            index,
            distant,
            oracle_checked: cross_check,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = PointId> + Clone {
        0..self.points.len() as PointId
    }

    pub fn oracle_checked(&self) -> bool {
        self.oracle_checked
    }

    /// Canonical pair of a point.
    pub fn pair(&self, p: PointId) -> (Elem, Elem) {
        self.points[p as usize]
    }

    pub fn points(&self) -> &[(Elem, Elem)] {
        &self.points
    }

    /// Point `R(a,b)` for any representative `(a,b)`.
    pub fn point_of(&self, a: Elem, b: Elem) -> Option<PointId> {
        match self.index[a as usize * self.ring_size + b as usize] {
            NONE => None,
            id => Some(id),
        }
    }

    pub fn canonical_point(&self, a: Elem, b: Elem) -> Result<PointId> {
        self.point_of(a, b).ok_or(Error::NotAPoint(a, b))
    }

    /// `R(1,0)`.
    pub fn infinity(&self) -> PointId {
        self.point_of(1, 0).expect("R(1,0) is a point")
    }

    /// `R(0,1)`.
    pub fn zero(&self) -> PointId {
        self.point_of(0, 1).expect("R(0,1) is a point")
    }

    /// `R(1,1)`.
    pub fn one(&self) -> PointId {
        self.point_of(1, 1).expect("R(1,1) is a point")
    }

    #[inline]
    pub fn distant(&self, p: PointId, q: PointId) -> bool {
        self.distant[p as usize].contains(q as usize)
    }

    /// Points distant from `p`.
    pub fn distant_set(&self, p: PointId) -> &FixedBitSet {
        &self.distant[p as usize]
    }

    pub fn pairwise_distant(&self, pts: &[PointId]) -> bool {
        pts.iter()
            .enumerate()
            .all(|(i, &p)| pts[i + 1..].iter().all(|&q| self.distant(p, q)))
    }

    /// `p·m` for `m ∈ GL₂(R)`.
    pub fn act(&self, r: &FiniteRing, p: PointId, m: &Mat2) -> Result<PointId> {
        if !gl2_invertible(r, m) {
            return Err(Error::NotInvertible);
        }
        Ok(self.act_unchecked(r, p, m))
    }

    pub(crate) fn act_unchecked(&self, r: &FiniteRing, p: PointId, m: &Mat2) -> PointId {
        let (x, y) = m.apply(self.pair(p), r);
        self.point_of(x, y).expect("invertible matrices permute P(R)")
    }

    /// The permutation of `P(R)` induced by `m`.
    pub fn permutation(&self, r: &FiniteRing, m: &Mat2) -> Result<Vec<PointId>> {
        if !gl2_invertible(r, m) {
            return Err(Error::NotInvertible);
        }
        Ok(self.ids().map(|p| self.act_unchecked(r, p, m)).collect())
    }

    /// `γ` with `R(1,0)γ = p`, `R(0,1)γ = q`, `R(1,1)γ = s` for pairwise
    /// distant `p, q, s`.
    pub fn transitivity_witness(&self, r: &FiniteRing, p: PointId, q: PointId, s: PointId) -> Result<Mat2> {
        if !self.pairwise_distant(&[p, q, s]) {
            return Err(Error::NotDistant);
        }
        let ((a, b), (c, d)) = (self.pair(p), self.pair(q));
        let base = Mat2::new(a, b, c, d);
        let inv = base.inverse(r).ok_or(Error::NotInvertible)?;
        // s·base⁻¹ = R(x,y) is distant from R(1,0) and R(0,1), so x, y are units.
        let (x, y) = inv.apply(self.pair(s), r);
        if !r.is_unit(x) || !r.is_unit(y) {
            return Err(Error::NotDistant);
        }
        Ok(Mat2::diag(x, y).mul(&base, r))
    }

    /// Some `γ` with `R(1,0)·γ = p`: `p` stacked on the first point distant
    /// from it. Use [`ProjectiveLine::witnesses_from_infinity`] for others.
    pub fn witness_from_infinity(&self, r: &FiniteRing, p: PointId) -> Mat2 {
        self.witnesses_from_infinity(r, p)
            .next()
            .expect("every point has a distant point")
    }

    /// All `(p; q)` stackings with `q` distant from `p`, each mapping
    /// `R(1,0)` to `p` and `R(0,1)` to `q`.
    pub fn witnesses_from_infinity<'a>(&'a self, _r: &'a FiniteRing, p: PointId) -> impl Iterator<Item = Mat2> + 'a {
        let (a, b) = self.pair(p);
        self.distant[p as usize].ones().map(move |q| {
            let (c, d) = self.points[q];
            Mat2::new(a, b, c, d)
        })
    }
}
