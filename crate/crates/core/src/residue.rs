//! Residues of `Σ(K,R)`, compatibility of chains through a point, and the
//! affine spaces `A(L,R)` that describe the compatibility classes.
//!
//! At `∞ = R(1,0)` the residue points are `R(x,1)` and are identified with
//! `x ∈ R`. A chain `C^γ` through `∞` with `γ = (a 0; c d)` becomes the block
//! `d⁻¹·K·a + d⁻¹·c`. Two blocks are compatible when some
//! `δ: x ↦ x·a + c` (`a ∈ R*`) maps one onto the other; since `Δ` is sharply
//! 2-transitive on distant pairs it suffices to test the unique `δ` matching
//! two chosen points of each block.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::FiniteRing;
use crate::chains::{Chain, ChainGeometry};
use crate::error::{Error, Result};
use crate::projline::{Mat2, PointId};
use crate::Elem;

/// A block of a residue in coordinates, sorted.
pub type Block = Vec<Elem>;

fn sorted(mut v: Vec<Elem>) -> Vec<Elem> {
    v.sort_unstable();
    v.dedup();
    v
}

/// The unique `(a, c)` with `p·a + c = p'` and `q·a + c = q'`.
pub fn delta_for(r: &FiniteRing, (p, q): (Elem, Elem), (p2, q2): (Elem, Elem)) -> Result<(Elem, Elem)> {
    let diff_inv = r.inv(r.sub(p, q)).ok_or(Error::NotDistant)?;
    let a = r.mul(diff_inv, r.sub(p2, q2));
    if !r.is_unit(a) {
        return Err(Error::NotDistant);
    }
    let c = r.sub(p2, r.mul(p, a));
    Ok((a, c))
}

/// `{x·a + c : x ∈ block}`, sorted.
pub fn apply_delta(r: &FiniteRing, block: &[Elem], (a, c): (Elem, Elem)) -> Block {
    sorted(block.iter().map(|&x| r.add(r.mul(x, a), c)).collect())
}

/// Compatibility at `∞` using the points `pq` of `b` and `pq2` of `b2`.
pub fn blocks_compatible_via(
    r: &FiniteRing,
    b: &[Elem],
    b2: &[Elem],
    pq: (Elem, Elem),
    pq2: (Elem, Elem),
) -> Result<bool> {
    let delta = delta_for(r, pq, pq2)?;
    Ok(apply_delta(r, b, delta) == b2)
}

/// Compatibility at `∞` of two blocks given in coordinates.
pub fn blocks_compatible(r: &FiniteRing, b: &[Elem], b2: &[Elem]) -> Result<bool> {
    if b.len() < 2 || b2.len() < 2 {
        return Err(Error::InvalidStructure("blocks need two points"));
    }
    if b.len() != b2.len() {
        return Ok(false);
    }
    blocks_compatible_via(r, b, b2, (b[0], b[1]), (b2[0], b2[1]))
}

/// Partition of `blocks` into compatibility classes: `class_of[i]` and the
/// classes as block index lists, ordered by their first block. Every pair
/// is tested afterwards, so a non-transitive relation is reported.
pub fn compatibility_classes(r: &FiniteRing, blocks: &[Block]) -> Result<(Vec<usize>, Vec<Vec<usize>>)> {
    let mut class_of = vec![usize::MAX; blocks.len()];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        let mut found = None;
        for (ci, class) in classes.iter().enumerate() {
            if blocks_compatible(r, &blocks[class[0]], b)? {
                found = Some(ci);
                break;
            }
        }
        match found {
            Some(ci) => {
                classes[ci].push(i);
                class_of[i] = ci;
            }
            None => {
                class_of[i] = classes.len();
                classes.push(vec![i]);
            }
        }
    }
    for i in 0..blocks.len() {
        for j in 0..blocks.len() {
            if blocks_compatible(r, &blocks[i], &blocks[j])? != (class_of[i] == class_of[j]) {
                return Err(Error::NonTransitiveCompatibility);
            }
        }
    }
    Ok((class_of, classes))
}

/// `Σ_p` with its blocks in coordinates and the compatibility partition.
#[derive(Clone, Debug)]
pub struct Residue {
    base: PointId,
    /// `base·γ = ∞` for this `γ`; coordinates are taken after applying it.
    to_infinity: Mat2,
    points: Vec<PointId>,
    blocks: Vec<Block>,
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl Residue {
    /// `Σ_∞`, blocks obtained as the orbit of `C \ {∞} = K` under generators
    /// of `Γ_∞ = {(a 0; c d)}`.
    pub fn at_infinity(g: &ChainGeometry) -> Result<Self> {
        let r = g.ring();
        let l = g.line();
        let points: Vec<PointId> = r
            .elements()
            .map(|x| l.point_of(x, 1).expect("R(x,1) is a point"))
            .collect();

        let start: Block = g.embedding().image().to_vec();
        let mut seen = BTreeSet::from([start.clone()]);
        let mut stack = vec![start];
        while let Some(b) = stack.pop() {
            let mut images = Vec::new();
            for &c in r.additive_generators() {
                images.push(sorted(b.iter().map(|&x| r.add(x, c)).collect()));
            }
            for &u in r.unit_generators() {
                images.push(sorted(b.iter().map(|&x| r.mul(x, u)).collect()));
                let ui = r.inv(u).expect("unit");
                images.push(sorted(b.iter().map(|&x| r.mul(ui, x)).collect()));
            }
            for img in images {
                if seen.insert(img.clone()) {
                    stack.push(img);
                }
            }
        }
        let blocks: Vec<Block> = seen.into_iter().collect();
        let (class_of, classes) = compatibility_classes(r, &blocks)?;
        Ok(Residue {
            base: l.infinity(),
            to_infinity: Mat2::IDENTITY,
            points,
            blocks,
            class_of,
            classes,
        })
    }

    /// `Σ_p`, transported from `Σ_∞` along the first stacking `w` with
    /// `∞·w = p`.
    pub fn at(g: &ChainGeometry, p: PointId) -> Result<Self> {
        let w = g.line().witness_from_infinity(g.ring(), p);
        Self::at_via(g, p, &w)
    }

    /// `Σ_p` transported along a given `w ∈ GL₂(R)` with `∞·w = p`.
    pub fn at_via(g: &ChainGeometry, p: PointId, w: &Mat2) -> Result<Self> {
        let r = g.ring();
        let l = g.line();
        let perm = l.permutation(r, w)?;
        if perm[l.infinity() as usize] != p {
            return Err(Error::NotOnChain);
        }
        let inf = Self::at_infinity(g)?;
        Ok(Residue {
            base: p,
            to_infinity: w.inverse(r).ok_or(Error::NotInvertible)?,
            points: inf.points.iter().map(|&x| perm[x as usize]).collect(),
            ..inf
        })
    }

    pub fn base(&self) -> PointId {
        self.base
    }

    /// A `γ` with `base·γ = ∞` inducing the coordinates.
    pub fn to_infinity(&self) -> &Mat2 {
        &self.to_infinity
    }

    /// `points[x]` is the residue point with coordinate `x`.
    pub fn points(&self) -> &[PointId] {
        &self.points
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Block `i` as point ids, sorted.
    pub fn block_points(&self, i: usize) -> Vec<PointId> {
        let mut v: Vec<PointId> = self.blocks[i].iter().map(|&x| self.points[x as usize]).collect();
        v.sort_unstable();
        v
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, block: usize) -> usize {
        self.class_of[block]
    }

    pub fn class_blocks(&self, class: usize) -> Vec<Block> {
        self.classes[class].iter().map(|&i| self.blocks[i].clone()).collect()
    }

    pub fn block_index(&self, block: &[Elem]) -> Option<usize> {
        self.blocks.binary_search_by(|b| b.as_slice().cmp(block)).ok()
    }

    /// Indices of the blocks through the coordinate `x`.
    pub fn blocks_through(&self, x: Elem) -> Vec<usize> {
        (0..self.blocks.len())
            .filter(|&i| self.blocks[i].binary_search(&x).is_ok())
            .collect()
    }

    /// The class whose block through the coordinates `0` and `1` is
    /// `u⁻¹·K·u`, i.e. the class of `C^diag(u,u)`.
    pub fn class_of_unit(&self, g: &ChainGeometry, u: Elem) -> Result<usize> {
        let b = g.ring().conjugate_set(g.embedding().image(), u)?;
        let i = self.block_index(&b).ok_or(Error::NotALine)?;
        Ok(self.class_of[i])
    }

    /// The partition as a set of sets of point-id blocks.
    pub fn partition_by_points(&self) -> BTreeSet<BTreeSet<Vec<PointId>>> {
        self.classes
            .iter()
            .map(|class| class.iter().map(|&i| self.block_points(i)).collect())
            .collect()
    }
}

fn chain_coordinates(g: &ChainGeometry, chain: &Chain) -> Result<Block> {
    let l = g.line();
    let inf = l.infinity();
    if !chain.contains(inf) {
        return Err(Error::NotOnChain);
    }
    let r = g.ring();
    let coord: BTreeMap<PointId, Elem> = r
        .elements()
        .map(|x| (l.point_of(x, 1).expect("R(x,1) is a point"), x))
        .collect();
    Ok(sorted(
        chain.points().iter().filter(|&&p| p != inf).map(|p| coord[p]).collect(),
    ))
}

/// `D ~∞ D'` for chains through `∞`.
pub fn compatible_at_infinity(g: &ChainGeometry, d: &Chain, d2: &Chain) -> Result<bool> {
    let (b, b2) = (chain_coordinates(g, d)?, chain_coordinates(g, d2)?);
    blocks_compatible(g.ring(), &b, &b2)
}

/// `D ~p D'`, tested at `∞` after applying `γ` with `p·γ = ∞`.
pub fn compatible_at_via(g: &ChainGeometry, p: PointId, d: &Chain, d2: &Chain, gamma: &Mat2) -> Result<bool> {
    if !d.contains(p) || !d2.contains(p) {
        return Err(Error::NotOnChain);
    }
    let l = g.line();
    let perm = l.permutation(g.ring(), gamma)?;
    if perm[p as usize] != l.infinity() {
        return Err(Error::NotOnChain);
    }
    compatible_at_infinity(g, &d.permuted(&perm), &d2.permuted(&perm))
}

/// `D ~p D'` with a `γ` derived from the first point distant to `p`.
pub fn compatible_at(g: &ChainGeometry, p: PointId, d: &Chain, d2: &Chain) -> Result<bool> {
    let w = g.line().witness_from_infinity(g.ring(), p);
    let gamma = w.inverse(g.ring()).ok_or(Error::NotInvertible)?;
    compatible_at_via(g, p, d, d2, &gamma)
}

/// For `D = C^diag(a,1)`: whether `D ~∞ C` and whether `D ~0 C`.
pub fn double_compatibility_parts(g: &ChainGeometry, a: Elem) -> Result<(bool, bool)> {
    if !g.ring().is_unit(a) {
        return Err(Error::NotAUnit(a));
    }
    let c = g.standard_chain();
    let d = g.chain_image(c, &Mat2::diag(a, 1))?;
    let at_inf = compatible_at_infinity(g, c, &d)?;
    let at_zero = compatible_at_via(g, g.line().zero(), c, &d, &Mat2::SWAP)?;
    Ok((at_inf, at_zero))
}

/// `C^diag(a,1)` is compatible with `C` at both `∞` and `0`.
pub fn double_compatibility(g: &ChainGeometry, a: Elem) -> Result<bool> {
    let (i, z) = double_compatibility_parts(g, a)?;
    Ok(i && z)
}

/// Whether `Δ` acts sharply transitively on ordered distant pairs of `P_∞`:
/// for all distant `(x,y)`, `(x',y')` exactly one `(a,c) ∈ R*×R` solves
/// `x·a + c = x'`, `y·a + c = y'`. Exhaustive.
pub fn delta_is_sharply_2_transitive(r: &FiniteRing) -> bool {
    let pairs: Vec<(Elem, Elem)> = r
        .elements()
        .flat_map(|x| r.elements().map(move |y| (x, y)))
        .filter(|&(x, y)| r.is_unit(r.sub(x, y)))
        .collect();
    pairs.iter().all(|&(x, y)| {
        pairs.iter().all(|&(x2, y2)| {
            let solutions = r
                .units()
                .iter()
                .flat_map(|&a| r.elements().map(move |c| (a, c)))
                .filter(|&(a, c)| r.add(r.mul(x, a), c) == x2 && r.add(r.mul(y, a), c) == y2)
                .count();
            solutions == 1
        })
    })
}

/// The affine space `A(L,V)` on an `L`-subspace `V ⊆ R` (usually `V = R`),
/// with `R` a left vector space over the subfield `L`.
#[derive(Clone, Debug)]
pub struct AffineSpaceModel {
    scalars: Vec<Elem>,
    points: Vec<Elem>,
    lines: Vec<Vec<Elem>>,
    line_class: Vec<usize>,
    /// Direction of each parallel class: the line `L·x` through `0`.
    directions: Vec<Vec<Elem>>,
}

impl AffineSpaceModel {
    /// `A(L,R)`.
    pub fn new(r: &FiniteRing, scalars: &[Elem]) -> Result<Self> {
        let all: Vec<Elem> = r.elements().collect();
        Self::on_subspace(r, scalars, &all)
    }

    /// `A(L,V)` for an `L`-subspace `V`.
    pub fn on_subspace(r: &FiniteRing, scalars: &[Elem], points: &[Elem]) -> Result<Self> {
        let scalars = sorted(scalars.to_vec());
        let points = sorted(points.to_vec());
        let has = |set: &[Elem], x: Elem| set.binary_search(&x).is_ok();
        if !has(&scalars, 0) || !has(&scalars, 1) {
            return Err(Error::InvalidSubfield("must contain 0 and 1"));
        }
        for &a in &scalars {
            for &b in &scalars {
                if !has(&scalars, r.add(a, b)) {
                    return Err(Error::InvalidSubfield("not additively closed"));
                }
                if !has(&scalars, r.mul(a, b)) {
                    return Err(Error::InvalidSubfield("not multiplicatively closed"));
                }
            }
            if a != 0 && !r.inv(a).is_some_and(|ai| has(&scalars, ai)) {
                return Err(Error::InvalidSubfield("nonzero element without inverse"));
            }
        }
        for &x in &points {
            for &y in &points {
                if !has(&points, r.add(x, y)) {
                    return Err(Error::InvalidSubfield("point set is not a subspace"));
                }
            }
            for &l in &scalars {
                if !has(&points, r.mul(l, x)) {
                    return Err(Error::InvalidSubfield("point set is not a subspace"));
                }
            }
        }

        let mut directions: Vec<Vec<Elem>> = Vec::new();
        let mut dir_seen = BTreeSet::new();
        for &x in points.iter().filter(|&&x| x != 0) {
            let dir = sorted(scalars.iter().map(|&l| r.mul(l, x)).collect());
            if dir_seen.insert(dir.clone()) {
                directions.push(dir);
            }
        }
        directions.sort();
        let mut lines = BTreeMap::new();
        for (ci, dir) in directions.iter().enumerate() {
            for &y in &points {
                let line = sorted(dir.iter().map(|&d| r.add(d, y)).collect());
                lines.entry(line).or_insert(ci);
            }
        }
        let (lines, line_class) = lines.into_iter().unzip();
        Ok(AffineSpaceModel {
            scalars,
            points,
            lines,
            line_class,
            directions,
        })
    }

    pub fn scalars(&self) -> &[Elem] {
        &self.scalars
    }

    pub fn points(&self) -> &[Elem] {
        &self.points
    }

    /// Lines, sorted; each line sorted.
    pub fn lines(&self) -> &[Vec<Elem>] {
        &self.lines
    }

    pub fn parallel_class_count(&self) -> usize {
        self.directions.len()
    }

    pub fn directions(&self) -> &[Vec<Elem>] {
        &self.directions
    }

    pub fn line_index(&self, set: &[Elem]) -> Option<usize> {
        self.lines.binary_search_by(|l| l.as_slice().cmp(set)).ok()
    }

    pub fn class_of_line(&self, line: usize) -> usize {
        self.line_class[line]
    }

    pub fn lines_in_class(&self, class: usize) -> usize {
        self.line_class.iter().filter(|&&c| c == class).count()
    }

    /// Whether three points lie on a common line.
    pub fn collinear(&self, x: Elem, y: Elem, z: Elem) -> bool {
        self.lines
            .iter()
            .any(|l| [x, y, z].iter().all(|p| l.binary_search(p).is_ok()))
    }
}

/// Outcome of comparing a block set with an affine model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialAffineReport {
    /// Every block is a line of the model.
    pub blocks_are_lines: bool,
    /// Every parallel class is either entirely present or entirely absent.
    pub classes_complete: bool,
    /// The block directions are exactly `{L·x : x ∈ R*}`.
    pub unit_directions: bool,
    pub present_classes: usize,
    pub missing_classes: usize,
}

impl PartialAffineReport {
    /// The block set is the model with some parallel classes removed.
    pub fn is_partial_affine(&self) -> bool {
        self.blocks_are_lines && self.classes_complete
    }

    pub fn passes(&self) -> bool {
        self.is_partial_affine() && self.unit_directions
    }
}

pub fn partial_affine_check(r: &FiniteRing, blocks: &[Block], model: &AffineSpaceModel) -> PartialAffineReport {
    let blocks: BTreeSet<Block> = blocks.iter().map(|b| sorted(b.clone())).collect();
    let mut per_class = vec![0usize; model.parallel_class_count()];
    let mut blocks_are_lines = true;
    for b in &blocks {
        match model.line_index(b) {
            Some(li) => per_class[model.class_of_line(li)] += 1,
            None => blocks_are_lines = false,
        }
    }
    let classes_complete = per_class
        .iter()
        .enumerate()
        .all(|(c, &n)| n == 0 || n == model.lines_in_class(c));
    let present: BTreeSet<&Vec<Elem>> = per_class
        .iter()
        .enumerate()
        .filter(|&(_, &n)| n > 0)
        .map(|(c, _)| &model.directions[c])
        .collect();
    let unit_dirs: BTreeSet<Vec<Elem>> = r
        .units()
        .iter()
        .filter(|&&x| model.points.binary_search(&x).is_ok())
        .map(|&x| sorted(model.scalars.iter().map(|&l| r.mul(l, x)).collect()))
        .collect();
    let unit_directions =
        blocks_are_lines && present.len() == unit_dirs.len() && present.iter().all(|d| unit_dirs.contains(*d));
    PartialAffineReport {
        blocks_are_lines,
        classes_complete,
        unit_directions,
        present_classes: present.len(),
        missing_classes: model.parallel_class_count() - present.len(),
    }
}

/// `A(u⁻¹·K·u, R)`, the model of the class of `C^diag(u,u)`.
pub fn model_for_unit(g: &ChainGeometry, u: Elem) -> Result<AffineSpaceModel> {
    let scalars = g.ring().conjugate_set(g.embedding().image(), u)?;
    AffineSpaceModel::new(g.ring(), &scalars)
}

/// The structure induced on a block by the lines of `A(K,R)`.
#[derive(Clone, Debug)]
pub struct TraceSpace {
    pub points: Vec<Elem>,
    /// Intersections with lines of `A(K,R)` having at least two points.
    pub lines: Vec<Vec<Elem>>,
    /// `F_u = K ∩ u·K·u⁻¹`.
    pub subfield: Vec<Elem>,
    /// `ι: k ↦ u⁻¹·k·u·a` maps the lines of `A(F_u,K)` onto `lines`.
    pub isomorphic: bool,
    /// `ι` preserves and reflects collinearity of triples.
    pub collinearity_preserved: bool,
}

/// Trace of `A(K,R)` on a block `B` through `0` that is a line of
/// `A(u⁻¹Ku, R)`, compared with `A(F_u, K)` along `ι`.
pub fn trace_space(g: &ChainGeometry, u: Elem, block: &[Elem]) -> Result<TraceSpace> {
    let r = g.ring();
    let k = g.embedding().image();
    let block = sorted(block.to_vec());
    let conj = r.conjugate_set(k, u)?;
    let u_model = AffineSpaceModel::new(r, &conj)?;
    if block.binary_search(&0).is_err() || u_model.line_index(&block).is_none() {
        return Err(Error::NotALine);
    }
    let a = *block.iter().find(|&&x| r.is_unit(x)).ok_or(Error::NotALine)?;

    let k_model = AffineSpaceModel::new(r, k)?;
    let lines: Vec<Vec<Elem>> = k_model
        .lines()
        .iter()
        .map(|l| {
            l.iter()
                .copied()
                .filter(|x| block.binary_search(x).is_ok())
                .collect::<Vec<_>>()
        })
        .filter(|l| l.len() >= 2)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let ui = r.inverse(u)?;
    let k_conj_inv = r.conjugate_set(k, ui)?;
    let subfield: Vec<Elem> = k
        .iter()
        .copied()
        .filter(|x| k_conj_inv.binary_search(x).is_ok())
        .collect();
    let iota = |x: Elem| r.mul(r.mul(r.mul(ui, x), u), a);

    let iota_image = sorted(k.iter().map(|&x| iota(x)).collect());
    let f_model = AffineSpaceModel::on_subspace(r, &subfield, k)?;
    let mapped: BTreeSet<Vec<Elem>> = f_model
        .lines()
        .iter()
        .map(|l| sorted(l.iter().map(|&x| iota(x)).collect()))
        .collect();
    let trace_set: BTreeSet<Vec<Elem>> = lines.iter().cloned().collect();
    let isomorphic = iota_image == block && mapped == trace_set;

    let on_trace_line = |x: Elem, y: Elem, z: Elem| {
        lines
            .iter()
            .any(|l| [x, y, z].iter().all(|p| l.binary_search(p).is_ok()))
    };
    let collinearity_preserved = k.iter().all(|&x| {
        k.iter().all(|&y| {
            k.iter()
                .all(|&z| f_model.collinear(x, y, z) == on_trace_line(iota(x), iota(y), iota(z)))
        })
    });

    Ok(TraceSpace {
        points: block,
        lines,
        subfield,
        isomorphic,
        collinearity_preserved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{FiniteField, SubfieldEmbedding};
    use crate::chains::DEFAULT_CHAIN_CAP;

    fn quad(p: u32) -> ChainGeometry {
        let r = FiniteRing::matrix_ring(&FiniteField::new(p, 1).unwrap(), 2).unwrap();
        let e = SubfieldEmbedding::default_quadratic(&r).unwrap();
        ChainGeometry::new(r, e).unwrap()
    }

    #[test]
    fn residue_at_infinity_q2() {
        let g = quad(2);
        let res = Residue::at_infinity(&g).unwrap();
        assert_eq!(res.points().len(), 16);
        assert!(res.blocks().iter().all(|b| b.len() == 4));
        let through0 = res.blocks_through(0);
        assert_eq!(through0.len(), 2);
        for &i in &through0 {
            let units = res.blocks()[i].iter().filter(|&&x| g.ring().is_unit(x)).count();
            assert_eq!(units, 3);
        }
        assert_eq!(res.classes().len(), 1);
    }

    #[test]
    fn blocks_match_chains_through_infinity() {
        for p in [2, 3] {
            let g = quad(p);
            let res = Residue::at_infinity(&g).unwrap();
            let inf = g.line().infinity();
            let from_orbit: BTreeSet<Vec<PointId>> = g
                .all_chains(DEFAULT_CHAIN_CAP)
                .unwrap()
                .into_iter()
                .filter(|c| c.contains(inf))
                .map(|c| c.points().iter().copied().filter(|&x| x != inf).collect())
                .collect();
            let from_residue: BTreeSet<Vec<PointId>> = (0..res.blocks().len()).map(|i| res.block_points(i)).collect();
            assert_eq!(from_orbit, from_residue);
        }
    }

    #[test]
    fn compatibility_class_counts() {
        let g3 = quad(3);
        let res = Residue::at_infinity(&g3).unwrap();
        assert_eq!(res.classes().len(), 3);
        // one block through 0 and 1 per class
        for class in res.classes() {
            let n = class
                .iter()
                .filter(|&&i| {
                    let b = &res.blocks()[i];
                    b.binary_search(&0).is_ok() && b.binary_search(&1).is_ok()
                })
                .count();
            assert_eq!(n, 1);
        }
    }

    #[test]
    fn unique_block_per_class_through_distant_pair() {
        for (p, stride) in [(2u32, 1usize), (3, 7)] {
            let g = quad(p);
            let r = g.ring();
            let res = Residue::at_infinity(&g).unwrap();
            for x in r.elements().step_by(stride) {
                for y in r.elements().step_by(stride) {
                    if !r.is_unit(r.sub(x, y)) {
                        continue;
                    }
                    for class in res.classes() {
                        let n = class
                            .iter()
                            .filter(|&&i| {
                                let b = &res.blocks()[i];
                                b.binary_search(&x).is_ok() && b.binary_search(&y).is_ok()
                            })
                            .count();
                        assert_eq!(n, 1);
                    }
                }
            }
        }
    }

    #[test]
    fn compatibility_is_independent_of_chosen_points() {
        let g = quad(2);
        let r = g.ring();
        let res = Residue::at_infinity(&g).unwrap();
        for b in res.blocks() {
            for b2 in res.blocks() {
                let expected = blocks_compatible(r, b, b2).unwrap();
                for &p in b {
                    for &q in b.iter().filter(|&&q| q != p) {
                        for &p2 in b2 {
                            for &q2 in b2.iter().filter(|&&q| q != p2) {
                                assert_eq!(blocks_compatible_via(r, b, b2, (p, q), (p2, q2)).unwrap(), expected);
                            }
                        }
                    }
                }
            }
        }
    }

    fn check_lower_triangular(g: &ChainGeometry, a: Elem, c: Elem, d: Elem) {
        let gamma = Mat2::new(a, 0, c, d);
        let chain = g.chain_image(g.standard_chain(), &gamma).unwrap();
        assert_eq!(
            compatible_at_infinity(g, g.standard_chain(), &chain).unwrap(),
            g.normalizer().subgroup.contains(d),
            "a={a} c={c} d={d}"
        );
    }

    #[test]
    fn compatibility_with_c_iff_lower_right_in_n() {
        let g2 = quad(2);
        let r = g2.ring();
        for &a in r.units() {
            for c in r.elements() {
                for &d in r.units() {
                    check_lower_triangular(&g2, a, c, d);
                }
            }
        }
        let g3 = quad(3);
        let units = g3.ring().units().to_vec();
        for (i, &a) in units.iter().enumerate().step_by(5) {
            for c in g3.ring().elements().step_by(9) {
                for &d in &units {
                    check_lower_triangular(&g3, a, c + (i as Elem % 3), d);
                }
            }
        }
    }

    #[test]
    fn double_compatibility_iff_normalizer() {
        for p in [2, 3] {
            let g = quad(p);
            for &a in g.ring().units() {
                let (at_inf, at_zero) = double_compatibility_parts(&g, a).unwrap();
                assert!(at_inf);
                assert_eq!(at_zero, g.normalizer().subgroup.contains(a));
                assert_eq!(
                    double_compatibility(&g, a).unwrap(),
                    g.normalizer().subgroup.contains(a)
                );
            }
            assert_eq!(double_compatibility(&g, 0), Err(Error::NotAUnit(0)));
        }
    }

    #[test]
    fn delta_sharply_two_transitive_q2() {
        let g = quad(2);
        assert!(delta_is_sharply_2_transitive(g.ring()));
    }

    #[test]
    fn affine_models() {
        let g = quad(2);
        let r = g.ring();
        let ak = AffineSpaceModel::new(r, g.embedding().image()).unwrap();
        assert_eq!(ak.lines().len(), 20);
        assert_eq!(ak.parallel_class_count(), 5);
        for c in 0..5 {
            assert_eq!(ak.lines_in_class(c), 4);
        }
        let az = AffineSpaceModel::new(r, r.center()).unwrap();
        assert!(az.lines().iter().all(|l| l.len() == 2));
        assert_eq!(az.lines().len(), 120);
        // lines through 0 are exactly L·x
        for l in ak.lines().iter().filter(|l| l.binary_search(&0).is_ok()) {
            assert!(ak.directions().contains(l));
        }
        let not_closed = [0, 1, r.units()[3]];
        assert!(AffineSpaceModel::new(r, &not_closed).is_err());
    }

    #[test]
    fn q2_residue_is_partial_affine_with_three_classes_missing() {
        let g = quad(2);
        let r = g.ring();
        let res = Residue::at_infinity(&g).unwrap();
        let ak = AffineSpaceModel::new(r, g.embedding().image()).unwrap();
        let report = partial_affine_check(r, &res.class_blocks(0), &ak);
        assert!(report.passes());
        assert_eq!(report.present_classes, 2);
        assert_eq!(report.missing_classes, 3);
    }

    #[test]
    fn q3_classes_match_their_own_models() {
        let g = quad(3);
        let r = g.ring();
        let res = Residue::at_infinity(&g).unwrap();
        let mut classes_seen = BTreeSet::new();
        for &u in g.transversal() {
            let ci = res.class_of_unit(&g, u).unwrap();
            classes_seen.insert(ci);
            let model = model_for_unit(&g, u).unwrap();
            assert!(partial_affine_check(r, &res.class_blocks(ci), &model).passes());
            if u != 1 {
                let c_class = res.class_of_unit(&g, 1).unwrap();
                assert!(!partial_affine_check(r, &res.class_blocks(c_class), &model).passes());
            }
        }
        assert_eq!(classes_seen.len(), 3);
        let all: Vec<Block> = res.blocks().to_vec();
        for &u in r.units() {
            let model = model_for_unit(&g, u).unwrap();
            assert!(!partial_affine_check(r, &all, &model).is_partial_affine());
        }
    }

    #[test]
    fn conjugation_maps_c_class_to_u_class() {
        let g = quad(3);
        let r = g.ring();
        let res = Residue::at_infinity(&g).unwrap();
        let c_class: BTreeSet<Block> = res
            .class_blocks(res.class_of_unit(&g, 1).unwrap())
            .into_iter()
            .collect();
        let ak = AffineSpaceModel::new(r, g.embedding().image()).unwrap();
        for &u in g.transversal() {
            let ui = r.inverse(u).unwrap();
            let alpha = |x: Elem| r.mul(r.mul(ui, x), u);
            let u_class: BTreeSet<Block> = res
                .class_blocks(res.class_of_unit(&g, u).unwrap())
                .into_iter()
                .collect();
            let mapped: BTreeSet<Block> = c_class
                .iter()
                .map(|b| sorted(b.iter().map(|&x| alpha(x)).collect()))
                .collect();
            assert_eq!(mapped, u_class);
            let model_u = model_for_unit(&g, u).unwrap();
            let mapped_lines: Vec<Vec<Elem>> = ak
                .lines()
                .iter()
                .map(|l| sorted(l.iter().map(|&x| alpha(x)).collect()))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            assert_eq!(mapped_lines, model_u.lines());
        }
    }

    #[test]
    fn trace_spaces_q3() {
        let g = quad(3);
        let r = g.ring();
        let n = &g.normalizer().subgroup;
        let outside = *r.units().iter().find(|&&u| !n.contains(u)).unwrap();
        let block = r.conjugate_set(g.embedding().image(), outside).unwrap();
        let t = trace_space(&g, outside, &block).unwrap();
        assert_eq!(t.points.len(), 9);
        assert_eq!(t.lines.len(), 12);
        assert!(t.lines.iter().all(|l| l.len() == 3));
        assert_eq!(t.subfield, r.center());
        assert!(t.isomorphic && t.collinearity_preserved);

        let inside = *n.elements().iter().find(|&&u| !g.embedding().contains(u)).unwrap();
        let block = r.conjugate_set(g.embedding().image(), inside).unwrap();
        let t = trace_space(&g, inside, &block).unwrap();
        assert_eq!(t.lines, vec![block.clone()]);
        assert_eq!(t.subfield, g.embedding().image());
        assert!(t.isomorphic);

        assert_eq!(trace_space(&g, outside, &[0, 1]).unwrap_err(), Error::NotALine);
    }

    #[test]
    fn residue_at_other_points() {
        for p in [2, 3] {
            let g = quad(p);
            let l = g.line();
            let inf = Residue::at_infinity(&g).unwrap();
            let at0 = Residue::at(&g, l.zero()).unwrap();
            assert_eq!(at0.blocks().len(), inf.blocks().len());
            assert_eq!(at0.classes().len(), inf.classes().len());

            let chains = g.all_chains(DEFAULT_CHAIN_CAP).unwrap();
            let target = l.zero();
            let direct: BTreeSet<Vec<PointId>> = chains
                .iter()
                .filter(|c| c.contains(target))
                .map(|c| c.points().iter().copied().filter(|&x| x != target).collect())
                .collect();
            let via: BTreeSet<Vec<PointId>> = (0..at0.blocks().len()).map(|i| at0.block_points(i)).collect();
            assert_eq!(direct, via);

            let reference = at0.partition_by_points();
            for w in l.witnesses_from_infinity(g.ring(), target).step_by(3).take(5) {
                let other = Residue::at_via(&g, target, &w).unwrap();
                assert_eq!(other.partition_by_points(), reference);
            }
        }
    }

    #[test]
    fn compatibility_at_other_points_agrees_with_transport() {
        let g = quad(3);
        let l = g.line();
        let p = l.one();
        let res = Residue::at(&g, p).unwrap();
        let chains: Vec<Chain> = g
            .all_chains(DEFAULT_CHAIN_CAP)
            .unwrap()
            .into_iter()
            .filter(|c| c.contains(p))
            .take(20)
            .collect();
        let class_of_chain = |c: &Chain| {
            let pts: Vec<PointId> = c.points().iter().copied().filter(|&x| x != p).collect();
            (0..res.blocks().len())
                .find(|&i| res.block_points(i) == pts)
                .map(|i| res.class_of(i))
                .unwrap()
        };
        for d in &chains {
            for d2 in &chains {
                assert_eq!(
                    compatible_at(&g, p, d, d2).unwrap(),
                    class_of_chain(d) == class_of_chain(d2)
                );
            }
        }
    }
}
