use std::collections::BTreeSet;
use std::sync::LazyLock;

use chaingeo_core::chains::DEFAULT_CHAIN_CAP;
use chaingeo_core::residue::{blocks_compatible, partial_affine_check};
use chaingeo_core::{
    AffineSpaceModel, Chain, ChainGeometry, Elem, FiniteField, FiniteRing, IncidenceStructure, Mat2, PointId, Residue,
    SubfieldEmbedding,
};
use proptest::prelude::*;

struct Fixture {
    geometry: ChainGeometry,
    chains: BTreeSet<Chain>,
}

fn fixture(p: u32) -> Fixture {
    let r = FiniteRing::matrix_ring(&FiniteField::new(p, 1).unwrap(), 2).unwrap();
    let e = SubfieldEmbedding::default_quadratic(&r).unwrap();
    let geometry = ChainGeometry::new(r, e).unwrap();
    let chains = geometry.all_chains(DEFAULT_CHAIN_CAP).unwrap().into_iter().collect();
    Fixture { geometry, chains }
}

static Q2: LazyLock<Fixture> = LazyLock::new(|| fixture(2));
static Q3: LazyLock<Fixture> = LazyLock::new(|| fixture(3));
static GF16: LazyLock<FiniteField> = LazyLock::new(|| FiniteField::new(2, 4).unwrap());
static GF25: LazyLock<FiniteField> = LazyLock::new(|| FiniteField::new(5, 2).unwrap());

fn group_element(g: &ChainGeometry, word: &[usize]) -> Mat2 {
    let gens = g.generators();
    word.iter()
        .fold(Mat2::IDENTITY, |m, &i| m.mul(&gens[i % gens.len()], g.ring()))
}

fn word() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..64, 0..20)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in 0u32..16, b in 0u32..16, c in 0u32..16) {
        let f = &*GF16;
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            prop_assert_eq!(f.pow(a, 15), 1);
        }
    }

    #[test]
    fn odd_field_arithmetic(a in 0u32..25, b in 0u32..25) {
        let f = &*GF25;
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        // (a + b)^5 = a^5 + b^5 in characteristic 5
        prop_assert_eq!(f.pow(f.add(a, b), 5), f.add(f.pow(a, 5), f.pow(b, 5)));
        // multiplication agrees with repeated addition by prime field scalars
        let three = f.add(1, f.add(1, 1));
        prop_assert_eq!(f.mul(three, a), f.add(a, f.add(a, a)));
    }

    #[test]
    fn ring_axioms(a in 0 as Elem..81, b in 0 as Elem..81, c in 0 as Elem..81) {
        let r = Q3.geometry.ring();
        prop_assert_eq!(r.mul(r.mul(a, b), c), r.mul(a, r.mul(b, c)));
        prop_assert_eq!(r.mul(a, r.add(b, c)), r.add(r.mul(a, b), r.mul(a, c)));
        prop_assert_eq!(r.mul(r.add(a, b), c), r.add(r.mul(a, c), r.mul(b, c)));
        prop_assert_eq!(r.is_unit(r.mul(a, b)), r.is_unit(a) && r.is_unit(b));
    }

    #[test]
    fn action_is_a_right_action(w1 in word(), w2 in word(), p in 0 as PointId..130) {
        let g = &Q3.geometry;
        let (a, b) = (group_element(g, &w1), group_element(g, &w2));
        let l = g.line();
        let ab = a.mul(&b, g.ring());
        let lhs = l.act(g.ring(), p, &ab).unwrap();
        let rhs = l.act(g.ring(), l.act(g.ring(), p, &a).unwrap(), &b).unwrap();
        prop_assert_eq!(lhs, rhs);
        let inv = ab.inverse(g.ring()).unwrap();
        prop_assert_eq!(l.act(g.ring(), lhs, &inv).unwrap(), p);
    }

    #[test]
    fn group_preserves_distance_and_chains(w in word()) {
        for fx in [&*Q2, &*Q3] {
            let g = &fx.geometry;
            let l = g.line();
            let perm = l.permutation(g.ring(), &group_element(g, &w)).unwrap();
            for p in l.ids().step_by(3) {
                for q in l.ids() {
                    prop_assert_eq!(l.distant(p, q), l.distant(perm[p as usize], perm[q as usize]));
                }
            }
            for c in fx.chains.iter().step_by(37) {
                prop_assert!(fx.chains.contains(&c.permuted(&perm)));
            }
        }
    }

    #[test]
    fn triples_lie_on_transversal_many_chains(seed in any::<u64>()) {
        let fx = &*Q3;
        let g = &fx.geometry;
        let l = g.line();
        let p = (seed % 130) as PointId;
        let near: Vec<usize> = l.distant_set(p).ones().collect();
        let q = near[(seed >> 8) as usize % near.len()] as PointId;
        let both: Vec<usize> = l.distant_set(p).intersection(l.distant_set(q)).collect();
        let r = both[(seed >> 24) as usize % both.len()] as PointId;
        let through: Vec<&Chain> = fx
            .chains
            .iter()
            .filter(|c| c.contains(p) && c.contains(q) && c.contains(r))
            .collect();
        prop_assert_eq!(through.len(), g.transversal().len());
        let moved = g.chains_through_triple(p, q, r).unwrap();
        prop_assert!(moved.iter().eq(through.into_iter()));
        prop_assert_eq!(g.triple_intersection(p, q, r).unwrap(), g.f_chain(p, q, r).unwrap());
    }

    #[test]
    fn compatibility_is_invariant_under_delta(a_idx in 0usize..48, c in 0 as Elem..81, i in 0usize..162, j in 0usize..162) {
        let g = &Q3.geometry;
        let r = g.ring();
        let res = residue_q3();
        let a = r.units()[a_idx];
        let move_block = |b: &[Elem]| {
            let mut v: Vec<Elem> = b.iter().map(|&x| r.add(r.mul(x, a), c)).collect();
            v.sort_unstable();
            v
        };
        let (b1, b2) = (&res.blocks()[i], &res.blocks()[j]);
        let before = blocks_compatible(r, b1, b2).unwrap();
        let after = blocks_compatible(r, &move_block(b1), &move_block(b2)).unwrap();
        prop_assert_eq!(before, after);
        prop_assert!(res.block_index(&move_block(b1)).is_some());
    }

    #[test]
    fn removing_parallel_classes_keeps_partial_affine(mask in 0u32..32, drop_line in any::<bool>()) {
        let g = &Q2.geometry;
        let r = g.ring();
        let model = AffineSpaceModel::new(r, g.embedding().image()).unwrap();
        let mut kept: Vec<Vec<Elem>> = (0..model.lines().len())
            .filter(|&i| mask & (1 << model.class_of_line(i)) != 0)
            .map(|i| model.lines()[i].clone())
            .collect();
        let dropped_one = drop_line && !kept.is_empty();
        if dropped_one {
            kept.pop();
        }
        let report = partial_affine_check(r, &kept, &model);
        prop_assert!(report.blocks_are_lines);
        prop_assert_eq!(report.classes_complete, !dropped_one);
        prop_assert_eq!(report.present_classes + report.missing_classes, 5);
    }

    #[test]
    fn derived_distance_is_symmetric(blocks in prop::collection::vec(prop::collection::vec(0 as PointId..12, 1..5), 0..10)) {
        let s = IncidenceStructure::new(12, blocks).unwrap();
        for p in 0..12 {
            prop_assert!(!s.joined(p, p));
            for q in 0..12 {
                prop_assert_eq!(s.joined(p, q), s.joined(q, p));
                prop_assert_eq!(s.joined(p, q), p != q && s.blocks_containing(&[p, q]) > 0);
            }
        }
    }
}

fn residue_q3() -> &'static Residue {
    static RES: LazyLock<Residue> = LazyLock::new(|| Residue::at_infinity(&Q3.geometry).unwrap());
    &RES
}

#[test]
fn orbit_matches_pair_oracle_exhaustively() {
    let g = &Q2.geometry;
    let r = g.ring();
    let oracle: BTreeSet<(Elem, Elem)> = r
        .elements()
        .flat_map(|a| r.elements().map(move |b| (a, b)))
        .filter(|&(a, b)| chaingeo_core::projline::find_completion(r, a, b).is_some())
        .map(|(a, b)| chaingeo_core::projline::canonical_pair(r, a, b))
        .collect();
    let orbit: BTreeSet<(Elem, Elem)> = g.line().points().iter().copied().collect();
    assert_eq!(oracle, orbit);
    assert!(Q3.geometry.line().oracle_checked());
}
