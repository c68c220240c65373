//! The verification suites. Every check states a prediction derived from
//! the instance parameters alone and the value computed from the tables.

use std::collections::BTreeSet;
use std::time::Instant;

use chaingeo_core::incidence::{self, IncidenceStructure};
use chaingeo_core::residue::{
    compatibility_classes, double_compatibility, model_for_unit, partial_affine_check, trace_space, Block,
};
use chaingeo_core::{residue, AffineSpaceModel, Chain, ChainGeometry, Elem, Mat2, PointId, Residue};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::Kind;
use crate::error::CliResult;
use crate::instance::Instance;
use crate::report::{Check, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Counts,
    Axioms,
    Residue,
    Trace,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Counts => "counts",
            Suite::Axioms => "axioms",
            Suite::Residue => "residue",
            Suite::Trace => "trace",
            Suite::All => "all",
        }
    }

    fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Counts, Suite::Axioms, Suite::Residue, Suite::Trace],
            s => vec![s],
        }
    }

    /// Each suite has its own random stream so that results do not depend
    /// on which other suites run.
    fn rng(self, seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed ^ ((self as u64 + 1) << 56))
    }
}

/// Numbers predicted from `q`, `n` and `|K|` without looking at the tables.
struct Predicted {
    ring_size: u64,
    units: u64,
    points: u64,
    normalizer: u64,
    normal: bool,
    chains_per_triple: u64,
    chains: u64,
    /// `|F|` for the core field.
    core_field: u64,
}

fn predict(inst: &Instance) -> Predicted {
    let g = &inst.geometry;
    let q = g.ring().base_field().order() as u64;
    let n = g.ring().matrix_size() as u32;
    let k = g.embedding().image().len() as u64;
    let ring_size = q.pow(n * n);
    let units: u64 = (0..n).map(|i| q.pow(n) - q.pow(i)).product();
    // n-dimensional subspaces of GF(q)^{2n}
    let points =
        (0..n).map(|i| q.pow(2 * n - i) - 1).product::<u64>() / (0..n).map(|i| q.pow(n - i) - 1).product::<u64>();
    let normalizer = match inst.config.kind {
        Kind::MatrixQuadratic => 2 * (q * q - 1),
        Kind::Field | Kind::MatrixRingFull => units,
    };
    let normal = normalizer == units;
    let chains_per_triple = units / normalizer;
    let chains = points * ring_size * units * chains_per_triple / ((k + 1) * k * (k - 1));
    let core_field = if normal { k } else { q };
    Predicted {
        ring_size,
        units,
        points,
        normalizer,
        normal,
        chains_per_triple,
        chains,
        core_field,
    }
}

/// Data shared by several suites, computed on first use.
struct Shared<'a> {
    inst: &'a Instance,
    chains: Option<Vec<Chain>>,
    structure: Option<IncidenceStructure>,
    residue: Option<Residue>,
}

impl<'a> Shared<'a> {
    fn chains(&mut self) -> CliResult<&[Chain]> {
        if self.chains.is_none() {
            let g = &self.inst.geometry;
            self.chains = Some(g.all_chains(self.inst.config.caps.chains)?);
        }
        Ok(self.chains.as_deref().expect("just computed"))
    }

    fn structure(&mut self) -> CliResult<&IncidenceStructure> {
        if self.structure.is_none() {
            let n = self.inst.geometry.line().len();
            let blocks = self.chains()?.iter().map(|c| c.points().to_vec()).collect();
            self.structure = Some(IncidenceStructure::new(n, blocks)?);
        }
        Ok(self.structure.as_ref().expect("just computed"))
    }

    fn residue(&mut self) -> CliResult<&Residue> {
        if self.residue.is_none() {
            self.residue = Some(Residue::at_infinity(&self.inst.geometry)?);
        }
        Ok(self.residue.as_ref().expect("just computed"))
    }
}

/// Runs `suite` and assembles the report. `timings` adds wall-clock times.
pub fn verify(inst: &Instance, suite: Suite, seed: u64, timings: bool) -> CliResult<Report> {
    let pred = predict(inst);
    let mut shared = Shared {
        inst,
        chains: None,
        structure: None,
        residue: None,
    };
    let mut checks = Vec::new();
    let mut times = std::collections::BTreeMap::new();
    let suites = suite.expand();
    for &s in &suites {
        let start = Instant::now();
        let mut rng = s.rng(seed);
        let mut out = match s {
            Suite::Counts => counts(&mut shared, &pred, &mut rng)?,
            Suite::Axioms => axioms(&mut shared, &pred)?,
            Suite::Residue => residue_suite(&mut shared, &pred, &mut rng)?,
            Suite::Trace => trace(&mut shared, &pred)?,
            Suite::All => unreachable!("expanded"),
        };
        let ms = start.elapsed().as_millis() as u64;
        log::info!("suite {} finished in {ms} ms with {} checks", s.name(), out.len());
        times.insert(s.name().to_string(), ms);
        checks.append(&mut out);
    }
    let names = suites.iter().map(|s| s.name().to_string()).collect();
    let mut report = Report::new(inst.summary(), seed, names, checks);
    if timings {
        report.timings_ms = Some(times);
    }
    Ok(report)
}

fn random_distant_triple(g: &ChainGeometry, rng: &mut ChaCha8Rng) -> [PointId; 3] {
    let l = g.line();
    loop {
        let p = rng.gen_range(0..l.len() as PointId);
        let near: Vec<usize> = l.distant_set(p).ones().collect();
        let Some(&q) = near.choose(rng) else { continue };
        let both: Vec<usize> = l.distant_set(p).intersection(l.distant_set(q as PointId)).collect();
        if let Some(&r) = both.choose(rng) {
            return [p, q as PointId, r as PointId];
        }
    }
}

fn random_group_element(g: &ChainGeometry, rng: &mut ChaCha8Rng) -> Mat2 {
    let r = g.ring();
    (0..24).fold(Mat2::IDENTITY, |m, _| {
        let gen = g.generators().choose(rng).expect("GL₂(R) has generators");
        m.mul(gen, r)
    })
}

fn counts(sh: &mut Shared, pred: &Predicted, rng: &mut ChaCha8Rng) -> CliResult<Vec<Check>> {
    const S: &str = "counts";
    let inst = sh.inst;
    let g = &inst.geometry;
    let (r, l) = (g.ring(), g.line());
    let k = g.embedding().image().len();
    let mut v = vec![
        Check::new(S, "ring_size", "|R| = q^(n²)", pred.ring_size, r.size()),
        Check::new(S, "unit_count", "|R*| = |GL(n, q)|", pred.units, r.units().len()),
        Check::new(
            S,
            "point_count",
            "|P(R)| is the number of n-subspaces of GF(q)^2n",
            pred.points,
            l.len(),
        ),
        Check::new(
            S,
            "normalizer_order",
            match inst.config.kind {
                Kind::MatrixQuadratic => "|N| = 2(q²−1)",
                _ => "|N| = |R*| because K* is central or R is commutative",
            },
            pred.normalizer,
            g.normalizer().subgroup.len(),
        ),
        Check::new(
            S,
            "k_star_normal",
            "K* is normal in R* iff |N| = |R*|",
            pred.normal,
            g.normalizer().is_normal,
        ),
    ];

    if r.size() <= chaingeo_core::projline::ORACLE_CHECK_LIMIT {
        v.push(Check::new(
            S,
            "points_match_oracle",
            "the orbit of R(1,0) equals the set of admissible pairs",
            true,
            l.oracle_checked(),
        ));
    }

    let mut invariant = true;
    for _ in 0..inst.config.samples.group_elements {
        let m = random_group_element(g, rng);
        let perm = l.permutation(r, &m)?;
        invariant &= l.ids().all(|p| {
            l.ids()
                .all(|q| l.distant(p, q) == l.distant(perm[p as usize], perm[q as usize]))
        });
    }
    v.push(Check::new(
        S,
        "distant_invariance",
        format!(
            "the distant relation is invariant under {} random elements of GL₂(R)",
            inst.config.samples.group_elements
        ),
        true,
        invariant,
    ));

    let chains = sh.chains()?;
    let sizes: BTreeSet<usize> = chains.iter().map(|c| c.len()).collect();
    let chain_count = chains.len();
    v.push(Check::new(
        S,
        "chain_size",
        "every chain has |K|+1 points",
        vec![k + 1],
        sizes,
    ));
    v.push(Check::new(
        S,
        "chain_count",
        format!(
            "|P|·|R|·|R*|·(|R*|/|N|) / ((|K|+1)|K|(|K|−1)) = {}·{}·{}·{} / ({}·{}·{}) chains",
            pred.points,
            pred.ring_size,
            pred.units,
            pred.chains_per_triple,
            k + 1,
            k,
            k - 1
        ),
        pred.chains,
        chain_count,
    ));

    let s = sh.structure()?;
    let triples = s.joined_triple_count();
    let mut per_triple = BTreeSet::new();
    let mut via_witness = BTreeSet::new();
    let mut tested = 0u64;
    let mut tally = |t: [PointId; 3]| -> CliResult<()> {
        per_triple.insert(s.blocks_containing(&t));
        via_witness.insert(g.chains_through_triple(t[0], t[1], t[2])?.len());
        tested += 1;
        Ok(())
    };
    if triples <= inst.config.caps.exhaustive_triples {
        for p in l.ids() {
            for q in l.distant_set(p).ones().filter(|&q| q > p as usize) {
                for x in l
                    .distant_set(p)
                    .intersection(l.distant_set(q as PointId))
                    .filter(|&x| x > q)
                {
                    tally([p, q as PointId, x as PointId])?;
                }
            }
        }
    } else {
        for _ in 0..inst.config.samples.triples {
            tally(random_distant_triple(g, rng))?;
        }
    }
    let mode = if tested == triples { "all" } else { "sampled" };
    let mut claim = format!(
        "each pairwise-distant triple ({mode} {tested} of {triples}) lies on |R*|/|N| = {}/{} = {} chains",
        pred.units, pred.normalizer, pred.chains_per_triple
    );
    if inst.config.kind == Kind::MatrixQuadratic {
        let q = r.base_field().order();
        claim.push_str(&format!(" = (q²−q)/2 = ({}−{})/2", q * q, q));
    }
    v.push(Check::new(
        S,
        "chains_per_triple",
        claim,
        vec![pred.chains_per_triple],
        per_triple,
    ));
    v.push(Check::new(
        S,
        "chains_per_triple_by_transport",
        "chains through a triple obtained by moving the standard triple",
        vec![pred.chains_per_triple],
        via_witness,
    ));

    v.push(Check::new(
        S,
        "core_field_size",
        "|F| for the core field F",
        pred.core_field,
        g.core_field().len(),
    ));
    if !pred.normal {
        v.push(Check::new(
            S,
            "core_field_is_center",
            "F consists of the scalar matrices",
            r.center(),
            g.core_field(),
        ));
    }
    let (inf, zero, one) = (l.infinity(), l.zero(), l.one());
    let meet = g.triple_intersection(inf, zero, one)?;
    v.push(Check::new(
        S,
        "triple_intersection",
        "the chains through ∞, 0, 1 meet in the F-chain P(F)",
        g.f_chain(inf, zero, one)?,
        &meet,
    ));
    v.push(Check::new(
        S,
        "triple_intersection_size",
        "|F|+1 common points",
        pred.core_field + 1,
        meet.len(),
    ));

    if inst.config.kind == Kind::MatrixQuadratic && r.base_field().order() == 2 {
        let cliques = g.maximal_distant_cliques(inst.config.caps.cliques)?;
        let chain_sets: BTreeSet<Vec<PointId>> = sh.chains()?.iter().map(|c| c.points().to_vec()).collect();
        let clique_sets: BTreeSet<Vec<PointId>> = cliques.into_iter().collect();
        v.push(Check::new(
            S,
            "cliques_are_chains",
            "the maximal sets of pairwise distant points are exactly the chains",
            true,
            clique_sets == chain_sets,
        ));
    }
    Ok(v)
}

fn axioms(sh: &mut Shared, pred: &Predicted) -> CliResult<Vec<Check>> {
    const S: &str = "axioms";
    let inst = sh.inst;
    let g = &inst.geometry;
    let s = sh.structure()?;
    let cs1 = incidence::check_cs1(s);
    let (exists, unique) = incidence::check_cs2(s, inst.config.caps.triples)?;
    let cs3 = incidence::check_cs3(s, Some(g))?;
    let derived = g.line().ids().all(|p| s.joined_set(p) == g.line().distant_set(p));
    let axiomatic = cs1 && exists && unique && cs3;
    Ok(vec![
        Check::new(
            S,
            "cs1",
            "every point is on a chain and every chain has at least 3 points",
            true,
            cs1,
        ),
        Check::new(
            S,
            "cs2_existence",
            "every pairwise-distant triple is on a chain",
            true,
            exists,
        ),
        Check::new(
            S,
            "cs2_uniqueness",
            "every pairwise-distant triple is on at most one chain, iff K* is normal",
            pred.normal,
            unique,
        ),
        Check::new(
            S,
            "cs3",
            "every residue is a partial affine space, iff K* is normal",
            pred.normal,
            cs3,
        ),
        Check::new(
            S,
            "chain_space",
            "CS1 ∧ CS2 ∧ CS3 holds iff K* is normal",
            pred.normal,
            axiomatic,
        ),
        Check::new(
            S,
            "chain_space_agreement",
            "the axiom check agrees with the normality criterion",
            g.is_chain_space(),
            axiomatic,
        ),
        Check::new(
            S,
            "distant_iff_joined",
            "two points are distant iff some chain joins them",
            true,
            derived,
        ),
    ])
}

fn residue_suite(sh: &mut Shared, pred: &Predicted, rng: &mut ChaCha8Rng) -> CliResult<Vec<Check>> {
    const S: &str = "residue";
    let inst = sh.inst;
    let g = &inst.geometry;
    let r = g.ring();
    let k = g.embedding().image().len() as u64;
    let res = sh.residue()?.clone();
    let mut v = Vec::new();

    v.push(Check::new(
        S,
        "residue_points",
        "Σ_∞ has |R| points",
        pred.ring_size,
        res.points().len(),
    ));
    let through0 = res.blocks_through(0);
    v.push(Check::new(
        S,
        "blocks_through_zero",
        format!(
            "(|R*|/|N|)·|R*|/(|K|−1) = {}·{}/{} blocks of Σ_∞ pass through 0",
            pred.chains_per_triple,
            pred.units,
            k - 1
        ),
        pred.chains_per_triple * pred.units / (k - 1),
        through0.len(),
    ));
    let unit_counts: BTreeSet<usize> = through0
        .iter()
        .map(|&i| res.blocks()[i].iter().filter(|&&x| r.is_unit(x)).count())
        .collect();
    v.push(Check::new(
        S,
        "units_per_block_through_zero",
        "each block through 0 contains |K|−1 units",
        vec![k - 1],
        unit_counts,
    ));
    v.push(Check::new(
        S,
        "compatibility_classes",
        format!(
            "Σ_∞ has |R*|/|N| = {}/{} compatibility classes",
            pred.units, pred.normalizer
        ),
        pred.chains_per_triple,
        res.classes().len(),
    ));

    let mut own_model = true;
    for &u in g.transversal() {
        let class = res.class_blocks(res.class_of_unit(g, u)?);
        own_model &= partial_affine_check(r, &class, &model_for_unit(g, u)?).passes();
    }
    v.push(Check::new(
        S,
        "classes_match_models",
        "the class of C^diag(u,u) is a partial affine space in A(u⁻¹Ku, R)",
        true,
        own_model,
    ));

    let ak = AffineSpaceModel::new(r, g.embedding().image())?;
    let c_class = res.class_blocks(res.class_of_unit(g, 1)?);
    let report = partial_affine_check(r, &c_class, &ak);
    let total = ak.parallel_class_count() as u64;
    let present = pred.units / (k - 1);
    v.push(Check::new(
        S,
        "missing_parallel_classes",
        format!(
            "the class of C is A(K,R) without {} of its {} parallel classes",
            total - present,
            total
        ),
        (true, total - present),
        (report.passes(), report.missing_classes),
    ));

    let union_ok = g
        .transversal()
        .iter()
        .map(|&u| model_for_unit(g, u))
        .collect::<Result<Vec<_>, _>>()?
        .iter()
        .any(|m| partial_affine_check(r, res.blocks(), m).is_partial_affine());
    v.push(Check::new(
        S,
        "residue_single_model",
        "all blocks of Σ_∞ fit one affine model iff K* is normal",
        pred.normal,
        union_ok,
    ));

    let mut double_ok = true;
    for &a in r.units() {
        double_ok &= double_compatibility(g, a)? == g.normalizer().subgroup.contains(a);
    }
    v.push(Check::new(
        S,
        "double_compatibility",
        format!(
            "C^diag(a,1) is compatible with C at ∞ and at 0 iff a ∈ N (all {} units)",
            r.units().len()
        ),
        true,
        double_ok,
    ));

    let units = r.units();
    let exhaustive = units.len() * units.len() * r.size() <= 5_000;
    let mut compat_ok = true;
    let mut compat_tests = 0;
    let mut test = |a: Elem, c: Elem, d: Elem| -> CliResult<()> {
        let gamma = Mat2::new(a, 0, c, d);
        let chain = g.chain_image(g.standard_chain(), &gamma)?;
        compat_ok &=
            residue::compatible_at_infinity(g, g.standard_chain(), &chain)? == g.normalizer().subgroup.contains(d);
        compat_tests += 1;
        Ok(())
    };
    if exhaustive {
        for &a in units {
            for c in r.elements() {
                for &d in units {
                    test(a, c, d)?;
                }
            }
        }
    } else {
        for _ in 0..inst.config.samples.lower_triangular {
            let a = *units.choose(rng).expect("units");
            let d = *units.choose(rng).expect("units");
            test(a, rng.gen_range(0..r.size() as Elem), d)?;
        }
    }
    v.push(Check::new(
        S,
        "compatible_iff_normalizer",
        format!("C^γ ~∞ C for γ = (a 0; c d) iff d ∈ N ({compat_tests} matrices)"),
        true,
        compat_ok,
    ));

    if r.size() <= 16 {
        v.push(Check::new(
            S,
            "delta_sharply_transitive",
            "x ↦ xa + c acts sharply transitively on ordered distant pairs (exhaustive)",
            true,
            residue::delta_is_sharply_2_transitive(r),
        ));
    } else {
        let pairs: Vec<(Elem, Elem)> = (0..inst.config.samples.triples)
            .map(|_| loop {
                let x = rng.gen_range(0..r.size() as Elem);
                let y = rng.gen_range(0..r.size() as Elem);
                if r.is_unit(r.sub(x, y)) {
                    break (x, y);
                }
            })
            .collect();
        let sharp = pairs.chunks(2).filter(|c| c.len() == 2).all(|c| {
            let ((x, y), (x2, y2)) = (c[0], c[1]);
            let n = units
                .iter()
                .filter(|&&a| {
                    let c = r.sub(x2, r.mul(x, a));
                    r.add(r.mul(y, a), c) == y2
                })
                .count();
            n == 1
        });
        v.push(Check::new(
            S,
            "delta_sharply_transitive",
            "x ↦ xa + c acts sharply transitively on ordered distant pairs (sampled)",
            true,
            sharp,
        ));
    }

    let l = g.line();
    let target = l.zero();
    let at0 = Residue::at(g, target)?;
    let reference = at0.partition_by_points();
    let stable = l
        .witnesses_from_infinity(r, target)
        .step_by(7)
        .take(5)
        .map(|w| Residue::at_via(g, target, &w).map(|x| x.partition_by_points() == reference))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .all(|b| b);
    v.push(Check::new(
        S,
        "partition_independent_of_coordinates",
        "the compatibility partition of Σ_0 does not depend on the chosen γ",
        true,
        stable,
    ));

    let direct: BTreeSet<Vec<PointId>> = sh
        .chains()?
        .iter()
        .filter(|c| c.contains(target))
        .map(|c| c.points().iter().copied().filter(|&x| x != target).collect())
        .collect();
    let transported: BTreeSet<Vec<PointId>> = (0..at0.blocks().len()).map(|i| at0.block_points(i)).collect();
    let blocks_in_coords: Vec<Block> = at0.blocks().to_vec();
    let (_, classes) = compatibility_classes(r, &blocks_in_coords)?;
    v.push(Check::new(
        S,
        "residue_at_zero",
        "Σ_0 consists of the chains through 0 and has as many classes as Σ_∞",
        (true, res.classes().len()),
        (direct == transported, classes.len()),
    ));
    Ok(v)
}

fn trace(sh: &mut Shared, pred: &Predicted) -> CliResult<Vec<Check>> {
    const S: &str = "trace";
    let inst = sh.inst;
    let g = &inst.geometry;
    let r = g.ring();
    let k = g.embedding().image();
    let res = sh.residue()?;
    let mut v = Vec::new();

    let ak = AffineSpaceModel::new(r, k)?;
    let c_class: BTreeSet<Block> = res.class_blocks(res.class_of_unit(g, 1)?).into_iter().collect();
    let mut conj_ok = true;
    for &u in g.transversal() {
        let ui = r.inverse(u)?;
        let alpha = |x: Elem| r.mul(r.mul(ui, x), u);
        let image = |set: &[Elem]| {
            let mut b: Vec<Elem> = set.iter().map(|&x| alpha(x)).collect();
            b.sort_unstable();
            b
        };
        let lines: BTreeSet<Vec<Elem>> = ak.lines().iter().map(|l| image(l)).collect();
        let model = model_for_unit(g, u)?;
        let u_class: BTreeSet<Block> = res.class_blocks(res.class_of_unit(g, u)?).into_iter().collect();
        let mapped: BTreeSet<Block> = c_class.iter().map(|b| image(b)).collect();
        conj_ok &= lines.iter().eq(model.lines().iter()) && mapped == u_class;
    }
    v.push(Check::new(
        S,
        "conjugation_maps_models",
        "x ↦ u⁻¹xu maps A(K,R) onto A(u⁻¹Ku,R) and the class of C onto the class of C^diag(u,u)",
        true,
        conj_ok,
    ));

    let t = trace_space(g, 1, k)?;
    v.push(Check::new(
        S,
        "trace_inside_normalizer",
        "for u ∈ N the trace of A(K,R) on K is a single line",
        (1, true),
        (t.lines.len(), t.isomorphic),
    ));

    let outside: Vec<Elem> = g.transversal().iter().copied().filter(|&u| u != 1).collect();
    if pred.normal {
        return Ok(v);
    }
    let kk = k.len() as u64;
    let f = r.base_field().order() as u64;
    let mut shapes = BTreeSet::new();
    let mut iso = true;
    for &u in &outside {
        let block = r.conjugate_set(k, u)?;
        let t = trace_space(g, u, &block)?;
        let mut sizes: Vec<usize> = t.lines.iter().map(|l| l.len()).collect();
        sizes.dedup();
        shapes.insert((t.points.len(), t.lines.len(), sizes, t.subfield.len()));
        iso &= t.isomorphic && t.collinearity_preserved;
    }
    let expected_lines = kk * (kk - 1) / (f * (f - 1));
    v.push(Check::new(
        S,
        "trace_outside_normalizer",
        format!(
            "for u ∉ N the trace on a line of A(u⁻¹Ku,R) through 0 is A(F_u, K) with |F_u| = q: {kk} points, {expected_lines} lines of {f} points"
        ),
        vec![(kk, expected_lines, vec![f], f)],
        shapes,
    ));
    v.push(Check::new(
        S,
        "trace_isomorphism",
        "k ↦ u⁻¹kua maps A(F_u, K) onto the trace and preserves collinearity of all triples",
        true,
        iso,
    ));
    Ok(v)
}
