//! Self-test suites: one runner per acceptance criterion, shared by the
//! integration test target and the command-line `selftest`.

use crate::assembler::{presets, AssemblerSpec};
use crate::complex::{
    check_connectivity_bound, symmetric_group_oracle, DestabModel, DEFAULT_VERTEX_CAP,
};
use crate::construct::{
    conjugator_from_disjoint, construct_congruence, construct_embedding_ea, embedding_then_auto,
};
use crate::group::{random_auto, ScissorsAuto, ScissorsEmbedding};
use crate::invariant::{check_k1_relations, saf, saf_of_pieces, WedgeElement};
use crate::ktheory::{
    omega_infty_poincare, pt_group_1d, two_term_homology, wedge_generator_dims, FgAbGroup,
    GradedAb, IntMatrix,
};
use crate::polytope::{AxisBox, RectPolytope};
use crate::scalar::{CoefficientGroup, Rat, Scalar};
use crate::assembler::TranslationGroup;
use num::bigint::BigInt;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionOutcome {
    pub index: usize,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CriterionOutcome {
    fn pass(index: usize, name: &str, detail: String) -> Self {
        CriterionOutcome {
            index,
            name: name.into(),
            passed: true,
            detail,
        }
    }

    fn fail(index: usize, name: &str, detail: String) -> Self {
        CriterionOutcome {
            index,
            name: name.into(),
            passed: false,
            detail,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} criterion {:>2} ({}): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.index,
            self.name,
            self.detail
        )
    }
}

pub fn all_criteria() -> Vec<CriterionOutcome> {
    (1..=11).map(|n| run_criterion(n).expect("known index")).collect()
}

/// Run a single criterion by index.
pub fn run_criterion(index: usize) -> Option<CriterionOutcome> {
    Some(match index {
        1 => criterion_1_group_laws(),
        2 => criterion_2_saf_homomorphism(),
        3 => criterion_3_saf_values(),
        4 => criterion_4_k_golden_values(),
        5 => criterion_5_kunneth_pattern(),
        6 => criterion_6_stable_homology_dims(),
        7 => criterion_7_constructive_axioms(),
        8 => criterion_8_connectivity_bounds(),
        9 => criterion_9_categorical_oracle(),
        10 => criterion_10_pt_1d(),
        11 => criterion_11_k1_relations(),
        _ => return None,
    })
}

fn rng_from(seed: u64) -> ChaCha8Rng {
    <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed)
}

fn sqrt2_group() -> CoefficientGroup {
    CoefficientGroup::with_sqrt(2)
}

// ---------------------------------------------------------------------------
// 1. Group laws across the preset families

pub fn criterion_1_group_laws() -> CriterionOutcome {
    const NAME: &str = "group laws across preset families";
    let interval = RectPolytope::unit(1);
    let square = RectPolytope::unit(2);
    let families: Vec<(AssemblerSpec, RectPolytope)> = vec![
        (presets::iet_rational(), interval.clone()),
        (presets::iet_group(sqrt2_group()), interval.clone()),
        (presets::rec(2), square.clone()),
        (presets::brin_thompson(2), square),
        (presets::higman(2), interval.clone()),
        (presets::higman(3), interval.clone()),
        (presets::higman(5), interval.clone()),
        (presets::v_tau(), interval),
    ];
    let triples_per_family = 100u64;
    let mut checked = 0usize;
    for (spec, base) in &families {
        let id = ScissorsAuto::identity(spec.clone(), base.clone());
        for seed in 0..triples_per_family {
            let f = random_auto(spec, base, 3 * seed, 2);
            let g = random_auto(spec, base, 3 * seed + 1, 2);
            let h = random_auto(spec, base, 3 * seed + 2, 2);
            for (tag, el) in [("f", &f), ("g", &g), ("h", &h)] {
                if let Err(e) = el.verify() {
                    return CriterionOutcome::fail(
                        1,
                        NAME,
                        format!("{} seed {seed}: {tag} fails verify: {e}", spec.name()),
                    );
                }
            }
            let assoc_left = f.then(&g).unwrap().then(&h).unwrap();
            let assoc_right = f.then(&g.then(&h).unwrap()).unwrap();
            if assoc_left != assoc_right {
                return CriterionOutcome::fail(
                    1,
                    NAME,
                    format!("{} seed {seed}: associativity fails", spec.name()),
                );
            }
            if f.then(&id).unwrap() != f || id.then(&f).unwrap() != f {
                return CriterionOutcome::fail(
                    1,
                    NAME,
                    format!("{} seed {seed}: identity law fails", spec.name()),
                );
            }
            if f.then(&f.inverse()).unwrap() != id || f.inverse().then(&f).unwrap() != id {
                return CriterionOutcome::fail(
                    1,
                    NAME,
                    format!("{} seed {seed}: inverse law fails", spec.name()),
                );
            }
            checked += 1;
        }
    }
    CriterionOutcome::pass(
        1,
        NAME,
        format!(
            "{} seeded triples across {} families verified",
            checked,
            families.len()
        ),
    )
}

// ---------------------------------------------------------------------------
// 2. SAF homomorphism and stability

pub fn criterion_2_saf_homomorphism() -> CriterionOutcome {
    const NAME: &str = "SAF homomorphism and stability";
    let gamma = sqrt2_group();
    let spec = presets::iet_group(gamma.clone());
    let base = RectPolytope::unit(1);

    for seed in 0..200u64 {
        let f = random_auto(&spec, &base, 7_000 + 2 * seed, 3);
        let g = random_auto(&spec, &base, 7_001 + 2 * seed, 3);
        let sum = saf(&f, &gamma).unwrap().add(&saf(&g, &gamma).unwrap());
        if saf(&f.then(&g).unwrap(), &gamma).unwrap() != sum {
            return CriterionOutcome::fail(2, NAME, format!("additivity fails at seed {seed}"));
        }
        let commutator = f
            .then(&g)
            .unwrap()
            .then(&f.inverse())
            .unwrap()
            .then(&g.inverse())
            .unwrap();
        if !saf(&commutator, &gamma).unwrap().is_zero() {
            return CriterionOutcome::fail(2, NAME, format!("commutator lives at seed {seed}"));
        }
    }

    // refinement invariance and extension invariance
    let mut rng = rng_from(99);
    for seed in 0..50u64 {
        let f = random_auto(&spec, &base, 9_000 + seed, 3);
        let value = saf(&f, &gamma).unwrap();
        let cuts: Vec<Scalar> = (0..3)
            .map(|k| Scalar::from_frac(1 + 2 * k + rng.random_range(0..3) as i64, 12))
            .collect();
        let refined = f.subdivided_pieces(&[cuts]);
        if saf_of_pieces(&refined, &gamma).unwrap() != value {
            return CriterionOutcome::fail(
                2,
                NAME,
                format!("refinement changes the invariant at seed {seed}"),
            );
        }
        // a random EA embedding of [0,1] into [0,3]
        let big = RectPolytope::interval(Scalar::zero(), Scalar::from_int(3));
        let shift = spec
            .translations(0)
            .random_between(&Scalar::zero(), &Scalar::from_int(2), &mut rng)
            .unwrap();
        let pieces = vec![crate::group::PieceMap::new(
            AxisBox::interval(Scalar::zero(), Scalar::one()),
            crate::group::AffineMap::translation(vec![shift]),
        )];
        let e = ScissorsEmbedding::from_pieces(spec.clone(), base.clone(), big, pieces).unwrap();
        e.verify().unwrap();
        let extended = f.extend_along(&e).unwrap();
        if saf(&extended, &gamma).unwrap() != value {
            return CriterionOutcome::fail(
                2,
                NAME,
                format!("extension by identity changes the invariant at seed {seed}"),
            );
        }
    }
    CriterionOutcome::pass(
        2,
        NAME,
        "200 composition pairs, 200 commutators, 50 refinements, 50 extensions".into(),
    )
}

// ---------------------------------------------------------------------------
// 3. SAF golden values

pub fn criterion_3_saf_values() -> CriterionOutcome {
    const NAME: &str = "SAF values";
    let gamma = sqrt2_group();
    let spec = presets::iet_group(gamma.clone());
    let id = ScissorsAuto::identity(spec.clone(), RectPolytope::unit(1));
    if !saf(&id, &gamma).unwrap().is_zero() {
        return CriterionOutcome::fail(3, NAME, "identity has nonzero invariant".into());
    }
    let rational = ScissorsAuto::rotation(
        spec.clone(),
        Scalar::zero(),
        Scalar::one(),
        Scalar::from_frac(1, 2),
    );
    if !saf(&rational, &gamma).unwrap().is_zero() {
        return CriterionOutcome::fail(3, NAME, "rational rotation has nonzero invariant".into());
    }
    let alpha = Scalar::sqrt(2) - Scalar::one();
    let irrational = ScissorsAuto::rotation(spec, Scalar::zero(), Scalar::one(), alpha);
    let expected = WedgeElement::single(2, 0, 1, Rat::from_integer(BigInt::from(2)));
    let got = saf(&irrational, &gamma).unwrap();
    if got != expected {
        return CriterionOutcome::fail(3, NAME, format!("rot(sqrt2 - 1) has invariant {got}"));
    }
    CriterionOutcome::pass(
        3,
        NAME,
        "identity 0, rational rotation 0, rot(sqrt2-1) = 2 e0^e1".into(),
    )
}

// ---------------------------------------------------------------------------
// 4. K-theory golden values

pub fn criterion_4_k_golden_values() -> CriterionOutcome {
    const NAME: &str = "one-dimensional K-theory golden values";
    for d in 2..=10u64 {
        let report = two_term_homology(&IntMatrix::from_i64(&[&[d as i64]]), true).unwrap();
        let h0 = report.homology.get(0);
        let expected = FgAbGroup::cyclic(d - 1);
        if h0.free != 0 || h0.torsion != expected.torsion {
            return CriterionOutcome::fail(4, NAME, format!("d = {d}: H0 = {h0}"));
        }
        if report.homology.iter().any(|(deg, _)| deg > 0) {
            return CriterionOutcome::fail(4, NAME, format!("d = {d}: spurious higher homology"));
        }
    }
    let dyadic = two_term_homology(&IntMatrix::from_i64(&[&[2]]), true).unwrap();
    if !dyadic.homology.is_trivial() {
        return CriterionOutcome::fail(4, NAME, "dyadic spectrum not acyclic".into());
    }
    let tau = two_term_homology(&IntMatrix::from_i64(&[&[0, 1], &[1, -1]]), false).unwrap();
    if !tau.homology.get(0).is_trivial()
        || tau.homology.get(1) != FgAbGroup::cyclic(2)
        || !tau.homology.get(2).is_trivial()
    {
        return CriterionOutcome::fail(4, NAME, format!("tau multiplier: {}", tau.homology));
    }
    CriterionOutcome::pass(
        4,
        NAME,
        "Z/(d-1) for d in 2..=10; dyadic acyclic; tau gives H1 = Z/2".into(),
    )
}

// ---------------------------------------------------------------------------
// 5. Künneth pattern

pub fn criterion_5_kunneth_pattern() -> CriterionOutcome {
    const NAME: &str = "Künneth smash powers of the mod-2 class";
    let x = GradedAb::single(1, FgAbGroup::cyclic(2));
    let mut power = GradedAb::sphere();
    for n in 1..=4u32 {
        power = power.kunneth_smash(&x);
        // closed-form oracle: in degree n + k the group is (Z/2)^C(n-1, k)
        for deg in 0..=(2 * n + 2) {
            let expected = if deg >= n {
                let k = (deg - n) as usize;
                let copies = crate::ktheory::binomial(n as usize - 1, k);
                FgAbGroup::from_parts(0, &vec![(2u64, 1u32); copies as usize])
            } else {
                FgAbGroup::trivial()
            };
            if power.get(deg) != expected {
                return CriterionOutcome::fail(
                    5,
                    NAME,
                    format!("n = {n}, degree {deg}: {} != {expected}", power.get(deg)),
                );
            }
        }
    }
    CriterionOutcome::pass(5, NAME, "iterated smash matches binomial-Tor pattern, n <= 4".into())
}

// ---------------------------------------------------------------------------
// 6. Stable-homology dimensions

pub fn criterion_6_stable_homology_dims() -> CriterionOutcome {
    const NAME: &str = "stable homology Poincaré series";
    let cases: [(usize, Vec<u64>); 3] = [
        (1, vec![1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]),
        (2, vec![1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0]),
        (3, vec![1, 3, 4, 4, 4, 4, 4, 4, 4, 4, 4]),
    ];
    for (d, expected) in &cases {
        let gens = wedge_generator_dims(*d, 10);
        let dims = omega_infty_poincare(&gens, 10);
        if &dims != expected {
            return CriterionOutcome::fail(6, NAME, format!("d = {d}: {dims:?}"));
        }
    }
    CriterionOutcome::pass(6, NAME, "rank 1, 2, 3 series match through degree 10".into())
}

// ---------------------------------------------------------------------------
// 7. Constructive axioms

/// Random polytope with 1-2 boxes inside the unit cube, corners in the
/// spec's cut groups.
pub fn random_polytope(
    spec: &AssemblerSpec,
    rng: &mut ChaCha8Rng,
) -> RectPolytope {
    let dim = spec.dim();
    let boxes = rng.random_range(1..=2usize);
    let mut out: Vec<AxisBox> = Vec::new();
    'boxes: for b in 0..boxes {
        // keep boxes disjoint by separating along axis 0
        let (win_lo, win_hi) = if boxes == 1 {
            (Scalar::zero(), Scalar::one())
        } else if b == 0 {
            (Scalar::zero(), Scalar::from_frac(1, 2))
        } else {
            (Scalar::from_frac(1, 2), Scalar::one())
        };
        let mut intervals = Vec::with_capacity(dim);
        for axis in 0..dim {
            let (wl, wh) = if axis == 0 {
                (win_lo.clone(), win_hi.clone())
            } else {
                (Scalar::zero(), Scalar::one())
            };
            let group = spec.cut_group(axis);
            let Ok(lo) = group.random_between(&wl, &wh, rng) else {
                continue 'boxes;
            };
            let Ok(hi) = group.random_between(&lo, &wh, rng) else {
                continue 'boxes;
            };
            intervals.push((lo, hi));
        }
        out.push(AxisBox::new(intervals).expect("ordered corners"));
    }
    if out.is_empty() {
        RectPolytope::unit(dim)
    } else {
        RectPolytope::new(dim, out).expect("separated boxes")
    }
}

pub fn criterion_7_constructive_axioms() -> CriterionOutcome {
    const NAME: &str = "constructive embeddings and congruences";
    let specs: Vec<AssemblerSpec> = vec![
        presets::iet_rational(),
        presets::iet_zspan(sqrt2_group()),
        {
            // dyadic EA: dyadic translations, no scaling
            AssemblerSpec::new(
                "iet(Z[1/2])",
                vec![TranslationGroup::dyadic()],
                vec![TranslationGroup::dyadic()],
                vec![vec![]],
                vec![false],
                vec![],
            )
            .unwrap()
        },
        presets::rec(2),
        presets::rec_group(2, sqrt2_group()),
        {
            AssemblerSpec::new(
                "rec(2; Z[1/2])",
                vec![TranslationGroup::dyadic(); 2],
                vec![TranslationGroup::dyadic(); 2],
                vec![vec![]; 2],
                vec![false; 2],
                vec![],
            )
            .unwrap()
        },
    ];
    let mut embeddings = 0usize;
    let mut rng = rng_from(4242);
    for spec in &specs {
        for _ in 0..17 {
            let p = random_polytope(spec, &mut rng);
            let dim = spec.dim();
            // target box with sides in (9/8, 3/2) dominates any subset of
            // the unit cube in volume
            let mut intervals = Vec::with_capacity(dim);
            for axis in 0..dim {
                let hi = spec
                    .cut_group(axis)
                    .random_between(&Scalar::from_frac(9, 8), &Scalar::from_frac(3, 2), &mut rng)
                    .unwrap();
                intervals.push((Scalar::zero(), hi));
            }
            let q = RectPolytope::from_box(AxisBox::new(intervals).unwrap());
            match construct_embedding_ea(&p, &q, spec) {
                Ok(e) => {
                    if let Err(err) = e.verify() {
                        return CriterionOutcome::fail(
                            7,
                            NAME,
                            format!("{}: embedding fails verify: {err}", spec.name()),
                        );
                    }
                    if p.volume() + e.complement().volume() != q.volume() {
                        return CriterionOutcome::fail(
                            7,
                            NAME,
                            format!("{}: volume identity fails", spec.name()),
                        );
                    }
                    embeddings += 1;
                }
                Err(err) => {
                    return CriterionOutcome::fail(
                        7,
                        NAME,
                        format!("{}: construction failed: {err}", spec.name()),
                    );
                }
            }
        }
    }

    // dyadic congruence round trips
    let dyadic = presets::higman(2);
    let mut round_trips = 0usize;
    for _ in 0..50 {
        let p = random_polytope(&dyadic, &mut rng);
        let q = random_polytope(&dyadic, &mut rng);
        let fwd = match construct_congruence(&p, &q, &dyadic) {
            Ok(c) => c,
            Err(e) => {
                return CriterionOutcome::fail(7, NAME, format!("congruence failed: {e}"));
            }
        };
        let back = construct_congruence(&q, &p, &dyadic).unwrap();
        let round = fwd.then(&back).unwrap();
        if !round.to_auto().map(|a| a.is_identity()).unwrap_or(false) {
            return CriterionOutcome::fail(7, NAME, "round trip is not the identity".into());
        }
        round_trips += 1;
    }
    CriterionOutcome::pass(
        7,
        NAME,
        format!("{embeddings} embeddings with exact volume identity, {round_trips} congruence round trips"),
    )
}

// ---------------------------------------------------------------------------
// 8. Connectivity bounds

pub fn criterion_8_connectivity_bounds() -> CriterionOutcome {
    const NAME: &str = "destabilisation connectivity bounds";
    let mut checked = 0usize;
    for cells in 1..=2usize {
        for ambient in cells..=8 {
            let model = DestabModel::GridInterval { cells, ambient };
            match check_connectivity_bound(model, DEFAULT_VERTEX_CAP) {
                Ok(r) if r.holds => checked += 1,
                Ok(r) => {
                    return CriterionOutcome::fail(
                        8,
                        NAME,
                        format!("{model:?}: connectivity {} < bound {}", r.connectivity, r.bound),
                    );
                }
                Err(e) => return CriterionOutcome::fail(8, NAME, e.to_string()),
            }
        }
    }
    for ambient in 1..=8usize {
        let model = DestabModel::FiniteSet {
            copies: 1,
            ambient,
        };
        match check_connectivity_bound(model, DEFAULT_VERTEX_CAP) {
            Ok(r) if r.holds => checked += 1,
            Ok(r) => {
                return CriterionOutcome::fail(
                    8,
                    NAME,
                    format!("{model:?}: connectivity {} < bound {}", r.connectivity, r.bound),
                );
            }
            Err(e) => return CriterionOutcome::fail(8, NAME, e.to_string()),
        }
    }
    CriterionOutcome::pass(8, NAME, format!("{checked} models meet floor((k-3)/2)"))
}

// ---------------------------------------------------------------------------
// 9. Symmetric group oracle

pub fn criterion_9_categorical_oracle() -> CriterionOutcome {
    const NAME: &str = "finite-set span composition vs symmetric groups";
    for n in 1..=4 {
        let report = symmetric_group_oracle(n);
        let expected: usize = (1..=n).product();
        if report.order != expected || !report.table_matches {
            return CriterionOutcome::fail(
                9,
                NAME,
                format!("n = {n}: order {}, table match {}", report.order, report.table_matches),
            );
        }
    }
    CriterionOutcome::pass(9, NAME, "multiplication tables match for n <= 4".into())
}

// ---------------------------------------------------------------------------
// 10. One-dimensional polytope group hypothesis

pub fn criterion_10_pt_1d() -> CriterionOutcome {
    const NAME: &str = "polytope group vs wedge of circles";
    let mut rng = rng_from(1010);
    for sample in 0..50 {
        let count = rng.random_range(0..=12usize);
        let mut cuts = Vec::with_capacity(count);
        for _ in 0..count {
            let num = rng.random_range(-24..=24i64);
            let den = rng.random_range(1..=8i64);
            let mut cut = Scalar::from_frac(num, den);
            if rng.random_range(0..4) == 0 {
                cut = cut + Scalar::sqrt(2);
            }
            cuts.push(cut);
        }
        let report = pt_group_1d(&cuts);
        if !report.iso_check {
            return CriterionOutcome::fail(
                10,
                NAME,
                format!(
                    "sample {sample}: group {} vs {} circles",
                    report.group, report.circle_count
                ),
            );
        }
    }
    CriterionOutcome::pass(10, NAME, "50 random cut configurations agree".into())
}

// ---------------------------------------------------------------------------
// 11. K1 relation suite

pub fn criterion_11_k1_relations() -> CriterionOutcome {
    const NAME: &str = "K1 presentation relations";
    let report = check_k1_relations(&sqrt2_group(), 1104, 100);
    if report.passed() {
        CriterionOutcome::pass(11, NAME, format!("{} samples, zero violations", report.samples))
    } else {
        CriterionOutcome::fail(
            11,
            NAME,
            format!("{} violations: {}", report.violations.len(), report.violations[0]),
        )
    }
}

// ---------------------------------------------------------------------------
// Extra coherence checks used by the integration tests

/// Conjugation coherence: for disjoint embeddings `e`, `e'` of the same
/// source, the swap conjugator intertwines the two extensions.
pub fn stability_coherence_sample(seed: u64) -> Result<(), String> {
    let spec = presets::iet_rational();
    let base = RectPolytope::unit(1);
    let f = random_auto(&spec, &base, seed, 3);
    let big = RectPolytope::interval(Scalar::zero(), Scalar::from_int(3));
    let mut rng = rng_from(seed ^ 0x5eed);
    // two disjoint random translates of [0,1] inside [0,3]
    let t1 = spec
        .translations(0)
        .random_between(&Scalar::zero(), &Scalar::from_frac(1, 2), &mut rng)
        .map_err(|e| e.to_string())?;
    let t2 = spec
        .translations(0)
        .random_between(&(Scalar::one() + t1.clone()), &Scalar::from_int(2), &mut rng)
        .map_err(|e| e.to_string())?;
    let make = |t: Scalar| {
        ScissorsEmbedding::from_pieces(
            spec.clone(),
            base.clone(),
            big.clone(),
            vec![crate::group::PieceMap::new(
                AxisBox::interval(Scalar::zero(), Scalar::one()),
                crate::group::AffineMap::translation(vec![t]),
            )],
        )
        .map_err(|e| e.to_string())
    };
    let e1 = make(t1)?;
    let e2 = make(t2)?;
    let h = conjugator_from_disjoint(&e1, &e2).map_err(|e| e.to_string())?;
    if embedding_then_auto(&e1, &h).map_err(|e| e.to_string())? != e2 {
        return Err(format!("seed {seed}: h . e1 != e2"));
    }
    let ext1 = f.extend_along(&e1).map_err(|e| e.to_string())?;
    let ext2 = f.extend_along(&e2).map_err(|e| e.to_string())?;
    let conjugated = h
        .inverse()
        .then(&ext1)
        .unwrap()
        .then(&h)
        .unwrap();
    if conjugated != ext2 {
        return Err(format!("seed {seed}: conjugation does not intertwine extensions"));
    }
    Ok(())
}
