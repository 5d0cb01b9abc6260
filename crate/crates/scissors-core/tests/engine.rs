//! Cross-module behaviour: span algebra, disjointness and factorisation,
//! extension homomorphisms, and the divisibility structure of the computed
//! homology.

use scissors_core::assembler::presets;
use scissors_core::construct::construct_congruence;
use scissors_core::group::{random_auto, AffineMap, PieceMap, ScissorsEmbedding};
use scissors_core::ktheory::{two_term_homology, FgAbGroup, GradedAb, IntMatrix};
use scissors_core::{AxisBox, RectPolytope, Scalar, Span};

fn sf(n: i64, d: i64) -> Scalar {
    Scalar::from_frac(n, d)
}

#[test]
fn spans_invert_by_swapping_legs() {
    let dyadic = presets::higman(2);
    let a = RectPolytope::interval(sf(0, 1), sf(1, 1));
    let b = RectPolytope::interval(sf(0, 1), sf(3, 8));
    for (p, q) in [(a.clone(), b.clone()), (b, a.clone())] {
        let span = construct_congruence(&p, &q, &dyadic).unwrap();
        let id = span.then(&span.inverse()).unwrap();
        assert!(id.span_equal(&Span::identity(dyadic.clone(), p.clone())));
    }
}

#[test]
fn span_composition_is_associative_and_refinement_stable() {
    let dyadic = presets::higman(2);
    let shapes = [
        RectPolytope::interval(sf(0, 1), sf(1, 1)),
        RectPolytope::interval(sf(0, 1), sf(3, 4)),
        RectPolytope::interval(sf(0, 1), sf(5, 8)),
        RectPolytope::interval(sf(0, 1), sf(1, 2)),
    ];
    let f = construct_congruence(&shapes[0], &shapes[1], &dyadic).unwrap();
    let g = construct_congruence(&shapes[1], &shapes[2], &dyadic).unwrap();
    let h = construct_congruence(&shapes[2], &shapes[3], &dyadic).unwrap();
    let left = f.then(&g).unwrap().then(&h).unwrap();
    let right = f.then(&g.then(&h).unwrap()).unwrap();
    assert!(left.span_equal(&right));
    // `after` is the opposite order
    assert!(h.after(&g).unwrap().after(&f).unwrap().span_equal(&left));

    // presenting a rotation with redundant cuts gives an equal span
    let spec = presets::iet_rational();
    let rot = |cuts: &[i64]| {
        let mut pieces = vec![
            PieceMap::new(
                AxisBox::interval(sf(0, 1), sf(1, 2)),
                AffineMap::translation(vec![sf(1, 2)]),
            ),
            PieceMap::new(
                AxisBox::interval(sf(1, 2), sf(1, 1)),
                AffineMap::translation(vec![sf(-1, 2)]),
            ),
        ];
        let extra: Vec<Scalar> = cuts.iter().map(|&c| sf(c, 8)).collect();
        if !extra.is_empty() {
            let refined = pieces
                .iter()
                .flat_map(|p| {
                    RectPolytope::from_box(p.source.clone())
                        .grid_cells(&[extra.clone()])
                        .into_iter()
                        .map(move |cell| PieceMap::new(cell, p.map.clone()))
                })
                .collect();
            pieces = refined;
        }
        Span::from_pieces(
            spec.clone(),
            RectPolytope::unit(1),
            RectPolytope::unit(1),
            pieces,
        )
    };
    assert!(rot(&[]).span_equal(&rot(&[2, 4, 6])));
    assert!(!rot(&[]).span_equal(&rot(&[]).inverse().then(&rot(&[])).unwrap().inverse()));
}

#[test]
fn disjointness_iff_factorisation_through_complement() {
    let spec = presets::iet_rational();
    let p = RectPolytope::interval(sf(0, 1), sf(1, 2));
    let q = RectPolytope::interval(sf(0, 1), sf(3, 1));
    let translate_embed = |t: Scalar| {
        ScissorsEmbedding::from_pieces(
            spec.clone(),
            p.clone(),
            q.clone(),
            vec![PieceMap::new(
                AxisBox::interval(sf(0, 1), sf(1, 2)),
                AffineMap::translation(vec![t]),
            )],
        )
        .unwrap()
    };
    let shifts = [sf(0, 1), sf(1, 4), sf(1, 2), sf(1, 1), sf(3, 2), sf(2, 1)];
    for (i, a) in shifts.iter().enumerate() {
        for b in shifts.iter().skip(i) {
            let e1 = translate_embed(a.clone());
            let e2 = translate_embed(b.clone());
            let disjoint = e1.disjoint_from(&e2);
            let factored = e2.factor_through_complement(&e1);
            assert_eq!(disjoint, factored.is_some(), "shifts {a}, {b}");
            if let Some(f) = factored {
                f.verify().unwrap();
                assert!(f.target.same_point_set(e1.complement()));
            }
        }
    }
    // an embedding is never disjoint from itself on a nonempty source
    let e = translate_embed(sf(0, 1));
    assert!(!e.disjoint_from(&e));
}

#[test]
fn extension_along_an_embedding_is_a_homomorphism() {
    let spec = presets::iet_rational();
    let base = RectPolytope::unit(1);
    let big = RectPolytope::interval(sf(0, 1), sf(5, 2));
    let e = ScissorsEmbedding::from_pieces(
        spec.clone(),
        base.clone(),
        big,
        vec![PieceMap::new(
            AxisBox::interval(sf(0, 1), sf(1, 1)),
            AffineMap::translation(vec![sf(3, 4)]),
        )],
    )
    .unwrap();
    for seed in 0..10 {
        let f = random_auto(&spec, &base, seed, 3);
        let g = random_auto(&spec, &base, seed + 90, 3);
        let lhs = f.then(&g).unwrap().extend_along(&e).unwrap();
        let rhs = f
            .extend_along(&e)
            .unwrap()
            .then(&g.extend_along(&e).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs, "seed {seed}");
    }
}

#[test]
fn kunneth_is_associative_and_commutative() {
    let mut gs = Vec::new();
    let mut a = GradedAb::new();
    a.set(0, FgAbGroup::cyclic(4));
    a.set(2, FgAbGroup::free(1));
    gs.push(a);
    let mut b = GradedAb::new();
    b.set(1, FgAbGroup::cyclic(6));
    gs.push(b);
    let mut c = GradedAb::new();
    c.set(0, FgAbGroup::free(2));
    c.set(3, FgAbGroup::cyclic(9));
    gs.push(c);
    for x in &gs {
        for y in &gs {
            assert_eq!(x.kunneth_smash(y), y.kunneth_smash(x));
            for z in &gs {
                assert_eq!(
                    x.kunneth_smash(y).kunneth_smash(z),
                    x.kunneth_smash(&y.kunneth_smash(z))
                );
            }
        }
    }
}

#[test]
fn localized_lattices_give_localized_homology() {
    // d-adic multipliers: every torsion factor must be coprime to d
    for d in [2i64, 3, 4, 6, 10] {
        let report = two_term_homology(&IntMatrix::from_i64(&[&[d]]), true).unwrap();
        for (deg, group) in report.homology.iter() {
            for &t in &group.torsion {
                for &p in &report.inverted {
                    assert!(t % p != 0, "degree {deg}: factor {t} not prime to {p}");
                }
            }
        }
    }
}

#[test]
fn dilatation_homology_dies_after_inverting_the_eigenvalue_factors() {
    // multiplication by l on a rank-r lattice: all homology is killed by
    // inverting (l - 1), (l^2 - 1), ..., (l^r - 1)
    for (l, r) in [(2i64, 2usize), (3, 2), (2, 3), (5, 2)] {
        let mut m = IntMatrix::zero(r, r);
        for i in 0..r {
            m.set(i, i, l.into());
        }
        let report = two_term_homology(&m, false).unwrap();
        let mut primes: Vec<u64> = Vec::new();
        let mut power = 1i64;
        for _ in 0..r {
            power *= l;
            let mut v = (power - 1).unsigned_abs();
            let mut p = 2u64;
            while p * p <= v {
                if v % p == 0 {
                    primes.push(p);
                    while v % p == 0 {
                        v /= p;
                    }
                }
                p += 1;
            }
            if v > 1 {
                primes.push(v);
            }
        }
        for (deg, group) in report.homology.iter() {
            let killed = group.localized(&primes);
            assert!(
                killed.free == 0 && killed.torsion.is_empty(),
                "l = {l}, r = {r}, degree {deg}: {group} survives as {killed}"
            );
        }
    }
}
