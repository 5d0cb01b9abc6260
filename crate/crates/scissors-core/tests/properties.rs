//! Property tests for the exact arithmetic and the polytope calculus.

use num::bigint::BigInt;
use proptest::prelude::*;
use scissors_core::polytope::Cover;
use scissors_core::{AxisBox, CoefficientGroup, Rat, RectPolytope, Scalar};
use std::cmp::Ordering;

fn small_rat() -> impl Strategy<Value = Rat> {
    (-12i64..=12, 1i64..=6).prop_map(|(n, d)| Rat::new(BigInt::from(n), BigInt::from(d)))
}

/// Scalars supported on the radicands 1, 2, 3, 5.
fn scalar() -> impl Strategy<Value = Scalar> {
    (small_rat(), small_rat(), small_rat(), small_rat()).prop_map(|(a, b, c, d)| {
        Scalar::from_rational(a)
            + Scalar::surd(b, 2)
            + Scalar::surd(c, 3)
            + Scalar::surd(d, 5)
    })
}

fn positive_scalar() -> impl Strategy<Value = Scalar> {
    scalar().prop_map(|s| {
        if s > Scalar::zero() {
            s
        } else {
            s.abs() + Scalar::one()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(a.clone() + b.clone(), b.clone() + a.clone());
        prop_assert_eq!(
            (a.clone() + b.clone()) + c.clone(),
            a.clone() + (b.clone() + c.clone())
        );
        prop_assert_eq!(a.clone() * b.clone(), b.clone() * a.clone());
        prop_assert_eq!(
            (a.clone() * b.clone()) * c.clone(),
            a.clone() * (b.clone() * c.clone())
        );
        prop_assert_eq!(
            a.clone() * (b.clone() + c.clone()),
            a.clone() * b.clone() + a.clone() * c.clone()
        );
        prop_assert_eq!(a.clone() + (-a.clone()), Scalar::zero());
        if !b.is_zero() {
            prop_assert_eq!(b.clone() * (Scalar::one() / b.clone()), Scalar::one());
        }
    }

    #[test]
    fn order_is_total_and_compatible(a in scalar(), b in scalar(), c in positive_scalar()) {
        let ab = a.try_cmp(&b).unwrap();
        let ba = b.try_cmp(&a).unwrap();
        prop_assert_eq!(ab, ba.reverse());
        if ab == Ordering::Less {
            prop_assert_eq!(
                (a.clone() + c.clone()).try_cmp(&(b.clone() + c.clone())).unwrap(),
                Ordering::Less
            );
            prop_assert_eq!(
                (a.clone() * c.clone()).try_cmp(&(b.clone() * c.clone())).unwrap(),
                Ordering::Less
            );
        }
    }

    #[test]
    fn order_transitive(a in scalar(), b in scalar(), c in scalar()) {
        let mut v = vec![a, b, c];
        v.sort();
        prop_assert!(v[0] <= v[1] && v[1] <= v[2] && v[0] <= v[2]);
    }

    #[test]
    fn linearize_round_trip(c0 in small_rat(), c1 in small_rat()) {
        let gamma = CoefficientGroup::with_sqrt(2);
        let x = gamma.combine(&[c0.clone(), c1.clone()]);
        prop_assert_eq!(gamma.linearize(&x), Ok(vec![c0, c1]));
    }

    #[test]
    fn scalar_json_round_trip(x in scalar()) {
        let json = serde_json::to_string(&x).unwrap();
        let back: Scalar = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, x);
    }
}

// ---------------------------------------------------------------------------
// Polytope calculus on random 1-D and 2-D subdivisions

fn dyadic_points(max_den_pow: u32) -> impl Strategy<Value = Vec<Scalar>> {
    proptest::collection::btree_set(0u32..=16, 2..6).prop_map(move |set| {
        set.into_iter()
            .map(|k| Scalar::from_frac(k as i64, 1 << max_den_pow.min(4)))
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn refinement_preserves_volume(points_a in dyadic_points(3), points_b in dyadic_points(4)) {
        let lo = Scalar::zero();
        let hi = Scalar::from_int(5);
        let target = RectPolytope::interval(lo.clone(), hi.clone());
        let cover_from = |points: &[Scalar]| {
            let mut cuts: Vec<Scalar> = points
                .iter()
                .filter(|p| **p > lo && **p < hi)
                .cloned()
                .collect();
            cuts.sort();
            cuts.dedup();
            let pieces = target
                .grid_cells(&[cuts])
                .into_iter()
                .map(RectPolytope::from_box)
                .collect();
            Cover::new(target.clone(), pieces).unwrap()
        };
        let a = cover_from(&points_a);
        let b = cover_from(&points_b);
        let refined = a.refine_common(&b).unwrap();
        let total = refined
            .pieces()
            .iter()
            .fold(Scalar::zero(), |acc, p| acc + p.volume());
        prop_assert_eq!(total, target.volume());
        // every refined piece sits inside exactly one piece of each input
        for piece in refined.pieces() {
            let in_a = a.pieces().iter().filter(|p| p.contains(piece)).count();
            let in_b = b.pieces().iter().filter(|p| p.contains(piece)).count();
            prop_assert_eq!((in_a, in_b), (1, 1));
        }
    }

    #[test]
    fn canonicalize_idempotent_2d(xs in dyadic_points(2), ys in dyadic_points(2), mask in 1u32..14) {
        // an arbitrary union of grid cells of the induced grid
        let frame = RectPolytope::from_box(
            AxisBox::new(vec![
                (Scalar::zero(), Scalar::from_int(5)),
                (Scalar::zero(), Scalar::from_int(5)),
            ])
            .unwrap(),
        );
        let clamp = |points: Vec<Scalar>| -> Vec<Scalar> {
            points
                .into_iter()
                .filter(|p| *p > Scalar::zero() && *p < Scalar::from_int(5))
                .collect()
        };
        let cells = frame.grid_cells(&[clamp(xs), clamp(ys)]);
        let chosen: Vec<AxisBox> = cells
            .into_iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << (i % 14)) != 0)
            .map(|(_, c)| c)
            .collect();
        prop_assume!(!chosen.is_empty());
        let p = RectPolytope::new(2, chosen).unwrap();
        let canon = p.canonicalize();
        prop_assert_eq!(canon.clone(), canon.canonicalize());
        prop_assert_eq!(canon.volume(), p.volume());
        prop_assert!(canon.same_point_set(&p));
    }

    #[test]
    fn subtract_then_union_restores(cut in 1u32..9) {
        let q = RectPolytope::from_box(
            AxisBox::new(vec![
                (Scalar::zero(), Scalar::from_int(10)),
                (Scalar::zero(), Scalar::from_int(3)),
            ])
            .unwrap(),
        );
        let p = RectPolytope::from_box(
            AxisBox::new(vec![
                (Scalar::from_int(cut as i64), Scalar::from_int(cut as i64 + 1)),
                (Scalar::one(), Scalar::from_int(2)),
            ])
            .unwrap(),
        );
        let r = q.subtract(&p).unwrap();
        prop_assert_eq!(r.volume() + p.volume(), q.volume());
        let back = r.union_disjoint(&p).unwrap();
        prop_assert!(back.same_point_set(&q));
    }
}
