//! Constructive realisations of the existence axioms: volume-driven
//! embeddings for EA specs (grid cells into gapped slots), strict squeezes
//! for S specs, tree-leaf congruences, and conjugators swapping disjoint
//! embeddings.

use crate::assembler::{AssemblerMode, AssemblerSpec, Span};
use crate::group::{
    box_to_box_map, compose_pieces, AffineMap, PieceMap, ScissorsAuto, ScissorsEmbedding,
    VerifyError,
};
use crate::polytope::{AxisBox, Cover, RectPolytope};
use crate::scalar::{Rat, Scalar};
use num::bigint::BigInt;
use num::One;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstructError {
    #[error("source volume must be strictly smaller than target volume")]
    VolumeNotSmaller,
    #[error("construction needs nonempty polytopes")]
    EmptyInput,
    #[error("spec is not in the required mode: {0}")]
    WrongMode(String),
    #[error("targets not reachable: {0}")]
    NotReachable(String),
    #[error("translation search failed: {0}")]
    TranslationSearchFailed(String),
    #[error("embeddings are not disjoint")]
    NotDisjoint,
    #[error("unsupported spec for this construction: {0}")]
    UnsupportedSpec(String),
    #[error("constructed element failed verification: {0}")]
    Verify(#[from] VerifyError),
}

fn require_cut_translations_compatible(spec: &AssemblerSpec) -> Result<(), ConstructError> {
    // piece corners live in the cut groups and slot translations are
    // differences of corners, so the cut group must sit inside the
    // translation group
    for axis in 0..spec.dim() {
        for b in spec.cut_group(axis).basis.basis() {
            if !spec.translations(axis).contains(b) {
                return Err(ConstructError::UnsupportedSpec(format!(
                    "cut group on axis {axis} is not contained in the translation group"
                )));
            }
        }
        if spec.cut_group(axis).ring != spec.translations(axis).ring {
            return Err(ConstructError::UnsupportedSpec(format!(
                "cut and translation rings differ on axis {axis}"
            )));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// EA embeddings from volume

/// Volume-driven embedding for EA specs: cut the source into grid cells of
/// side at most `1/m` along cut-group coordinates, and translate each cell
/// into its own gapped slot inside the target.  The grid parameter doubles
/// until the exact cell count fits the exact slot count, which the volume
/// gap guarantees.
pub fn construct_embedding_ea(
    p: &RectPolytope,
    q: &RectPolytope,
    spec: &AssemblerSpec,
) -> Result<ScissorsEmbedding, ConstructError> {
    if spec.mode() != AssemblerMode::Ea {
        return Err(ConstructError::WrongMode("expected an EA spec".into()));
    }
    require_cut_translations_compatible(spec)?;
    let vol_p = p.volume();
    let vol_q = q.volume();
    if vol_p >= vol_q {
        return Err(ConstructError::VolumeNotSmaller);
    }
    if p.is_empty() {
        let e = ScissorsEmbedding::from_pieces(spec.clone(), p.clone(), q.clone(), Vec::new())?;
        return Ok(e);
    }
    let n = spec.dim();

    // a rational lower bound rho > 1 for the volume ratio fixes the
    // expansion budget epsilon
    let ratio = vol_q.clone() / vol_p.clone();
    let rho = rational_lower_bound_above_one(&ratio);
    let one = Rat::one();
    let eps_budget = (&rho - &one) / Rat::from_integer(BigInt::from(16 * n as i64));
    let eps_cap = Rat::new(BigInt::one(), BigInt::from(16 * n as i64));
    let eps = if eps_budget < eps_cap {
        eps_budget
    } else {
        eps_cap
    };
    let eps = Scalar::from_rational(eps);

    let mut m: u64 = 1;
    loop {
        let h = Scalar::from_frac(1, m as i64);
        let cells = source_cells(spec, p, &h, &eps)?;
        let slots = target_slots(spec, q, &h, &eps)?;
        if cells.len() <= slots.len() {
            let pieces = cells
                .into_iter()
                .zip(slots)
                .map(|(cell, slot)| {
                    let t: Vec<Scalar> = (0..n).map(|a| slot.lo(a) - cell.lo(a)).collect();
                    PieceMap::new(cell, AffineMap::translation(t))
                })
                .collect();
            let e = ScissorsEmbedding::from_pieces(spec.clone(), p.clone(), q.clone(), pieces)?;
            e.verify()?;
            return Ok(e);
        }
        m = m.checked_mul(2).ok_or_else(|| {
            ConstructError::TranslationSearchFailed("grid parameter overflow".into())
        })?;
        if m > 1 << 20 {
            return Err(ConstructError::TranslationSearchFailed(
                "grid refinement did not converge".into(),
            ));
        }
    }
}

/// Cut every box of `p` along cut-group coordinates into cells with sides in
/// `(h(1 - 2eps), h]`, except possibly shorter trailing cells.
fn source_cells(
    spec: &AssemblerSpec,
    p: &RectPolytope,
    h: &Scalar,
    eps: &Scalar,
) -> Result<Vec<AxisBox>, ConstructError> {
    let n = spec.dim();
    let lower = h - &(Scalar::from_int(2) * eps.clone() * h.clone());
    let mut cells = Vec::new();
    for b in p.boxes() {
        let mut per_axis: Vec<Vec<(Scalar, Scalar)>> = Vec::with_capacity(n);
        for axis in 0..n {
            let mut cuts = Vec::new();
            let mut cursor = b.lo(axis).clone();
            while &(b.hi(axis) - &cursor) > h {
                let window_lo = &cursor + &lower;
                let window_hi = &cursor + h;
                let cut = spec
                    .cut_group(axis)
                    .find_between(&window_lo, &window_hi)
                    .map_err(|e| ConstructError::TranslationSearchFailed(e.to_string()))?;
                cuts.push((cursor.clone(), cut.clone()));
                cursor = cut;
            }
            cuts.push((cursor, b.hi(axis).clone()));
            per_axis.push(cuts);
        }
        push_axis_products(&per_axis, &mut Vec::new(), &mut cells);
    }
    Ok(cells)
}

/// Fill every box of `q` with a lattice of slots of side in `(h, h(1+eps))`
/// separated by gaps, all coordinates in the cut groups.
fn target_slots(
    spec: &AssemblerSpec,
    q: &RectPolytope,
    h: &Scalar,
    eps: &Scalar,
) -> Result<Vec<AxisBox>, ConstructError> {
    let n = spec.dim();
    let mut slots = Vec::new();
    for b in q.boxes() {
        let mut per_axis: Vec<Vec<(Scalar, Scalar)>> = Vec::with_capacity(n);
        for axis in 0..n {
            let group = spec.cut_group(axis);
            let eh = eps * h;
            let half = eh.clone() / Scalar::from_int(2);
            // slot size and gap picked from the group as differences from a
            // fixed group element, so slot corners stay in the group
            let size = group
                .find_between(&(h + &half), &(h + &eh))
                .map_err(|e| ConstructError::TranslationSearchFailed(e.to_string()))?;
            let gap = group
                .find_between(&half, &eh)
                .map_err(|e| ConstructError::TranslationSearchFailed(e.to_string()))?;
            let mut positions = Vec::new();
            let mut start = b.lo(axis) + &gap;
            loop {
                let end = &start + &size;
                if &(&end + &gap) > b.hi(axis) {
                    break;
                }
                positions.push((start.clone(), end.clone()));
                start = end + gap.clone();
            }
            if positions.is_empty() {
                break;
            }
            per_axis.push(positions);
        }
        if per_axis.len() == n {
            push_axis_products(&per_axis, &mut Vec::new(), &mut slots);
        }
    }
    Ok(slots)
}

fn push_axis_products(
    per_axis: &[Vec<(Scalar, Scalar)>],
    prefix: &mut Vec<(Scalar, Scalar)>,
    out: &mut Vec<AxisBox>,
) {
    if prefix.len() == per_axis.len() {
        out.push(AxisBox::new(prefix.clone()).expect("nondegenerate"));
        return;
    }
    for iv in &per_axis[prefix.len()] {
        prefix.push(iv.clone());
        push_axis_products(per_axis, prefix, out);
        prefix.pop();
    }
}

fn rational_lower_bound_above_one(x: &Scalar) -> Rat {
    if let Some(r) = x.as_rational() {
        return r;
    }
    let mut bits = 32;
    loop {
        let (lo, _) = x.bounds(bits);
        if lo > Rat::one() {
            return lo;
        }
        bits *= 2;
    }
}

// ---------------------------------------------------------------------------
// S-mode squeezes

/// Strict squeeze for S specs: shrink every box of the source by a power of
/// the axis shrink factors and stack the shrunk boxes inside half of the
/// largest box of the target.  The complement is always nonempty.
pub fn construct_embedding_squeeze(
    p: &RectPolytope,
    q: &RectPolytope,
    spec: &AssemblerSpec,
) -> Result<ScissorsEmbedding, ConstructError> {
    if spec.mode() != AssemblerMode::S {
        return Err(ConstructError::WrongMode("expected an S spec".into()));
    }
    require_cut_translations_compatible(spec)?;
    if p.is_empty() || q.is_empty() {
        return Err(ConstructError::EmptyInput);
    }
    let n = spec.dim();
    let target = q
        .boxes()
        .iter()
        .max_by(|a, b| a.volume().cmp(&b.volume()))
        .expect("nonempty")
        .clone();
    let sigma: Vec<Scalar> = (0..n)
        .map(|axis| spec.sigma(axis).expect("S spec has shrink factors"))
        .collect();

    let mut k = 1u32;
    'search: loop {
        if k > 128 {
            return Err(ConstructError::TranslationSearchFailed(
                "squeeze exponent overflow".into(),
            ));
        }
        let shrink: Vec<Scalar> = sigma
            .iter()
            .map(|s| {
                let mut v = Scalar::one();
                for _ in 0..k {
                    v = v * s.clone();
                }
                v
            })
            .collect();
        // stacked width along axis 0 must fit into half the target box, and
        // every other extent into half its side
        let mut total_width = Scalar::zero();
        for b in p.boxes() {
            total_width = total_width + shrink[0].clone() * b.side(0);
            for axis in 1..n {
                let extent = shrink[axis].clone() * b.side(axis);
                if extent > target.side(axis) / Scalar::from_int(2) {
                    k += 1;
                    continue 'search;
                }
            }
        }
        if total_width > target.side(0) / Scalar::from_int(2) {
            k += 1;
            continue 'search;
        }

        let mut pieces = Vec::new();
        let mut cursor = target.lo(0).clone();
        for b in p.boxes() {
            let mut translate = Vec::with_capacity(n);
            for axis in 0..n {
                let place = if axis == 0 {
                    cursor.clone()
                } else {
                    target.lo(axis).clone()
                };
                translate.push(place - (&shrink[axis] * b.lo(axis)));
            }
            let map = AffineMap {
                perm: (0..n).collect(),
                scales: shrink.clone(),
                translate,
            };
            cursor = &cursor + &(shrink[0].clone() * b.side(0));
            pieces.push(PieceMap::new(b.clone(), map));
        }
        let e = ScissorsEmbedding::from_pieces(spec.clone(), p.clone(), q.clone(), pieces)?;
        e.verify()?;
        return Ok(e);
    }
}

// ---------------------------------------------------------------------------
// Tree-leaf congruences

/// Scissors congruence between any two nonempty polytopes of an S spec:
/// decompose both into standard cells, equalize leaf counts by splitting the
/// lexicographically first leaf of the smaller side, then match leaves in
/// lexicographic order.  Running the construction with the arguments swapped
/// produces the inverse congruence.
pub fn construct_congruence(
    p: &RectPolytope,
    q: &RectPolytope,
    spec: &AssemblerSpec,
) -> Result<Span, ConstructError> {
    if spec.mode() != AssemblerMode::S {
        return Err(ConstructError::WrongMode("expected an S spec".into()));
    }
    require_cut_translations_compatible(spec)?;
    if p.is_empty() || q.is_empty() {
        return Err(ConstructError::EmptyInput);
    }
    if p.same_point_set(q) {
        return Ok(Span::identity(spec.clone(), p.clone()));
    }
    let mut leaves_p = spec.standard_leaves(p);
    let mut leaves_q = spec.standard_leaves(q);
    leaves_p.sort();
    leaves_q.sort();

    // splitting one leaf along axis 0 adds (branch - 1) leaves, so counts
    // must agree modulo that; this is the K0 obstruction for d-ary specs
    let branch = spec
        .split_interval_cells(0, &Scalar::zero(), &Scalar::one())
        .len();
    let step = branch - 1;
    let (small, large) = if leaves_p.len() <= leaves_q.len() {
        (&mut leaves_p, &mut leaves_q)
    } else {
        (&mut leaves_q, &mut leaves_p)
    };
    let deficit = large.len() - small.len();
    if step == 0 || deficit % step != 0 {
        return Err(ConstructError::NotReachable(format!(
            "leaf counts differ by {deficit}, not a multiple of {step}"
        )));
    }
    while small.len() < large.len() {
        let leaf = small.remove(0);
        let children = spec.split_interval_cells(0, leaf.lo(0), leaf.hi(0));
        for (a, c) in children {
            let mut intervals = leaf.intervals().to_vec();
            intervals[0] = (a, c);
            small.push(AxisBox::new(intervals).expect("nondegenerate"));
        }
        small.sort();
    }

    let pieces = leaves_p
        .iter()
        .zip(&leaves_q)
        .map(|(src, dst)| PieceMap::new(src.clone(), box_to_box_map(spec.dim(), src, dst)))
        .collect();
    let span = Span::from_pieces(spec.clone(), p.clone(), q.clone(), pieces);
    span.verify()?;
    Ok(span)
}

// ---------------------------------------------------------------------------
// Conjugators

/// The automorphism of the common target that swaps the images of two
/// disjoint embeddings of the same source and fixes everything else.
/// Satisfies `h . e1 = e2` as embeddings.
pub fn conjugator_from_disjoint(
    e1: &ScissorsEmbedding,
    e2: &ScissorsEmbedding,
) -> Result<ScissorsAuto, ConstructError> {
    if !e1.source.same_point_set(&e2.source) || !e1.target.same_point_set(&e2.target) {
        return Err(ConstructError::NotDisjoint);
    }
    if !e1.disjoint_from(e2) {
        return Err(ConstructError::NotDisjoint);
    }
    let dim = e1.source.dim();
    let q = &e1.target;

    // common refinement of the two source covers, transported both ways
    let mut pieces = Vec::new();
    for p1 in e1.pieces() {
        for p2 in e2.pieces() {
            let Some(cell) = p1.source.intersect(&p2.source) else {
                continue;
            };
            let fwd = p1.map.inverse().then(&p2.map);
            pieces.push(PieceMap::new(p1.map.image_box(&cell), fwd));
            let back = p2.map.inverse().then(&p1.map);
            pieces.push(PieceMap::new(p2.map.image_box(&cell), back));
        }
    }
    let occupied = e1
        .image_polytope()
        .union_disjoint(&e2.image_polytope())
        .expect("disjoint images");
    let rest = q.subtract(&occupied).expect("images inside target");
    let id = AffineMap::identity(dim);
    for b in rest.boxes() {
        pieces.push(PieceMap::new(b.clone(), id.clone()));
    }
    let h = ScissorsAuto::from_pieces(e1.spec.clone(), q.clone(), pieces);
    h.verify()?;
    Ok(h)
}

/// Post-compose an embedding with an automorphism of its target.
pub fn embedding_then_auto(
    e: &ScissorsEmbedding,
    h: &ScissorsAuto,
) -> Result<ScissorsEmbedding, ConstructError> {
    if !e.target.same_point_set(&h.base) {
        return Err(ConstructError::NotDisjoint);
    }
    let dim = e.source.dim();
    let pieces = compose_pieces(e.pieces(), h.pieces(), dim);
    Ok(ScissorsEmbedding::from_pieces(
        e.spec.clone(),
        e.source.clone(),
        e.target.clone(),
        pieces,
    )?)
}

// ---------------------------------------------------------------------------
// Archimedean subdivision

/// Cover `q` by pieces of volume at most half the bound, cutting along
/// cut-group coordinates near the middle of the longest axis.
pub fn archimedean_cover(
    spec: &AssemblerSpec,
    q: &RectPolytope,
    volume_bound: &Scalar,
) -> Result<Cover, ConstructError> {
    let limit = volume_bound.clone() / Scalar::from_int(2);
    if limit <= Scalar::zero() {
        return Err(ConstructError::EmptyInput);
    }
    let mut done = Vec::new();
    let mut work: Vec<AxisBox> = q.boxes().to_vec();
    let mut steps = 0usize;
    while let Some(b) = work.pop() {
        steps += 1;
        if steps > 100_000 {
            return Err(ConstructError::TranslationSearchFailed(
                "archimedean subdivision did not terminate".into(),
            ));
        }
        if b.volume() <= limit {
            done.push(b);
            continue;
        }
        // cut the longest axis inside its middle third
        let axis = (0..b.dim())
            .max_by(|&i, &j| b.side(i).cmp(&b.side(j)))
            .expect("positive dimension");
        let third = b.side(axis) / Scalar::from_int(3);
        let window_lo = b.lo(axis) + &third;
        let window_hi = b.hi(axis) - &third;
        let cut = spec
            .cut_group(axis)
            .find_between(&window_lo, &window_hi)
            .map_err(|e| ConstructError::TranslationSearchFailed(e.to_string()))?;
        let mut left = b.intervals().to_vec();
        left[axis] = (b.lo(axis).clone(), cut.clone());
        let mut right = b.intervals().to_vec();
        right[axis] = (cut, b.hi(axis).clone());
        work.push(AxisBox::new(left).expect("nondegenerate"));
        work.push(AxisBox::new(right).expect("nondegenerate"));
    }
    Cover::new(
        q.clone(),
        done.into_iter().map(RectPolytope::from_box).collect(),
    )
    .map_err(|_| ConstructError::TranslationSearchFailed("subdivision lost volume".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembler::presets;
    use crate::scalar::CoefficientGroup;

    fn sf(n: i64, d: i64) -> Scalar {
        Scalar::from_frac(n, d)
    }

    fn iv(lo: Scalar, hi: Scalar) -> RectPolytope {
        RectPolytope::interval(lo, hi)
    }

    #[test]
    fn ea_embedding_simple() {
        let spec = presets::iet_rational();
        let p = iv(sf(0, 1), sf(1, 1));
        let q = iv(sf(0, 1), sf(3, 2));
        let e = construct_embedding_ea(&p, &q, &spec).unwrap();
        e.verify().unwrap();
        assert_eq!(e.complement().volume(), sf(1, 2));
    }

    #[test]
    fn ea_embedding_two_boxes() {
        let spec = presets::iet_rational();
        let p = RectPolytope::new(
            1,
            vec![
                AxisBox::interval(sf(0, 1), sf(1, 1)),
                AxisBox::interval(sf(2, 1), sf(5, 2)),
            ],
        )
        .unwrap();
        let q = iv(sf(0, 1), sf(7, 4));
        let e = construct_embedding_ea(&p, &q, &spec).unwrap();
        e.verify().unwrap();
        assert_eq!(e.complement().volume(), sf(1, 4));
    }

    #[test]
    fn ea_embedding_equal_volume_rejected() {
        let spec = presets::iet_rational();
        let p = iv(sf(0, 1), sf(1, 1));
        assert_eq!(
            construct_embedding_ea(&p, &p, &spec).unwrap_err(),
            ConstructError::VolumeNotSmaller
        );
    }

    #[test]
    fn ea_embedding_z_sqrt2_and_2d() {
        let z2 = presets::iet_zspan(CoefficientGroup::with_sqrt(2));
        let p = iv(sf(0, 1), sf(1, 1));
        let q = iv(sf(0, 1), Scalar::sqrt(2));
        let e = construct_embedding_ea(&p, &q, &z2).unwrap();
        e.verify().unwrap();
        assert_eq!(e.complement().volume(), Scalar::sqrt(2) - Scalar::one());

        let rec = presets::rec(2);
        let p2 = RectPolytope::unit(2);
        let q2 = RectPolytope::from_box(
            AxisBox::new(vec![(sf(0, 1), sf(3, 2)), (sf(0, 1), sf(1, 1))]).unwrap(),
        );
        let e2 = construct_embedding_ea(&p2, &q2, &rec).unwrap();
        e2.verify().unwrap();
        assert_eq!(p2.volume() + e2.complement().volume(), q2.volume());
    }

    #[test]
    fn squeeze_examples() {
        let dyadic = presets::higman(2);
        let p = iv(sf(0, 1), sf(1, 1));
        let small = iv(sf(0, 1), sf(1, 4));
        let e = construct_embedding_squeeze(&p, &small, &dyadic).unwrap();
        e.verify().unwrap();
        assert!(!e.complement().is_empty());

        let self_sq = construct_embedding_squeeze(&p, &p, &dyadic).unwrap();
        assert!(!self_sq.complement().is_empty());

        let empty = RectPolytope::empty(1);
        assert_eq!(
            construct_embedding_squeeze(&p, &empty, &dyadic).unwrap_err(),
            ConstructError::EmptyInput
        );
    }

    #[test]
    fn congruence_examples() {
        let dyadic = presets::higman(2);
        let unit = iv(sf(0, 1), sf(1, 1));
        let shorter = iv(sf(0, 1), sf(3, 4));
        let c = construct_congruence(&unit, &shorter, &dyadic).unwrap();
        c.verify().unwrap();

        let split = RectPolytope::new(
            1,
            vec![
                AxisBox::interval(sf(0, 1), sf(1, 1)),
                AxisBox::interval(sf(2, 1), sf(3, 1)),
            ],
        )
        .unwrap();
        let c2 = construct_congruence(&unit, &split, &dyadic).unwrap();
        c2.verify().unwrap();

        let id = construct_congruence(&unit, &unit, &dyadic).unwrap();
        assert!(id.to_auto().unwrap().is_identity());
    }

    #[test]
    fn congruence_round_trip_is_identity() {
        let dyadic = presets::higman(2);
        let a = iv(sf(0, 1), sf(1, 1));
        let b = iv(sf(0, 1), sf(5, 8));
        let fwd = construct_congruence(&a, &b, &dyadic).unwrap();
        let back = construct_congruence(&b, &a, &dyadic).unwrap();
        let round = fwd.then(&back).unwrap();
        assert!(round.to_auto().unwrap().is_identity());
    }

    #[test]
    fn congruence_k0_obstruction() {
        // ternary: [0,1] has 1 leaf, [0,1] u [2,3] has 2; 1 != 2 mod 2
        let ternary = presets::higman(3);
        let unit = iv(sf(0, 1), sf(1, 1));
        let two = RectPolytope::new(
            1,
            vec![
                AxisBox::interval(sf(0, 1), sf(1, 1)),
                AxisBox::interval(sf(2, 1), sf(3, 1)),
            ],
        )
        .unwrap();
        assert!(matches!(
            construct_congruence(&unit, &two, &ternary).unwrap_err(),
            ConstructError::NotReachable(_)
        ));
        // three copies are reachable: 3 - 1 is a multiple of 2
        let three = RectPolytope::new(
            1,
            vec![
                AxisBox::interval(sf(0, 1), sf(1, 1)),
                AxisBox::interval(sf(2, 1), sf(3, 1)),
                AxisBox::interval(sf(4, 1), sf(5, 1)),
            ],
        )
        .unwrap();
        construct_congruence(&unit, &three, &ternary).unwrap();
    }

    #[test]
    fn v_tau_congruence() {
        let vt = presets::v_tau();
        let unit = iv(sf(0, 1), sf(1, 1));
        let golden = iv(sf(0, 1), Scalar::one() + Scalar::tau());
        let c = construct_congruence(&unit, &golden, &vt).unwrap();
        c.verify().unwrap();
    }

    #[test]
    fn conjugator_swaps_disjoint_inclusions() {
        let spec = presets::iet_rational();
        let p = iv(sf(0, 1), sf(1, 1));
        let q = iv(sf(0, 1), sf(2, 1));
        let e1 = ScissorsEmbedding::inclusion(spec.clone(), p.clone(), q.clone()).unwrap();
        // e2 shifts [0,1] to [1,2]
        let pieces = vec![PieceMap::new(
            AxisBox::interval(sf(0, 1), sf(1, 1)),
            AffineMap::translation(vec![sf(1, 1)]),
        )];
        let e2 = ScissorsEmbedding::from_pieces(spec, p, q, pieces).unwrap();
        let h = conjugator_from_disjoint(&e1, &e2).unwrap();
        h.verify().unwrap();
        let moved = embedding_then_auto(&e1, &h).unwrap();
        assert_eq!(moved, e2);
        // self against self is not disjoint
        assert_eq!(
            conjugator_from_disjoint(&e1, &e1).unwrap_err(),
            ConstructError::NotDisjoint
        );
    }

    #[test]
    fn archimedean_cover_bisection() {
        let spec = presets::iet_rational();
        let q = iv(sf(0, 1), sf(2, 1));
        let cover = archimedean_cover(&spec, &q, &sf(1, 2)).unwrap();
        for piece in cover.pieces() {
            assert!(piece.volume() <= sf(1, 4));
        }
    }
}
