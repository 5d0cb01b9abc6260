//! Abelianization invariants of scissors automorphisms: the wedge-valued
//! sum of `length ^ translation` over pieces for interval exchanges, its
//! rectangle-exchange generalisation, wedge-class realisation, and a checker
//! for the three K1 presentation relations.
//!
//! The exterior square is the tensor square modulo `x (x) x`, so
//! `1 ^ a - a ^ 1 = 2 (1 ^ a)`; a vector wedge expands as
//! `u ^ v = sum_{i<j} (u_i v_j - u_j v_i) e_i ^ e_j`.

use crate::assembler::{presets, Span};
use crate::group::{random_auto, PieceMap, ScissorsAuto};
use crate::polytope::RectPolytope;
use crate::scalar::{CoefficientGroup, Rat, Scalar};
use num::bigint::BigInt;
use num::Zero;
use serde::ser::SerializeSeq;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvariantError {
    #[error("value lies outside the span of the coefficient group")]
    NotInSpan,
    #[error("invariant needs a piecewise translation in dimension {expected}")]
    WrongShape { expected: usize },
}

fn bump<K: Ord>(map: &mut BTreeMap<K, Rat>, key: K, c: Rat) {
    if c.is_zero() {
        return;
    }
    match map.entry(key) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Exterior square elements

/// Sparse element of `Λ²(Q^d)` on the basis `e_i ^ e_j`, `i < j`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WedgeElement {
    dim: usize,
    coeffs: BTreeMap<(usize, usize), Rat>,
}

impl WedgeElement {
    pub fn zero(dim: usize) -> Self {
        WedgeElement {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn single(dim: usize, i: usize, j: usize, c: Rat) -> Self {
        assert!(i < j && j < dim);
        let mut w = WedgeElement::zero(dim);
        w.add_coeff(i, j, c);
        w
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize, j: usize) -> Rat {
        self.coeffs.get(&(i, j)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = ((usize, usize), &Rat)> {
        self.coeffs.iter().map(|(k, v)| (*k, v))
    }

    fn add_coeff(&mut self, i: usize, j: usize, c: Rat) {
        bump(&mut self.coeffs, (i, j), c);
    }

    /// `u ^ v` expanded on the pair basis.
    pub fn wedge_of(u: &[Rat], v: &[Rat]) -> WedgeElement {
        assert_eq!(u.len(), v.len());
        let dim = u.len();
        let mut w = WedgeElement::zero(dim);
        for i in 0..dim {
            for j in i + 1..dim {
                let c = &u[i] * &v[j] - &u[j] * &v[i];
                w.add_coeff(i, j, c);
            }
        }
        w
    }

    pub fn add(&self, other: &WedgeElement) -> WedgeElement {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for ((i, j), c) in &other.coeffs {
            out.add_coeff(*i, *j, c.clone());
        }
        out
    }

    pub fn neg(&self) -> WedgeElement {
        WedgeElement {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, v)| (*k, -v.clone()))
                .collect(),
        }
    }

    /// Coefficient vectors stacked as rows, for rank computations.
    pub fn as_dense(&self) -> Vec<Rat> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                out.push(self.coeff(i, j));
            }
        }
        out
    }
}

impl fmt::Display for WedgeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (idx, ((i, j), c)) in self.coeffs.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*(e{i}^e{j})")?;
        }
        Ok(())
    }
}

impl Serialize for WedgeElement {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(untagged)]
        enum Int {
            Small(i64),
            Big(String),
        }
        fn int(v: &BigInt) -> Int {
            match i64::try_from(v) {
                Ok(s) => Int::Small(s),
                Err(_) => Int::Big(v.to_string()),
            }
        }
        #[derive(Serialize)]
        struct Entry {
            pair: [usize; 2],
            num: Int,
            den: Int,
        }
        let mut seq = serializer.serialize_seq(Some(self.coeffs.len()))?;
        for ((i, j), c) in &self.coeffs {
            seq.serialize_element(&Entry {
                pair: [*i, *j],
                num: int(c.numer()),
                den: int(c.denom()),
            })?;
        }
        seq.end()
    }
}

// ---------------------------------------------------------------------------
// The interval-exchange invariant

/// Sum of `length ^ translation` over the pieces, expanded in the
/// coefficient group.  Refinement-invariant (bilinear in the length slot)
/// and additive under composition.
pub fn saf(f: &ScissorsAuto, gamma: &CoefficientGroup) -> Result<WedgeElement, InvariantError> {
    saf_of_pieces(f.pieces(), gamma)
}

/// The same sum over an explicit piece list; presentations with finer cuts
/// give the same value.
pub fn saf_of_pieces(
    pieces: &[PieceMap],
    gamma: &CoefficientGroup,
) -> Result<WedgeElement, InvariantError> {
    let d = gamma.dim();
    let mut acc = WedgeElement::zero(d);
    for p in pieces {
        if p.map.dim() != 1 {
            return Err(InvariantError::WrongShape { expected: 1 });
        }
        if !p.map.scales[0].is_one() {
            return Err(InvariantError::WrongShape { expected: 1 });
        }
        let length = p.source.side(0);
        let translation = &p.map.translate[0];
        let u = gamma
            .linearize(&length)
            .map_err(|_| InvariantError::NotInSpan)?;
        let v = gamma
            .linearize(translation)
            .map_err(|_| InvariantError::NotInSpan)?;
        acc = acc.add(&WedgeElement::wedge_of(&u, &v));
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// The rectangle-exchange invariant

/// Per-axis component of the rectangle-exchange invariant: an element of
/// `Λ²(Q^{d_i}) (x) (x)_{j != i} Q^{d_j}`, stored sparsely over
/// pair-and-multi-index keys.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct RecComponent {
    pub coeffs: BTreeMap<String, Rat>,
}

/// One component per axis: component `i` sums
/// `(length_i ^ translation_i) (x) (tensor of the other axis lengths)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecInvariant {
    pub components: Vec<RecComponent>,
}

impl RecInvariant {
    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.coeffs.is_empty())
    }

    pub fn add(&self, other: &RecInvariant) -> RecInvariant {
        assert_eq!(self.components.len(), other.components.len());
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| {
                let mut coeffs = a.coeffs.clone();
                for (k, v) in &b.coeffs {
                    bump(&mut coeffs, k.clone(), v.clone());
                }
                RecComponent { coeffs }
            })
            .collect();
        RecInvariant { components }
    }

    /// Component coefficient keyed by wedge pair and multi-index.
    pub fn coeff(&self, axis: usize, pair: (usize, usize), multi: &[usize]) -> Rat {
        self.components[axis]
            .coeffs
            .get(&key_of(pair, multi))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }
}

fn key_of(pair: (usize, usize), multi: &[usize]) -> String {
    let tail: Vec<String> = multi.iter().map(|k| k.to_string()).collect();
    format!("{}^{}|{}", pair.0, pair.1, tail.join(","))
}

pub fn rec_invariant(
    f: &ScissorsAuto,
    gammas: &[CoefficientGroup],
) -> Result<RecInvariant, InvariantError> {
    let n = gammas.len();
    let mut components = vec![RecComponent::default(); n];
    for p in f.pieces() {
        if p.map.dim() != n {
            return Err(InvariantError::WrongShape { expected: n });
        }
        if p.map.scales.iter().any(|s| !s.is_one()) {
            return Err(InvariantError::WrongShape { expected: n });
        }
        // coordinates of every axis length and translation
        let mut lengths = Vec::with_capacity(n);
        let mut translations = Vec::with_capacity(n);
        for axis in 0..n {
            lengths.push(
                gammas[axis]
                    .linearize(&p.source.side(axis))
                    .map_err(|_| InvariantError::NotInSpan)?,
            );
            translations.push(
                gammas[axis]
                    .linearize(&p.map.translate[axis])
                    .map_err(|_| InvariantError::NotInSpan)?,
            );
        }
        for axis in 0..n {
            let wedge = WedgeElement::wedge_of(&lengths[axis], &translations[axis]);
            if wedge.is_zero() {
                continue;
            }
            let others: Vec<usize> = (0..n).filter(|&j| j != axis).collect();
            let mut multi = vec![0usize; others.len()];
            accumulate_tensor(
                &mut components[axis],
                &wedge,
                &others,
                &lengths,
                &mut multi,
                0,
                &Rat::from_integer(BigInt::from(1)),
            );
        }
    }
    Ok(RecInvariant { components })
}

fn accumulate_tensor(
    component: &mut RecComponent,
    wedge: &WedgeElement,
    others: &[usize],
    lengths: &[Vec<Rat>],
    multi: &mut Vec<usize>,
    depth: usize,
    factor: &Rat,
) {
    if factor.is_zero() {
        return;
    }
    if depth == others.len() {
        for (pair, c) in wedge.coeffs() {
            bump(&mut component.coeffs, key_of(pair, multi), c * factor);
        }
        return;
    }
    let axis = others[depth];
    for (k, c) in lengths[axis].iter().enumerate() {
        multi[depth] = k;
        accumulate_tensor(
            component,
            wedge,
            others,
            lengths,
            multi,
            depth + 1,
            &(factor * c),
        );
    }
}

// ---------------------------------------------------------------------------
// Realising wedge classes

/// An interval exchange on `[0, 1]` whose invariant is a nonzero rational
/// multiple of `e_i ^ e_j`: a rotation by a scaled copy of `basis_j` inside
/// a window of length a scaled copy of `basis_i`.  Returns the element and
/// the multiple.
pub fn realize_wedge(i: usize, j: usize, gamma: &CoefficientGroup) -> (ScissorsAuto, Rat) {
    assert!(i < j && j < gamma.dim());
    let spec = presets::iet_group(gamma.clone());
    let quarter = Scalar::from_frac(1, 4);

    // scale basis_i into (0, 1/4], flipping sign if needed
    let scale_into = |x: &Scalar| -> (Scalar, Rat) {
        let mut value = x.clone();
        let mut factor = Rat::from_integer(BigInt::from(1));
        if value < Scalar::zero() {
            value = -value;
            factor = -factor;
        }
        while value > quarter {
            value = value / Scalar::from_int(2);
            factor /= BigInt::from(2);
        }
        (value, factor)
    };
    let (window, alpha) = scale_into(&gamma.basis()[i].clone());
    let (mut rot_by, mut beta) = scale_into(&gamma.basis()[j].clone());
    // the rotation amount must sit strictly inside the window
    while rot_by >= window {
        rot_by = rot_by / Scalar::from_int(2);
        beta /= BigInt::from(2);
    }

    let mut pieces = ScissorsAuto::rotation(spec.clone(), Scalar::zero(), window.clone(), rot_by)
        .pieces()
        .to_vec();
    if window < Scalar::one() {
        pieces.push(PieceMap::new(
            crate::polytope::AxisBox::interval(window, Scalar::one()),
            crate::group::AffineMap::identity(1),
        ));
    }
    let f = ScissorsAuto::from_pieces(spec, RectPolytope::unit(1), pieces);
    let c = Rat::from_integer(BigInt::from(2)) * alpha * beta;
    (f, c)
}

// ---------------------------------------------------------------------------
// K1 relation checker

#[derive(Debug, Clone, Serialize)]
pub struct K1Report {
    pub samples: usize,
    pub violations: Vec<String>,
}

impl K1Report {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Sample the three relations presenting K1 under the invariant:
/// (A) spans with equal legs map to zero, (B) composition maps to addition,
/// (C) disjoint union maps to addition.
pub fn check_k1_relations(gamma: &CoefficientGroup, seed: u64, count: usize) -> K1Report {
    let spec = presets::iet_group(gamma.clone());
    let base = RectPolytope::unit(1);
    let far = RectPolytope::interval(Scalar::from_int(2), Scalar::from_int(3));
    let mut violations = Vec::new();

    for s in 0..count as u64 {
        let f = random_auto(&spec, &base, seed ^ (2 * s + 1), 3);
        let g = random_auto(&spec, &base, seed ^ (2 * s + 2), 3);

        // (A): a zig-zag with both legs equal to f's cover maps represents
        // the identity morphism; each middle piece contributes f . f^{-1}
        let equal_legs: Vec<PieceMap> = f
            .pieces()
            .iter()
            .map(|p| {
                PieceMap::new(
                    p.image(),
                    p.map.inverse().then(&p.map),
                )
            })
            .collect();
        let span = Span::from_pieces(spec.clone(), base.clone(), base.clone(), equal_legs);
        if !span.span_equal(&Span::identity(spec.clone(), base.clone())) {
            violations.push(format!("(A) seed {s}: equal-leg span is not the identity"));
        }
        match saf_of_pieces(span.pieces(), gamma) {
            Ok(w) if w.is_zero() => {}
            Ok(w) => violations.push(format!("(A) seed {s}: equal-leg span has invariant {w}")),
            Err(e) => violations.push(format!("(A) seed {s}: {e}")),
        }

        // (B): additivity under composition
        let composed = f.then(&g).expect("same base");
        match (saf(&f, gamma), saf(&g, gamma), saf(&composed, gamma)) {
            (Ok(a), Ok(b), Ok(c)) => {
                if c != a.add(&b) {
                    violations.push(format!(
                        "(B) seed {s}: saf(g.f) = {c} but saf(f) + saf(g) = {}",
                        a.add(&b)
                    ));
                }
            }
            _ => violations.push(format!("(B) seed {s}: invariant undefined")),
        }

        // (C): additivity over disjoint union
        let h = {
            let raw = random_auto(&spec, &far, seed ^ (2 * s + 2), 3);
            raw
        };
        let union = f.disjoint_union(&h).expect("disjoint bases");
        match (saf(&f, gamma), saf(&h, gamma), saf(&union, gamma)) {
            (Ok(a), Ok(b), Ok(c)) => {
                if c != a.add(&b) {
                    violations.push(format!("(C) seed {s}: disjoint union not additive"));
                }
            }
            _ => violations.push(format!("(C) seed {s}: invariant undefined")),
        }
    }
    K1Report {
        samples: count,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::ScissorsAuto;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    fn sqrt2_group() -> CoefficientGroup {
        CoefficientGroup::with_sqrt(2)
    }

    fn rot(t: Scalar, gamma: &CoefficientGroup) -> ScissorsAuto {
        ScissorsAuto::rotation(
            presets::iet_group(gamma.clone()),
            Scalar::zero(),
            Scalar::one(),
            t,
        )
    }

    /// Independent oracle: expand `x ^ y` for 2-coordinate vectors by the
    /// antisymmetrized tensor formula, without going through WedgeElement.
    fn wedge_2d_oracle(x: (Rat, Rat), y: (Rat, Rat)) -> Rat {
        // coefficient on e0 ^ e1 of (x0 e0 + x1 e1) ^ (y0 e0 + y1 e1)
        &x.0 * &y.1 - &x.1 * &y.0
    }

    #[test]
    fn saf_identity_is_zero() {
        let gamma = sqrt2_group();
        let id = ScissorsAuto::identity(
            presets::iet_group(gamma.clone()),
            RectPolytope::unit(1),
        );
        assert!(saf(&id, &gamma).unwrap().is_zero());
    }

    #[test]
    fn saf_rational_rotation_vanishes() {
        let gamma = sqrt2_group();
        let f = rot(Scalar::from_frac(1, 2), &gamma);
        assert!(saf(&f, &gamma).unwrap().is_zero());
    }

    #[test]
    fn saf_of_sqrt2_rotation() {
        // rot(alpha), alpha = sqrt2 - 1: pieces (1 - alpha, +alpha) and
        // (alpha, alpha - 1); oracle expansion gives 2 e0 ^ e1
        let gamma = sqrt2_group();
        let alpha = Scalar::sqrt(2) - Scalar::one();
        let f = rot(alpha, &gamma);
        let w = saf(&f, &gamma).unwrap();

        let piece1 = wedge_2d_oracle((rat(2, 1), rat(-1, 1)), (rat(-1, 1), rat(1, 1)));
        let piece2 = wedge_2d_oracle((rat(-1, 1), rat(1, 1)), (rat(-2, 1), rat(1, 1)));
        let expected = piece1 + piece2;
        assert_eq!(expected, rat(2, 1));
        assert_eq!(w, WedgeElement::single(2, 0, 1, expected));
    }

    #[test]
    fn saf_is_refinement_invariant() {
        let gamma = sqrt2_group();
        let alpha = Scalar::sqrt(2) - Scalar::one();
        let f = rot(alpha, &gamma);
        let value = saf(&f, &gamma).unwrap();
        let refined = f.subdivided_pieces(&[vec![
            Scalar::from_frac(1, 5),
            Scalar::from_frac(1, 3),
            Scalar::from_frac(9, 10),
        ]]);
        assert!(refined.len() > f.pieces().len());
        assert_eq!(saf_of_pieces(&refined, &gamma).unwrap(), value);
    }

    #[test]
    fn saf_is_a_homomorphism() {
        let gamma = sqrt2_group();
        let spec = presets::iet_group(gamma.clone());
        let base = RectPolytope::unit(1);
        for seed in 0..20 {
            let f = random_auto(&spec, &base, seed, 3);
            let g = random_auto(&spec, &base, seed + 1000, 3);
            let lhs = saf(&f.then(&g).unwrap(), &gamma).unwrap();
            let rhs = saf(&f, &gamma).unwrap().add(&saf(&g, &gamma).unwrap());
            assert_eq!(lhs, rhs, "seed {seed}");
            let inv = saf(&f.inverse(), &gamma).unwrap();
            assert_eq!(inv, saf(&f, &gamma).unwrap().neg(), "seed {seed}");
        }
    }

    #[test]
    fn rec_invariant_of_product_rotation() {
        // rot(alpha) x id on the unit square: x-component 2 (e0^e1) (x) e0,
        // y-component zero
        let gamma = sqrt2_group();
        let gammas = vec![gamma.clone(), gamma.clone()];
        let spec = presets::rec_group(2, gamma.clone());
        let alpha = Scalar::sqrt(2) - Scalar::one();
        let rot1 = ScissorsAuto::rotation(
            presets::iet_group(gamma.clone()),
            Scalar::zero(),
            Scalar::one(),
            alpha,
        );
        // lift to the square: same cuts on axis 0, full extent on axis 1
        let pieces = rot1
            .pieces()
            .iter()
            .map(|p| {
                let source = crate::polytope::AxisBox::new(vec![
                    p.source.intervals()[0].clone(),
                    (Scalar::zero(), Scalar::one()),
                ])
                .unwrap();
                let map = crate::group::AffineMap::translation(vec![
                    p.map.translate[0].clone(),
                    Scalar::zero(),
                ]);
                PieceMap::new(source, map)
            })
            .collect();
        let f = ScissorsAuto::from_pieces(spec, RectPolytope::unit(2), pieces);
        f.verify().unwrap();
        let inv = rec_invariant(&f, &gammas).unwrap();
        assert_eq!(inv.coeff(0, (0, 1), &[0]), rat(2, 1));
        assert_eq!(inv.coeff(0, (0, 1), &[1]), rat(0, 1));
        assert!(inv.components[1].coeffs.is_empty());
    }

    #[test]
    fn rec_invariant_additive_on_random_pairs() {
        let gamma = CoefficientGroup::rationals();
        let gammas = vec![gamma.clone(), gamma.clone()];
        let spec = presets::rec(2);
        let base = RectPolytope::unit(2);
        for seed in 0..15 {
            let f = random_auto(&spec, &base, seed, 2);
            let g = random_auto(&spec, &base, seed + 500, 2);
            let lhs = rec_invariant(&f.then(&g).unwrap(), &gammas).unwrap();
            let rhs = rec_invariant(&f, &gammas)
                .unwrap()
                .add(&rec_invariant(&g, &gammas).unwrap());
            assert_eq!(lhs, rhs, "seed {seed}");
        }
    }

    #[test]
    fn realize_wedge_hits_single_pair() {
        let gamma = CoefficientGroup::new(
            vec![Scalar::one(), Scalar::sqrt(2), Scalar::sqrt(3)],
            "<1,sqrt2,sqrt3>",
        )
        .unwrap();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let (f, c) = realize_wedge(i, j, &gamma);
            f.verify().unwrap();
            assert!(!c.is_zero());
            let w = saf(&f, &gamma).unwrap();
            assert_eq!(w, WedgeElement::single(3, i, j, c.clone()), "pair {i},{j}");
        }
    }

    #[test]
    fn realized_wedges_span_full_rank() {
        // d = 3: the three realized classes are linearly independent
        let gamma = CoefficientGroup::new(
            vec![Scalar::one(), Scalar::sqrt(2), Scalar::sqrt(3)],
            "<1,sqrt2,sqrt3>",
        )
        .unwrap();
        let rows: Vec<Vec<Rat>> = [(0, 1), (0, 2), (1, 2)]
            .into_iter()
            .map(|(i, j)| {
                let (f, _) = realize_wedge(i, j, &gamma);
                saf(&f, &gamma).unwrap().as_dense()
            })
            .collect();
        assert_eq!(crate::scalar::rank(&rows), 3);
    }

    #[test]
    fn saf_not_in_span_detected() {
        let gamma = CoefficientGroup::rationals();
        let alpha = Scalar::sqrt(2) - Scalar::one();
        let spec = presets::iet_group(CoefficientGroup::with_sqrt(2));
        let f = ScissorsAuto::rotation(spec, Scalar::zero(), Scalar::one(), alpha);
        assert_eq!(saf(&f, &gamma).unwrap_err(), InvariantError::NotInSpan);
    }

    #[test]
    fn k1_relations_hold_on_samples() {
        let report = check_k1_relations(&sqrt2_group(), 11, 10);
        assert!(report.passed(), "{:?}", report.violations);
    }
}
