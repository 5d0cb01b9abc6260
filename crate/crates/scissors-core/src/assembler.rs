//! Assembler specifications for rectilinear cut-and-paste geometry: which
//! translations, cut hyperplanes, scalings, flips, and axis permutations the
//! pieces may use.  Also the span representation of scissors congruences
//! between different polytopes, a finite-set assembler used as an exactly
//! solvable model, and sampled axiom checks.

use crate::construct;
use crate::group::{self, PieceMap};
use crate::polytope::{AxisBox, Cover, RectPolytope};
use crate::scalar::{CoefficientGroup, Rat, Scalar};
use num::bigint::BigInt;
use num::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

pub use crate::group::VerifyError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AssemblerError {
    #[error("invalid assembler spec: {0}")]
    InvalidSpec(String),
    #[error("unknown assembler preset {0:?}")]
    UnknownPreset(String),
    #[error("translation group is not dense: {0}")]
    NotDense(String),
    #[error("no element of {group} found in the requested interval")]
    TranslationSearchFailed { group: String },
    #[error("axiom {axiom} failed: {witness}")]
    AxiomFailure { axiom: String, witness: String },
}

// ---------------------------------------------------------------------------
// Translation groups

/// Coefficient ring for a translation (or cut-coordinate) group presented by
/// a basis: the group is the set of coefficient combinations of the basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoeffRing {
    /// Z-combinations, e.g. `Z + Z*sqrt2` or `Z[tau]`.
    Integer,
    /// `Z[1/d]`-combinations, e.g. dyadic rationals.
    Localized(u32),
    /// Q-combinations.
    Rational,
}

/// An additive subgroup of the reals containing 1: coefficient combinations
/// of a Q-independent basis starting with 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationGroup {
    pub basis: CoefficientGroup,
    pub ring: CoeffRing,
}

impl TranslationGroup {
    pub fn rational() -> Self {
        TranslationGroup {
            basis: CoefficientGroup::rationals(),
            ring: CoeffRing::Rational,
        }
    }

    pub fn dyadic() -> Self {
        TranslationGroup::localized(2)
    }

    pub fn localized(d: u32) -> Self {
        TranslationGroup {
            basis: CoefficientGroup::rationals(),
            ring: CoeffRing::Localized(d),
        }
    }

    /// The Q-span of the basis.
    pub fn span(basis: CoefficientGroup) -> Self {
        TranslationGroup {
            basis,
            ring: CoeffRing::Rational,
        }
    }

    /// The Z-span of the basis, e.g. `Z + Z*sqrt2`.
    pub fn zspan(basis: CoefficientGroup) -> Self {
        TranslationGroup {
            basis,
            ring: CoeffRing::Integer,
        }
    }

    /// `Z[tau] = Z + Z*tau`.
    pub fn z_tau() -> Self {
        let basis = CoefficientGroup::new(vec![Scalar::one(), Scalar::tau()], "Z[tau]")
            .expect("independent");
        TranslationGroup::zspan(basis)
    }

    pub fn label(&self) -> String {
        match self.ring {
            CoeffRing::Rational => {
                if self.basis.dim() == 1 {
                    "Q".to_string()
                } else {
                    format!("Q-span({})", self.basis.label())
                }
            }
            CoeffRing::Localized(d) => format!("Z[1/{d}]"),
            CoeffRing::Integer => format!("Z-span({})", self.basis.label()),
        }
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        let Ok(coords) = self.basis.linearize(x) else {
            return false;
        };
        match self.ring {
            CoeffRing::Rational => true,
            CoeffRing::Integer => coords.iter().all(|c| c.denom().is_one()),
            CoeffRing::Localized(d) => coords.iter().all(|c| denom_divides_power(c, d)),
        }
    }

    /// Structural density check.
    pub fn is_dense(&self) -> bool {
        match self.ring {
            CoeffRing::Rational => true,
            CoeffRing::Localized(d) => d >= 2,
            CoeffRing::Integer => {
                self.basis.dim() >= 2 && self.basis.basis().iter().any(|b| !b.is_rational())
            }
        }
    }

    /// An element of the group strictly inside the open interval `(a, b)`.
    pub fn find_between(&self, a: &Scalar, b: &Scalar) -> Result<Scalar, AssemblerError> {
        assert!(a < b, "empty search interval");
        let candidate = match self.ring {
            CoeffRing::Rational => Scalar::from_rational(rational_between(a, b)),
            CoeffRing::Localized(d) => {
                let gap = positive_rational_below(&(b - a));
                let mut power = Rat::one();
                let d_rat = Rat::from_integer(BigInt::from(d));
                let half_gap = gap / Rat::from_integer(BigInt::from(2));
                while power > half_gap {
                    power /= &d_rat;
                }
                let scaled = a * &Scalar::from_rational(Rat::one() / &power);
                let c = scaled.floor_int() + 1;
                Scalar::from_rational(Rat::from_integer(c) * power)
            }
            CoeffRing::Integer => {
                let theta = self
                    .basis
                    .basis()
                    .iter()
                    .find(|s| !s.is_rational())
                    .ok_or_else(|| AssemblerError::NotDense(self.label()))?
                    .clone();
                let gap = b - a;
                let step = small_integer_combination(&theta, &gap);
                let j = (a.clone() / step.clone()).floor_int() + 1;
                Scalar::from_rational(Rat::from_integer(j)) * step
            }
        };
        if &candidate > a && &candidate < b && self.contains(&candidate) {
            Ok(candidate)
        } else {
            Err(AssemblerError::TranslationSearchFailed {
                group: self.label(),
            })
        }
    }

    /// A group element in `(a, b)`, randomized over sub-windows but
    /// deterministic in the rng state.
    pub fn random_between(
        &self,
        a: &Scalar,
        b: &Scalar,
        rng: &mut ChaCha8Rng,
    ) -> Result<Scalar, AssemblerError> {
        let w = rng.random_range(0..7u32);
        let len = b - a;
        let ninth = len / Scalar::from_int(9);
        let lo = a + &(ninth.clone() * Scalar::from_int(w as i64 + 1));
        let hi = &lo + &ninth;
        self.find_between(&lo, &hi)
            .or_else(|_| self.find_between(a, b))
    }
}

fn denom_divides_power(c: &Rat, d: u32) -> bool {
    let mut den = c.denom().clone();
    let d = BigInt::from(d);
    loop {
        if den.is_one() {
            return true;
        }
        let g = num::Integer::gcd(&den, &d);
        if g.is_one() {
            return false;
        }
        den /= g;
    }
}

/// A rational strictly between two scalars, by refining dyadic brackets.
fn rational_between(a: &Scalar, b: &Scalar) -> Rat {
    let mut bits = 16u32;
    loop {
        let (_, a_hi) = a.bounds(bits);
        let (b_lo, _) = b.bounds(bits);
        if a_hi < b_lo {
            return (a_hi + b_lo) / Rat::from_integer(BigInt::from(2));
        }
        bits *= 2;
    }
}

/// A positive rational lower bound for a positive scalar.
fn positive_rational_below(x: &Scalar) -> Rat {
    let mut bits = 16u32;
    loop {
        let (lo, _) = x.bounds(bits);
        if lo.is_positive() {
            return lo;
        }
        bits *= 2;
    }
}

/// Continued-fraction convergents of `theta` make `|q*theta - p|` as small
/// as needed; returns a positive element of `Z + Z*theta` below `gap`.
fn small_integer_combination(theta: &Scalar, gap: &Scalar) -> Scalar {
    let mut x = theta.clone();
    let (mut h_prev, mut h) = (BigInt::one(), x.floor_int());
    let (mut k_prev, mut k) = (BigInt::zero(), BigInt::one());
    for _ in 0..256 {
        let delta = Scalar::from_rational(Rat::from_integer(k.clone())) * theta.clone()
            - Scalar::from_rational(Rat::from_integer(h.clone()));
        let abs = delta.abs();
        if !abs.is_zero() && &abs < gap {
            return abs;
        }
        let a = x.floor_int();
        let frac = x - Scalar::from_rational(Rat::from_integer(a));
        x = frac.recip().expect("irrational continued fraction");
        let a_next = x.floor_int();
        let new_h = a_next.clone() * &h + &h_prev;
        let new_k = a_next * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, new_h);
        k_prev = std::mem::replace(&mut k, new_k);
    }
    panic!("continued-fraction search failed to converge");
}

// ---------------------------------------------------------------------------
// Assembler specifications

/// Derived mode: EA-assemblers carry no nontrivial scalings and support
/// volume-driven embeddings; S-assemblers can strictly squeeze any nonempty
/// polytope into any other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AssemblerMode {
    Ea,
    S,
}

/// Everything the pieces of a scissors congruence are allowed to do, per
/// axis: translations, cut coordinates, positive scaling generators, flips,
/// and axis permutations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssemblerSpec {
    name: String,
    translations: Vec<TranslationGroup>,
    cuts: Vec<TranslationGroup>,
    scalings: Vec<Vec<Scalar>>,
    flips: Vec<bool>,
    #[serde(default)]
    permutation_generators: Vec<Vec<usize>>,
}

impl AssemblerSpec {
    pub fn new(
        name: impl Into<String>,
        translations: Vec<TranslationGroup>,
        cuts: Vec<TranslationGroup>,
        scalings: Vec<Vec<Scalar>>,
        flips: Vec<bool>,
        permutation_generators: Vec<Vec<usize>>,
    ) -> Result<Self, AssemblerError> {
        let dim = translations.len();
        if dim == 0 {
            return Err(AssemblerError::InvalidSpec("dimension zero".into()));
        }
        if cuts.len() != dim || scalings.len() != dim || flips.len() != dim {
            return Err(AssemblerError::InvalidSpec(
                "per-axis field lengths disagree".into(),
            ));
        }
        let mut scalings = scalings;
        for gens in &mut scalings {
            gens.retain(|g| !g.is_one());
            for g in gens.iter() {
                if g <= &Scalar::zero() {
                    return Err(AssemblerError::InvalidSpec(
                        "scaling generators must be positive".into(),
                    ));
                }
            }
        }
        let with = scalings.iter().filter(|g| !g.is_empty()).count();
        if with != 0 && with != dim {
            return Err(AssemblerError::InvalidSpec(
                "scaling generators must be present on every axis or none".into(),
            ));
        }
        for p in &permutation_generators {
            if !is_permutation(p, dim) {
                return Err(AssemblerError::InvalidSpec(format!(
                    "{p:?} is not a permutation of 0..{dim}"
                )));
            }
        }
        let spec = AssemblerSpec {
            name: name.into(),
            translations,
            cuts,
            scalings,
            flips,
            permutation_generators,
        };
        // scalings must preserve the cut groups, checked on basis elements
        for axis in 0..dim {
            for g in &spec.scalings[axis] {
                for b in spec.cuts[axis].basis.basis() {
                    if !spec.cuts[axis].contains(&(g * b)) {
                        return Err(AssemblerError::InvalidSpec(format!(
                            "scaling {g} does not preserve the cut group on axis {axis}"
                        )));
                    }
                }
            }
        }
        Ok(spec)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.translations.len()
    }

    pub fn translations(&self, axis: usize) -> &TranslationGroup {
        &self.translations[axis]
    }

    pub fn cut_group(&self, axis: usize) -> &TranslationGroup {
        &self.cuts[axis]
    }

    pub fn scaling_generators(&self, axis: usize) -> &[Scalar] {
        &self.scalings[axis]
    }

    /// EA when no nontrivial scalings exist, S when every axis can shrink.
    pub fn mode(&self) -> AssemblerMode {
        if self.scalings.iter().all(|g| g.is_empty()) {
            AssemblerMode::Ea
        } else {
            AssemblerMode::S
        }
    }

    pub fn translation_allowed(&self, axis: usize, t: &Scalar) -> bool {
        self.translations[axis].contains(t)
    }

    pub fn cut_allowed(&self, axis: usize, x: &Scalar) -> bool {
        self.cuts[axis].contains(x)
    }

    pub fn flip_allowed(&self, axis: usize) -> bool {
        self.flips[axis]
    }

    /// Membership of a positive scalar in the multiplicative group generated
    /// by the axis scaling generators.
    pub fn scaling_allowed(&self, axis: usize, s: &Scalar) -> bool {
        if s.is_one() {
            return true;
        }
        let gens = &self.scalings[axis];
        match gens.len() {
            0 => false,
            1 => power_of(&gens[0], s),
            _ => product_of_powers(gens, s),
        }
    }

    pub fn permutation_allowed(&self, perm: &[usize]) -> bool {
        if perm.len() != self.dim() {
            return false;
        }
        if perm.iter().enumerate().all(|(i, &p)| i == p) {
            return true;
        }
        permutation_closure(&self.permutation_generators, self.dim()).contains(&perm.to_vec())
    }

    /// The shrink factor of the axis: the scaling generator normalized below
    /// one.  `None` for EA axes.
    pub fn sigma(&self, axis: usize) -> Option<Scalar> {
        let g = self.scalings[axis].first()?;
        Some(if g < &Scalar::one() {
            g.clone()
        } else {
            Scalar::one() / g.clone()
        })
    }

    /// Greedy decomposition of an interval into "standard cells" whose
    /// lengths are powers of the axis shrink factor.  Every bijection of
    /// standard cells is then realised by allowed scalings.
    pub fn standard_cells_1d(
        &self,
        axis: usize,
        lo: &Scalar,
        hi: &Scalar,
    ) -> Vec<(Scalar, Scalar)> {
        let sigma = self
            .sigma(axis)
            .expect("standard cells need a scaling generator");
        let mut cells = Vec::new();
        let mut cursor = lo.clone();
        for _ in 0..512 {
            let rem = hi - &cursor;
            if rem.is_zero() {
                return cells;
            }
            // largest power sigma^k (k possibly negative) not exceeding rem
            let mut power = Scalar::one();
            if power <= rem {
                loop {
                    let bigger = power.clone() / sigma.clone();
                    if bigger <= rem {
                        power = bigger;
                    } else {
                        break;
                    }
                }
            } else {
                while power > rem {
                    power = power * sigma.clone();
                }
            }
            let next = &cursor + &power;
            cells.push((cursor.clone(), next.clone()));
            cursor = next;
        }
        panic!("standard cell decomposition did not terminate");
    }

    /// Standard-cell decomposition of a whole polytope: per-axis
    /// decompositions of each box, multiplied out.
    pub fn standard_leaves(&self, region: &RectPolytope) -> Vec<AxisBox> {
        let mut out = Vec::new();
        for b in region.boxes() {
            let per_axis: Vec<Vec<(Scalar, Scalar)>> = (0..self.dim())
                .map(|axis| self.standard_cells_1d(axis, b.lo(axis), b.hi(axis)))
                .collect();
            product_boxes(&per_axis, &mut Vec::new(), &mut out);
        }
        out
    }

    /// Split a standard interval into its children: `d` equal parts for a
    /// `1/d` shrink factor, or the golden pair `(sigma, sigma^2)` when
    /// `sigma^2 + sigma = 1`.
    pub fn split_interval_cells(
        &self,
        axis: usize,
        lo: &Scalar,
        hi: &Scalar,
    ) -> Vec<(Scalar, Scalar)> {
        let sigma = self
            .sigma(axis)
            .expect("splitting needs a scaling generator");
        let len = hi - lo;
        let inv = Scalar::one() / sigma.clone();
        if let Some(r) = inv.as_rational() {
            if r.denom().is_one() {
                let d: i64 = i64::try_from(&r.to_integer()).expect("small branching factor");
                let step = len / Scalar::from_int(d);
                let mut cells = Vec::new();
                let mut cursor = lo.clone();
                for _ in 0..d {
                    let next = &cursor + &step;
                    cells.push((cursor, next.clone()));
                    cursor = next;
                }
                return cells;
            }
        }
        let golden = sigma.clone() * sigma.clone() + sigma.clone() == Scalar::one();
        assert!(
            golden,
            "unsupported subdivision rule for shrink factor {sigma}"
        );
        let cut = lo + &(sigma * len);
        vec![(lo.clone(), cut.clone()), (cut, hi.clone())]
    }
}

fn product_boxes(
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
        product_boxes(per_axis, prefix, out);
        prefix.pop();
    }
}

fn is_permutation(p: &[usize], dim: usize) -> bool {
    p.len() == dim && {
        let mut seen = vec![false; dim];
        p.iter().all(|&v| v < dim && !std::mem::replace(&mut seen[v], true))
    }
}

fn permutation_closure(generators: &[Vec<usize>], dim: usize) -> BTreeSet<Vec<usize>> {
    let identity: Vec<usize> = (0..dim).collect();
    let mut closed = BTreeSet::new();
    closed.insert(identity.clone());
    let mut frontier = vec![identity];
    while let Some(p) = frontier.pop() {
        for g in generators {
            let composed: Vec<usize> = p.iter().map(|&i| g[i]).collect();
            if closed.insert(composed.clone()) {
                frontier.push(composed);
            }
        }
    }
    closed
}

/// Is `s = g^k` for some integer `k`?  Solved from float logarithms and then
/// verified exactly.
fn power_of(g: &Scalar, s: &Scalar) -> bool {
    let lg = g.to_f64().ln();
    if lg == 0.0 {
        return false;
    }
    let k = (s.to_f64().ln() / lg).round() as i64;
    for cand in [k - 1, k, k + 1] {
        if &scalar_pow(g, cand) == s {
            return true;
        }
    }
    false
}

/// Bounded search for membership in a multi-generator scaling group.
fn product_of_powers(gens: &[Scalar], s: &Scalar) -> bool {
    let mut seen = BTreeSet::new();
    let mut frontier = vec![s.clone()];
    seen.insert(format!("{s}"));
    for _ in 0..24 {
        let mut next = Vec::new();
        for x in frontier {
            if x.is_one() {
                return true;
            }
            for g in gens {
                for y in [x.clone() * g.clone(), x.clone() / g.clone()] {
                    if seen.insert(format!("{y}")) {
                        next.push(y);
                    }
                }
            }
        }
        frontier = next;
    }
    false
}

pub fn scalar_pow(g: &Scalar, k: i64) -> Scalar {
    let base = if k >= 0 {
        g.clone()
    } else {
        Scalar::one() / g.clone()
    };
    let mut out = Scalar::one();
    for _ in 0..k.unsigned_abs().min(512) {
        out = out * base.clone();
    }
    out
}

// ---------------------------------------------------------------------------
// Presets

pub mod presets {
    use super::*;

    fn one_dim(name: String, group: TranslationGroup, scaling: Vec<Scalar>) -> AssemblerSpec {
        AssemblerSpec::new(
            name,
            vec![group.clone()],
            vec![group],
            vec![scaling],
            vec![false],
            vec![],
        )
        .expect("valid preset")
    }

    /// Interval exchanges with rational data.
    pub fn iet_rational() -> AssemblerSpec {
        one_dim("iet(Q)".into(), TranslationGroup::rational(), vec![])
    }

    /// Interval exchanges over the Q-span of a basis.
    pub fn iet_group(basis: CoefficientGroup) -> AssemblerSpec {
        let name = format!("iet({})", basis.label());
        one_dim(name, TranslationGroup::span(basis), vec![])
    }

    /// Interval exchanges over the Z-span of a basis, e.g. `Z + Z*sqrt2`.
    pub fn iet_zspan(basis: CoefficientGroup) -> AssemblerSpec {
        let name = format!("iet(Z-span {})", basis.label());
        one_dim(name, TranslationGroup::zspan(basis), vec![])
    }

    /// Rectangle exchanges of the n-cube with rational data.
    pub fn rec(n: usize) -> AssemblerSpec {
        AssemblerSpec::new(
            format!("rec({n})"),
            vec![TranslationGroup::rational(); n],
            vec![TranslationGroup::rational(); n],
            vec![vec![]; n],
            vec![false; n],
            vec![],
        )
        .expect("valid preset")
    }

    /// Rectangle exchanges over the Q-span of a basis on every axis.
    pub fn rec_group(n: usize, basis: CoefficientGroup) -> AssemblerSpec {
        AssemblerSpec::new(
            format!("rec({n}; {})", basis.label()),
            vec![TranslationGroup::span(basis.clone()); n],
            vec![TranslationGroup::span(basis); n],
            vec![vec![]; n],
            vec![false; n],
            vec![],
        )
        .expect("valid preset")
    }

    /// Brin–Thompson style: dyadic data with per-axis scaling by 2.
    pub fn brin_thompson(n: usize) -> AssemblerSpec {
        AssemblerSpec::new(
            format!("brin-thompson({n})"),
            vec![TranslationGroup::dyadic(); n],
            vec![TranslationGroup::dyadic(); n],
            vec![vec![Scalar::from_int(2)]; n],
            vec![false; n],
            vec![],
        )
        .expect("valid preset")
    }

    /// Higman–Thompson style: d-adic data on the line with scaling by d.
    pub fn higman(d: u32) -> AssemblerSpec {
        assert!(d >= 2);
        one_dim(
            format!("higman({d})"),
            TranslationGroup::localized(d),
            vec![Scalar::from_int(d as i64)],
        )
    }

    /// Irrational-slope Thompson style: `Z[tau]` data with scaling by tau.
    pub fn v_tau() -> AssemblerSpec {
        one_dim("v-tau".into(), TranslationGroup::z_tau(), vec![Scalar::tau()])
    }
}

/// Parse a named preset: `iet`, `iet:1,sqrt2`, `iet-z:1,sqrt2`, `rec(n)`,
/// `brin-thompson(n)` (alias `nv(n)`), `higman(d)`, `v-tau`.
pub fn spec_from_name(name: &str) -> Result<AssemblerSpec, AssemblerError> {
    let name = name.trim();
    let (head, arg) = match name.find([':', '(']) {
        Some(pos) => {
            let (h, rest) = name.split_at(pos);
            (h, Some(rest.trim_matches([':', '(', ')']).to_string()))
        }
        None => (name, None),
    };
    let basis_from = |arg: &Option<String>| -> Result<CoefficientGroup, AssemblerError> {
        match arg {
            None => Ok(CoefficientGroup::rationals()),
            Some(list) => {
                let parts: Result<Vec<Scalar>, _> =
                    list.split(',').map(|s| s.trim().parse::<Scalar>()).collect();
                let parts = parts.map_err(|e| AssemblerError::InvalidSpec(e.to_string()))?;
                CoefficientGroup::new(parts, list.clone())
                    .map_err(|e| AssemblerError::InvalidSpec(e.to_string()))
            }
        }
    };
    let int_from = |arg: &Option<String>| -> Result<u32, AssemblerError> {
        arg.as_deref().unwrap_or("").parse().map_err(|_| {
            AssemblerError::InvalidSpec(format!("{name:?} needs an integer argument"))
        })
    };
    match head {
        "iet" => Ok(match &arg {
            None => presets::iet_rational(),
            some => presets::iet_group(basis_from(some)?),
        }),
        "iet-z" => Ok(presets::iet_zspan(basis_from(&arg)?)),
        "rec" => Ok(presets::rec(int_from(&arg)? as usize)),
        "brin-thompson" | "nv" => Ok(presets::brin_thompson(int_from(&arg)? as usize)),
        "higman" => Ok(presets::higman(int_from(&arg)?)),
        "v-tau" => Ok(presets::v_tau()),
        _ => Err(AssemblerError::UnknownPreset(name.to_string())),
    }
}

// ---------------------------------------------------------------------------
// Spans: scissors congruences between possibly different polytopes

/// A scissors congruence `source ~ target`, stored as the canonical
/// piecewise map.  The left cover of the representing zig-zag is the piece
/// source list, the right cover the piece image list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Span {
    pub spec: AssemblerSpec,
    pub source: RectPolytope,
    pub target: RectPolytope,
    pieces: Vec<PieceMap>,
}

impl PartialEq for Span {
    fn eq(&self, other: &Self) -> bool {
        self.source.same_point_set(&other.source)
            && self.target.same_point_set(&other.target)
            && self.pieces == other.pieces
    }
}
impl Eq for Span {}

impl Span {
    pub fn from_pieces(
        spec: AssemblerSpec,
        source: RectPolytope,
        target: RectPolytope,
        pieces: Vec<PieceMap>,
    ) -> Span {
        let dim = source.dim();
        Span {
            spec,
            source,
            target,
            pieces: group::canonicalize_pieces(pieces, dim),
        }
    }

    pub fn identity(spec: AssemblerSpec, p: RectPolytope) -> Span {
        let id = group::AffineMap::identity(p.dim());
        let pieces = p
            .boxes()
            .iter()
            .map(|b| PieceMap::new(b.clone(), id.clone()))
            .collect();
        Span::from_pieces(spec, p.clone(), p, pieces)
    }

    pub fn pieces(&self) -> &[PieceMap] {
        &self.pieces
    }

    /// Left leg of the zig-zag: the source cover.
    pub fn left_cover(&self) -> Cover {
        Cover::new(
            self.source.clone(),
            self.pieces
                .iter()
                .map(|p| RectPolytope::from_box(p.source.clone()))
                .collect(),
        )
        .expect("verified spans carry covers")
    }

    /// Right leg of the zig-zag: the image cover.
    pub fn right_cover(&self) -> Cover {
        Cover::new(
            self.target.clone(),
            self.pieces
                .iter()
                .map(|p| RectPolytope::from_box(p.image()))
                .collect(),
        )
        .expect("verified spans carry covers")
    }

    pub fn verify(&self) -> Result<(), VerifyError> {
        let dim = self.source.dim();
        let sources =
            RectPolytope::new(dim, self.pieces.iter().map(|p| p.source.clone()).collect())
                .map_err(|_| VerifyError::SourceNotCovered)?;
        if !sources.same_point_set(&self.source) {
            return Err(VerifyError::SourceNotCovered);
        }
        let images = RectPolytope::new(dim, self.pieces.iter().map(|p| p.image()).collect())
            .map_err(|_| VerifyError::OverlappingImages(0, 0))?;
        if !images.same_point_set(&self.target) {
            return Err(VerifyError::ImagesDontCover);
        }
        group::check_transformations(&self.spec, &self.pieces)
    }

    /// Composition in the scissors congruence groupoid (`g` after `self`):
    /// refine `self`'s right cover against `g`'s left cover and transport
    /// the pieces.
    pub fn then(&self, g: &Span) -> Result<Span, VerifyError> {
        if !self.target.same_point_set(&g.source) {
            return Err(VerifyError::SourceTargetMismatch);
        }
        Ok(Span {
            spec: self.spec.clone(),
            source: self.source.clone(),
            target: g.target.clone(),
            pieces: group::compose_pieces(&self.pieces, &g.pieces, self.source.dim()),
        })
    }

    /// `self` after `g`, for callers preferring right-to-left composition.
    pub fn after(&self, g: &Span) -> Result<Span, VerifyError> {
        g.then(self)
    }

    /// Equality of morphisms in the groupoid: refinement-stable equality of
    /// the canonical piecewise maps.
    pub fn span_equal(&self, other: &Span) -> bool {
        self == other
    }

    /// Swap the two legs of the zig-zag.
    pub fn inverse(&self) -> Span {
        Span {
            spec: self.spec.clone(),
            source: self.target.clone(),
            target: self.source.clone(),
            pieces: group::invert_pieces(&self.pieces, self.source.dim()),
        }
    }

    pub fn to_auto(&self) -> Option<crate::group::ScissorsAuto> {
        if self.source.same_point_set(&self.target) {
            Some(crate::group::ScissorsAuto::from_pieces(
                self.spec.clone(),
                self.source.clone(),
                self.pieces.clone(),
            ))
        } else {
            None
        }
    }
}

// ---------------------------------------------------------------------------
// The finite-set assembler

/// The assembler of subsets of `{0..size-1}`: covers are partitions and
/// morphisms are injections.  An exactly solvable model whose automorphism
/// groups are the symmetric groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiniteSetAssembler {
    pub size: usize,
}

/// A span of partitions: blocks of an abstract middle set with parallel
/// injections into source and target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinSpan {
    source: BTreeSet<usize>,
    target: BTreeSet<usize>,
    /// `(source image, target image)` per middle element, grouped in blocks.
    blocks: Vec<Vec<(usize, usize)>>,
}

impl FinSpan {
    pub fn new(
        source: BTreeSet<usize>,
        target: BTreeSet<usize>,
        blocks: Vec<Vec<(usize, usize)>>,
    ) -> Result<FinSpan, VerifyError> {
        let mut src_seen = BTreeSet::new();
        let mut tgt_seen = BTreeSet::new();
        for block in &blocks {
            for &(s, t) in block {
                if !source.contains(&s) || !target.contains(&t) {
                    return Err(VerifyError::SourceTargetMismatch);
                }
                if !src_seen.insert(s) || !tgt_seen.insert(t) {
                    return Err(VerifyError::OverlappingImages(s, t));
                }
            }
        }
        if src_seen != source || tgt_seen != target {
            return Err(VerifyError::SourceNotCovered);
        }
        Ok(FinSpan {
            source,
            target,
            blocks,
        })
    }

    pub fn from_permutation(perm: &[usize]) -> FinSpan {
        let source: BTreeSet<usize> = (0..perm.len()).collect();
        let blocks = vec![perm.iter().copied().enumerate().collect()];
        FinSpan {
            source: source.clone(),
            target: source,
            blocks,
        }
    }

    /// The underlying bijection, independent of the block structure: this is
    /// the canonical (fully refined) form of the span.
    pub fn canonical_map(&self) -> Vec<(usize, usize)> {
        let mut pairs: Vec<(usize, usize)> = self
            .blocks
            .iter()
            .flat_map(|b| b.iter().copied())
            .collect();
        pairs.sort_unstable();
        pairs
    }

    /// Ore composition: refine the partitions of the shared middle object to
    /// their common refinement (singletons) and transport.
    pub fn then(&self, g: &FinSpan) -> Result<FinSpan, VerifyError> {
        if self.target != g.source {
            return Err(VerifyError::SourceTargetMismatch);
        }
        let f_pairs = self.canonical_map();
        let g_map: std::collections::BTreeMap<usize, usize> =
            g.canonical_map().into_iter().collect();
        let block = f_pairs.into_iter().map(|(s, mid)| (s, g_map[&mid])).collect();
        FinSpan::new(self.source.clone(), g.target.clone(), vec![block])
    }

    pub fn span_equal(&self, other: &FinSpan) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.canonical_map() == other.canonical_map()
    }

    pub fn inverse(&self) -> FinSpan {
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|&(s, t)| (t, s)).collect())
            .collect();
        FinSpan {
            source: self.target.clone(),
            target: self.source.clone(),
            blocks,
        }
    }
}

impl FiniteSetAssembler {
    pub fn new(size: usize) -> Self {
        FiniteSetAssembler { size }
    }

    /// All automorphism spans of the full set, i.e. all permutations.
    pub fn automorphisms(&self) -> Vec<FinSpan> {
        let mut perms = Vec::new();
        let mut current: Vec<usize> = (0..self.size).collect();
        heap_permutations(&mut current, self.size, &mut perms);
        perms.sort();
        perms.iter().map(|p| FinSpan::from_permutation(p)).collect()
    }
}

fn heap_permutations(current: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(current.clone());
        return;
    }
    for i in 0..k {
        heap_permutations(current, k - 1, out);
        if k % 2 == 0 {
            current.swap(i, k - 1);
        } else {
            current.swap(0, k - 1);
        }
    }
}

// ---------------------------------------------------------------------------
// Axiom checks

#[derive(Debug, Clone, Serialize)]
pub struct AxiomCheck {
    pub axiom: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub spec_name: String,
    pub mode: AssemblerMode,
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| !c.passed)
    }
}

/// Verify the assembler axioms on sampled objects: density of the
/// translation and cut groups, common refinements (R), the archimedean cut
/// (A) by explicit subdivision, and existence of embeddings (E) / squeezes
/// (S) through the constructors.
pub fn check_assembler_axioms(spec: &AssemblerSpec, samples: usize, seed: u64) -> AxiomReport {
    let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let mut checks = Vec::new();
    let dim = spec.dim();

    for axis in 0..dim {
        checks.push(AxiomCheck {
            axiom: format!("density(translations, axis {axis})"),
            passed: spec.translations(axis).is_dense(),
            detail: spec.translations(axis).label(),
        });
        checks.push(AxiomCheck {
            axiom: format!("density(cuts, axis {axis})"),
            passed: spec.cut_group(axis).is_dense(),
            detail: spec.cut_group(axis).label(),
        });
    }

    let dense = (0..dim).all(|a| spec.translations(a).is_dense() && spec.cut_group(a).is_dense());

    if dense {
        // (R): random covers of the unit box admit common refinements
        let base = RectPolytope::unit(dim);
        let mut refinement_ok = true;
        let mut detail = String::new();
        for _ in 0..samples.max(1) {
            let a = random_cover(spec, &base, &mut rng);
            let b = random_cover(spec, &base, &mut rng);
            match a.refine_common(&b) {
                Ok(r) => {
                    let total = r
                        .pieces()
                        .iter()
                        .fold(Scalar::zero(), |acc, p| acc + p.volume());
                    if total != base.volume() {
                        refinement_ok = false;
                        detail = "refinement volume mismatch".into();
                    }
                }
                Err(e) => {
                    refinement_ok = false;
                    detail = e.to_string();
                }
            }
        }
        checks.push(AxiomCheck {
            axiom: "(R) common refinement".into(),
            passed: refinement_ok,
            detail,
        });

        match spec.mode() {
            AssemblerMode::Ea => {
                let big = RectPolytope::from_box(
                    AxisBox::new(vec![(Scalar::zero(), Scalar::from_int(2)); dim])
                        .expect("nondegenerate"),
                );
                let target = RectPolytope::unit(dim).volume();
                match construct::archimedean_cover(spec, &big, &target) {
                    Ok(cover) => checks.push(AxiomCheck {
                        axiom: "(A) archimedean subdivision".into(),
                        passed: true,
                        detail: format!("{} pieces", cover.pieces().len()),
                    }),
                    Err(e) => checks.push(AxiomCheck {
                        axiom: "(A) archimedean subdivision".into(),
                        passed: false,
                        detail: e.to_string(),
                    }),
                }
                let p = RectPolytope::unit(dim);
                let q = RectPolytope::from_box(
                    AxisBox::new(vec![(Scalar::zero(), Scalar::from_frac(3, 2)); dim])
                        .expect("nondegenerate"),
                );
                let outcome = construct::construct_embedding_ea(&p, &q, spec);
                checks.push(AxiomCheck {
                    axiom: "(E) embedding exists under volume".into(),
                    passed: outcome.is_ok(),
                    detail: outcome
                        .map(|e| format!("complement volume {}", e.complement().volume()))
                        .unwrap_or_else(|e| e.to_string()),
                });
            }
            AssemblerMode::S => {
                let p = RectPolytope::unit(dim);
                let outcome = construct::construct_embedding_squeeze(&p, &p, spec);
                checks.push(AxiomCheck {
                    axiom: "(S) strict squeeze".into(),
                    passed: outcome
                        .as_ref()
                        .map(|e| !e.complement().is_empty())
                        .unwrap_or(false),
                    detail: outcome
                        .map(|e| format!("complement volume {}", e.complement().volume()))
                        .unwrap_or_else(|e| e.to_string()),
                });
            }
        }
    }

    AxiomReport {
        spec_name: spec.name().to_string(),
        mode: spec.mode(),
        checks,
    }
}

fn random_cover(spec: &AssemblerSpec, base: &RectPolytope, rng: &mut ChaCha8Rng) -> Cover {
    let dim = base.dim();
    let mut cuts: Vec<Vec<Scalar>> = vec![Vec::new(); dim];
    for (axis, axis_cuts) in cuts.iter_mut().enumerate() {
        let b = &base.boxes()[0];
        let count = rng.random_range(0..3);
        let mut lo = b.lo(axis).clone();
        for _ in 0..count {
            if let Ok(c) = spec.cut_group(axis).random_between(&lo, b.hi(axis), rng) {
                axis_cuts.push(c.clone());
                lo = c;
            }
        }
    }
    let pieces = base
        .grid_cells(&cuts)
        .into_iter()
        .map(RectPolytope::from_box)
        .collect();
    Cover::new(base.clone(), pieces).expect("grid cells cover")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sf(n: i64, d: i64) -> Scalar {
        Scalar::from_frac(n, d)
    }

    #[test]
    fn translation_group_membership() {
        let q = TranslationGroup::rational();
        assert!(q.contains(&sf(22, 7)));
        assert!(!q.contains(&Scalar::sqrt(2)));

        let dyadic = TranslationGroup::dyadic();
        assert!(dyadic.contains(&sf(3, 8)));
        assert!(!dyadic.contains(&sf(1, 3)));
        assert!(!dyadic.contains(&Scalar::sqrt(2)));

        let z_sqrt2 = TranslationGroup::zspan(CoefficientGroup::with_sqrt(2));
        assert!(z_sqrt2.contains(&(Scalar::sqrt(2) - Scalar::one())));
        assert!(!z_sqrt2.contains(&sf(1, 2)));

        let z_tau = TranslationGroup::z_tau();
        assert!(z_tau.contains(&Scalar::tau()));
        assert!(z_tau.contains(&(Scalar::tau() * Scalar::tau())));
        assert!(!z_tau.contains(&sf(1, 2)));
    }

    #[test]
    fn density_checks() {
        assert!(TranslationGroup::rational().is_dense());
        assert!(TranslationGroup::dyadic().is_dense());
        assert!(TranslationGroup::z_tau().is_dense());
        let z = TranslationGroup::zspan(CoefficientGroup::rationals());
        assert!(!z.is_dense());
    }

    #[test]
    fn find_between_all_rings() {
        let cases = [
            TranslationGroup::rational(),
            TranslationGroup::dyadic(),
            TranslationGroup::localized(3),
            TranslationGroup::zspan(CoefficientGroup::with_sqrt(2)),
            TranslationGroup::z_tau(),
        ];
        let windows = [
            (sf(0, 1), sf(1, 100)),
            (sf(7, 5), sf(3, 2)),
            (Scalar::sqrt(2), Scalar::sqrt(2) + sf(1, 50)),
            (-sf(5, 4), -sf(6, 5)),
        ];
        for g in &cases {
            for (a, b) in &windows {
                let x = g.find_between(a, b).unwrap();
                assert!(&x > a && &x < b, "{} in ({a}, {b}) got {x}", g.label());
                assert!(g.contains(&x));
            }
        }
    }

    #[test]
    fn non_dense_group_fails_search() {
        let z = TranslationGroup::zspan(CoefficientGroup::rationals());
        assert!(z.find_between(&sf(1, 4), &sf(1, 2)).is_err());
    }

    #[test]
    fn preset_modes() {
        assert_eq!(presets::iet_rational().mode(), AssemblerMode::Ea);
        assert_eq!(presets::rec(2).mode(), AssemblerMode::Ea);
        assert_eq!(presets::brin_thompson(2).mode(), AssemblerMode::S);
        assert_eq!(presets::higman(5).mode(), AssemblerMode::S);
        assert_eq!(presets::v_tau().mode(), AssemblerMode::S);
    }

    #[test]
    fn scaling_membership() {
        let bt = presets::brin_thompson(1);
        assert!(bt.scaling_allowed(0, &sf(4, 1)));
        assert!(bt.scaling_allowed(0, &sf(1, 8)));
        assert!(bt.scaling_allowed(0, &Scalar::one()));
        assert!(!bt.scaling_allowed(0, &sf(3, 1)));

        let vt = presets::v_tau();
        let tau = Scalar::tau();
        assert!(vt.scaling_allowed(0, &(tau.clone() * tau.clone())));
        assert!(vt.scaling_allowed(0, &(Scalar::one() / tau)));
        assert!(!vt.scaling_allowed(0, &sf(2, 1)));
    }

    #[test]
    fn standard_cells_dyadic_and_tau() {
        let h2 = presets::higman(2);
        let cells = h2.standard_cells_1d(0, &sf(0, 1), &sf(3, 4));
        let lengths: Vec<Scalar> = cells.iter().map(|(a, b)| b - a).collect();
        assert_eq!(lengths, vec![sf(1, 2), sf(1, 4)]);

        let vt = presets::v_tau();
        let phi = Scalar::one() + Scalar::tau(); // 1/tau
        let cells = vt.standard_cells_1d(0, &Scalar::zero(), &phi);
        let total = cells
            .iter()
            .fold(Scalar::zero(), |acc, (a, b)| acc + (b - a));
        assert_eq!(total, Scalar::one() + Scalar::tau());
        for (a, b) in &cells {
            let len = b - a;
            assert!(vt.scaling_allowed(0, &len), "length {len} not a tau power");
        }
    }

    #[test]
    fn split_cells() {
        let h3 = presets::higman(3);
        let children = h3.split_interval_cells(0, &sf(0, 1), &sf(1, 3));
        assert_eq!(children.len(), 3);
        assert_eq!(children[0], (sf(0, 1), sf(1, 9)));

        let vt = presets::v_tau();
        let children = vt.split_interval_cells(0, &sf(0, 1), &sf(1, 1));
        assert_eq!(children.len(), 2);
        assert_eq!(children[0].1, Scalar::tau());
    }

    #[test]
    fn preset_name_parsing() {
        assert_eq!(spec_from_name("iet").unwrap().name(), "iet(Q)");
        assert_eq!(spec_from_name("higman(3)").unwrap().name(), "higman(3)");
        assert_eq!(spec_from_name("rec(2)").unwrap().name(), "rec(2)");
        assert_eq!(
            spec_from_name("brin-thompson(2)").unwrap().name(),
            "brin-thompson(2)"
        );
        assert_eq!(spec_from_name("v-tau").unwrap().name(), "v-tau");
        assert!(spec_from_name("iet:1,sqrt2").is_ok());
        assert!(spec_from_name("nope").is_err());
    }

    #[test]
    fn invalid_specs_rejected() {
        // partial scaling coverage
        let bad = AssemblerSpec::new(
            "bad",
            vec![TranslationGroup::dyadic(); 2],
            vec![TranslationGroup::dyadic(); 2],
            vec![vec![Scalar::from_int(2)], vec![]],
            vec![false; 2],
            vec![],
        );
        assert!(bad.is_err());
        // scaling that breaks the cut group
        let bad = AssemblerSpec::new(
            "bad2",
            vec![TranslationGroup::dyadic()],
            vec![TranslationGroup::dyadic()],
            vec![vec![Scalar::from_frac(1, 3)]],
            vec![false],
            vec![],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn finite_set_spans_compose_like_permutations() {
        // brute force over all pairs in S3
        let asm = FiniteSetAssembler::new(3);
        let autos = asm.automorphisms();
        assert_eq!(autos.len(), 6);
        for a in &autos {
            for b in &autos {
                let composed = a.then(b).unwrap();
                let pa = a.canonical_map();
                let pb: std::collections::BTreeMap<usize, usize> =
                    b.canonical_map().into_iter().collect();
                let expected: Vec<(usize, usize)> =
                    pa.into_iter().map(|(s, m)| (s, pb[&m])).collect();
                assert_eq!(composed.canonical_map(), expected);
            }
        }
    }

    #[test]
    fn finite_span_inverse_and_blocks() {
        // a two-block span equals its fully refined form
        let source: BTreeSet<usize> = (0..4).collect();
        let span = FinSpan::new(
            source.clone(),
            source.clone(),
            vec![vec![(0, 2), (1, 3)], vec![(2, 0), (3, 1)]],
        )
        .unwrap();
        let refined = FinSpan::new(
            source.clone(),
            source,
            vec![vec![(0, 2)], vec![(1, 3)], vec![(2, 0)], vec![(3, 1)]],
        )
        .unwrap();
        assert!(span.span_equal(&refined));
        let id = span.then(&span.inverse()).unwrap();
        assert!(id.span_equal(&FinSpan::from_permutation(&[0, 1, 2, 3])));
    }

    #[test]
    fn axiom_report_dense_and_not() {
        let report = check_assembler_axioms(&presets::higman(2), 3, 7);
        assert!(report.all_passed(), "{:?}", report.first_failure());
        assert_eq!(report.mode, AssemblerMode::S);

        let report = check_assembler_axioms(&presets::iet_rational(), 3, 7);
        assert!(report.all_passed(), "{:?}", report.first_failure());
        assert_eq!(report.mode, AssemblerMode::Ea);

        // Z translations: density fails
        let z = AssemblerSpec::new(
            "iet(Z)",
            vec![TranslationGroup::zspan(CoefficientGroup::rationals())],
            vec![TranslationGroup::zspan(CoefficientGroup::rationals())],
            vec![vec![]],
            vec![false],
            vec![],
        )
        .unwrap();
        let report = check_assembler_axioms(&z, 2, 7);
        assert!(!report.all_passed());
        assert!(report.first_failure().unwrap().axiom.contains("density"));
    }
}
