//! Scissors automorphisms and embeddings as canonical piecewise affine maps.
//!
//! An element cuts its base polytope into boxes and moves each box by an
//! axis permutation, per-axis scaling (sign encodes a flip), and a
//! translation.  Elements are stored in canonical form: pieces carrying the
//! same transformation are merged to the canonical form of their union and
//! the piece list is sorted, so equality of group elements is structural
//! equality.  Values of the underlying almost-everywhere map at cut faces
//! are not part of the data.

use crate::assembler::{AssemblerMode, AssemblerSpec};
use crate::polytope::{AxisBox, Cover, PointLocation, RectPolytope};
use crate::scalar::Scalar;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("piece sources do not cover the base polytope")]
    SourceNotCovered,
    #[error("pieces {0} and {1} have overlapping images")]
    OverlappingImages(usize, usize),
    #[error("piece {0} maps outside the target polytope")]
    ImageOutsideTarget(usize),
    #[error("piece images do not exhaust the target polytope")]
    ImagesDontCover,
    #[error("piece {piece}: disallowed transformation: {reason}")]
    DisallowedTransformation { piece: usize, reason: String },
    #[error("piece {0} has a cut coordinate outside the allowed hyperplanes")]
    CutOutsideL(usize),
    #[error("elements live on different bases")]
    BaseMismatch,
    #[error("source/target point sets do not match")]
    SourceTargetMismatch,
    #[error("dimension mismatch")]
    DimensionMismatch,
}

// ---------------------------------------------------------------------------
// Affine piece transformations

/// `y_{perm[j]} = scales[perm[j]] * x_j + translate[perm[j]]`: permute the
/// axes by `perm`, then scale and translate each output axis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AffineMap {
    pub perm: Vec<usize>,
    pub scales: Vec<Scalar>,
    pub translate: Vec<Scalar>,
}

impl AffineMap {
    pub fn identity(dim: usize) -> Self {
        AffineMap {
            perm: (0..dim).collect(),
            scales: vec![Scalar::one(); dim],
            translate: vec![Scalar::zero(); dim],
        }
    }

    pub fn translation(t: Vec<Scalar>) -> Self {
        let dim = t.len();
        AffineMap {
            perm: (0..dim).collect(),
            scales: vec![Scalar::one(); dim],
            translate: t,
        }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
            && self.scales.iter().all(|s| s.is_one())
            && self.translate.iter().all(|t| t.is_zero())
    }

    pub fn apply(&self, x: &[Scalar]) -> Vec<Scalar> {
        let mut y = vec![Scalar::zero(); self.dim()];
        for (j, xj) in x.iter().enumerate() {
            let i = self.perm[j];
            y[i] = &self.scales[i] * xj + self.translate[i].clone();
        }
        y
    }

    /// `g` after `self`.
    pub fn then(&self, g: &AffineMap) -> AffineMap {
        let dim = self.dim();
        let mut perm = vec![0; dim];
        let mut scales = vec![Scalar::zero(); dim];
        let mut translate = vec![Scalar::zero(); dim];
        for j in 0..dim {
            let mid = self.perm[j];
            let out = g.perm[mid];
            perm[j] = out;
            scales[out] = &g.scales[out] * &self.scales[mid];
            translate[out] =
                g.scales[out].clone() * self.translate[mid].clone() + g.translate[out].clone();
        }
        AffineMap {
            perm,
            scales,
            translate,
        }
    }

    pub fn inverse(&self) -> AffineMap {
        let dim = self.dim();
        let mut perm = vec![0; dim];
        let mut scales = vec![Scalar::zero(); dim];
        let mut translate = vec![Scalar::zero(); dim];
        for j in 0..dim {
            let i = self.perm[j];
            perm[i] = j;
            scales[j] = Scalar::one() / self.scales[i].clone();
            translate[j] = -(self.translate[i].clone() / self.scales[i].clone());
        }
        AffineMap {
            perm,
            scales,
            translate,
        }
    }

    /// Exact image of a box; a negative scale swaps interval endpoints.
    pub fn image_box(&self, b: &AxisBox) -> AxisBox {
        let mut intervals = vec![(Scalar::zero(), Scalar::zero()); self.dim()];
        for j in 0..self.dim() {
            let i = self.perm[j];
            let a = &self.scales[i] * b.lo(j) + self.translate[i].clone();
            let c = &self.scales[i] * b.hi(j) + self.translate[i].clone();
            intervals[i] = if a < c { (a, c) } else { (c, a) };
        }
        AxisBox::new(intervals).expect("nonzero scales keep boxes nondegenerate")
    }
}

/// A source box together with the transformation applied to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceMap {
    #[serde(rename = "box")]
    pub source: AxisBox,
    #[serde(flatten)]
    pub map: AffineMap,
}

impl PieceMap {
    pub fn new(source: AxisBox, map: AffineMap) -> Self {
        PieceMap { source, map }
    }

    pub fn image(&self) -> AxisBox {
        self.map.image_box(&self.source)
    }
}

// ---------------------------------------------------------------------------
// Canonical piecewise maps

/// Merge pieces with equal transformations to the canonical form of their
/// union, then sort by source box.  This is the unique normal form of the
/// almost-everywhere map.
pub(crate) fn canonicalize_pieces(pieces: Vec<PieceMap>, dim: usize) -> Vec<PieceMap> {
    let mut by_map: BTreeMap<AffineMap, Vec<AxisBox>> = BTreeMap::new();
    for p in pieces {
        by_map.entry(p.map).or_default().push(p.source);
    }
    let mut out = Vec::new();
    for (map, boxes) in by_map {
        let region = RectPolytope::new(dim, boxes)
            .expect("canonicalization requires interior-disjoint sources")
            .canonicalize();
        for b in region.boxes() {
            out.push(PieceMap::new(b.clone(), map.clone()));
        }
    }
    out.sort_by(|a, b| a.source.cmp(&b.source));
    out
}

/// Pointwise composition (`g` after `f`) of two piece lists via the common
/// refinement of `f`'s image cover and `g`'s source cover.
pub(crate) fn compose_pieces(f: &[PieceMap], g: &[PieceMap], dim: usize) -> Vec<PieceMap> {
    let mut out = Vec::new();
    for pf in f {
        let image = pf.image();
        let inv = pf.map.inverse();
        for pg in g {
            if let Some(mid) = image.intersect(&pg.source) {
                let chunk = inv.image_box(&mid);
                out.push(PieceMap::new(chunk, pf.map.then(&pg.map)));
            }
        }
    }
    canonicalize_pieces(out, dim)
}

pub(crate) fn invert_pieces(pieces: &[PieceMap], dim: usize) -> Vec<PieceMap> {
    let inverted = pieces
        .iter()
        .map(|p| PieceMap::new(p.image(), p.map.inverse()))
        .collect();
    canonicalize_pieces(inverted, dim)
}

/// Split every piece along the given extra cut coordinates (in source
/// coordinates).  The result represents the same map with a finer cover and
/// is deliberately not re-canonicalized.
pub(crate) fn subdivide_pieces(pieces: &[PieceMap], cuts: &[Vec<Scalar>]) -> Vec<PieceMap> {
    let mut out = Vec::new();
    for p in pieces {
        let cells = RectPolytope::from_box(p.source.clone()).grid_cells(cuts);
        for cell in cells {
            out.push(PieceMap::new(cell, p.map.clone()));
        }
    }
    out
}

fn sources_polytope(pieces: &[PieceMap], dim: usize) -> Result<RectPolytope, VerifyError> {
    RectPolytope::new(dim, pieces.iter().map(|p| p.source.clone()).collect())
        .map_err(|_| VerifyError::SourceNotCovered)
}

fn check_images_disjoint(pieces: &[PieceMap]) -> Result<Vec<AxisBox>, VerifyError> {
    let images: Vec<AxisBox> = pieces.iter().map(|p| p.image()).collect();
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            if images[i].overlaps_interior(&images[j]) {
                return Err(VerifyError::OverlappingImages(i, j));
            }
        }
    }
    Ok(images)
}

pub(crate) fn check_transformations(spec: &AssemblerSpec, pieces: &[PieceMap]) -> Result<(), VerifyError> {
    for (idx, p) in pieces.iter().enumerate() {
        let m = &p.map;
        if m.dim() != spec.dim() {
            return Err(VerifyError::DimensionMismatch);
        }
        if !spec.permutation_allowed(&m.perm) {
            return Err(VerifyError::DisallowedTransformation {
                piece: idx,
                reason: format!("axis permutation {:?} not generated", m.perm),
            });
        }
        for axis in 0..spec.dim() {
            let s = &m.scales[axis];
            if s.is_zero() {
                return Err(VerifyError::DisallowedTransformation {
                    piece: idx,
                    reason: format!("zero scale on axis {axis}"),
                });
            }
            let negative = s < &Scalar::zero();
            if negative && !spec.flip_allowed(axis) {
                return Err(VerifyError::DisallowedTransformation {
                    piece: idx,
                    reason: format!("flip on axis {axis} not allowed"),
                });
            }
            if !spec.scaling_allowed(axis, &s.abs()) {
                return Err(VerifyError::DisallowedTransformation {
                    piece: idx,
                    reason: format!("scale {s} on axis {axis} not in the scaling group"),
                });
            }
            if !spec.translation_allowed(axis, &m.translate[axis]) {
                return Err(VerifyError::DisallowedTransformation {
                    piece: idx,
                    reason: format!(
                        "translation {} on axis {axis} outside the translation group",
                        m.translate[axis]
                    ),
                });
            }
        }
        let image = p.image();
        for axis in 0..spec.dim() {
            if !spec.cut_allowed(axis, p.source.lo(axis))
                || !spec.cut_allowed(axis, p.source.hi(axis))
                || !spec.cut_allowed(axis, image.lo(axis))
                || !spec.cut_allowed(axis, image.hi(axis))
            {
                return Err(VerifyError::CutOutsideL(idx));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Scissors automorphisms

/// A scissors automorphism: the piece sources cover the base and the piece
/// images cover it again.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScissorsAuto {
    pub spec: AssemblerSpec,
    pub base: RectPolytope,
    pieces: Vec<PieceMap>,
}

impl PartialEq for ScissorsAuto {
    fn eq(&self, other: &Self) -> bool {
        self.base.same_point_set(&other.base) && self.pieces == other.pieces
    }
}
impl Eq for ScissorsAuto {}

impl ScissorsAuto {
    /// Build from raw pieces; canonicalizes but does not verify.  Call
    /// [`ScissorsAuto::verify`] to certify the element.
    pub fn from_pieces(
        spec: AssemblerSpec,
        base: RectPolytope,
        pieces: Vec<PieceMap>,
    ) -> ScissorsAuto {
        let dim = base.dim();
        ScissorsAuto {
            spec,
            base,
            pieces: canonicalize_pieces(pieces, dim),
        }
    }

    pub fn identity(spec: AssemblerSpec, base: RectPolytope) -> ScissorsAuto {
        let id = AffineMap::identity(base.dim());
        let pieces = base
            .boxes()
            .iter()
            .map(|b| PieceMap::new(b.clone(), id.clone()))
            .collect();
        ScissorsAuto::from_pieces(spec, base, pieces)
    }

    /// Circle rotation of a 1-D interval: `x -> x + t` cyclically.
    pub fn rotation(spec: AssemblerSpec, lo: Scalar, hi: Scalar, t: Scalar) -> ScissorsAuto {
        assert!(lo < hi);
        let base = RectPolytope::interval(lo.clone(), hi.clone());
        if t.is_zero() {
            return ScissorsAuto::identity(spec, base);
        }
        assert!(Scalar::zero() < t && t < (&hi - &lo), "rotation out of range");
        let cut = &hi - &t;
        let pieces = vec![
            PieceMap::new(
                AxisBox::interval(lo.clone(), cut.clone()),
                AffineMap::translation(vec![t.clone()]),
            ),
            PieceMap::new(
                AxisBox::interval(cut, hi.clone()),
                AffineMap::translation(vec![&lo - &hi + t]),
            ),
        ];
        ScissorsAuto::from_pieces(spec, base, pieces)
    }

    pub fn pieces(&self) -> &[PieceMap] {
        &self.pieces
    }

    pub fn is_identity(&self) -> bool {
        self.pieces.iter().all(|p| p.map.is_identity())
    }

    /// Check every invariant: sources cover the base, images cover the base,
    /// transformations and cut coordinates allowed by the spec.
    pub fn verify(&self) -> Result<(), VerifyError> {
        let dim = self.base.dim();
        let sources = sources_polytope(&self.pieces, dim)?;
        if !sources.same_point_set(&self.base) {
            return Err(VerifyError::SourceNotCovered);
        }
        let images = check_images_disjoint(&self.pieces)?;
        for (idx, image) in images.iter().enumerate() {
            if !self.base.contains(&RectPolytope::from_box(image.clone())) {
                return Err(VerifyError::ImageOutsideTarget(idx));
            }
        }
        let image_set = RectPolytope::new(dim, images).expect("interiors checked disjoint");
        if !image_set.same_point_set(&self.base) {
            return Err(VerifyError::ImagesDontCover);
        }
        check_transformations(&self.spec, &self.pieces)
    }

    /// `g` after `self` (apply `self` first).
    pub fn then(&self, g: &ScissorsAuto) -> Result<ScissorsAuto, VerifyError> {
        if !self.base.same_point_set(&g.base) {
            return Err(VerifyError::BaseMismatch);
        }
        Ok(ScissorsAuto {
            spec: self.spec.clone(),
            base: self.base.clone(),
            pieces: compose_pieces(&self.pieces, &g.pieces, self.base.dim()),
        })
    }

    /// `self` after `g`, the usual composition order.
    pub fn compose(&self, g: &ScissorsAuto) -> Result<ScissorsAuto, VerifyError> {
        g.then(self)
    }

    pub fn inverse(&self) -> ScissorsAuto {
        ScissorsAuto {
            spec: self.spec.clone(),
            base: self.base.clone(),
            pieces: invert_pieces(&self.pieces, self.base.dim()),
        }
    }

    /// Image of a point in the interior of some piece; `OnCut` on piece
    /// boundaries, where the almost-everywhere map carries no value.
    pub fn apply(&self, x: &[Scalar]) -> Result<ApplyOutcome, VerifyError> {
        match self.base.locate(x) {
            PointLocation::Outside => Err(VerifyError::SourceTargetMismatch),
            _ => {
                for p in &self.pieces {
                    if p.source.interior_contains_point(x) {
                        return Ok(ApplyOutcome::Point(p.map.apply(x)));
                    }
                }
                Ok(ApplyOutcome::OnCut)
            }
        }
    }

    /// The same map presented with extra cuts; not canonical.
    pub fn subdivided_pieces(&self, extra_cuts: &[Vec<Scalar>]) -> Vec<PieceMap> {
        subdivide_pieces(&self.pieces, extra_cuts)
    }

    /// Disjoint union with an element on a disjoint base.
    pub fn disjoint_union(&self, other: &ScissorsAuto) -> Result<ScissorsAuto, VerifyError> {
        let base = self
            .base
            .union_disjoint(&other.base)
            .map_err(|_| VerifyError::BaseMismatch)?;
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        Ok(ScissorsAuto::from_pieces(self.spec.clone(), base, pieces))
    }

    /// Conjugate transport along an embedding: acts as `e . self . e^{-1}`
    /// on the image of `e` and as the identity on the complement.  This is a
    /// group homomorphism `Aut(P) -> Aut(Q)`.
    pub fn extend_along(&self, e: &ScissorsEmbedding) -> Result<ScissorsAuto, VerifyError> {
        if !self.base.same_point_set(&e.source) {
            return Err(VerifyError::BaseMismatch);
        }
        let dim = self.base.dim();
        let inv = invert_pieces(&e.pieces, dim);
        let through = compose_pieces(&compose_pieces(&inv, &self.pieces, dim), &e.pieces, dim);
        let mut pieces = through;
        let id = AffineMap::identity(dim);
        for b in e.complement.boxes() {
            pieces.push(PieceMap::new(b.clone(), id.clone()));
        }
        Ok(ScissorsAuto {
            spec: self.spec.clone(),
            base: e.target.clone(),
            pieces: canonicalize_pieces(pieces, dim),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ApplyOutcome {
    Point(Vec<Scalar>),
    OnCut,
}

// ---------------------------------------------------------------------------
// Scissors embeddings

/// A scissors embedding: sources cover the source polytope, images are an
/// interior-disjoint family inside the target, and the complement is the
/// rest of the target.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScissorsEmbedding {
    pub spec: AssemblerSpec,
    pub source: RectPolytope,
    pub target: RectPolytope,
    pieces: Vec<PieceMap>,
    complement: RectPolytope,
}

impl PartialEq for ScissorsEmbedding {
    fn eq(&self, other: &Self) -> bool {
        self.source.same_point_set(&other.source)
            && self.target.same_point_set(&other.target)
            && self.pieces == other.pieces
    }
}
impl Eq for ScissorsEmbedding {}

impl ScissorsEmbedding {
    pub fn from_pieces(
        spec: AssemblerSpec,
        source: RectPolytope,
        target: RectPolytope,
        pieces: Vec<PieceMap>,
    ) -> Result<ScissorsEmbedding, VerifyError> {
        let dim = source.dim();
        let pieces = canonicalize_pieces(pieces, dim);
        let images = check_images_disjoint(&pieces)?;
        let image_set =
            RectPolytope::new(dim, images).map_err(|_| VerifyError::OverlappingImages(0, 0))?;
        let complement = target
            .subtract(&image_set)
            .map_err(|_| VerifyError::ImageOutsideTarget(0))?;
        Ok(ScissorsEmbedding {
            spec,
            source,
            target,
            pieces,
            complement,
        })
    }

    /// The inclusion of a sub-polytope.
    pub fn inclusion(
        spec: AssemblerSpec,
        source: RectPolytope,
        target: RectPolytope,
    ) -> Result<ScissorsEmbedding, VerifyError> {
        let id = AffineMap::identity(source.dim());
        let pieces = source
            .boxes()
            .iter()
            .map(|b| PieceMap::new(b.clone(), id.clone()))
            .collect();
        ScissorsEmbedding::from_pieces(spec, source, target, pieces)
    }

    pub fn pieces(&self) -> &[PieceMap] {
        &self.pieces
    }

    pub fn complement(&self) -> &RectPolytope {
        &self.complement
    }

    pub fn image_polytope(&self) -> RectPolytope {
        RectPolytope::new(
            self.source.dim(),
            self.pieces.iter().map(|p| p.image()).collect(),
        )
        .expect("verified disjoint images")
    }

    pub fn verify(&self) -> Result<(), VerifyError> {
        let dim = self.source.dim();
        let sources = sources_polytope(&self.pieces, dim)?;
        if !sources.same_point_set(&self.source) {
            return Err(VerifyError::SourceNotCovered);
        }
        let _ = check_images_disjoint(&self.pieces)?;
        let image_set = self.image_polytope();
        if !self.target.contains(&image_set) {
            return Err(VerifyError::ImageOutsideTarget(0));
        }
        let complement = self.target.subtract(&image_set).expect("containment checked");
        if !complement.same_point_set(&self.complement) {
            return Err(VerifyError::SourceTargetMismatch);
        }
        // volume additivity is exact; the pieces preserve source volume
        // exactly when the spec has no scalings
        if image_set.volume() + self.complement.volume() != self.target.volume() {
            return Err(VerifyError::SourceTargetMismatch);
        }
        if self.spec.mode() == AssemblerMode::Ea
            && self.source.volume() + self.complement.volume() != self.target.volume()
        {
            return Err(VerifyError::SourceTargetMismatch);
        }
        check_transformations(&self.spec, &self.pieces)
    }

    /// Whether two embeddings into the same target have interior-disjoint
    /// images.
    pub fn disjoint_from(&self, other: &ScissorsEmbedding) -> bool {
        self.target.same_point_set(&other.target)
            && !self
                .image_polytope()
                .overlaps_interior(&other.image_polytope())
    }

    /// Factor `self` through the complement of `other`, when disjoint.
    pub fn factor_through_complement(
        &self,
        other: &ScissorsEmbedding,
    ) -> Option<ScissorsEmbedding> {
        if !self.disjoint_from(other) {
            return None;
        }
        ScissorsEmbedding::from_pieces(
            self.spec.clone(),
            self.source.clone(),
            other.complement.clone(),
            self.pieces.clone(),
        )
        .ok()
    }

    /// Source cover of the embedding (the pieces as polytopes).
    pub fn source_cover(&self) -> Cover {
        Cover::new(
            self.source.clone(),
            self.pieces
                .iter()
                .map(|p| RectPolytope::from_box(p.source.clone()))
                .collect(),
        )
        .expect("verified embeddings carry source covers")
    }
}

// ---------------------------------------------------------------------------
// Seeded random elements

/// Deterministic random scissors automorphism: the composite of `complexity`
/// random generator moves.  EA-mode specs use slab rotations and adjacent
/// slab swaps; S-mode specs use tree-pair rearrangements built from the
/// per-axis scaling generator.  The output always verifies.
pub fn random_auto(
    spec: &AssemblerSpec,
    base: &RectPolytope,
    seed: u64,
    complexity: usize,
) -> ScissorsAuto {
    let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let mut out = ScissorsAuto::identity(spec.clone(), base.clone());
    for _ in 0..complexity {
        let step = match spec.mode() {
            AssemblerMode::Ea => random_ea_move(spec, base, &mut rng),
            AssemblerMode::S => random_tree_pair_move(spec, base, &mut rng),
        };
        out = out.then(&step).expect("same base");
    }
    out
}

/// A random slab exchange along one axis, with a possible untouched head.
fn random_ea_move(spec: &AssemblerSpec, base: &RectPolytope, rng: &mut ChaCha8Rng) -> ScissorsAuto {
    let dim = base.dim();
    let axis = rng.random_range(0..dim);
    let b = &base.boxes()[rng.random_range(0..base.boxes().len())];
    let (lo, hi) = (b.lo(axis).clone(), b.hi(axis).clone());

    // two interior cut points in the translation group
    let first = spec
        .translations(axis)
        .random_between(&lo, &hi, rng)
        .expect("dense translation group");
    let second = spec
        .translations(axis)
        .random_between(&first, &hi, rng)
        .expect("dense translation group");

    let mut pieces = Vec::new();
    let id = AffineMap::identity(dim);
    for other in base.boxes() {
        if other != b {
            pieces.push(PieceMap::new(other.clone(), id.clone()));
        }
    }
    let mut slab = |a: &Scalar, c: &Scalar, shift: Scalar| {
        let mut intervals = b.intervals().to_vec();
        intervals[axis] = (a.clone(), c.clone());
        let source = AxisBox::new(intervals).expect("nondegenerate");
        let mut t = vec![Scalar::zero(); dim];
        t[axis] = shift;
        pieces.push(PieceMap::new(source, AffineMap::translation(t)));
    };
    if lo < first {
        slab(&lo, &first, Scalar::zero());
    }
    // exchange [first, second] and [second, hi]
    slab(&first, &second, &hi - &second);
    slab(&second, &hi, &first - &second);
    ScissorsAuto::from_pieces(spec.clone(), base.clone(), pieces)
}

/// A random tree-pair element: two random leaf decompositions of the base
/// with equal leaf counts, leaves matched by a random bijection via allowed
/// scalings and translations.
fn random_tree_pair_move(
    spec: &AssemblerSpec,
    base: &RectPolytope,
    rng: &mut ChaCha8Rng,
) -> ScissorsAuto {
    let splits = rng.random_range(1..=3usize);
    let mut source_leaves: Vec<AxisBox> = base.boxes().to_vec();
    let mut target_leaves: Vec<AxisBox> = base.boxes().to_vec();
    for _ in 0..splits {
        split_random_leaf(spec, &mut source_leaves, rng);
    }
    while target_leaves.len() < source_leaves.len() {
        split_random_leaf(spec, &mut target_leaves, rng);
    }
    while source_leaves.len() < target_leaves.len() {
        split_random_leaf(spec, &mut source_leaves, rng);
    }
    // random bijection
    let mut order: Vec<usize> = (0..target_leaves.len()).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let pieces = source_leaves
        .iter()
        .zip(order.iter().map(|&i| &target_leaves[i]))
        .map(|(src, dst)| PieceMap::new(src.clone(), box_to_box_map(spec.dim(), src, dst)))
        .collect();
    ScissorsAuto::from_pieces(spec.clone(), base.clone(), pieces)
}

/// Split one leaf along one axis using the spec's subdivision rule.
fn split_random_leaf(spec: &AssemblerSpec, leaves: &mut Vec<AxisBox>, rng: &mut ChaCha8Rng) {
    let idx = rng.random_range(0..leaves.len());
    let axis = rng.random_range(0..spec.dim());
    let leaf = leaves.swap_remove(idx);
    let children = spec.split_interval_cells(axis, leaf.lo(axis), leaf.hi(axis));
    for (a, c) in children {
        let mut intervals = leaf.intervals().to_vec();
        intervals[axis] = (a, c);
        leaves.push(AxisBox::new(intervals).expect("nondegenerate"));
    }
}

/// The unique axis-aligned scale-and-translate map between two boxes.
pub(crate) fn box_to_box_map(dim: usize, src: &AxisBox, dst: &AxisBox) -> AffineMap {
    let mut scales = Vec::with_capacity(dim);
    let mut translate = Vec::with_capacity(dim);
    for axis in 0..dim {
        let s = dst.side(axis) / src.side(axis);
        let t = dst.lo(axis) - &(&s * src.lo(axis));
        scales.push(s);
        translate.push(t);
    }
    AffineMap {
        perm: (0..dim).collect(),
        scales,
        translate,
    }
}
