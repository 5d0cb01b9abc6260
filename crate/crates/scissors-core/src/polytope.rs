//! Rectilinear polytopes: finite unions of axis-aligned boxes with disjoint
//! interiors, their covers, grid refinement, and exact volume.

use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolytopeError {
    #[error("degenerate interval on axis {0}: lower bound must be strictly below upper")]
    DegenerateBox(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("boxes {0} and {1} have overlapping interiors")]
    OverlappingBoxes(usize, usize),
    #[error("covers have different targets")]
    TargetMismatch,
    #[error("cover pieces do not exhaust the target")]
    NotCovering,
    #[error("polytope is not contained in the ambient one")]
    NotContained,
}

/// A nondegenerate closed axis-aligned box; lower-dimensional faces are never
/// objects.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AxisBox {
    intervals: Vec<(Scalar, Scalar)>,
}

impl AxisBox {
    pub fn new(intervals: Vec<(Scalar, Scalar)>) -> Result<Self, PolytopeError> {
        for (axis, (lo, hi)) in intervals.iter().enumerate() {
            if lo >= hi {
                return Err(PolytopeError::DegenerateBox(axis));
            }
        }
        Ok(AxisBox { intervals })
    }

    /// 1-D interval `[lo, hi]`.
    pub fn interval(lo: Scalar, hi: Scalar) -> Self {
        AxisBox::new(vec![(lo, hi)]).expect("nondegenerate interval")
    }

    pub fn unit(dim: usize) -> Self {
        AxisBox::new(vec![(Scalar::zero(), Scalar::one()); dim]).expect("unit box")
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn lo(&self, axis: usize) -> &Scalar {
        &self.intervals[axis].0
    }

    pub fn hi(&self, axis: usize) -> &Scalar {
        &self.intervals[axis].1
    }

    pub fn side(&self, axis: usize) -> Scalar {
        self.hi(axis) - self.lo(axis)
    }

    pub fn intervals(&self) -> &[(Scalar, Scalar)] {
        &self.intervals
    }

    pub fn lower_corner(&self) -> Vec<Scalar> {
        self.intervals.iter().map(|(lo, _)| lo.clone()).collect()
    }

    pub fn volume(&self) -> Scalar {
        self.intervals
            .iter()
            .fold(Scalar::one(), |acc, (lo, hi)| acc * (hi - lo))
    }

    pub fn overlaps_interior(&self, other: &AxisBox) -> bool {
        debug_assert_eq!(self.dim(), other.dim());
        self.intervals
            .iter()
            .zip(&other.intervals)
            .all(|((alo, ahi), (blo, bhi))| Scalar::max(alo, blo) < Scalar::min(ahi, bhi))
    }

    pub fn contains_box(&self, other: &AxisBox) -> bool {
        self.intervals
            .iter()
            .zip(&other.intervals)
            .all(|((alo, ahi), (blo, bhi))| alo <= blo && bhi <= ahi)
    }

    pub fn intersect(&self, other: &AxisBox) -> Option<AxisBox> {
        let mut intervals = Vec::with_capacity(self.dim());
        for ((alo, ahi), (blo, bhi)) in self.intervals.iter().zip(&other.intervals) {
            let lo = Scalar::max(alo, blo);
            let hi = Scalar::min(ahi, bhi);
            if lo >= hi {
                return None;
            }
            intervals.push((lo, hi));
        }
        Some(AxisBox { intervals })
    }

    /// Whether the point lies in the interior.
    pub fn interior_contains_point(&self, point: &[Scalar]) -> bool {
        self.intervals
            .iter()
            .zip(point)
            .all(|((lo, hi), x)| lo < x && x < hi)
    }

    pub fn contains_point(&self, point: &[Scalar]) -> bool {
        self.intervals
            .iter()
            .zip(point)
            .all(|((lo, hi), x)| lo <= x && x <= hi)
    }
}

/// A finite (possibly empty) union of axis-aligned boxes with pairwise
/// disjoint interiors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RectPolytope {
    dim: usize,
    boxes: Vec<AxisBox>,
}

impl RectPolytope {
    pub fn new(dim: usize, boxes: Vec<AxisBox>) -> Result<Self, PolytopeError> {
        for b in &boxes {
            if b.dim() != dim {
                return Err(PolytopeError::DimensionMismatch {
                    expected: dim,
                    got: b.dim(),
                });
            }
        }
        for i in 0..boxes.len() {
            for j in i + 1..boxes.len() {
                if boxes[i].overlaps_interior(&boxes[j]) {
                    return Err(PolytopeError::OverlappingBoxes(i, j));
                }
            }
        }
        Ok(RectPolytope { dim, boxes })
    }

    pub fn empty(dim: usize) -> Self {
        RectPolytope {
            dim,
            boxes: Vec::new(),
        }
    }

    pub fn from_box(b: AxisBox) -> Self {
        let dim = b.dim();
        RectPolytope {
            dim,
            boxes: vec![b],
        }
    }

    /// The 1-D interval `[lo, hi]` as a polytope.
    pub fn interval(lo: Scalar, hi: Scalar) -> Self {
        RectPolytope::from_box(AxisBox::interval(lo, hi))
    }

    pub fn unit(dim: usize) -> Self {
        RectPolytope::from_box(AxisBox::unit(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn boxes(&self) -> &[AxisBox] {
        &self.boxes
    }

    pub fn volume(&self) -> Scalar {
        self.boxes
            .iter()
            .fold(Scalar::zero(), |acc, b| acc + b.volume())
    }

    /// Deterministic canonical form: cut into the grid generated by all box
    /// coordinates, merge greedily along axis 0, then axis 1, and so on,
    /// finally sorting boxes by lower corner.  Two polytopes with the same
    /// point set canonicalize identically.
    pub fn canonicalize(&self) -> RectPolytope {
        let cells = self.grid_cells(&self.cut_coords());
        let merged = merge_cells(cells, self.dim);
        RectPolytope {
            dim: self.dim,
            boxes: merged,
        }
    }

    /// Per-axis sorted cut coordinates of the current presentation.
    pub fn cut_coords(&self) -> Vec<Vec<Scalar>> {
        let mut cuts = vec![Vec::new(); self.dim];
        for b in &self.boxes {
            for (axis, (lo, hi)) in b.intervals().iter().enumerate() {
                cuts[axis].push(lo.clone());
                cuts[axis].push(hi.clone());
            }
        }
        for axis_cuts in &mut cuts {
            axis_cuts.sort();
            axis_cuts.dedup();
        }
        cuts
    }

    /// Subdivide every box along the given per-axis cut coordinates.
    pub fn grid_cells(&self, cuts: &[Vec<Scalar>]) -> Vec<AxisBox> {
        let mut cells = Vec::new();
        for b in &self.boxes {
            let per_axis: Vec<Vec<(Scalar, Scalar)>> = (0..self.dim)
                .map(|axis| split_interval(b.lo(axis), b.hi(axis), &cuts[axis]))
                .collect();
            push_products(&per_axis, &mut Vec::new(), &mut cells);
        }
        cells
    }

    pub fn same_point_set(&self, other: &RectPolytope) -> bool {
        self.dim == other.dim && self.canonicalize().boxes == other.canonicalize().boxes
    }

    /// Point-set intersection, canonicalized.
    pub fn intersect(&self, other: &RectPolytope) -> RectPolytope {
        let mut boxes = Vec::new();
        for a in &self.boxes {
            for b in &other.boxes {
                if let Some(c) = a.intersect(b) {
                    boxes.push(c);
                }
            }
        }
        RectPolytope {
            dim: self.dim,
            boxes,
        }
        .canonicalize()
    }

    pub fn overlaps_interior(&self, other: &RectPolytope) -> bool {
        self.boxes
            .iter()
            .any(|a| other.boxes.iter().any(|b| a.overlaps_interior(b)))
    }

    /// Whether `self` contains `other` as a point set.
    pub fn contains(&self, other: &RectPolytope) -> bool {
        if other.is_empty() {
            return true;
        }
        if self.dim != other.dim {
            return false;
        }
        let cuts = merge_cuts(self.cut_coords(), other.cut_coords());
        other
            .grid_cells(&cuts)
            .iter()
            .all(|cell| self.boxes.iter().any(|b| b.contains_box(cell)))
    }

    /// Set difference `self - other`; `other` must be contained in `self`.
    pub fn subtract(&self, other: &RectPolytope) -> Result<RectPolytope, PolytopeError> {
        if !self.contains(other) {
            return Err(PolytopeError::NotContained);
        }
        let cuts = merge_cuts(self.cut_coords(), other.cut_coords());
        let remaining: Vec<AxisBox> = self
            .grid_cells(&cuts)
            .into_iter()
            .filter(|cell| !other.boxes.iter().any(|b| b.contains_box(cell)))
            .collect();
        Ok(RectPolytope {
            dim: self.dim,
            boxes: remaining,
        }
        .canonicalize())
    }

    /// Disjoint union; boxes must not overlap.
    pub fn union_disjoint(&self, other: &RectPolytope) -> Result<RectPolytope, PolytopeError> {
        let mut boxes = self.boxes.clone();
        boxes.extend(other.boxes.iter().cloned());
        RectPolytope::new(self.dim, boxes)
    }

    /// Translate the whole polytope by the given vector.
    pub fn translate(&self, t: &[Scalar]) -> RectPolytope {
        let boxes = self
            .boxes
            .iter()
            .map(|b| {
                AxisBox {
                    intervals: b
                        .intervals()
                        .iter()
                        .zip(t)
                        .map(|((lo, hi), d)| (lo + d, hi + d))
                        .collect(),
                }
            })
            .collect();
        RectPolytope {
            dim: self.dim,
            boxes,
        }
    }

    /// Locate a point: the index of the box whose interior contains it,
    /// `OnCut` if it lies on a shared face inside the polytope, `Outside`
    /// otherwise.
    pub fn locate(&self, point: &[Scalar]) -> PointLocation {
        for (i, b) in self.boxes.iter().enumerate() {
            if b.interior_contains_point(point) {
                return PointLocation::Interior(i);
            }
        }
        if self.boxes.iter().any(|b| b.contains_point(point)) {
            PointLocation::OnCut
        } else {
            PointLocation::Outside
        }
    }
}

impl fmt::Display for RectPolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.boxes.is_empty() {
            return write!(f, "(empty)");
        }
        for (i, b) in self.boxes.iter().enumerate() {
            if i > 0 {
                write!(f, " u ")?;
            }
            for (axis, (lo, hi)) in b.intervals().iter().enumerate() {
                if axis > 0 {
                    write!(f, "x")?;
                }
                write!(f, "[{lo},{hi}]")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointLocation {
    Interior(usize),
    OnCut,
    Outside,
}

fn split_interval(lo: &Scalar, hi: &Scalar, cuts: &[Scalar]) -> Vec<(Scalar, Scalar)> {
    let mut bounds = vec![lo.clone()];
    for c in cuts {
        if c > lo && c < hi {
            bounds.push(c.clone());
        }
    }
    bounds.push(hi.clone());
    bounds.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect()
}

fn push_products(
    per_axis: &[Vec<(Scalar, Scalar)>],
    prefix: &mut Vec<(Scalar, Scalar)>,
    out: &mut Vec<AxisBox>,
) {
    if prefix.len() == per_axis.len() {
        out.push(AxisBox {
            intervals: prefix.clone(),
        });
        return;
    }
    for iv in &per_axis[prefix.len()] {
        prefix.push(iv.clone());
        push_products(per_axis, prefix, out);
        prefix.pop();
    }
}

fn merge_cuts(a: Vec<Vec<Scalar>>, b: Vec<Vec<Scalar>>) -> Vec<Vec<Scalar>> {
    a.into_iter()
        .zip(b)
        .map(|(mut xs, ys)| {
            xs.extend(ys);
            xs.sort();
            xs.dedup();
            xs
        })
        .collect()
}

fn merge_cells(mut cells: Vec<AxisBox>, dim: usize) -> Vec<AxisBox> {
    for axis in 0..dim {
        // group by the intervals on every other axis, then fuse runs that
        // meet end-to-end along `axis`
        cells.sort_by(|a, b| {
            let ka: Vec<_> = (0..dim).filter(|&i| i != axis).map(|i| &a.intervals()[i]).collect();
            let kb: Vec<_> = (0..dim).filter(|&i| i != axis).map(|i| &b.intervals()[i]).collect();
            ka.cmp(&kb).then_with(|| a.lo(axis).cmp(b.lo(axis)))
        });
        let mut merged: Vec<AxisBox> = Vec::with_capacity(cells.len());
        for cell in cells {
            if let Some(last) = merged.last_mut() {
                let same_cross_section = (0..dim)
                    .filter(|&i| i != axis)
                    .all(|i| last.intervals()[i] == cell.intervals()[i]);
                if same_cross_section && last.hi(axis) == cell.lo(axis) {
                    last.intervals[axis].1 = cell.intervals()[axis].1.clone();
                    continue;
                }
            }
            merged.push(cell);
        }
        cells = merged;
    }
    cells.sort();
    cells
}

/// A disjoint finite covering family: pieces with pairwise disjoint interiors
/// whose union is the target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cover {
    target: RectPolytope,
    pieces: Vec<RectPolytope>,
}

impl Cover {
    pub fn new(target: RectPolytope, pieces: Vec<RectPolytope>) -> Result<Self, PolytopeError> {
        for (i, p) in pieces.iter().enumerate() {
            if p.dim() != target.dim() {
                return Err(PolytopeError::DimensionMismatch {
                    expected: target.dim(),
                    got: p.dim(),
                });
            }
            for (j, q) in pieces.iter().enumerate().skip(i + 1) {
                if p.overlaps_interior(q) {
                    return Err(PolytopeError::OverlappingBoxes(i, j));
                }
            }
        }
        let mut all_boxes = Vec::new();
        for p in &pieces {
            all_boxes.extend(p.boxes().iter().cloned());
        }
        let union = RectPolytope::new(target.dim(), all_boxes)?;
        if !union.same_point_set(&target) {
            return Err(PolytopeError::NotCovering);
        }
        Ok(Cover { target, pieces })
    }

    /// The one-piece cover of a polytope by itself.
    pub fn trivial(target: RectPolytope) -> Self {
        let pieces = vec![target.clone()];
        Cover { target, pieces }
    }

    pub fn target(&self) -> &RectPolytope {
        &self.target
    }

    pub fn pieces(&self) -> &[RectPolytope] {
        &self.pieces
    }

    /// Common refinement of two covers of the same point set: every output
    /// piece lies in exactly one piece of each input.
    pub fn refine_common(&self, other: &Cover) -> Result<Cover, PolytopeError> {
        if !self.target.same_point_set(&other.target) {
            return Err(PolytopeError::TargetMismatch);
        }
        let mut pieces = Vec::new();
        for a in &self.pieces {
            for b in &other.pieces {
                let c = a.intersect(b);
                if !c.is_empty() {
                    pieces.push(c);
                }
            }
        }
        Ok(Cover {
            target: self.target.clone(),
            pieces,
        })
    }
}
