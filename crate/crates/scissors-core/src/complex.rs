//! Finite destabilisation complexes and their exact homology: vertices are
//! embeddings, simplices are pairwise-disjoint tuples, and connectivity is
//! certified homologically (plus connectedness) from integral boundary
//! matrices and Smith normal form.

use crate::assembler::FiniteSetAssembler;
use crate::ktheory::{smith_normal_form, FgAbGroup, IntMatrix};
use num::bigint::BigInt;
use num::One;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplexError {
    #[error("model too large: {0} vertices (cap {1})")]
    ModelTooLarge(usize, usize),
}

pub const DEFAULT_VERTEX_CAP: usize = 5000;

// ---------------------------------------------------------------------------
// Simplicial complexes

/// A finite simplicial complex.  Disjointness of embeddings is a pairwise
/// condition, so destabilisation complexes are flag complexes over a
/// compatibility graph; generic complexes are stored via maximal faces.
#[derive(Debug, Clone)]
pub struct SimplicialComplex {
    vertex_labels: Vec<String>,
    faces: Facets,
}

#[derive(Debug, Clone)]
enum Facets {
    /// Downward closure of an explicit face list.
    Maximal(Vec<BTreeSet<usize>>),
    /// Flag complex: simplices are the cliques of the adjacency relation.
    Flag(Vec<BTreeSet<usize>>),
}

impl SimplicialComplex {
    pub fn from_maximal_faces(vertex_labels: Vec<String>, faces: Vec<Vec<usize>>) -> Self {
        let faces = faces
            .into_iter()
            .map(|f| f.into_iter().collect::<BTreeSet<usize>>())
            .collect();
        SimplicialComplex {
            vertex_labels,
            faces: Facets::Maximal(faces),
        }
    }

    /// Flag complex on a symmetric adjacency relation.
    pub fn from_compatibility(vertex_labels: Vec<String>, edges: &[(usize, usize)]) -> Self {
        let n = vertex_labels.len();
        let mut adj = vec![BTreeSet::new(); n];
        for &(a, b) in edges {
            adj[a].insert(b);
            adj[b].insert(a);
        }
        SimplicialComplex {
            vertex_labels,
            faces: Facets::Flag(adj),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_labels.len()
    }

    pub fn vertex_labels(&self) -> &[String] {
        &self.vertex_labels
    }

    pub fn is_empty(&self) -> bool {
        self.vertex_labels.is_empty()
    }

    /// A vertex joined to every other vertex makes the complex a cone.
    pub fn has_cone_vertex(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return false;
        }
        match &self.faces {
            Facets::Flag(adj) => (0..n).any(|v| adj[v].len() == n - 1),
            Facets::Maximal(faces) => {
                faces.len() == 1 && faces[0].len() == n
            }
        }
    }

    /// All faces with `k + 1` vertices, sorted.
    pub fn faces_of_dim(&self, k: usize) -> Vec<Vec<usize>> {
        let size = k + 1;
        match &self.faces {
            Facets::Maximal(faces) => {
                let mut out = BTreeSet::new();
                for f in faces {
                    if f.len() >= size {
                        let verts: Vec<usize> = f.iter().copied().collect();
                        subsets_of_size(&verts, size, &mut out);
                    }
                }
                out.into_iter().collect()
            }
            Facets::Flag(adj) => {
                let mut out = Vec::new();
                let mut current = Vec::with_capacity(size);
                cliques_of_size(adj, 0, size, &mut current, &mut out);
                out
            }
        }
    }

    /// Largest dimension carrying a face, or `None` when empty.
    pub fn dimension(&self) -> Option<usize> {
        if self.is_empty() {
            return None;
        }
        match &self.faces {
            Facets::Maximal(faces) => faces.iter().map(|f| f.len()).max().map(|s| s - 1),
            Facets::Flag(_) => {
                let mut d = 0;
                while !self.faces_of_dim(d + 1).is_empty() {
                    d += 1;
                }
                Some(d)
            }
        }
    }

    /// Boundary matrix from `k`-faces to `(k-1)`-faces; for `k = 0` the
    /// augmentation to the point.
    pub fn boundary_matrix(&self, k: usize, faces_k: &[Vec<usize>], faces_km1: &[Vec<usize>]) -> IntMatrix {
        if k == 0 {
            let mut m = IntMatrix::zero(1, faces_k.len());
            for j in 0..faces_k.len() {
                m.set(0, j, BigInt::one());
            }
            return m;
        }
        let index: BTreeMap<&[usize], usize> = faces_km1
            .iter()
            .enumerate()
            .map(|(i, f)| (f.as_slice(), i))
            .collect();
        let mut m = IntMatrix::zero(faces_km1.len(), faces_k.len());
        for (j, face) in faces_k.iter().enumerate() {
            for drop in 0..face.len() {
                let mut sub = face.clone();
                sub.remove(drop);
                let i = index[sub.as_slice()];
                let sign = if drop % 2 == 0 {
                    BigInt::one()
                } else {
                    -BigInt::one()
                };
                m.set(i, j, sign);
            }
        }
        m
    }
}

fn subsets_of_size(verts: &[usize], size: usize, out: &mut BTreeSet<Vec<usize>>) {
    fn rec(verts: &[usize], size: usize, start: usize, cur: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
        if cur.len() == size {
            out.insert(cur.clone());
            return;
        }
        for i in start..verts.len() {
            cur.push(verts[i]);
            rec(verts, size, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(verts, size, 0, &mut Vec::new(), out);
}

fn cliques_of_size(
    adj: &[BTreeSet<usize>],
    start: usize,
    size: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if current.len() == size {
        out.push(current.clone());
        return;
    }
    for v in start..adj.len() {
        if current.iter().all(|&u| adj[u].contains(&v)) {
            current.push(v);
            cliques_of_size(adj, v + 1, size, current, out);
            current.pop();
        }
    }
}

// ---------------------------------------------------------------------------
// Homology and connectivity

/// Homological connectivity measurement.  `Empty` is the sentinel for the
/// empty complex; `AtLeast(c)` certifies vanishing reduced homology through
/// degree `c` (the probe stopped there); `Exactly(c)` pins the first
/// nonvanishing degree at `c + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "type", content = "value", rename_all = "kebab-case")]
pub enum Connectivity {
    Empty,
    Contractible,
    AtLeast(i64),
    Exactly(i64),
}

impl Connectivity {
    pub fn satisfies(&self, bound: i64) -> bool {
        match self {
            Connectivity::Empty => bound <= -2,
            Connectivity::Contractible => true,
            Connectivity::AtLeast(c) | Connectivity::Exactly(c) => bound <= *c,
        }
    }
}

impl fmt::Display for Connectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Connectivity::Empty => write!(f, "-2 (empty)"),
            Connectivity::Contractible => write!(f, "infinite (contractible)"),
            Connectivity::AtLeast(c) => write!(f, ">= {c}"),
            Connectivity::Exactly(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HomologyReport {
    /// Reduced homology groups in degrees `0 ..= probed`.
    pub reduced: Vec<(usize, FgAbGroup)>,
    pub connectivity: Connectivity,
    /// Face counts per dimension, as far as enumerated.
    pub face_counts: Vec<usize>,
}

/// Reduced integral simplicial homology through degree `probe_dim`,
/// computed from boundary matrices and Smith normal form.
pub fn complex_homology_probed(k: &SimplicialComplex, probe_dim: usize) -> HomologyReport {
    if k.is_empty() {
        return HomologyReport {
            reduced: Vec::new(),
            connectivity: Connectivity::Empty,
            face_counts: Vec::new(),
        };
    }
    let top = k.dimension().unwrap_or(0);
    let probe = probe_dim.min(top);

    // faces up to one dimension above the probe
    let mut faces: Vec<Vec<Vec<usize>>> = Vec::new();
    for d in 0..=(probe + 1).min(top) {
        faces.push(k.faces_of_dim(d));
    }
    let face_counts: Vec<usize> = faces.iter().map(|f| f.len()).collect();

    let mut reduced = Vec::new();
    for d in 0..=probe {
        let empty = Vec::new();
        let faces_d = &faces[d];
        let faces_dm1: &Vec<Vec<usize>> = if d == 0 { &empty } else { &faces[d - 1] };
        let boundary_d = k.boundary_matrix(d, faces_d, faces_dm1);
        let rank_d = smith_normal_form(&boundary_d).rank();
        let (rank_dp1, torsion) = if d + 1 < faces.len() {
            let boundary_up = k.boundary_matrix(d + 1, &faces[d + 1], faces_d);
            let snf = smith_normal_form(&boundary_up);
            let torsion: Vec<u64> = snf
                .invariant_factors()
                .iter()
                .filter(|f| **f > BigInt::one())
                .map(|f| u64::try_from(f).expect("small torsion"))
                .collect();
            (snf.rank(), torsion)
        } else {
            (0, Vec::new())
        };
        let free = faces_d.len() - rank_d - rank_dp1;
        reduced.push((
            d,
            FgAbGroup {
                free,
                torsion,
                inverted: Vec::new(),
            },
        ));
    }

    let first_nonzero = reduced.iter().find(|(_, g)| !g.is_trivial()).map(|(d, _)| *d);
    let connectivity = match first_nonzero {
        Some(d) => Connectivity::Exactly(d as i64 - 1),
        None => {
            if k.has_cone_vertex() || probe >= top {
                // all reduced homology vanishes: a cone is contractible, and
                // past the top dimension nothing else can appear
                Connectivity::Contractible
            } else {
                Connectivity::AtLeast(probe as i64)
            }
        }
    };
    HomologyReport {
        reduced,
        connectivity,
        face_counts,
    }
}

/// Full reduced homology up to the dimension of the complex.
pub fn complex_homology(k: &SimplicialComplex) -> HomologyReport {
    let top = k.dimension().unwrap_or(0);
    complex_homology_probed(k, top)
}

// ---------------------------------------------------------------------------
// Destabilisation complexes

/// Finite models of the complex of disjoint embeddings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum DestabModel {
    /// Embeddings of a `copies`-element set into an `ambient`-element set.
    FiniteSet { copies: usize, ambient: usize },
    /// Embeddings of `cells` grid cells into `ambient` grid cells of an
    /// interval with non-dense `(1/m)Z` cuts: combinatorially the same
    /// injections, labelled as cells.
    GridInterval { cells: usize, ambient: usize },
}

impl DestabModel {
    pub fn copies(&self) -> usize {
        match *self {
            DestabModel::FiniteSet { copies, .. } => copies,
            DestabModel::GridInterval { cells, .. } => cells,
        }
    }

    pub fn ambient(&self) -> usize {
        match *self {
            DestabModel::FiniteSet { ambient, .. } => ambient,
            DestabModel::GridInterval { ambient, .. } => ambient,
        }
    }

    /// The number of pairwise disjoint copies that fit.
    pub fn max_disjoint_copies(&self) -> usize {
        if self.copies() == 0 {
            0
        } else {
            self.ambient() / self.copies()
        }
    }
}

/// Build the complex of disjoint embeddings: vertices are ordered injections
/// of the copy atoms into the ambient atoms, simplices are tuples with
/// pairwise disjoint images.
pub fn build_destab_complex(
    model: DestabModel,
    vertex_cap: usize,
) -> Result<SimplicialComplex, ComplexError> {
    let x = model.copies();
    let b = model.ambient();
    assert!(x >= 1, "the embedded object must be nonempty");
    let mut vertices: Vec<Vec<usize>> = Vec::new();
    let mut current = Vec::with_capacity(x);
    let mut used = vec![false; b];
    enumerate_injections(x, b, &mut current, &mut used, &mut vertices);
    if vertices.len() > vertex_cap {
        return Err(ComplexError::ModelTooLarge(vertices.len(), vertex_cap));
    }
    let labels: Vec<String> = vertices
        .iter()
        .map(|v| {
            let parts: Vec<String> = v.iter().map(|c| c.to_string()).collect();
            format!("({})", parts.join(","))
        })
        .collect();
    let image_sets: Vec<BTreeSet<usize>> = vertices
        .iter()
        .map(|v| v.iter().copied().collect())
        .collect();
    let mut edges = Vec::new();
    for i in 0..vertices.len() {
        for j in i + 1..vertices.len() {
            if image_sets[i].is_disjoint(&image_sets[j]) {
                edges.push((i, j));
            }
        }
    }
    Ok(SimplicialComplex::from_compatibility(labels, &edges))
}

fn enumerate_injections(
    remaining: usize,
    b: usize,
    current: &mut Vec<usize>,
    used: &mut Vec<bool>,
    out: &mut Vec<Vec<usize>>,
) {
    if remaining == 0 {
        out.push(current.clone());
        return;
    }
    for slot in 0..b {
        if !used[slot] {
            used[slot] = true;
            current.push(slot);
            enumerate_injections(remaining - 1, b, current, used, out);
            current.pop();
            used[slot] = false;
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConnectivityReport {
    pub model: DestabModel,
    pub vertex_count: usize,
    pub disjoint_copies: usize,
    pub bound: i64,
    pub connectivity: Connectivity,
    pub holds: bool,
    pub face_counts: Vec<usize>,
}

/// Check the connectivity lower bound `floor((k - 3) / 2)` where `k` is the
/// number of pairwise disjoint copies, probing homology just far enough to
/// certify the bound.
pub fn check_connectivity_bound(
    model: DestabModel,
    vertex_cap: usize,
) -> Result<ConnectivityReport, ComplexError> {
    let complex = build_destab_complex(model, vertex_cap)?;
    let k = model.max_disjoint_copies() as i64;
    let bound = (k - 3).div_euclid(2);
    let probe = (bound + 1).max(0) as usize;
    let report = complex_homology_probed(&complex, probe);
    Ok(ConnectivityReport {
        model,
        vertex_count: complex.vertex_count(),
        disjoint_copies: k as usize,
        bound,
        connectivity: report.connectivity,
        holds: report.connectivity.satisfies(bound),
        face_counts: report.face_counts,
    })
}

// ---------------------------------------------------------------------------
// Symmetric group oracle

#[derive(Debug, Clone, Serialize)]
pub struct SymmetricOracleReport {
    pub n: usize,
    pub order: usize,
    pub table_matches: bool,
}

/// Enumerate the automorphism spans of `{1..n}` in the finite-set assembler,
/// build the full multiplication table through span composition, and compare
/// with the symmetric group composing permutations directly.
pub fn symmetric_group_oracle(n: usize) -> SymmetricOracleReport {
    let asm = FiniteSetAssembler::new(n);
    let autos = asm.automorphisms();
    let order = autos.len();
    let perms: Vec<Vec<usize>> = autos
        .iter()
        .map(|a| a.canonical_map().into_iter().map(|(_, t)| t).collect())
        .collect();
    let mut table_matches = (1..=n).product::<usize>() == order;
    for (i, a) in autos.iter().enumerate() {
        for (j, b) in autos.iter().enumerate() {
            let via_spans = a.then(b).expect("same object");
            let direct: Vec<usize> = perms[i].iter().map(|&m| perms[j][m]).collect();
            let expected: Vec<(usize, usize)> = direct.iter().copied().enumerate().collect();
            if via_spans.canonical_map() != expected {
                table_matches = false;
            }
        }
    }
    SymmetricOracleReport {
        n,
        order,
        table_matches,
    }
}
