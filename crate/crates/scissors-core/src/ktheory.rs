//! Finitely generated abelian groups, Smith normal form, exterior powers of
//! integer matrices, the two-term-complex homology of one-dimensional
//! K-theory spectra, Künneth for smash products, and Poincaré series of
//! stable homology.

use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KTheoryError {
    #[error("multiplier matrix must be square")]
    NotSquare,
    #[error("multiplier matrix is singular over Q")]
    SingularMultiplier,
    #[error("determinant {0} is too large to factor")]
    FactorTooLarge(BigInt),
}

// ---------------------------------------------------------------------------
// Integer matrices

/// Dense integer matrix with exact arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntMatrix {
    rows: Vec<Vec<BigInt>>,
}

impl IntMatrix {
    pub fn new(rows: Vec<Vec<BigInt>>) -> Self {
        if let Some(first) = rows.first() {
            let w = first.len();
            assert!(rows.iter().all(|r| r.len() == w), "ragged matrix");
        }
        IntMatrix { rows }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        IntMatrix::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
        )
    }

    pub fn zero(nrows: usize, ncols: usize) -> Self {
        IntMatrix {
            rows: vec![vec![BigInt::zero(); ncols]; nrows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m.rows[i][i] = BigInt::one();
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.rows[i][j] = v;
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.ncols(), other.nrows());
        let mut out = IntMatrix::zero(self.nrows(), other.ncols());
        for i in 0..self.nrows() {
            for k in 0..self.ncols() {
                if self.rows[i][k].is_zero() {
                    continue;
                }
                for j in 0..other.ncols() {
                    let add = &self.rows[i][k] * &other.rows[k][j];
                    out.rows[i][j] += add;
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.nrows(), other.nrows());
        assert_eq!(self.ncols(), other.ncols());
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        IntMatrix { rows }
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        let n = self.nrows();
        assert_eq!(n, self.ncols(), "determinant of a non-square matrix");
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.rows.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                    return BigInt::zero();
                };
                m.swap(k, swap);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = num / &prev;
                }
            }
            prev = m[k][k].clone();
        }
        sign * m[n - 1][n - 1].clone()
    }

    /// Rank over Q.
    pub fn rank(&self) -> usize {
        smith_normal_form(self).rank()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            writeln!(
                f,
                "[{}]",
                row.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
            )?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Smith normal form

/// `u * m * v = d` with `u`, `v` unimodular and `d` diagonal with the
/// divisibility chain `d1 | d2 | ...`.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    /// Positive diagonal entries, in chain order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.d.nrows().min(self.d.ncols()))
            .map(|i| self.d.get(i, i).clone())
            .filter(|v| !v.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let nrows = m.nrows();
    let ncols = m.ncols();
    let mut a = m.rows.clone();
    let mut u = IntMatrix::identity(nrows);
    let mut v = IntMatrix::identity(ncols);

    let min_dim = nrows.min(ncols);
    for k in 0..min_dim {
        'pivot: loop {
            // smallest nonzero entry in the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in k..nrows {
                for j in k..ncols {
                    if !a[i][j].is_zero()
                        && best
                            .map(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                            .unwrap_or(true)
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return SmithForm {
                    d: IntMatrix { rows: a },
                    u,
                    v,
                };
            };
            if pi != k {
                a.swap(k, pi);
                u.rows.swap(k, pi);
            }
            if pj != k {
                swap_cols(&mut a, k, pj);
                swap_cols(&mut v.rows, k, pj);
            }
            // clear the pivot column and row; a nonzero remainder replaces
            // the pivot on the next spin of the loop
            let mut dirty = false;
            for i in k + 1..nrows {
                if !a[i][k].is_zero() {
                    let q = div_round(&a[i][k], &a[k][k]);
                    if !q.is_zero() {
                        row_op(&mut a, i, k, &q);
                        row_op(&mut u.rows, i, k, &q);
                    }
                    if !a[i][k].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue 'pivot;
            }
            for j in k + 1..ncols {
                if !a[k][j].is_zero() {
                    let q = div_round(&a[k][j], &a[k][k]);
                    if !q.is_zero() {
                        col_op(&mut a, j, k, &q);
                        col_op(&mut v.rows, j, k, &q);
                    }
                    if !a[k][j].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue 'pivot;
            }
            // enforce divisibility of the trailing block by the pivot
            for i in k + 1..nrows {
                for j in k + 1..ncols {
                    if !(&a[i][j] % &a[k][k]).is_zero() {
                        let neg_one = -BigInt::one();
                        row_op(&mut a, k, i, &neg_one);
                        row_op(&mut u.rows, k, i, &neg_one);
                        continue 'pivot;
                    }
                }
            }
            if a[k][k].is_negative() {
                negate_row(&mut a, k);
                negate_row(&mut u.rows, k);
            }
            break;
        }
    }
    SmithForm {
        d: IntMatrix { rows: a },
        u,
        v,
    }
}

fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    // rounded division keeps remainders at most |b|/2
    let (q, r) = a.div_rem(b);
    if BigInt::from(2) * r.abs() > b.abs() {
        if r.sign() == b.sign() {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

fn row_op(rows: &mut [Vec<BigInt>], target: usize, source: usize, factor: &BigInt) {
    // rows[target] -= factor * rows[source]
    let src = rows[source].clone();
    for (t, s) in rows[target].iter_mut().zip(src) {
        *t -= factor * s;
    }
}

fn col_op(rows: &mut [Vec<BigInt>], target: usize, source: usize, factor: &BigInt) {
    for row in rows.iter_mut() {
        let s = row[source].clone();
        row[target] -= factor * s;
    }
}

fn swap_cols(rows: &mut [Vec<BigInt>], a: usize, b: usize) {
    for row in rows.iter_mut() {
        row.swap(a, b);
    }
}

fn negate_row(rows: &mut [Vec<BigInt>], i: usize) {
    for v in rows[i].iter_mut() {
        *v = -v.clone();
    }
}

// ---------------------------------------------------------------------------
// Exterior powers

/// Sorted `j`-element subsets of `0..d`, in lexicographic order; this is the
/// wedge basis ordering used throughout.
pub fn wedge_basis(d: usize, j: usize) -> Vec<Vec<usize>> {
    fn rec(d: usize, j: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == j {
            out.push(current.clone());
            return;
        }
        for i in start..d {
            current.push(i);
            rec(d, j, i + 1, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, j, 0, &mut Vec::with_capacity(j), &mut out);
    out
}

/// Matrix of `Λ^j(M)` on the sorted wedge basis; entries are `j x j` minors.
pub fn exterior_power_matrix(m: &IntMatrix, j: usize) -> IntMatrix {
    let d = m.nrows();
    assert_eq!(d, m.ncols(), "exterior power of a non-square matrix");
    assert!(j <= d, "exterior power degree exceeds rank");
    let basis = wedge_basis(d, j);
    let mut out = IntMatrix::zero(basis.len(), basis.len());
    for (bi, rows) in basis.iter().enumerate() {
        for (bj, cols) in basis.iter().enumerate() {
            let minor = IntMatrix::new(
                rows.iter()
                    .map(|&r| cols.iter().map(|&c| m.get(r, c).clone()).collect())
                    .collect(),
            );
            out.set(bi, bj, minor.det());
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Finitely generated abelian groups

/// Free rank plus invariant torsion factors `d1 | d2 | ...` (each >= 2).
/// When a localisation set is present, factors are coprime-to-S parts only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct FgAbGroup {
    #[serde(default, skip_serializing_if = "is_zero_usize")]
    pub free: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub torsion: Vec<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inverted: Vec<u64>,
}

fn is_zero_usize(v: &usize) -> bool {
    *v == 0
}

impl FgAbGroup {
    pub fn trivial() -> Self {
        FgAbGroup::default()
    }

    pub fn free(rank: usize) -> Self {
        FgAbGroup {
            free: rank,
            ..Default::default()
        }
    }

    pub fn cyclic(n: u64) -> Self {
        assert!(n >= 1);
        if n == 1 {
            FgAbGroup::trivial()
        } else {
            FgAbGroup {
                torsion: vec![n],
                ..Default::default()
            }
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.free == 0 && self.torsion.is_empty()
    }

    /// Build from a free rank and an unordered multiset of prime-power
    /// cyclic factors, normalising to the invariant-factor chain.
    pub fn from_parts(free: usize, prime_powers: &[(u64, u32)]) -> Self {
        let mut by_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for &(p, e) in prime_powers {
            if e > 0 {
                by_prime.entry(p).or_default().push(e);
            }
        }
        let slots = by_prime.values().map(|v| v.len()).max().unwrap_or(0);
        for exps in by_prime.values_mut() {
            exps.sort_unstable_by(|a, b| b.cmp(a));
        }
        // the last invariant factor absorbs the largest power of every prime
        let mut torsion = vec![1u64; slots];
        for (p, exps) in &by_prime {
            for (pos, &e) in exps.iter().enumerate() {
                let idx = slots - 1 - pos;
                torsion[idx] *= p.pow(e);
            }
        }
        torsion.retain(|&v| v > 1);
        FgAbGroup {
            free,
            torsion,
            inverted: Vec::new(),
        }
    }

    pub fn prime_power_factors(&self) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        for &d in &self.torsion {
            out.extend(factorize_u64(d));
        }
        out
    }

    /// Invert the given primes: drop their parts from every torsion factor.
    pub fn localized(&self, primes: &[u64]) -> FgAbGroup {
        let kept: Vec<(u64, u32)> = self
            .prime_power_factors()
            .into_iter()
            .filter(|(p, _)| !primes.contains(p))
            .collect();
        let mut g = FgAbGroup::from_parts(self.free, &kept);
        let mut inv: Vec<u64> = self.inverted.iter().chain(primes).copied().collect();
        inv.sort_unstable();
        inv.dedup();
        g.inverted = inv;
        g
    }

    pub fn direct_sum(&self, other: &FgAbGroup) -> FgAbGroup {
        let mut pp = self.prime_power_factors();
        pp.extend(other.prime_power_factors());
        let mut g = FgAbGroup::from_parts(self.free + other.free, &pp);
        g.inverted = merge_inverted(self, other);
        g
    }

    /// Exact tensor product over Z.
    pub fn tensor(&self, other: &FgAbGroup) -> FgAbGroup {
        let mut pp: Vec<(u64, u32)> = Vec::new();
        for _ in 0..self.free {
            pp.extend(other.prime_power_factors());
        }
        for _ in 0..other.free {
            pp.extend(self.prime_power_factors());
        }
        // Z/a tensor Z/b = Z/gcd(a, b)
        for &a in &self.torsion {
            for &b in &other.torsion {
                pp.extend(factorize_u64(a.gcd(&b)));
            }
        }
        let mut g = FgAbGroup::from_parts(self.free * other.free, &pp);
        g.inverted = merge_inverted(self, other);
        g
    }

    /// `Tor(A, B)`: only torsion contributes, pairwise gcds.
    pub fn tor(&self, other: &FgAbGroup) -> FgAbGroup {
        let mut pp: Vec<(u64, u32)> = Vec::new();
        for &a in &self.torsion {
            for &b in &other.torsion {
                pp.extend(factorize_u64(a.gcd(&b)));
            }
        }
        let mut g = FgAbGroup::from_parts(0, &pp);
        g.inverted = merge_inverted(self, other);
        g
    }

    /// Cokernel of an integer matrix acting on columns: `Z^rows / im(M)`.
    pub fn cokernel(m: &IntMatrix) -> Result<FgAbGroup, KTheoryError> {
        let snf = smith_normal_form(m);
        let rank = snf.rank();
        let free = m.nrows() - rank;
        let mut torsion = Vec::new();
        for f in snf.invariant_factors() {
            let f = f.abs();
            if f > BigInt::one() {
                let v = u64::try_from(&f).map_err(|_| KTheoryError::FactorTooLarge(f.clone()))?;
                torsion.push(v);
            }
        }
        Ok(FgAbGroup {
            free,
            torsion,
            inverted: Vec::new(),
        })
    }

    /// Kernel of an integer matrix; kernels of integer matrices are free.
    pub fn kernel(m: &IntMatrix) -> FgAbGroup {
        FgAbGroup::free(m.ncols() - smith_normal_form(m).rank())
    }

    /// Drop the localisation bookkeeping, keeping the group itself.
    pub fn without_markers(mut self) -> FgAbGroup {
        self.inverted.clear();
        self
    }
}

fn merge_inverted(a: &FgAbGroup, b: &FgAbGroup) -> Vec<u64> {
    let mut inv: Vec<u64> = a.inverted.iter().chain(&b.inverted).copied().collect();
    inv.sort_unstable();
    inv.dedup();
    inv
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        if self.free > 0 {
            if self.free == 1 {
                parts.push("Z".to_string());
            } else {
                parts.push(format!("Z^{}", self.free));
            }
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        write!(f, "{}", parts.join(" + "))?;
        if !self.inverted.is_empty() {
            let ps: Vec<String> = self.inverted.iter().map(|p| format!("1/{p}")).collect();
            write!(f, " [{}]", ps.join(","))?;
        }
        Ok(())
    }
}

pub fn factorize_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

// ---------------------------------------------------------------------------
// Graded groups

/// Finitely supported degree-indexed family of finitely generated abelian
/// groups; trivial degrees are not stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GradedAb {
    groups: BTreeMap<u32, FgAbGroup>,
}

impl GradedAb {
    pub fn new() -> Self {
        GradedAb::default()
    }

    pub fn single(degree: u32, group: FgAbGroup) -> Self {
        let mut g = GradedAb::new();
        g.set(degree, group);
        g
    }

    pub fn set(&mut self, degree: u32, group: FgAbGroup) {
        if group.is_trivial() {
            self.groups.remove(&degree);
        } else {
            self.groups.insert(degree, group);
        }
    }

    pub fn get(&self, degree: u32) -> FgAbGroup {
        self.groups.get(&degree).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &FgAbGroup)> {
        self.groups.iter().map(|(d, g)| (*d, g))
    }

    pub fn is_trivial(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.groups.keys().next_back().copied()
    }

    /// Künneth formula for a smash product of connective spectra:
    /// `H_n = sum_{i+j=n} H_i (x) H_j  +  sum_{i+j=n-1} Tor(H_i, H_j)`.
    pub fn kunneth_smash(&self, other: &GradedAb) -> GradedAb {
        let mut out = GradedAb::new();
        for (i, gi) in self.iter() {
            for (j, gj) in other.iter() {
                let t = gi.tensor(gj);
                if !t.is_trivial() {
                    out.set(i + j, out.get(i + j).direct_sum(&t));
                }
                let tor = gi.tor(gj);
                if !tor.is_trivial() {
                    out.set(i + j + 1, out.get(i + j + 1).direct_sum(&tor));
                }
            }
        }
        out
    }

    /// Graded homology of the sphere spectrum: `Z` in degree 0, the unit for
    /// [`GradedAb::kunneth_smash`].
    pub fn sphere() -> GradedAb {
        GradedAb::single(0, FgAbGroup::free(1))
    }
}

impl fmt::Display for GradedAb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.groups.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .groups
            .iter()
            .map(|(d, g)| format!("H_{d} = {g}"))
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

impl Serialize for GradedAb {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.groups.len()))?;
        for (d, g) in &self.groups {
            map.serialize_entry(&d.to_string(), g)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for GradedAb {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw: BTreeMap<String, FgAbGroup> = BTreeMap::deserialize(deserializer)?;
        let mut out = GradedAb::new();
        for (k, v) in raw {
            let d: u32 = k.parse().map_err(serde::de::Error::custom)?;
            out.set(d, v);
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Two-term complex homology for the one-dimensional calculation

/// Per-exterior-degree kernel and cokernel of `Λ^j(M) - I`, plus the graded
/// homology they assemble into.
#[derive(Debug, Clone, Serialize)]
pub struct TwoTermReport {
    /// `(j, kernel, cokernel)` for `1 <= j <= d`.
    pub layers: Vec<(usize, FgAbGroup, FgAbGroup)>,
    pub homology: GradedAb,
    pub inverted: Vec<u64>,
}

/// Homology of the K-theory spectrum of a one-dimensional assembler whose
/// translation group is a rank-`d` lattice on which the dilatation acts by
/// the matrix `m`.  The two-line spectral sequence collapses to
///
/// `H_0 = coker(M - I)`, and for `k >= 1`
/// `H_k = coker(Λ^{k+1}(M) - I) + ker(Λ^k(M) - I)`,
///
/// the extension splitting because the kernel summand is free.  With
/// `localize_at_det` the coefficient lattice is the multiplier localisation
/// (for example `Z[1/d]`), so all primes dividing `det M` are inverted.
pub fn two_term_homology(
    m: &IntMatrix,
    localize_at_det: bool,
) -> Result<TwoTermReport, KTheoryError> {
    let d = m.nrows();
    if d != m.ncols() {
        return Err(KTheoryError::NotSquare);
    }
    let det = m.det();
    if det.is_zero() {
        return Err(KTheoryError::SingularMultiplier);
    }
    let inverted: Vec<u64> = if localize_at_det {
        let mag = det.abs();
        let small = u64::try_from(&mag).map_err(|_| KTheoryError::FactorTooLarge(mag.clone()))?;
        factorize_u64(small).into_iter().map(|(p, _)| p).collect()
    } else {
        Vec::new()
    };

    let mut kers = vec![FgAbGroup::trivial(); d + 2];
    let mut cokers = vec![FgAbGroup::trivial(); d + 2];
    let mut layers = Vec::new();
    for j in 1..=d {
        let lam = exterior_power_matrix(m, j);
        let a = lam.sub(&IntMatrix::identity(lam.nrows()));
        let mut ker = FgAbGroup::kernel(&a);
        let mut coker = FgAbGroup::cokernel(&a)?;
        if !inverted.is_empty() {
            // the report carries the inverted primes once; the groups stay
            // plain so downstream consumers see clean invariant factors
            ker = ker.localized(&inverted).without_markers();
            coker = coker.localized(&inverted).without_markers();
        }
        kers[j] = ker.clone();
        cokers[j] = coker.clone();
        layers.push((j, ker, coker));
    }

    let mut homology = GradedAb::new();
    homology.set(0, cokers[1].clone());
    for k in 1..=d {
        homology.set(k as u32, cokers[k + 1].direct_sum(&kers[k]));
    }
    Ok(TwoTermReport {
        layers,
        homology,
        inverted,
    })
}

// ---------------------------------------------------------------------------
// Poincaré series of the free graded-commutative algebra

/// Dimensions up to degree `n` of the free graded-commutative Q-algebra on
/// generators with the given `(degree, dimension)` multiset: exterior on odd
/// degrees, polynomial on even degrees.
pub fn omega_infty_poincare(generators: &[(u32, u64)], n: u32) -> Vec<u64> {
    let n = n as usize;
    let mut series = vec![0u64; n + 1];
    series[0] = 1;
    for &(deg, dim) in generators {
        assert!(deg >= 1, "generators must sit in positive degrees");
        for _ in 0..dim {
            if deg % 2 == 1 {
                // multiply by (1 + t^deg)
                let prev = series.clone();
                for (i, p) in prev.iter().enumerate() {
                    let target = i + deg as usize;
                    if target <= n {
                        series[target] += p;
                    }
                }
            } else {
                // multiply by 1/(1 - t^deg): running sums along strides
                for i in deg as usize..=n {
                    series[i] += series[i - deg as usize];
                }
            }
        }
    }
    series
}

/// Generator dimensions `dim Λ^{q+1}(Q^d)` in degree `q` for `q >= 1`: the
/// rational K-groups of the one-dimensional translation assembler on a
/// rank-`d` coefficient space.
pub fn wedge_generator_dims(d: usize, max_degree: u32) -> Vec<(u32, u64)> {
    let mut out = Vec::new();
    for q in 1..=max_degree as usize {
        if q + 1 > d {
            break;
        }
        let dim = binomial(d, q + 1);
        if dim > 0 {
            out.push((q as u32, dim));
        }
    }
    out
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let mut r: u64 = 1;
    for i in 0..k.min(n - k) {
        r = r * (n - i) as u64 / (i + 1) as u64;
    }
    r
}

// ---------------------------------------------------------------------------
// The one-dimensional polytope group and its wedge-of-circles comparison

#[derive(Debug, Clone, Serialize)]
pub struct Pt1dReport {
    pub group: FgAbGroup,
    pub circle_count: usize,
    pub iso_check: bool,
}

/// The group of one-dimensional polytopes cut at the given points, presented
/// by intervals between cuts modulo subdivision and reduced by Smith normal
/// form; compared against the first reduced homology of the suspension of
/// the cut set (a wedge of circles), computed independently from its graph
/// boundary matrix.
pub fn pt_group_1d(cuts: &[Scalar]) -> Pt1dReport {
    let mut sorted = cuts.to_vec();
    sorted.sort();
    sorted.dedup();
    let k = sorted.len();

    let mut index = BTreeMap::new();
    let mut gens = 0usize;
    for i in 0..k {
        for j in i + 1..k {
            index.insert((i, j), gens);
            gens += 1;
        }
    }
    let mut relations: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            for mid in i + 1..j {
                let mut row = vec![BigInt::zero(); gens];
                row[index[&(i, j)]] = BigInt::one();
                row[index[&(i, mid)]] = -BigInt::one();
                row[index[&(mid, j)]] = -BigInt::one();
                relations.push(row);
            }
        }
    }
    let group = if gens == 0 {
        FgAbGroup::trivial()
    } else {
        // columns are relations, rows are generators: quotient = cokernel
        let mut cols = vec![vec![BigInt::zero(); relations.len()]; gens];
        for (r, row) in relations.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                cols[c][r] = v.clone();
            }
        }
        FgAbGroup::cokernel(&IntMatrix::new(cols)).expect("small factors")
    };

    // suspension of k points: two cone vertices, k edges between them
    let circle_count = if k == 0 {
        0
    } else {
        let mut boundary = IntMatrix::zero(2, k);
        for e in 0..k {
            boundary.set(0, e, BigInt::one());
            boundary.set(1, e, -BigInt::one());
        }
        k - smith_normal_form(&boundary).rank()
    };

    let iso_check = group.torsion.is_empty() && group.free == circle_count;
    Pt1dReport {
        group,
        circle_count,
        iso_check,
    }
}
