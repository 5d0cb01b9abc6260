//! Exact arithmetic in the multi-quadratic tower Q(sqrt(n) : n squarefree).
//!
//! A [`Scalar`] is a finite sum `sum c_n * sqrt(n)` over squarefree positive
//! integer radicands `n` (with `n = 1` carrying the rational part).  Square
//! roots of distinct squarefree integers are linearly independent over Q, so
//! the zero test is exact: a scalar vanishes iff its term map is empty.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

pub type Rat = BigRational;

/// Initial number of fractional bits used when refining square roots.
const INITIAL_PRECISION_BITS: u32 = 64;
/// Hard cap on refinement precision.  Comparison of distinct scalars always
/// terminates, so hitting the cap signals a bug (or an absurd override).
const DEFAULT_PRECISION_CAP_BITS: u32 = 1 << 16;

/// Environment variable overriding the precision cap (in bits).
pub const PRECISION_CAP_ENV: &str = "SCISSORS_PRECISION_CAP";

fn precision_cap() -> u32 {
    static CAP: OnceLock<u32> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(PRECISION_CAP_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(DEFAULT_PRECISION_CAP_BITS)
    })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("sign undecided at precision cap of {0} bits")]
    PrecisionCapExceeded(u32),
    #[error("cannot parse scalar from {0:?}")]
    Parse(String),
}

/// An element of the multi-quadratic tower, kept in canonical form:
/// squarefree radicand keys, nonzero reduced rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    terms: BTreeMap<u64, Rat>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_rational(Rat::from_integer(BigInt::from(n)))
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::from_rational(Rat::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(r: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(1, r);
        }
        Scalar { terms }
    }

    /// `sqrt(n)` for any positive integer, with the square part extracted:
    /// `sqrt(12) = 2*sqrt(3)`.
    pub fn sqrt(n: u64) -> Self {
        assert!(n > 0, "radicand must be positive");
        let (square, free) = squarefree_decompose(n);
        let mut terms = BTreeMap::new();
        terms.insert(free, Rat::from_integer(BigInt::from(square)));
        Scalar { terms }
    }

    /// `c * sqrt(n)` as a single term.
    pub fn surd(c: Rat, n: u64) -> Self {
        Scalar::sqrt(n) * Scalar::from_rational(c)
    }

    /// The golden-ratio conjugate `tau = (sqrt(5) - 1)/2`, satisfying
    /// `tau^2 = 1 - tau`.
    pub fn tau() -> Self {
        (Scalar::sqrt(5) - Scalar::one()) / Scalar::from_int(2)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&1).is_some_and(|c| c.is_one())
    }

    pub fn is_rational(&self) -> bool {
        self.terms.len() <= 1 && (self.terms.is_empty() || self.terms.contains_key(&1))
    }

    pub fn as_rational(&self) -> Option<Rat> {
        if self.terms.is_empty() {
            Some(Rat::zero())
        } else if self.is_rational() {
            self.terms.get(&1).cloned()
        } else {
            None
        }
    }

    /// Radicands appearing with nonzero coefficient, ascending.
    pub fn radicands(&self) -> impl Iterator<Item = u64> + '_ {
        self.terms.keys().copied()
    }

    pub fn coeff(&self, radicand: u64) -> Rat {
        self.terms.get(&radicand).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &Rat)> {
        self.terms.iter().map(|(r, c)| (*r, c))
    }

    fn insert_term(terms: &mut BTreeMap<u64, Rat>, radicand: u64, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        match terms.entry(radicand) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn recip(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(self.recip_nonzero())
    }

    // Rationalize one prime at a time: write x = a + b*sqrt(p) with a, b free
    // of p, then 1/x = (a - b*sqrt(p)) / (a^2 - p*b^2) and the denominator
    // lives in the subfield without p.
    fn recip_nonzero(&self) -> Scalar {
        if let Some(r) = self.as_rational() {
            return Scalar::from_rational(Rat::one() / r);
        }
        let p = self
            .terms
            .keys()
            .filter(|&&r| r > 1)
            .map(|&r| smallest_prime_factor(r))
            .min()
            .expect("non-rational scalar has a radicand > 1");
        let mut a = BTreeMap::new();
        let mut b = BTreeMap::new();
        for (&rad, c) in &self.terms {
            if rad % p == 0 {
                b.insert(rad / p, c.clone());
            } else {
                a.insert(rad, c.clone());
            }
        }
        let a = Scalar { terms: a };
        let b = Scalar { terms: b };
        let sqrt_p = Scalar::sqrt(p);
        let denom = a.clone() * a.clone() - Scalar::from_int(p as i64) * b.clone() * b.clone();
        // a^2 = p b^2 would make sqrt(p) rational over the p-free subfield
        debug_assert!(!denom.is_zero());
        (a - b * sqrt_p) * denom.recip_nonzero()
    }

    /// Three-way comparison; `Err` only if the precision cap is hit, which
    /// cannot happen for distinct well-formed inputs below the cap.
    pub fn try_cmp(&self, other: &Scalar) -> Result<Ordering, ScalarError> {
        let diff = self.clone() - other.clone();
        if diff.is_zero() {
            return Ok(Ordering::Equal);
        }
        diff.sign_nonzero().map(|s| {
            if s > 0 {
                Ordering::Greater
            } else {
                Ordering::Less
            }
        })
    }

    fn sign_nonzero(&self) -> Result<i32, ScalarError> {
        let cap = precision_cap();
        let mut bits = INITIAL_PRECISION_BITS;
        loop {
            let (lo, hi) = self.bounds(bits);
            if lo.is_positive() {
                return Ok(1);
            }
            if hi.is_negative() {
                return Ok(-1);
            }
            if bits >= cap {
                return Err(ScalarError::PrecisionCapExceeded(cap));
            }
            bits = (bits * 2).min(cap);
        }
    }

    /// Rational bounds `lo <= self <= hi` with `hi - lo <= k/2^bits`.
    pub fn bounds(&self, bits: u32) -> (Rat, Rat) {
        let mut lo = Rat::zero();
        let mut hi = Rat::zero();
        let scale = BigInt::one() << bits;
        for (&rad, c) in &self.terms {
            if rad == 1 {
                lo += c.clone();
                hi += c.clone();
                continue;
            }
            // floor(sqrt(rad * 4^bits)) / 2^bits brackets sqrt(rad)
            let shifted = BigInt::from(rad) << (2 * bits);
            let root = shifted.sqrt();
            let s_lo = Rat::new(root.clone(), scale.clone());
            let s_hi = Rat::new(root + 1, scale.clone());
            if c.is_positive() {
                lo += c * &s_lo;
                hi += c * &s_hi;
            } else {
                lo += c * &s_hi;
                hi += c * &s_lo;
            }
        }
        (lo, hi)
    }

    /// Largest integer `<= self`.
    pub fn floor_int(&self) -> BigInt {
        if let Some(r) = self.as_rational() {
            return r.floor().to_integer();
        }
        let mut bits = INITIAL_PRECISION_BITS;
        loop {
            let (lo, hi) = self.bounds(bits);
            let fl = lo.floor().to_integer();
            if fl == hi.floor().to_integer() {
                // an irrational scalar is never an integer, so the shared
                // floor of the bracket is the true floor
                return fl;
            }
            bits *= 2;
            assert!(bits <= precision_cap(), "floor refinement exceeded cap");
        }
    }

    /// `f64` approximation, for diagnostics only.
    pub fn to_f64(&self) -> f64 {
        let (lo, hi) = self.bounds(64);
        let mid = (lo + hi) / Rat::from_integer(BigInt::from(2));
        rat_to_f64(&mid)
    }

    pub fn abs(&self) -> Scalar {
        if self.try_cmp(&Scalar::zero()).expect("cmp") == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn min(a: &Scalar, b: &Scalar) -> Scalar {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    pub fn max(a: &Scalar, b: &Scalar) -> Scalar {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }
}

fn rat_to_f64(r: &Rat) -> f64 {
    let numer = r.numer();
    let denom = r.denom();
    // good enough for display: go through a scaled i128 when possible
    let scaled: BigInt = (numer << 32) / denom;
    match i128::try_from(&scaled) {
        Ok(v) => v as f64 / 2f64.powi(32),
        Err(_) => {
            let s = scaled.to_string();
            s.parse::<f64>().unwrap_or(f64::INFINITY) / 2f64.powi(32)
        }
    }
}

/// `n = square^2 * free` with `free` squarefree.
fn squarefree_decompose(n: u64) -> (u64, u64) {
    let mut square = 1u64;
    let mut free = 1u64;
    let mut rest = n;
    let mut d = 2u64;
    while d * d <= rest {
        if rest % d == 0 {
            let mut e = 0;
            while rest % d == 0 {
                rest /= d;
                e += 1;
            }
            square *= d.pow(e / 2);
            if e % 2 == 1 {
                free *= d;
            }
        }
        d += 1;
    }
    free *= rest;
    (square, free)
}

fn smallest_prime_factor(n: u64) -> u64 {
    debug_assert!(n > 1);
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        d += 1;
    }
    n
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        let mut terms = self.terms;
        for (rad, c) in rhs.terms {
            Scalar::insert_term(&mut terms, rad, c);
        }
        Scalar { terms }
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        self + (-rhs)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            terms: self.terms.into_iter().map(|(r, c)| (r, -c)).collect(),
        }
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        let mut terms = BTreeMap::new();
        for (&m, cm) in &self.terms {
            for (&n, cn) in &rhs.terms {
                // sqrt(m)*sqrt(n) = g*sqrt((m/g)(n/g)) with g = gcd(m, n);
                // the cofactors are coprime and squarefree, so no further
                // reduction is needed
                let g = m.gcd(&n);
                let rad = (m / g) * (n / g);
                let coeff = cm * cn * Rat::from_integer(BigInt::from(g));
                Scalar::insert_term(&mut terms, rad, coeff);
            }
        }
        Scalar { terms }
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        self * rhs.recip().expect("division by zero")
    }
}

macro_rules! forward_ref_binop {
    ($trait:ident, $method:ident) => {
        impl<'a> $trait<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                $trait::$method(self.clone(), rhs.clone())
            }
        }
    };
}
forward_ref_binop!(Add, add);
forward_ref_binop!(Sub, sub);
forward_ref_binop!(Mul, mul);
forward_ref_binop!(Div, div);

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Scalar) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Scalar) -> Ordering {
        self.try_cmp(other)
            .expect("scalar comparison exceeded the precision cap")
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (rad, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if *rad == 1 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "sqrt{rad}")?;
            } else {
                write!(f, "{mag}*sqrt{rad}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// ---------------------------------------------------------------------------
// Text format: signed terms like `-1/2 + 1/2*sqrt5`, `3/4`, `sqrt2`.

impl FromStr for Scalar {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(ScalarError::Parse(s.to_string()));
        }
        let err = || ScalarError::Parse(s.to_string());
        let mut out = Scalar::zero();
        let mut rest = compact.as_str();
        let mut sign = 1i64;
        if let Some(r) = rest.strip_prefix('-') {
            sign = -1;
            rest = r;
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        }
        loop {
            let split = rest
                .char_indices()
                .skip(1)
                .find(|(_, c)| *c == '+' || *c == '-')
                .map(|(i, _)| i)
                .unwrap_or(rest.len());
            let (tok, tail) = rest.split_at(split);
            out = out + parse_term(tok, sign).ok_or_else(err)?;
            if tail.is_empty() {
                return Ok(out);
            }
            sign = if tail.starts_with('-') { -1 } else { 1 };
            rest = &tail[1..];
        }
    }
}

fn parse_term(tok: &str, sign: i64) -> Option<Scalar> {
    let (coeff_str, rad) = match tok.find("sqrt") {
        Some(pos) => {
            let rad: u64 = tok[pos + 4..].parse().ok()?;
            let head = tok[..pos].trim_end_matches('*');
            (head, rad)
        }
        None => (tok, 1),
    };
    let coeff = if coeff_str.is_empty() {
        Rat::one()
    } else {
        parse_rat(coeff_str)?
    };
    if rad == 0 {
        return None;
    }
    Some(Scalar::surd(
        coeff * Rat::from_integer(BigInt::from(sign)),
        rad,
    ))
}

fn parse_rat(s: &str) -> Option<Rat> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().ok()?;
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rat::new(n, d))
        }
        None => Some(Rat::from_integer(s.parse().ok()?)),
    }
}

// ---------------------------------------------------------------------------
// JSON format: {"terms": [{"rad": n, "num": p, "den": q}, ...]},
// with `p/q` strings and bare integers accepted as rational shorthands.

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            rad: u64,
            num: IntOut<'a>,
            den: IntOut<'a>,
        }
        #[derive(Serialize)]
        #[serde(untagged)]
        enum IntOut<'a> {
            Small(i64),
            Big(String),
            #[allow(dead_code)]
            Never(&'a ()),
        }
        fn int_out(v: &BigInt) -> IntOut<'_> {
            match i64::try_from(v.clone()) {
                Ok(s) => IntOut::Small(s),
                Err(_) => IntOut::Big(v.to_string()),
            }
        }
        #[derive(Serialize)]
        struct Repr<'a> {
            terms: Vec<Term<'a>>,
        }
        let terms = self
            .terms
            .iter()
            .map(|(&rad, c)| Term {
                rad,
                num: int_out(c.numer()),
                den: int_out(c.denom()),
            })
            .collect();
        Repr { terms }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum IntIn {
            Small(i64),
            Big(String),
        }
        impl IntIn {
            fn to_bigint<E: serde::de::Error>(&self) -> Result<BigInt, E> {
                match self {
                    IntIn::Small(v) => Ok(BigInt::from(*v)),
                    IntIn::Big(s) => s
                        .parse()
                        .map_err(|_| E::custom(format!("bad integer {s:?}"))),
                }
            }
        }
        #[derive(Deserialize)]
        struct TermIn {
            #[serde(default = "default_rad")]
            rad: u64,
            num: IntIn,
            den: IntIn,
        }
        fn default_rad() -> u64 {
            1
        }
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Text(String),
            Terms { terms: Vec<TermIn> },
        }
        match Repr::deserialize(deserializer)? {
            Repr::Int(v) => Ok(Scalar::from_int(v)),
            Repr::Text(s) => s
                .parse()
                .map_err(|e: ScalarError| D::Error::custom(e.to_string())),
            Repr::Terms { terms } => {
                let mut out = Scalar::zero();
                for t in terms {
                    if t.rad == 0 {
                        return Err(D::Error::custom("radicand must be positive"));
                    }
                    let num = t.num.to_bigint()?;
                    let den = t.den.to_bigint()?;
                    if den.is_zero() {
                        return Err(D::Error::custom("zero denominator"));
                    }
                    out = out + Scalar::surd(Rat::new(num, den), t.rad);
                }
                Ok(out)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Coefficient groups: finite-dimensional Q-subspaces of the tower with a
// distinguished basis, supporting exact coordinate extraction.

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientGroup {
    basis: Vec<Scalar>,
    #[serde(default)]
    label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoeffGroupError {
    #[error("basis must be nonempty and start with 1")]
    MissingUnit,
    #[error("basis is linearly dependent over Q")]
    DependentBasis,
}

/// Distinguished return of [`CoefficientGroup::linearize`]: the scalar lies
/// outside the Q-span of the basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NotInSpan;

impl CoefficientGroup {
    pub fn new(basis: Vec<Scalar>, label: impl Into<String>) -> Result<Self, CoeffGroupError> {
        if basis.first() != Some(&Scalar::one()) {
            return Err(CoeffGroupError::MissingUnit);
        }
        let g = CoefficientGroup {
            basis,
            label: label.into(),
        };
        // expand over the radicands actually used and row-reduce
        let rads = g.all_radicands();
        let cols: Vec<Vec<Rat>> = g.basis.iter().map(|b| expand(b, &rads)).collect();
        if rank(&transpose(&cols)) != g.basis.len() {
            return Err(CoeffGroupError::DependentBasis);
        }
        Ok(g)
    }

    pub fn rationals() -> Self {
        CoefficientGroup::new(vec![Scalar::one()], "Q").expect("valid")
    }

    /// `<1, sqrt(n)>`.
    pub fn with_sqrt(n: u64) -> Self {
        CoefficientGroup::new(vec![Scalar::one(), Scalar::sqrt(n)], format!("<1,sqrt{n}>"))
            .expect("valid")
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Scalar] {
        &self.basis
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Exact coordinates of `x` in the basis, or `NotInSpan`.
    pub fn linearize(&self, x: &Scalar) -> Result<Vec<Rat>, NotInSpan> {
        let mut rads = self.all_radicands();
        for r in x.radicands() {
            if !rads.contains(&r) {
                rads.push(r);
            }
        }
        rads.sort_unstable();
        let cols: Vec<Vec<Rat>> = self.basis.iter().map(|b| expand(b, &rads)).collect();
        let rhs = expand(x, &rads);
        solve(&transpose(&cols), &rhs).ok_or(NotInSpan)
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        self.linearize(x).is_ok()
    }

    /// `sum c_i * basis_i`.
    pub fn combine(&self, coords: &[Rat]) -> Scalar {
        assert_eq!(coords.len(), self.basis.len());
        coords
            .iter()
            .zip(&self.basis)
            .fold(Scalar::zero(), |acc, (c, b)| {
                acc + b.clone() * Scalar::from_rational(c.clone())
            })
    }

    fn all_radicands(&self) -> Vec<u64> {
        let mut rads: Vec<u64> = self
            .basis
            .iter()
            .flat_map(|b| b.radicands().collect::<Vec<_>>())
            .collect();
        rads.sort_unstable();
        rads.dedup();
        rads
    }
}

fn expand(s: &Scalar, rads: &[u64]) -> Vec<Rat> {
    rads.iter().map(|&r| s.coeff(r)).collect()
}

// ---------------------------------------------------------------------------
// Small exact linear algebra over Q, used for span membership and the wedge
// computations.

pub(crate) fn transpose(cols: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    if cols.is_empty() {
        return Vec::new();
    }
    let rows = cols[0].len();
    (0..rows)
        .map(|i| cols.iter().map(|c| c[i].clone()).collect())
        .collect()
}

pub(crate) fn rank(matrix: &[Vec<Rat>]) -> usize {
    let mut m: Vec<Vec<Rat>> = matrix.to_vec();
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pivot) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pivot);
        let inv = Rat::one() / m[r][c].clone();
        for j in c..cols {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let sub = &f * &m[r][j];
                    m[i][j] = &m[i][j] - &sub;
                }
            }
        }
        r += 1;
    }
    r
}

/// Solve `A x = b` exactly; `None` if inconsistent.  When the system is
/// underdetermined an arbitrary solution is returned, but the callers here
/// always pass full-column-rank systems.
pub(crate) fn solve(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let rows = a.len();
    assert_eq!(rows, b.len());
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rat::one() / m[r][c].clone();
        for j in c..=cols {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..=cols {
                    let sub = &f * &m[r][j];
                    m[i][j] = &m[i][j] - &sub;
                }
            }
        }
        pivots.push((r, c));
        r += 1;
    }
    // inconsistent if a zero row has nonzero rhs
    for i in r..rows {
        if !m[i][cols].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rat::zero(); cols];
    for (row, col) in pivots {
        x[col] = m[row][cols].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn sqrt2_squared_is_two() {
        let s = Scalar::sqrt(2);
        assert_eq!(s.clone() * s, Scalar::from_int(2));
    }

    #[test]
    fn tau_squared_is_one_minus_tau() {
        // independent oracle: expand (a + b*sqrt5)^2 with plain rational
        // coefficient pairs, a = -1/2, b = 1/2
        let (a, b) = (rat(-1, 2), rat(1, 2));
        let rational_part = &a * &a + &b * &b * rat(5, 1);
        let sqrt5_part = rat(2, 1) * &a * &b;
        assert_eq!(rational_part, rat(3, 2));
        assert_eq!(sqrt5_part, rat(-1, 2));

        let tau = Scalar::tau();
        let sq = tau.clone() * tau.clone();
        assert_eq!(sq, Scalar::one() - tau.clone());
        assert_eq!(sq.coeff(1), rational_part);
        assert_eq!(sq.coeff(5), sqrt5_part);
    }

    #[test]
    fn additive_identity() {
        let x = Scalar::sqrt(3) - Scalar::from_frac(7, 5);
        assert_eq!(x.clone() + Scalar::zero(), x);
    }

    #[test]
    fn comparisons() {
        assert_eq!(
            Scalar::sqrt(2).try_cmp(&Scalar::from_frac(3, 2)),
            Ok(Ordering::Less)
        );
        assert_eq!(
            Scalar::tau().try_cmp(&Scalar::from_frac(1, 2)),
            Ok(Ordering::Greater)
        );
        let x = Scalar::one() + Scalar::sqrt(2);
        assert_eq!(x.try_cmp(&x), Ok(Ordering::Equal));
    }

    #[test]
    fn division_by_zero_reported() {
        assert_eq!(Scalar::zero().recip(), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn division_in_tower() {
        // (1 + sqrt2 + sqrt3) has an exact inverse
        let x = Scalar::one() + Scalar::sqrt(2) + Scalar::sqrt(3);
        let inv = x.clone().recip().unwrap();
        assert_eq!(x * inv, Scalar::one());
    }

    #[test]
    fn sqrt_reduces_square_part() {
        assert_eq!(Scalar::sqrt(12), Scalar::from_int(2) * Scalar::sqrt(3));
        assert_eq!(Scalar::sqrt(18), Scalar::from_int(3) * Scalar::sqrt(2));
        assert_eq!(Scalar::sqrt(4), Scalar::from_int(2));
    }

    #[test]
    fn floor_of_irrational() {
        assert_eq!(Scalar::sqrt(2).floor_int(), BigInt::from(1));
        assert_eq!((-Scalar::sqrt(2)).floor_int(), BigInt::from(-2));
        assert_eq!(Scalar::from_frac(7, 2).floor_int(), BigInt::from(3));
    }

    #[test]
    fn linearize_examples() {
        let g = CoefficientGroup::with_sqrt(2);
        assert_eq!(
            g.linearize(&Scalar::from_frac(3, 4)),
            Ok(vec![rat(3, 4), rat(0, 1)])
        );
        let x = Scalar::from_int(2) * Scalar::sqrt(2) - Scalar::one();
        assert_eq!(g.linearize(&x), Ok(vec![rat(-1, 1), rat(2, 1)]));
        assert_eq!(g.linearize(&Scalar::sqrt(3)), Err(NotInSpan));
    }

    #[test]
    fn dependent_basis_rejected() {
        let r = CoefficientGroup::new(
            vec![Scalar::one(), Scalar::sqrt(2), Scalar::one() + Scalar::sqrt(2)],
            "bad",
        );
        assert_eq!(r, Err(CoeffGroupError::DependentBasis));
    }

    #[test]
    fn text_parsing() {
        assert_eq!("3/4".parse::<Scalar>().unwrap(), Scalar::from_frac(3, 4));
        assert_eq!("sqrt2".parse::<Scalar>().unwrap(), Scalar::sqrt(2));
        assert_eq!(
            "-1/2+1/2*sqrt5".parse::<Scalar>().unwrap(),
            Scalar::tau()
        );
        assert_eq!(
            "2*sqrt2 - 1".parse::<Scalar>().unwrap(),
            Scalar::from_int(2) * Scalar::sqrt(2) - Scalar::one()
        );
        assert!("sqrt0".parse::<Scalar>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let x = Scalar::from_frac(-3, 4) + Scalar::from_int(2) * Scalar::sqrt(10);
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(
            json,
            r#"{"terms":[{"rad":1,"num":-3,"den":4},{"rad":10,"num":2,"den":1}]}"#
        );
        let back: Scalar = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
        let short: Scalar = serde_json::from_str(r#""1/2""#).unwrap();
        assert_eq!(short, Scalar::from_frac(1, 2));
        let int: Scalar = serde_json::from_str("7").unwrap();
        assert_eq!(int, Scalar::from_int(7));
    }
}
