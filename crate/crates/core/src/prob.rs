//! Probability scalars and finite distributions.
//!
//! Masses are kept as exact rationals whenever every input is a rational
//! with denominator at most 2^16; otherwise the whole table degrades to
//! f64. Exact mode is what makes equality tests like `value == 3/4`
//! meaningful on small games.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use thiserror::Error;

/// Largest denominator recognized when promoting an f64 to a rational.
pub const MAX_DENOMINATOR: u64 = 1 << 16;

/// Relative tolerance used when matching an f64 against a small rational.
const RATIONALIZE_TOL: f64 = 1e-12;

/// Tolerance for "sums to one" table invariants.
pub const MASS_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ProbError {
    #[error("negative mass {0} at support index {1}")]
    NegativeMass(f64, usize),
    #[error("masses sum to {0}, not 1 within 1e-12")]
    BadTotal(f64),
    #[error("empty support")]
    EmptySupport,
    #[error("duplicate label `{0}` in support")]
    DuplicateLabel(String),
}

/// A probability (or more generally a nonnegative weight): exact rational
/// or f64. Arithmetic between an exact and a float degrades to float.
#[derive(Clone, Debug, PartialEq)]
pub enum Prob {
    Exact(BigRational),
    Approx(f64),
}

impl Prob {
    pub fn zero() -> Self {
        Prob::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Prob::Exact(BigRational::one())
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Prob::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Promote an f64 to an exact rational when it matches `p/q` with
    /// `q <= 2^16` to within 1e-12 relative error (continued fractions).
    /// Values that do not match stay floats.
    pub fn from_f64(x: f64) -> Self {
        match rationalize(x) {
            Some(r) => Prob::Exact(r),
            None => Prob::Approx(x),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Prob::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Prob::Approx(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Prob::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Prob::Exact(r) => r.is_zero(),
            Prob::Approx(x) => *x == 0.0,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Prob::Exact(r) => Some(r),
            Prob::Approx(_) => None,
        }
    }

    pub fn add(&self, other: &Prob) -> Prob {
        match (self, other) {
            (Prob::Exact(a), Prob::Exact(b)) => Prob::Exact(a + b),
            _ => Prob::Approx(self.to_f64() + other.to_f64()),
        }
    }

    pub fn sub(&self, other: &Prob) -> Prob {
        match (self, other) {
            (Prob::Exact(a), Prob::Exact(b)) => Prob::Exact(a - b),
            _ => Prob::Approx(self.to_f64() - other.to_f64()),
        }
    }

    pub fn mul(&self, other: &Prob) -> Prob {
        match (self, other) {
            (Prob::Exact(a), Prob::Exact(b)) => Prob::Exact(a * b),
            _ => Prob::Approx(self.to_f64() * other.to_f64()),
        }
    }

    pub fn div(&self, other: &Prob) -> Prob {
        match (self, other) {
            (Prob::Exact(a), Prob::Exact(b)) if !b.is_zero() => Prob::Exact(a / b),
            _ => Prob::Approx(self.to_f64() / other.to_f64()),
        }
    }

    pub fn abs(&self) -> Prob {
        match self {
            Prob::Exact(r) => Prob::Exact(r.abs()),
            Prob::Approx(x) => Prob::Approx(x.abs()),
        }
    }

    /// Total order: exact-exact compares rationally, anything else by f64.
    pub fn cmp_prob(&self, other: &Prob) -> Ordering {
        match (self, other) {
            (Prob::Exact(a), Prob::Exact(b)) => a.cmp(b),
            _ => self
                .to_f64()
                .partial_cmp(&other.to_f64())
                .unwrap_or(Ordering::Equal),
        }
    }
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prob::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Prob::Approx(x) => write!(f, "{x}"),
        }
    }
}

/// Best rational approximation with denominator <= 2^16, accepted only
/// when it reproduces `x` to 1e-12 relative error.
pub fn rationalize(x: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some(BigRational::zero());
    }
    let neg = x < 0.0;
    let mut v = x.abs();
    // Continued fraction convergents p/q.
    let (mut p0, mut q0, mut p1, mut q1) = (1u64, 0u64, v.floor() as u64, 1u64);
    let mut frac = v - v.floor();
    for _ in 0..64 {
        let approx = p1 as f64 / q1 as f64;
        if (approx - x.abs()).abs() <= RATIONALIZE_TOL * x.abs().max(1.0) {
            break;
        }
        if frac.abs() < f64::EPSILON {
            break;
        }
        v = 1.0 / frac;
        let a = v.floor();
        if a >= u64::MAX as f64 {
            break;
        }
        frac = v - a;
        let a = a as u64;
        let p2 = a.checked_mul(p1)?.checked_add(p0)?;
        let q2 = a.checked_mul(q1)?.checked_add(q0)?;
        if q2 > MAX_DENOMINATOR {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    if q1 == 0 || q1 > MAX_DENOMINATOR {
        return None;
    }
    let approx = p1 as f64 / q1 as f64;
    if (approx - x.abs()).abs() > RATIONALIZE_TOL * x.abs().max(1.0) {
        return None;
    }
    let mut r = BigRational::new(BigInt::from(p1), BigInt::from(q1));
    if neg {
        r = -r;
    }
    Some(r)
}

/// Probability distribution over a finite labeled support.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbTable {
    labels: Vec<String>,
    masses: Vec<Prob>,
}

impl ProbTable {
    /// Build and validate: no negative mass, total 1 within 1e-12,
    /// distinct labels. If every mass is exact but the exact total is not
    /// exactly 1 the table degrades to float mode.
    pub fn new(labels: Vec<String>, masses: Vec<Prob>) -> Result<Self, ProbError> {
        if labels.is_empty() {
            return Err(ProbError::EmptySupport);
        }
        assert_eq!(labels.len(), masses.len());
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(ProbError::DuplicateLabel(l.clone()));
            }
        }
        for (i, m) in masses.iter().enumerate() {
            let v = m.to_f64();
            if v < 0.0 {
                return Err(ProbError::NegativeMass(v, i));
            }
        }
        let total: f64 = masses.iter().map(Prob::to_f64).sum();
        if (total - 1.0).abs() > MASS_SUM_TOL {
            return Err(ProbError::BadTotal(total));
        }
        let all_exact = masses.iter().all(Prob::is_exact);
        let masses = if all_exact {
            let exact_total = masses
                .iter()
                .fold(BigRational::zero(), |acc, m| acc + m.as_exact().unwrap());
            if exact_total.is_one() {
                masses
            } else {
                masses
                    .into_iter()
                    .map(|m| Prob::Approx(m.to_f64()))
                    .collect()
            }
        } else {
            masses
        };
        Ok(ProbTable { labels, masses })
    }

    pub fn from_f64(labels: Vec<String>, masses: &[f64]) -> Result<Self, ProbError> {
        let ms = masses.iter().map(|&m| Prob::from_f64(m)).collect();
        Self::new(labels, ms)
    }

    pub fn uniform(labels: Vec<String>) -> Self {
        let n = labels.len() as i64;
        let masses = labels.iter().map(|_| Prob::ratio(1, n)).collect();
        ProbTable { labels, masses }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn masses(&self) -> &[Prob] {
        &self.masses
    }

    pub fn mass_of(&self, label: &str) -> Prob {
        match self.labels.iter().position(|l| l == label) {
            Some(i) => self.masses[i].clone(),
            None => Prob::zero(),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.masses.iter().all(Prob::is_exact)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Prob)> {
        self.labels.iter().zip(self.masses.iter())
    }

    /// Union of the two supports, in self-then-other first-seen order.
    fn unified_labels(&self, other: &ProbTable) -> Vec<String> {
        let mut labels = self.labels.clone();
        for l in &other.labels {
            if !labels.contains(l) {
                labels.push(l.clone());
            }
        }
        labels
    }
}

/// l-1 distance: sum over the unified support of |p - q|. Missing labels
/// count as mass zero.
pub fn l1(p: &ProbTable, q: &ProbTable) -> Prob {
    let labels = p.unified_labels(q);
    let mut total = Prob::zero();
    for l in &labels {
        total = total.add(&p.mass_of(l).sub(&q.mass_of(l)).abs());
    }
    total
}

/// Total variation distance, the halved l-1 sum.
pub fn tvd(p: &ProbTable, q: &ProbTable) -> Prob {
    l1(p, q).div(&Prob::ratio(2, 1))
}

/// Serialized form of one support entry, used in game JSON.
#[derive(Serialize, Deserialize)]
pub struct MassEntry {
    pub q: Vec<String>,
    pub p: f64,
}
