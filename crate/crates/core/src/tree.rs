//! The m-ary directed tree: vertices as base-m digit strings, the map onto
//! [0, 1] that sends a vertex to the left endpoint of its interval, and the
//! tree metric on digit sequences.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Upper bound on the number of values a single tree level may hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeCap(pub u64);

impl SizeCap {
    pub const DEFAULT: SizeCap = SizeCap(1 << 31);
    pub const ENV_VAR: &'static str = "PHTREE_SIZE_CAP";

    /// Reads `PHTREE_SIZE_CAP`, falling back to the default when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var(Self::ENV_VAR) {
            Ok(s) => s
                .trim()
                .parse::<u64>()
                .map(SizeCap)
                .map_err(|e| Error::param("PHTREE_SIZE_CAP", e.to_string())),
            Err(_) => Ok(Self::DEFAULT),
        }
    }

    /// Returns `m^k` when it fits under the cap.
    pub fn level_size(self, m: u32, k: usize) -> Result<usize> {
        let mut count: u128 = 1;
        for _ in 0..k {
            count = count.saturating_mul(m as u128);
            if count > self.0 as u128 {
                return Err(Error::Capacity {
                    requested: count,
                    cap: self.0,
                });
            }
        }
        if count > self.0 as u128 {
            return Err(Error::Capacity {
                requested: count,
                cap: self.0,
            });
        }
        Ok(count as usize)
    }
}

impl Default for SizeCap {
    fn default() -> Self {
        Self::DEFAULT
    }
}

pub(crate) fn check_branching(m: u32) -> Result<()> {
    if m < 2 {
        return Err(Error::param("m", format!("branching factor must be >= 2, got {m}")));
    }
    Ok(())
}

/// A node of the m-ary tree, identified by its digit string.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    m: u32,
    digits: Vec<u32>,
}

impl Vertex {
    pub fn new(m: u32, digits: Vec<u32>) -> Result<Self> {
        check_branching(m)?;
        if let Some(&d) = digits.iter().find(|&&d| d >= m) {
            return Err(Error::param("digits", format!("digit {d} out of range for m = {m}")));
        }
        Ok(Vertex { m, digits })
    }

    pub fn root(m: u32) -> Self {
        assert!(m >= 2, "branching factor must be >= 2");
        Vertex { m, digits: Vec::new() }
    }

    /// Builds the `index`-th vertex (lexicographic order) of level `level`.
    pub fn from_index(m: u32, level: usize, mut index: u64) -> Self {
        let mut digits = vec![0; level];
        for slot in digits.iter_mut().rev() {
            *slot = (index % m as u64) as u32;
            index /= m as u64;
        }
        debug_assert_eq!(index, 0, "index out of range for level");
        Vertex { m, digits }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn level(&self) -> usize {
        self.digits.len()
    }

    pub fn is_root(&self) -> bool {
        self.digits.is_empty()
    }

    /// Lexicographic offset within the vertex's level, if it fits in a `u64`.
    pub fn index(&self) -> Option<u64> {
        self.digits.iter().try_fold(0u64, |acc, &d| {
            acc.checked_mul(self.m as u64)?.checked_add(d as u64)
        })
    }

    pub fn child(&self, digit: u32) -> Vertex {
        assert!(digit < self.m, "digit {digit} out of range for m = {}", self.m);
        let mut digits = Vec::with_capacity(self.digits.len() + 1);
        digits.extend_from_slice(&self.digits);
        digits.push(digit);
        Vertex { m: self.m, digits }
    }

    /// The successor set S(v), in digit order.
    pub fn successors(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.m).map(move |d| self.child(d))
    }

    pub fn parent(&self) -> Option<Vertex> {
        if self.is_root() {
            return None;
        }
        Some(Vertex {
            m: self.m,
            digits: self.digits[..self.digits.len() - 1].to_vec(),
        })
    }

    /// Ancestor at `level`; the vertex itself when `level == self.level()`.
    pub fn truncate(&self, level: usize) -> Vertex {
        Vertex {
            m: self.m,
            digits: self.digits[..level.min(self.digits.len())].to_vec(),
        }
    }

    /// True when `self` is a (non-strict) prefix of `other`.
    pub fn is_ancestor_of(&self, other: &Vertex) -> bool {
        self.m == other.m && other.digits.starts_with(&self.digits)
    }

    /// Mirror image under the digit reflection `a -> m - 1 - a`.
    pub fn reflect(&self) -> Vertex {
        Vertex {
            m: self.m,
            digits: self.digits.iter().map(|&d| self.m - 1 - d).collect(),
        }
    }

    /// Parses the dotted digit form (`"0.2.1"`); `""` and `"∅"` give the root.
    pub fn parse(m: u32, s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "∅" {
            check_branching(m)?;
            return Ok(Vertex::root(m));
        }
        let digits = s
            .split('.')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::parse("vertex", format!("{s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Vertex::new(m, digits)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.digits.is_empty() {
            return f.write_str("∅");
        }
        for (i, d) in self.digits.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// An exact point `numerator / m^level` of [0, 1].
///
/// Equality is arithmetic: `a/m^j == b/m^k` iff `a·m^k == b·m^j`.
#[derive(Debug, Clone)]
pub struct ExactPoint {
    m: u32,
    numerator: BigUint,
    level: u32,
}

impl ExactPoint {
    pub fn new(m: u32, numerator: impl Into<BigUint>, level: u32) -> Result<Self> {
        check_branching(m)?;
        let numerator = numerator.into();
        if numerator > BigUint::from(m).pow(level) {
            return Err(Error::param("numerator", "point exceeds 1"));
        }
        Ok(ExactPoint { m, numerator, level })
    }

    pub fn zero(m: u32) -> Self {
        ExactPoint {
            m,
            numerator: BigUint::zero(),
            level: 0,
        }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn denominator(&self) -> BigUint {
        BigUint::from(self.m).pow(self.level)
    }

    /// Removes common factors of `m` from numerator and denominator.
    pub fn reduced(&self) -> ExactPoint {
        let mut out = self.clone();
        let m = BigUint::from(self.m);
        while out.level > 0 && (&out.numerator % &m).is_zero() {
            out.numerator /= &m;
            out.level -= 1;
        }
        if out.numerator.is_zero() {
            out.level = 0;
        }
        out
    }

    pub fn to_f64(&self) -> f64 {
        // Exact when both parts fit the mantissa; otherwise the ratio of the
        // nearest doubles, which is within a few ulps.
        let num = self.numerator.to_f64().unwrap_or(f64::INFINITY);
        let den = self.denominator().to_f64().unwrap_or(f64::INFINITY);
        if den.is_finite() {
            num / den
        } else {
            let r = self.reduced();
            let shift = r.level.saturating_sub(60);
            let scale = BigUint::from(self.m).pow(shift);
            let num = (&r.numerator / &scale).to_f64().unwrap_or(0.0);
            let den = BigUint::from(self.m).pow(r.level - shift).to_f64().unwrap_or(f64::INFINITY);
            num / den
        }
    }

    fn cross(&self, other: &ExactPoint) -> (BigUint, BigUint) {
        let a = &self.numerator * BigUint::from(other.m).pow(other.level);
        let b = &other.numerator * BigUint::from(self.m).pow(self.level);
        (a, b)
    }
}

impl PartialEq for ExactPoint {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.cross(other);
        a == b
    }
}

impl Eq for ExactPoint {}

impl PartialOrd for ExactPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = self.cross(other);
        a.cmp(&b)
    }
}

impl fmt::Display for ExactPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.reduced();
        write!(f, "{}/{}", r.numerator, r.denominator())
    }
}

/// The closed interval `[left, left + m^-level]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub left: ExactPoint,
    pub level: u32,
}

impl Interval {
    pub fn width(&self) -> ExactPoint {
        ExactPoint {
            m: self.left.m,
            numerator: BigUint::from(1u32),
            level: self.level,
        }
    }

    pub fn right(&self) -> ExactPoint {
        let shift = self.level.saturating_sub(self.left.level);
        let lift = self.left.level.saturating_sub(self.level);
        // Bring both endpoints to the finer of the two levels.
        let m = BigUint::from(self.left.m);
        let level = self.level.max(self.left.level);
        let numerator = &self.left.numerator * m.pow(shift) + m.pow(lift);
        ExactPoint {
            m: self.left.m,
            numerator,
            level,
        }
    }

    pub fn contains_point(&self, p: &ExactPoint) -> bool {
        &self.left <= p && p <= &self.right()
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.left <= other.left && other.right() <= self.right()
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.left.to_f64(), self.right().to_f64())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.left, self.right())
    }
}

/// `Σ a_j m^-j` over the digits of `v`, exactly, at level `level(v)`.
pub fn psi(v: &Vertex) -> ExactPoint {
    let m = BigUint::from(v.m);
    let numerator = v
        .digits
        .iter()
        .fold(BigUint::zero(), |acc, &d| acc * &m + BigUint::from(d));
    ExactPoint {
        m: v.m,
        numerator,
        level: v.level() as u32,
    }
}

/// `psi(v)` as a double, without going through big integers for short vertices.
pub fn psi_f64(v: &Vertex) -> f64 {
    // index / m^k is correctly rounded while both fit in 53 bits
    let exact = (v.m as u64).checked_pow(v.level() as u32).filter(|&d| d <= 1 << 53);
    match (v.index(), exact) {
        (Some(i), Some(d)) => i as f64 / d as f64,
        _ => psi(v).to_f64(),
    }
}

pub fn interval_of(v: &Vertex) -> Interval {
    Interval {
        left: psi(v),
        level: v.level() as u32,
    }
}

/// Tree distance between two digit sequences (finite or truncated branches).
///
/// First difference at 1-based index `K` gives `m^(1-K)`; a strict prefix of
/// common length `K` gives `m^-K`; equal sequences give 0.
pub fn tree_distance(m: u32, p: &[u32], q: &[u32]) -> ExactPoint {
    let common = p.iter().zip(q).take_while(|(a, b)| a == b).count();
    let one = BigUint::from(1u32);
    if common < p.len().min(q.len()) {
        // first difference at index common + 1
        ExactPoint {
            m,
            numerator: one,
            level: common as u32,
        }
    } else if p.len() == q.len() {
        ExactPoint::zero(m)
    } else {
        ExactPoint {
            m,
            numerator: one,
            level: common as u32,
        }
    }
}

/// All vertices of level `k`, in lexicographic digit order.
pub fn enumerate_level(m: u32, k: usize, cap: SizeCap) -> Result<impl Iterator<Item = Vertex>> {
    check_branching(m)?;
    let count = cap.level_size(m, k)? as u64;
    Ok((0..count).map(move |j| Vertex::from_index(m, k, j)))
}

impl FromStr for SizeCap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .parse::<u64>()
            .map(SizeCap)
            .map_err(|e| Error::param("size cap", e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(m: u32, d: &[u32]) -> Vertex {
        Vertex::new(m, d.to_vec()).unwrap()
    }

    fn pt(m: u32, num: u32, level: u32) -> ExactPoint {
        ExactPoint::new(m, num, level).unwrap()
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi(&v(3, &[])), pt(3, 0, 0));
        assert_eq!(psi(&v(3, &[0, 2])), pt(3, 2, 2));
        assert_eq!(psi(&v(3, &[2])), pt(3, 2, 1));
        assert_eq!(psi(&v(3, &[2])).to_string(), "2/3");
    }

    #[test]
    fn exact_equality_is_arithmetic() {
        assert_eq!(pt(3, 3, 2), pt(3, 1, 1));
        assert_eq!(pt(3, 0, 5), ExactPoint::zero(3));
        assert!(pt(3, 2, 2) < pt(3, 1, 1));
        assert_eq!(pt(3, 9, 3).reduced().level(), 1);
    }

    #[test]
    fn interval_examples() {
        let i = interval_of(&v(3, &[]));
        assert_eq!((i.left.clone(), i.right()), (pt(3, 0, 0), pt(3, 1, 0)));
        let i = interval_of(&v(3, &[0]));
        assert_eq!(i.right(), pt(3, 1, 1));
        let i = interval_of(&v(3, &[0, 2]));
        assert_eq!(i.left, pt(3, 2, 2));
        assert_eq!(i.right(), pt(3, 1, 1));
        assert_eq!(i.width(), pt(3, 1, 2));
        assert_eq!(i.to_string(), "[2/9, 1/3]");
    }

    #[test]
    fn distance_examples() {
        assert_eq!(tree_distance(3, &[0, 1, 0], &[0, 2, 0]), pt(3, 1, 1));
        assert_eq!(tree_distance(3, &[0], &[0, 1]), pt(3, 1, 1));
        assert_eq!(tree_distance(3, &[1, 2], &[1, 2]), ExactPoint::zero(3));
        assert_eq!(tree_distance(3, &[0], &[1]), pt(3, 1, 0));
        assert_eq!(tree_distance(3, &[], &[1]), pt(3, 1, 0));
    }

    #[test]
    fn enumerate_examples() {
        let l0: Vec<_> = enumerate_level(3, 0, SizeCap::DEFAULT).unwrap().collect();
        assert_eq!(l0, vec![Vertex::root(3)]);
        let l1: Vec<_> = enumerate_level(3, 1, SizeCap::DEFAULT).unwrap().collect();
        assert_eq!(l1, vec![v(3, &[0]), v(3, &[1]), v(3, &[2])]);
        let l2: Vec<_> = enumerate_level(3, 2, SizeCap::DEFAULT).unwrap().collect();
        assert_eq!(l2.len(), 9);
        assert_eq!(l2[4], v(3, &[1, 1]));
        assert_eq!(psi(&l2[4]), pt(3, 4, 2));
    }

    #[test]
    fn enumerate_respects_cap() {
        let err = enumerate_level(3, 5, SizeCap(100)).err().unwrap();
        assert!(matches!(err, Error::Capacity { cap: 100, .. }), "{err}");
        assert!(err.to_string().contains("100"));
        assert!(enumerate_level(3, 4, SizeCap(81)).is_ok());
    }

    #[test]
    fn vertex_validation_and_display() {
        assert!(Vertex::new(3, vec![0, 3]).is_err());
        assert!(Vertex::new(1, vec![]).is_err());
        let x = v(3, &[0, 2, 1]);
        assert_eq!(x.to_string(), "0.2.1");
        assert_eq!(Vertex::parse(3, "0.2.1").unwrap(), x);
        assert_eq!(Vertex::parse(3, "∅").unwrap(), Vertex::root(3));
        assert_eq!(Vertex::root(3).to_string(), "∅");
        assert_eq!(x.index(), Some(7));
        assert_eq!(Vertex::from_index(3, 3, 7), x);
        assert_eq!(x.parent().unwrap(), v(3, &[0, 2]));
        assert_eq!(x.reflect(), v(3, &[2, 0, 1]));
        assert!(v(3, &[0]).is_ancestor_of(&x));
        assert!(!v(3, &[1]).is_ancestor_of(&x));
    }

    #[test]
    fn successor_intervals_tile_parent() {
        for parent in enumerate_level(3, 3, SizeCap::DEFAULT).unwrap() {
            let pi = interval_of(&parent);
            let kids: Vec<_> = parent.successors().map(|c| interval_of(&c)).collect();
            assert_eq!(kids.len(), 3);
            assert_eq!(kids[0].left, pi.left);
            assert_eq!(kids[2].right(), pi.right());
            for w in kids.windows(2) {
                assert_eq!(w[0].right(), w[1].left);
            }
            for k in &kids {
                assert!(pi.contains_interval(k) && k != &pi);
            }
        }
    }

    #[test]
    fn psi_matches_lexicographic_index() {
        for k in 0..=5 {
            for (j, x) in enumerate_level(3, k, SizeCap::DEFAULT).unwrap().enumerate() {
                assert_eq!(psi(&x), pt(3, j as u32, k as u32));
                assert_eq!(psi_f64(&x), j as f64 / 3f64.powi(k as i32));
            }
        }
    }

    #[test]
    fn containment_iff_prefix() {
        let all: Vec<Vertex> = (0..=3)
            .flat_map(|k| enumerate_level(3, k, SizeCap::DEFAULT).unwrap())
            .collect();
        for x in &all {
            for y in &all {
                if y.level() >= x.level() {
                    assert_eq!(
                        interval_of(x).contains_interval(&interval_of(y)),
                        x.is_ancestor_of(y),
                        "{x} vs {y}"
                    );
                }
            }
        }
    }

    #[test]
    fn tree_distance_is_a_metric_on_equal_lengths() {
        for k in 0..=4 {
            let level: Vec<Vertex> = enumerate_level(3, k, SizeCap::DEFAULT).unwrap().collect();
            for x in &level {
                assert_eq!(tree_distance(3, x.digits(), x.digits()), ExactPoint::zero(3));
                for y in &level {
                    let dxy = tree_distance(3, x.digits(), y.digits());
                    assert_eq!(dxy, tree_distance(3, y.digits(), x.digits()));
                    assert_eq!(dxy == ExactPoint::zero(3), x == y);
                }
            }
            for x in &level {
                for y in &level {
                    for z in &level {
                        let lhs = tree_distance(3, x.digits(), z.digits()).to_f64();
                        let rhs = tree_distance(3, x.digits(), y.digits()).to_f64()
                            + tree_distance(3, y.digits(), z.digits()).to_f64();
                        assert!(lhs <= rhs + 1e-15);
                    }
                }
            }
        }
    }
}
