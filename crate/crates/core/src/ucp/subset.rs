//! Subsets `U` of the tree as digit-driven state machines.
//!
//! Membership of a vertex is decided by folding its digits through
//! [`SubsetSpec::step`] from [`SubsetSpec::root_state`]. Structured kinds
//! have only a handful of distinct states per level, which lets the
//! analyzer reason about every vertex of deep levels by sweeping states
//! instead of vertices. Oracle-backed kinds carry the whole digit string as
//! their state and are limited by the size cap.

use std::collections::HashSet;
use std::fmt;
use std::io::BufRead;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::tree::{check_branching, Vertex};
use crate::ucp::pattern::IntPattern;

/// Levels trusted by default for kinds whose membership is exact everywhere.
pub const DEFAULT_DEPTH_BOUND: usize = 32;

type Predicate = Arc<dyn Fn(&Vertex) -> bool + Send + Sync>;

#[derive(Clone)]
pub enum SubsetKind {
    /// Arbitrary membership oracle.
    Predicate(Predicate),
    /// An explicit finite list of vertices.
    Members(Arc<HashSet<Vertex>>),
    /// Every vertex of the listed levels.
    FullLevels(IntPattern),
    /// Vertices (other than the root) whose last digit is `d`.
    LastDigit(u32),
    /// Vertices with no digit equal to `d` (the root included).
    DigitAvoiding(u32),
    /// Stage `k` hangs one all-`digit` path of length `ρ_k` below every
    /// vertex of level `η_{k−1}` that is not in `U`; the path's end is in `U`.
    RhoGenerated { rho: IntPattern, digit: u32 },
}

impl fmt::Debug for SubsetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubsetKind::Predicate(_) => f.write_str("Predicate(..)"),
            SubsetKind::Members(s) => write!(f, "Members({} vertices)", s.len()),
            SubsetKind::FullLevels(p) => write!(f, "FullLevels({p})"),
            SubsetKind::LastDigit(d) => write!(f, "LastDigit({d})"),
            SubsetKind::DigitAvoiding(d) => write!(f, "DigitAvoiding({d})"),
            SubsetKind::RhoGenerated { rho, digit } => write!(f, "RhoGenerated({rho}, {digit})"),
        }
    }
}

/// Per-vertex state; see the module docs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum State {
    Unit,
    Flag(bool),
    Digits(Vec<u32>),
}

#[derive(Debug, Clone)]
pub struct SubsetSpec {
    m: u32,
    kind: SubsetKind,
    depth_bound: usize,
    /// Stage boundary levels `η_1 < η_2 < …` for rho-generated sets.
    boundaries: Vec<usize>,
}

impl SubsetSpec {
    fn build(m: u32, kind: SubsetKind, depth_bound: usize) -> Result<Self> {
        check_branching(m)?;
        let digit_ok = |d: u32| {
            if d < m {
                Ok(())
            } else {
                Err(Error::param("digit", format!("{d} out of range for m = {m}")))
            }
        };
        match &kind {
            SubsetKind::LastDigit(d) | SubsetKind::DigitAvoiding(d) => digit_ok(*d)?,
            SubsetKind::RhoGenerated { rho, digit } => {
                digit_ok(*digit)?;
                if rho.prefix(DEFAULT_DEPTH_BOUND).contains(&0) || rho.is_empty() {
                    return Err(Error::param("rho", "gaps must be positive and non-empty"));
                }
            }
            SubsetKind::FullLevels(p) => {
                if !p.is_strictly_increasing() {
                    return Err(Error::param("levels", format!("{p} is not strictly increasing")));
                }
            }
            SubsetKind::Members(s) => {
                if s.iter().any(|v| v.m() != m) {
                    return Err(Error::param("members", "vertex with mismatched m"));
                }
            }
            SubsetKind::Predicate(_) => {}
        }
        let mut spec = SubsetSpec {
            m,
            kind,
            depth_bound,
            boundaries: Vec::new(),
        };
        spec.refresh_boundaries();
        Ok(spec)
    }

    fn refresh_boundaries(&mut self) {
        self.boundaries.clear();
        if let SubsetKind::RhoGenerated { rho, .. } = &self.kind {
            let mut eta = 0usize;
            for k in 0.. {
                let Some(r) = rho.term(k) else { break };
                eta = eta.saturating_add(r as usize);
                self.boundaries.push(eta);
                if eta > self.depth_bound {
                    break;
                }
            }
        }
    }

    pub fn predicate<F>(m: u32, depth_bound: usize, f: F) -> Result<Self>
    where
        F: Fn(&Vertex) -> bool + Send + Sync + 'static,
    {
        Self::build(m, SubsetKind::Predicate(Arc::new(f)), depth_bound)
    }

    /// Finite member list; the depth bound defaults to the deepest member.
    pub fn members(m: u32, vertices: impl IntoIterator<Item = Vertex>) -> Result<Self> {
        let set: HashSet<Vertex> = vertices.into_iter().collect();
        let depth = set.iter().map(Vertex::level).max().unwrap_or(0);
        Self::build(m, SubsetKind::Members(Arc::new(set)), depth)
    }

    /// One dotted digit string per line; blank lines and `#` comments skipped.
    pub fn members_from_reader<R: BufRead>(m: u32, reader: R) -> Result<Self> {
        let mut out = Vec::new();
        for line in reader.lines() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            out.push(Vertex::parse(m, t)?);
        }
        Self::members(m, out)
    }

    pub fn full_levels(m: u32, levels: IntPattern) -> Result<Self> {
        Self::build(m, SubsetKind::FullLevels(levels), DEFAULT_DEPTH_BOUND)
    }

    pub fn last_digit(m: u32, d: u32) -> Result<Self> {
        Self::build(m, SubsetKind::LastDigit(d), DEFAULT_DEPTH_BOUND)
    }

    pub fn digit_avoiding(m: u32, d: u32) -> Result<Self> {
        Self::build(m, SubsetKind::DigitAvoiding(d), DEFAULT_DEPTH_BOUND)
    }

    /// The depth bound defaults to the larger of 32 and `η_6`.
    pub fn rho_generated(m: u32, rho: IntPattern, digit: u32) -> Result<Self> {
        let eta6: u64 = rho.prefix(6).iter().sum();
        let depth = DEFAULT_DEPTH_BOUND.max(eta6 as usize);
        Self::build(m, SubsetKind::RhoGenerated { rho, digit }, depth)
    }

    pub fn with_depth_bound(mut self, depth_bound: usize) -> Self {
        self.depth_bound = depth_bound;
        self.refresh_boundaries();
        self
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn kind(&self) -> &SubsetKind {
        &self.kind
    }

    pub fn depth_bound(&self) -> usize {
        self.depth_bound
    }

    /// True when states are whole digit strings (no compression).
    pub fn is_oracle_backed(&self) -> bool {
        matches!(self.kind, SubsetKind::Predicate(_) | SubsetKind::Members(_))
    }

    /// The gap descriptor of a rho-generated set.
    pub fn rho_pattern(&self) -> Option<&IntPattern> {
        match &self.kind {
            SubsetKind::RhoGenerated { rho, .. } => Some(rho),
            _ => None,
        }
    }

    fn is_stage_boundary(&self, level: usize) -> bool {
        level == 0 || self.boundaries.binary_search(&level).is_ok()
    }

    pub fn root_state(&self) -> State {
        match &self.kind {
            SubsetKind::Predicate(_) | SubsetKind::Members(_) => State::Digits(Vec::new()),
            SubsetKind::FullLevels(_) => State::Unit,
            SubsetKind::LastDigit(_) => State::Flag(false),
            SubsetKind::DigitAvoiding(_) => State::Flag(true),
            // root is never in U
            SubsetKind::RhoGenerated { .. } => State::Flag(false),
        }
    }

    /// State of the child with `digit` of a vertex at `level` in `state`.
    pub fn step(&self, state: &State, level: usize, digit: u32) -> State {
        match (&self.kind, state) {
            (SubsetKind::Predicate(_) | SubsetKind::Members(_), State::Digits(d)) => {
                let mut d = d.clone();
                d.push(digit);
                State::Digits(d)
            }
            (SubsetKind::FullLevels(_), _) => State::Unit,
            (SubsetKind::LastDigit(d), _) => State::Flag(digit == *d),
            (SubsetKind::DigitAvoiding(d), State::Flag(ok)) => State::Flag(*ok && digit != *d),
            (SubsetKind::RhoGenerated { digit: dd, .. }, State::Flag(alive)) => {
                // At a stage boundary `alive` means "this vertex is in U"; a new
                // path may only start below vertices outside U.
                let alive = if self.is_stage_boundary(level) {
                    !*alive
                } else {
                    *alive
                };
                State::Flag(alive && digit == *dd)
            }
            (kind, s) => unreachable!("state {s:?} does not belong to {kind:?}"),
        }
    }

    /// Membership of a vertex at `level` in `state`.
    pub fn contains_state(&self, state: &State, level: usize) -> bool {
        match (&self.kind, state) {
            (SubsetKind::Predicate(f), State::Digits(d)) => f(&Vertex::new(self.m, d.clone()).expect("valid digits")),
            (SubsetKind::Members(set), State::Digits(d)) => {
                set.contains(&Vertex::new(self.m, d.clone()).expect("valid digits"))
            }
            (SubsetKind::FullLevels(p), _) => p.contains_increasing(level as u64),
            (SubsetKind::LastDigit(_), State::Flag(f)) => *f && level > 0,
            (SubsetKind::DigitAvoiding(_), State::Flag(f)) => *f,
            (SubsetKind::RhoGenerated { .. }, State::Flag(alive)) => {
                level > 0 && *alive && self.boundaries.binary_search(&level).is_ok()
            }
            (kind, s) => unreachable!("state {s:?} does not belong to {kind:?}"),
        }
    }

    pub fn state_of(&self, v: &Vertex) -> State {
        v.digits()
            .iter()
            .enumerate()
            .fold(self.root_state(), |s, (level, &d)| self.step(&s, level, d))
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        self.contains_state(&self.state_of(v), v.level())
    }
}

impl fmt::Display for SubsetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SubsetKind::Predicate(_) => f.write_str("predicate"),
            SubsetKind::Members(s) => write!(f, "members({})", s.len()),
            SubsetKind::FullLevels(p) => write!(f, "full-levels:{p}"),
            SubsetKind::LastDigit(d) => write!(f, "last-digit:{d}"),
            SubsetKind::DigitAvoiding(d) => write!(f, "digit-avoiding:{d}"),
            SubsetKind::RhoGenerated { rho, digit } => write!(f, "rho:{rho}@{digit}"),
        }
    }
}

/// Parses `last-digit:0`, `digit-avoiding:1`, `full-levels:2,4,8,16`,
/// `rho:1,4,1,8,1,16[;rule]` (rule: `infer`, `finite`, `cycle`,
/// `cycle=<list>`).
pub fn parse_descriptor(m: u32, s: &str) -> Result<SubsetSpec> {
    let (head, body) = s
        .split_once(':')
        .ok_or_else(|| Error::parse("set descriptor", format!("{s:?} has no ':'")))?;
    let digit = |b: &str| {
        b.trim()
            .parse::<u32>()
            .map_err(|e| Error::parse("set descriptor", format!("{b:?}: {e}")))
    };
    match head.trim() {
        "last-digit" => SubsetSpec::last_digit(m, digit(body)?),
        "digit-avoiding" => SubsetSpec::digit_avoiding(m, digit(body)?),
        "full-levels" => SubsetSpec::full_levels(m, body.parse()?),
        "rho" => {
            let (list, d) = match body.split_once('@') {
                Some((l, d)) => (l, digit(d)?),
                None => (body, 0),
            };
            SubsetSpec::rho_generated(m, list.parse()?, d)
        }
        other => Err(Error::parse("set descriptor", format!("unknown kind {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{enumerate_level, SizeCap};

    fn v(d: &[u32]) -> Vertex {
        Vertex::new(3, d.to_vec()).unwrap()
    }

    #[test]
    fn structured_membership() {
        let last = SubsetSpec::last_digit(3, 0).unwrap();
        assert!(last.contains(&v(&[1, 0])));
        assert!(!last.contains(&v(&[0, 1])));
        assert!(!last.contains(&Vertex::root(3)));

        let avoid = SubsetSpec::digit_avoiding(3, 1).unwrap();
        assert!(avoid.contains(&v(&[0, 2, 2])));
        assert!(!avoid.contains(&v(&[0, 1, 2])));
        assert!(avoid.contains(&Vertex::root(3)));

        let full = SubsetSpec::full_levels(3, "2,4,8;finite".parse().unwrap()).unwrap();
        assert!(full.contains(&v(&[1, 2])));
        assert!(!full.contains(&v(&[1, 2, 0])));
        assert!(SubsetSpec::full_levels(3, "4,2;finite".parse().unwrap()).is_err());
    }

    #[test]
    fn rho_generated_matches_direct_definition() {
        let rho: IntPattern = "1,2,1,3;finite".parse().unwrap();
        let spec = SubsetSpec::rho_generated(3, rho, 0).unwrap();
        // direct recursive definition
        let etas = [1usize, 3, 4, 7];
        fn in_u(x: &[u32], etas: &[usize], rho: &[usize]) -> bool {
            let Some(k) = etas.iter().position(|&e| e == x.len()) else { return false };
            let start = x.len() - rho[k];
            x[start..].iter().all(|&d| d == 0) && (k == 0 || !in_u(&x[..start], etas, rho))
        }
        for level in 0..=8 {
            for x in enumerate_level(3, level, SizeCap::DEFAULT).unwrap() {
                assert_eq!(spec.contains(&x), in_u(x.digits(), &etas, &[1, 2, 1, 3]), "{x}");
            }
        }
    }

    #[test]
    fn oracle_kinds() {
        let p = SubsetSpec::predicate(3, 5, |x: &Vertex| x.digits() == [2, 2]).unwrap();
        assert!(p.contains(&v(&[2, 2])));
        assert!(p.is_oracle_backed());
        let list = "# members\n0.1\n\n2.2.2\n";
        let s = SubsetSpec::members_from_reader(3, list.as_bytes()).unwrap();
        assert!(s.contains(&v(&[0, 1])) && s.contains(&v(&[2, 2, 2])));
        assert!(!s.contains(&v(&[0])));
        assert_eq!(s.depth_bound(), 3);
        assert!(SubsetSpec::members_from_reader(3, "0.3\n".as_bytes()).is_err());
    }

    #[test]
    fn descriptors() {
        assert!(matches!(parse_descriptor(3, "last-digit:0").unwrap().kind(), SubsetKind::LastDigit(0)));
        assert!(matches!(
            parse_descriptor(3, "digit-avoiding:1").unwrap().kind(),
            SubsetKind::DigitAvoiding(1)
        ));
        let f = parse_descriptor(3, "full-levels:2,4,8,16").unwrap();
        assert!(matches!(f.kind(), SubsetKind::FullLevels(IntPattern::Geometric { first: 2, ratio: 2 })));
        let r = parse_descriptor(3, "rho:1,4,1,8,1,16").unwrap();
        assert_eq!(r.rho_pattern().unwrap().prefix(6), vec![1, 4, 1, 8, 1, 16]);
        assert_eq!(r.depth_bound(), 32);
        assert!(parse_descriptor(3, "rho:1,2@2").is_ok());
        assert!(parse_descriptor(3, "rho:1,2@3").is_err());
        assert!(parse_descriptor(3, "last-digit:5").is_err());
        assert!(parse_descriptor(3, "bogus:1").is_err());
        assert!(parse_descriptor(3, "last-digit").is_err());
    }
}
