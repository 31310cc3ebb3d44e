//! Integer sequence descriptors for gap sequences and level lists.
//!
//! A finite list says nothing about the tail of an infinite sequence, so the
//! divergence of `Σ δ^{ρ_k}` can only be decided for descriptors that carry
//! a rule: periodic tails, arithmetic and geometric progressions, and
//! interleavings of those.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dpp::GameParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntPattern {
    Finite(Vec<u64>),
    /// `prefix` followed by `cycle` repeated forever.
    Periodic { prefix: Vec<u64>, cycle: Vec<u64> },
    /// `first + step·k`, `k = 0, 1, …`
    Arithmetic { first: u64, step: u64 },
    /// `first · ratio^k`, `k = 0, 1, …`
    Geometric { first: u64, ratio: u64 },
    /// Term `k` comes from stream `k mod s`, position `k / s`.
    Interleave(Vec<IntPattern>),
}

impl IntPattern {
    pub fn constant(c: u64) -> Self {
        IntPattern::Periodic {
            prefix: Vec::new(),
            cycle: vec![c],
        }
    }

    /// Term `k` (0-based); `None` past the end of a finite list.
    pub fn term(&self, k: usize) -> Option<u64> {
        match self {
            IntPattern::Finite(v) => v.get(k).copied(),
            IntPattern::Periodic { prefix, cycle } => {
                if k < prefix.len() {
                    Some(prefix[k])
                } else if cycle.is_empty() {
                    None
                } else {
                    Some(cycle[(k - prefix.len()) % cycle.len()])
                }
            }
            IntPattern::Arithmetic { first, step } => {
                step.checked_mul(k as u64)?.checked_add(*first)
            }
            IntPattern::Geometric { first, ratio } => {
                let p = ratio.checked_pow(u32::try_from(k).ok()?)?;
                first.checked_mul(p)
            }
            IntPattern::Interleave(streams) => {
                if streams.is_empty() {
                    return None;
                }
                if self.len().is_some_and(|end| k >= end) {
                    return None;
                }
                let s = streams.len();
                streams[k % s].term(k / s)
            }
        }
    }

    /// Number of terms, or `None` for infinite descriptors.
    pub fn len(&self) -> Option<usize> {
        match self {
            IntPattern::Finite(v) => Some(v.len()),
            IntPattern::Periodic { prefix, cycle } if cycle.is_empty() => Some(prefix.len()),
            IntPattern::Interleave(streams) => {
                // a finite stream ends the whole sequence at its first gap
                let s = streams.len();
                if s == 0 {
                    return Some(0);
                }
                streams
                    .iter()
                    .enumerate()
                    .filter_map(|(r, st)| st.len().map(|l| r + s * l))
                    .min()
            }
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    pub fn is_finite(&self) -> bool {
        self.len().is_some()
    }

    /// The first `n` terms (fewer for short finite lists).
    pub fn prefix(&self, n: usize) -> Vec<u64> {
        (0..n).map_while(|k| self.term(k)).collect()
    }

    /// `Some(true)` when `Σ δ^{a_k}` diverges, `Some(false)` when it
    /// converges, `None` when the descriptor cannot decide.
    pub fn series_diverges(&self) -> Option<bool> {
        match self {
            IntPattern::Finite(_) => None,
            IntPattern::Periodic { cycle, .. } => {
                if cycle.is_empty() {
                    None
                } else {
                    Some(true)
                }
            }
            IntPattern::Arithmetic { step, .. } => Some(*step == 0),
            IntPattern::Geometric { first, ratio } => Some(*ratio <= 1 || *first == 0),
            IntPattern::Interleave(streams) => {
                let verdicts: Vec<_> = streams.iter().map(|s| s.series_diverges()).collect();
                if verdicts.contains(&Some(true)) {
                    Some(true)
                } else if !verdicts.is_empty() && verdicts.iter().all(|v| *v == Some(false)) {
                    Some(false)
                } else {
                    None
                }
            }
        }
    }

    /// `Σ_k δ^{a_k}` over the whole (convergent) sequence.
    pub fn series_limit(&self, delta: f64) -> Option<f64> {
        if self.series_diverges() != Some(false) {
            return None;
        }
        match self {
            IntPattern::Arithmetic { first, step } => {
                Some(delta.powf(*first as f64) / (1.0 - delta.powf(*step as f64)))
            }
            IntPattern::Geometric { .. } => {
                let mut sum = 0.0;
                for k in 0.. {
                    let Some(t) = self.term(k) else { break };
                    let x = delta.powf(t as f64);
                    if x < 1e-300 {
                        break;
                    }
                    sum += x;
                }
                Some(sum)
            }
            IntPattern::Interleave(streams) => {
                streams.iter().map(|s| s.series_limit(delta)).sum()
            }
            _ => None,
        }
    }

    /// Reads a pattern from a plain list by looking for the shortest
    /// interleaving (1 to 3 streams) in which every stream is constant,
    /// arithmetic or geometric. Lists that fit no such rule stay finite.
    pub fn infer(list: &[u64]) -> IntPattern {
        infer_with(list, 3)
    }

    /// Like [`infer`](Self::infer) for a list written with a trailing
    /// ellipsis: two terms per stream are enough, and a two-term stream
    /// with an integer ratio is read as geometric.
    pub fn infer_open(list: &[u64]) -> IntPattern {
        infer_with(list, 2)
    }

    /// True when `value` is one of the terms. Only meaningful for
    /// non-decreasing sequences, where the scan stops past `value`.
    pub(crate) fn contains_increasing(&self, value: u64) -> bool {
        for k in 0.. {
            match self.term(k) {
                Some(t) if t == value => return true,
                Some(t) if t > value => return false,
                Some(_) => {}
                None => return false,
            }
        }
        false
    }

    /// Strictly increasing with at least one term (checked on the first 64
    /// terms, and structurally for infinite forms).
    pub(crate) fn is_strictly_increasing(&self) -> bool {
        let structural = match self {
            IntPattern::Finite(_) => true,
            IntPattern::Periodic { cycle, .. } => cycle.is_empty(),
            IntPattern::Arithmetic { step, .. } => *step > 0,
            IntPattern::Geometric { first, ratio } => *first > 0 && *ratio > 1,
            IntPattern::Interleave(_) => false,
        };
        let head = self.prefix(64);
        structural && !head.is_empty() && head.windows(2).all(|w| w[0] < w[1])
    }
}

fn infer_with(list: &[u64], min_terms: usize) -> IntPattern {
    for s in 1..=3usize {
        if list.len() < 2 * s {
            break;
        }
        let streams: Vec<Vec<u64>> = (0..s)
            .map(|r| list.iter().skip(r).step_by(s).copied().collect())
            .collect();
        let fitted: Option<Vec<IntPattern>> = streams.iter().map(|v| fit_stream(v, min_terms)).collect();
        if let Some(mut fitted) = fitted {
            return if fitted.len() == 1 {
                fitted.pop().expect("one stream")
            } else {
                IntPattern::Interleave(fitted)
            };
        }
    }
    IntPattern::Finite(list.to_vec())
}

fn fit_stream(v: &[u64], min_terms: usize) -> Option<IntPattern> {
    if v.len() < 2 {
        return None;
    }
    if v.iter().all(|&x| x == v[0]) {
        return Some(IntPattern::constant(v[0]));
    }
    if v.len() < min_terms {
        return None;
    }
    let geometric = || {
        if v[0] > 0 && v[1].is_multiple_of(v[0]) && v[1] / v[0] >= 2 {
            let ratio = v[1] / v[0];
            if v.windows(2).all(|w| w[0].checked_mul(ratio) == Some(w[1])) {
                return Some(IntPattern::Geometric { first: v[0], ratio });
            }
        }
        None
    };
    if v.len() == 2 {
        if let Some(g) = geometric() {
            return Some(g);
        }
    }
    if v[1] > v[0] {
        let step = v[1] - v[0];
        if v.windows(2).all(|w| w[1] > w[0] && w[1] - w[0] == step) {
            return Some(IntPattern::Arithmetic { first: v[0], step });
        }
    }
    geometric()
}

fn write_list(f: &mut fmt::Formatter<'_>, v: &[u64]) -> fmt::Result {
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

impl fmt::Display for IntPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntPattern::Finite(v) => {
                f.write_str("finite(")?;
                write_list(f, v)?;
                f.write_str(")")
            }
            IntPattern::Periodic { prefix, cycle } if prefix.is_empty() && cycle.len() == 1 => {
                write!(f, "constant({})", cycle[0])
            }
            IntPattern::Periodic { prefix, cycle } => {
                f.write_str("periodic(")?;
                write_list(f, prefix)?;
                f.write_str(";")?;
                write_list(f, cycle)?;
                f.write_str(")")
            }
            IntPattern::Arithmetic { first, step } => write!(f, "arithmetic({first}+{step}k)"),
            IntPattern::Geometric { first, ratio } => write!(f, "geometric({first}*{ratio}^k)"),
            IntPattern::Interleave(streams) => {
                f.write_str("interleave(")?;
                for (i, s) in streams.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    write!(f, "{s}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl Serialize for IntPattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn is_ellipsis(t: &str) -> bool {
    t == "…" || t == "..."
}

fn parse_list(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty() && !is_ellipsis(t))
        .map(|t| {
            t.parse::<u64>()
                .map_err(|e| Error::parse("integer list", format!("{t:?}: {e}")))
        })
        .collect()
}

/// `1,4,1,8` (rule inferred), `2,2,2;finite`, `1,2;cycle`, `5;cycle=1,2`.
impl FromStr for IntPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (list, rule) = match s.split_once(';') {
            Some((l, r)) => (l, Some(r.trim())),
            None => (s, None),
        };
        let open = list.split(',').any(|t| is_ellipsis(t.trim()));
        let list = parse_list(list)?;
        let pattern = match rule {
            None | Some("") | Some("infer") if open => IntPattern::infer_open(&list),
            None | Some("") | Some("infer") => IntPattern::infer(&list),
            Some("finite") => IntPattern::Finite(list),
            Some("cycle") => IntPattern::Periodic {
                prefix: Vec::new(),
                cycle: list,
            },
            Some(r) => match r.strip_prefix("cycle=") {
                Some(c) => IntPattern::Periodic {
                    prefix: list,
                    cycle: parse_list(c)?,
                },
                None => return Err(Error::parse("repetition rule", format!("unknown rule {r:?}"))),
            },
        };
        if pattern.is_empty() {
            return Err(Error::parse("integer list", "empty list"));
        }
        Ok(pattern)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionVerdict {
    /// `None` when the descriptor cannot decide the infinite sum.
    pub diverges: Option<bool>,
    /// `Σ δ^{ρ_k}` over the first `terms` entries.
    pub partial_sum: f64,
    pub terms: usize,
    /// The full sum when it is known to converge.
    pub limit_sum: Option<f64>,
    pub delta: f64,
}

/// Terms summed for infinite descriptors.
pub const DEFAULT_TERMS: usize = 64;

pub fn criterion_verdict(rho: &IntPattern, params: &GameParams) -> Result<CriterionVerdict> {
    criterion_verdict_for_delta(rho, params.delta())
}

pub fn criterion_verdict_for_delta(rho: &IntPattern, delta: f64) -> Result<CriterionVerdict> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param("delta", format!("must lie in (0, 1), got {delta}")));
    }
    let terms = rho.len().unwrap_or(DEFAULT_TERMS);
    let head = rho.prefix(terms);
    let partial_sum = head.iter().map(|&r| delta.powf(r as f64)).sum();
    Ok(CriterionVerdict {
        diverges: rho.series_diverges(),
        partial_sum,
        terms: head.len(),
        limit_sum: rho.series_limit(delta),
        delta,
    })
}
