//! Structural checks and the ρ ledger for a subset `U`.
//!
//! Every pass sweeps the tree level by level, merging vertices that share a
//! membership state. For structured subsets a level holds a few entries no
//! matter how deep it is; oracle-backed subsets degrade to one entry per
//! vertex and are bounded by the size cap.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::dpp::GameParams;
use crate::error::{Error, Result};
use crate::tree::{interval_of, Interval, SizeCap, Vertex};
use crate::ucp::pattern::{criterion_verdict, CriterionVerdict, IntPattern};
use crate::ucp::subset::{State, SubsetKind, SubsetSpec};

#[derive(Debug, Clone)]
struct Entry {
    count: u128,
    rep: Vec<u32>,
}

/// Level profile keyed by (state, per-pass flag).
type Profile = BTreeMap<(State, bool), Entry>;

#[derive(Debug, Clone, Serialize)]
pub struct DensityResult {
    pub dense_up_to: bool,
    pub resolution: usize,
    pub depth_bound: usize,
    /// A level-`resolution` vertex whose interval meets no point of `ψ(U)`.
    #[serde(serialize_with = "ser_display_opt")]
    pub witness_vertex: Option<Vertex>,
    #[serde(serialize_with = "ser_display_opt")]
    pub witness_gap: Option<Interval>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PaResult {
    pub holds: bool,
    /// Least uniform hitting distance found.
    pub n: Option<usize>,
    pub n_max: usize,
    /// Deepest level whose vertices were scanned.
    pub scanned_to: usize,
    /// True when the scan covers every state the subset can reach, so the
    /// outcome holds on the whole tree and not just to the scanned depth.
    pub exhaustive: bool,
    #[serde(serialize_with = "ser_display_opt")]
    pub failure_vertex: Option<Vertex>,
    pub failure_depth: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct P2Failure {
    pub stage: usize,
    #[serde(serialize_with = "ser_display")]
    pub frontier_vertex: Vertex,
    /// Members of `U` found below it at the stage offset.
    pub members: u128,
}

/// The structural part of the analysis: `ρ_k`, `η_k` and (P1), (P2).
#[derive(Debug, Clone, Serialize)]
pub struct RhoLedger {
    pub rho: Vec<u64>,
    pub eta: Vec<u64>,
    /// `ρ_k` recomputed with the minimum taken over `A_k` only.
    pub rho_over_frontier: Vec<Option<u64>>,
    /// True when the two readings of `ρ_k` disagree at some stage.
    pub quantifier_discrepancy: bool,
    pub p1_ok: Option<bool>,
    pub p1_members: Option<u128>,
    pub p2_ok: Option<bool>,
    pub p2_failure: Option<P2Failure>,
    /// Why the ledger stopped before `k_max` stages, if it did.
    pub stopped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    UcpCertified,
    NoUcpCertified,
    InconclusiveAtDepth(usize),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::UcpCertified => f.write_str("UCP-certified"),
            Verdict::NoUcpCertified => f.write_str("no-UCP-certified"),
            Verdict::InconclusiveAtDepth(d) => write!(f, "inconclusive-at-depth-{d}"),
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct UcpReport {
    pub set: String,
    pub m: u32,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub depth_bound: usize,
    pub rho: Vec<u64>,
    pub eta: Vec<u64>,
    /// `Σ_{k ≤ K} δ^{ρ_k}` over the computed stages.
    pub partial_sum: f64,
    pub ledger: RhoLedger,
    pub p1_ok: Option<bool>,
    pub p2_ok: Option<bool>,
    pub pa_result: PaResult,
    pub density_result: DensityResult,
    /// Criterion applied to the generating descriptor of a rho-generated set.
    pub criterion: Option<CriterionVerdict>,
    pub full_level_shortcut: bool,
    pub verdict: Verdict,
    pub reason: String,
}

fn ser_display_opt<T: fmt::Display, S: Serializer>(
    v: &Option<T>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_str(&x.to_string()),
        None => s.serialize_none(),
    }
}

fn ser_display<T: fmt::Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Runs the structural passes over one subset.
#[derive(Debug, Clone)]
pub struct Analyzer<'a> {
    spec: &'a SubsetSpec,
    cap: SizeCap,
}

impl<'a> Analyzer<'a> {
    pub fn new(spec: &'a SubsetSpec) -> Self {
        Analyzer {
            spec,
            cap: SizeCap::default(),
        }
    }

    pub fn with_cap(mut self, cap: SizeCap) -> Self {
        self.cap = cap;
        self
    }

    fn over_cap(&self, n: usize) -> Result<()> {
        if n as u128 > self.cap.0 as u128 {
            return Err(Error::Capacity {
                requested: n as u128,
                cap: self.cap.0,
            });
        }
        Ok(())
    }

    fn root_profile(&self, flag: bool) -> Profile {
        let mut p = Profile::new();
        p.insert(
            (self.spec.root_state(), flag),
            Entry {
                count: 1,
                rep: Vec::new(),
            },
        );
        p
    }

    /// Moves a profile at `level` one level down. `rule(flag, digit,
    /// child_in_u)` gives the child's flag.
    fn advance(&self, profile: &Profile, level: usize, rule: impl Fn(bool, u32, bool) -> bool) -> Result<Profile> {
        let mut next = Profile::new();
        for ((state, flag), e) in profile {
            for d in 0..self.spec.m() {
                let child = self.spec.step(state, level, d);
                let in_u = self.spec.contains_state(&child, level + 1);
                let key = (child, rule(*flag, d, in_u));
                let mut rep = e.rep.clone();
                rep.push(d);
                match next.get_mut(&key) {
                    Some(x) => {
                        x.count = x.count.saturating_add(e.count);
                        if rep < x.rep {
                            x.rep = rep;
                        }
                    }
                    None => {
                        next.insert(key, Entry { count: e.count, rep });
                    }
                }
            }
            self.over_cap(next.len())?;
        }
        Ok(next)
    }

    /// Least `n` in `1..=max_offset` such that some descendant `n` levels
    /// below a vertex in `state` at `level` lies in `U`.
    fn first_hit(&self, state: &State, level: usize, max_offset: usize) -> Result<Option<usize>> {
        let mut frontier = BTreeSet::from([state.clone()]);
        for off in 1..=max_offset {
            let lvl = level + off - 1;
            let mut next = BTreeSet::new();
            for s in &frontier {
                for d in 0..self.spec.m() {
                    next.insert(self.spec.step(s, lvl, d));
                }
                self.over_cap(next.len())?;
            }
            if next.iter().any(|s| self.spec.contains_state(s, lvl + 1)) {
                return Ok(Some(off));
            }
            frontier = next;
        }
        Ok(None)
    }

    /// Number of `U` members exactly `offset` levels below a vertex.
    fn members_below(&self, state: &State, level: usize, offset: usize) -> Result<u128> {
        let mut counts: BTreeMap<State, u128> = BTreeMap::from([(state.clone(), 1)]);
        for lvl in level..level + offset {
            let mut next: BTreeMap<State, u128> = BTreeMap::new();
            for (s, c) in &counts {
                for d in 0..self.spec.m() {
                    let e = next.entry(self.spec.step(s, lvl, d)).or_insert(0);
                    *e = e.saturating_add(*c);
                }
                self.over_cap(next.len())?;
            }
            counts = next;
        }
        Ok(counts
            .iter()
            .filter(|(s, _)| self.spec.contains_state(s, level + offset))
            .map(|(_, c)| *c)
            .fold(0u128, u128::saturating_add))
    }

    fn vertex(&self, digits: &[u32]) -> Vertex {
        Vertex::new(self.spec.m(), digits.to_vec()).expect("digits come from the sweep")
    }

    /// Does every level-`d` interval (taken half-open) contain `ψ(x)` for
    /// some member `x` of level at most `D`?
    pub fn density_check(&self, resolution: usize) -> Result<DensityResult> {
        let bound = self.spec.depth_bound();
        if resolution > bound {
            return Err(Error::InsufficientDepth {
                needed: resolution,
                bound,
            });
        }
        // flag: ψ of some member ancestor-or-self lies at this vertex's left
        // endpoint, i.e. the digits after that member are all zero
        let root_in = self.spec.contains_state(&self.spec.root_state(), 0);
        let mut profile = self.root_profile(root_in);
        for level in 0..resolution {
            profile = self.advance(&profile, level, |zc, d, in_u| (zc && d == 0) || in_u)?;
        }
        let mut witness: Option<Vec<u32>> = None;
        for ((state, zc), e) in &profile {
            if *zc || self.first_hit(state, resolution, bound - resolution)?.is_some() {
                continue;
            }
            if witness.as_ref().is_none_or(|w| e.rep < *w) {
                witness = Some(e.rep.clone());
            }
        }
        let witness_vertex = witness.map(|w| self.vertex(&w));
        Ok(DensityResult {
            dense_up_to: witness_vertex.is_none(),
            resolution,
            depth_bound: bound,
            witness_gap: witness_vertex.as_ref().map(interval_of),
            witness_vertex,
        })
    }

    /// Uniform hitting property: every vertex scanned has a member within
    /// `n` levels below it, for the least such `n ≤ n_max`.
    pub fn pa_check(&self, n_max: usize) -> Result<PaResult> {
        let bound = self.spec.depth_bound();
        if n_max == 0 {
            return Err(Error::param("n_max", "must be at least 1"));
        }
        if n_max > bound {
            return Err(Error::InsufficientDepth {
                needed: n_max,
                bound,
            });
        }
        let scanned_to = bound - n_max;
        let exhaustive = matches!(
            self.spec.kind(),
            SubsetKind::LastDigit(_) | SubsetKind::DigitAvoiding(_) | SubsetKind::Predicate(_) | SubsetKind::Members(_)
        );
        let mut worst = 0usize;
        let mut profile = self.root_profile(false);
        for level in 0..=scanned_to {
            if level > 0 {
                profile = self.advance(&profile, level - 1, |_, _, _| false)?;
            }
            for ((state, _), e) in &profile {
                match self.first_hit(state, level, n_max)? {
                    Some(n) => worst = worst.max(n),
                    None => {
                        return Ok(PaResult {
                            holds: false,
                            n: None,
                            n_max,
                            scanned_to,
                            exhaustive,
                            failure_vertex: Some(self.vertex(&e.rep)),
                            failure_depth: Some(level),
                        })
                    }
                }
            }
        }
        Ok(PaResult {
            holds: true,
            n: Some(worst),
            n_max,
            scanned_to,
            exhaustive,
            failure_vertex: None,
            failure_depth: None,
        })
    }

    /// Computes up to `k_max` stages of `ρ_k`, with (P1) and (P2).
    pub fn compute_rho(&self, k_max: usize) -> Result<RhoLedger> {
        let bound = self.spec.depth_bound();
        let mut ledger = RhoLedger {
            rho: Vec::new(),
            eta: Vec::new(),
            rho_over_frontier: Vec::new(),
            quantifier_discrepancy: false,
            p1_ok: None,
            p1_members: None,
            p2_ok: None,
            p2_failure: None,
            stopped: None,
        };
        if k_max == 0 {
            return Ok(ledger);
        }
        let root = self.spec.root_state();
        let Some(rho1) = self.first_hit(&root, 0, bound)? else {
            ledger.stopped = Some(format!("no member of U up to level {bound}"));
            return Ok(ledger);
        };
        let members = self.members_below(&root, 0, rho1)?;
        ledger.rho.push(rho1 as u64);
        ledger.eta.push(rho1 as u64);
        ledger.rho_over_frontier.push(Some(rho1 as u64));
        ledger.p1_ok = Some(members == 1);
        ledger.p1_members = Some(members);

        // flag: blocked, i.e. below a member found at an earlier stage level
        let mut profile = self.root_profile(false);
        let mut level = 0;
        let advance_to = |profile: &mut Profile, level: &mut usize, target: usize| -> Result<()> {
            while *level < target {
                let is_stage = *level + 1 == target;
                *profile = self.advance(profile, *level, |b, _, in_u| b || (is_stage && in_u))?;
                *level += 1;
            }
            Ok(())
        };
        advance_to(&mut profile, &mut level, rho1)?;

        for stage in 2..=k_max {
            let base = level;
            let outside: Vec<(&State, bool, &Entry)> = profile
                .iter()
                .filter(|((s, _), _)| !self.spec.contains_state(s, base))
                .map(|((s, b), e)| (s, *b, e))
                .collect();
            if outside.is_empty() {
                ledger.stopped = Some(format!("level {base} lies entirely in U"));
                break;
            }
            let mut best: Option<usize> = None;
            let mut best_frontier: Option<usize> = None;
            let mut hits: BTreeMap<&State, Option<usize>> = BTreeMap::new();
            for (s, blocked, _) in &outside {
                let h = match hits.get(s) {
                    Some(h) => *h,
                    None => {
                        let h = self.first_hit(s, base, bound - base)?;
                        hits.insert(s, h);
                        h
                    }
                };
                if let Some(h) = h {
                    best = Some(best.map_or(h, |b| b.min(h)));
                    if !blocked {
                        best_frontier = Some(best_frontier.map_or(h, |b| b.min(h)));
                    }
                }
            }
            let Some(rho) = best else {
                ledger.stopped = Some(format!("no member of U between levels {base} and {bound}"));
                break;
            };
            ledger.rho.push(rho as u64);
            ledger.eta.push((base + rho) as u64);
            ledger.rho_over_frontier.push(best_frontier.map(|r| r as u64));
            if best_frontier != Some(rho) {
                ledger.quantifier_discrepancy = true;
            }

            let mut p2 = ledger.p2_ok.unwrap_or(true);
            let mut counted: BTreeMap<&State, u128> = BTreeMap::new();
            for (s, blocked, e) in &outside {
                if *blocked {
                    continue;
                }
                let n = match counted.get(s) {
                    Some(n) => *n,
                    None => {
                        let n = self.members_below(s, base, rho)?;
                        counted.insert(s, n);
                        n
                    }
                };
                if n != 1 {
                    if ledger.p2_failure.is_none() {
                        ledger.p2_failure = Some(P2Failure {
                            stage,
                            frontier_vertex: self.vertex(&e.rep),
                            members: n,
                        });
                    }
                    p2 = false;
                }
            }
            ledger.p2_ok = Some(p2);
            advance_to(&mut profile, &mut level, base + rho)?;
        }
        Ok(ledger)
    }

    /// Full analysis: density, PA, the ρ ledger, and the verdict.
    pub fn analyze(&self, params: &GameParams, opts: &AnalysisOptions) -> Result<UcpReport> {
        if params.m() != self.spec.m() {
            return Err(Error::param(
                "m",
                format!("subset has m = {}, parameters have m = {}", self.spec.m(), params.m()),
            ));
        }
        let delta = params.delta();
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::param("delta", format!("must lie in (0, 1), got {delta}")));
        }
        let bound = self.spec.depth_bound();
        let resolution = opts.resolution.unwrap_or(bound.min(8));
        let n_max = opts.pa_max.unwrap_or((bound / 2).max(1));

        let density = self.density_check(resolution)?;
        let pa = self.pa_check(n_max)?;
        let ledger = self.compute_rho(opts.k_max)?;
        let partial_sum = ledger.rho.iter().map(|&r| delta.powf(r as f64)).sum();

        let full_level_shortcut = matches!(
            self.spec.kind(),
            SubsetKind::FullLevels(p) if !p.is_finite()
        );
        let criterion = match self.spec.rho_pattern() {
            Some(p) => Some(criterion_verdict(p, params)?),
            None => None,
        };
        let structural = ledger.p1_ok == Some(true) && ledger.p2_ok != Some(false);
        let generator_matches = self
            .spec
            .rho_pattern()
            .is_some_and(|p| generator_agrees(p, &ledger.rho));

        let (verdict, reason) = if !density.dense_up_to {
            (
                Verdict::NoUcpCertified,
                format!("psi(U) misses an interval at resolution {resolution}"),
            )
        } else if full_level_shortcut {
            (
                Verdict::UcpCertified,
                "U contains unboundedly many full levels; zeros propagate upward".to_string(),
            )
        } else if pa.holds && pa.exhaustive {
            (
                Verdict::UcpCertified,
                format!("uniform hitting property holds with n = {}", pa.n.unwrap_or(0)),
            )
        } else if structural && generator_matches {
            match criterion.as_ref().and_then(|c| c.diverges) {
                Some(true) => (
                    Verdict::UcpCertified,
                    "(P1), (P2) hold and the sum of delta^rho_k diverges".to_string(),
                ),
                Some(false) => (
                    Verdict::NoUcpCertified,
                    "(P1), (P2) hold and the sum of delta^rho_k converges".to_string(),
                ),
                None => (
                    Verdict::InconclusiveAtDepth(bound),
                    "the rho descriptor does not decide the series".to_string(),
                ),
            }
        } else {
            (
                Verdict::InconclusiveAtDepth(bound),
                "no structural certificate applies within the depth bound".to_string(),
            )
        };

        Ok(UcpReport {
            set: self.spec.to_string(),
            m: params.m(),
            alpha: params.alpha(),
            beta: params.beta(),
            delta,
            depth_bound: bound,
            rho: ledger.rho.clone(),
            eta: ledger.eta.clone(),
            partial_sum,
            p1_ok: ledger.p1_ok,
            p2_ok: ledger.p2_ok,
            ledger,
            pa_result: pa,
            density_result: density,
            criterion,
            full_level_shortcut,
            verdict,
            reason,
        })
    }
}

/// The computed stages reproduce the descriptor's first terms.
fn generator_agrees(pattern: &IntPattern, rho: &[u64]) -> bool {
    !rho.is_empty() && pattern.prefix(rho.len()) == rho
}

#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub k_max: usize,
    /// Density resolution; defaults to `min(D, 8)`.
    pub resolution: Option<usize>,
    /// Largest PA distance tried; defaults to `D / 2`.
    pub pa_max: Option<usize>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            k_max: 6,
            resolution: None,
            pa_max: None,
        }
    }
}

pub fn density_check(spec: &SubsetSpec, resolution: usize) -> Result<DensityResult> {
    Analyzer::new(spec).density_check(resolution)
}

pub fn pa_check(spec: &SubsetSpec, n_max: usize) -> Result<PaResult> {
    Analyzer::new(spec).pa_check(n_max)
}

pub fn compute_rho(spec: &SubsetSpec, k_max: usize) -> Result<RhoLedger> {
    Analyzer::new(spec).compute_rho(k_max)
}

pub fn analyze(spec: &SubsetSpec, params: &GameParams, k_max: usize) -> Result<UcpReport> {
    Analyzer::new(spec).analyze(
        params,
        &AnalysisOptions {
            k_max,
            ..AnalysisOptions::default()
        },
    )
}

/// Lower bounds `M_k = Π_{i ≤ k} (1 − δ^{ρ_i})^{-1}` on the size of any
/// nonzero function vanishing on `U`. Requires (P1) and (P2) to hold for
/// the `k` stages used.
pub fn unboundedness_probe(spec: &SubsetSpec, params: &GameParams, k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Ok(Vec::new());
    }
    let ledger = compute_rho(spec, k)?;
    if ledger.p1_ok != Some(true) || ledger.p2_ok == Some(false) {
        return Err(Error::Refused(format!(
            "structural checks fail for {spec}: P1 = {:?}, P2 = {:?}",
            ledger.p1_ok, ledger.p2_ok
        )));
    }
    if ledger.rho.len() < k {
        return Err(Error::InsufficientDepth {
            needed: ledger.eta.last().copied().unwrap_or(0) as usize + 1,
            bound: spec.depth_bound(),
        });
    }
    crate::ucp::counterexample::partial_products(&ledger.rho, params.delta())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::ExactPoint;

    fn half(m: u32) -> GameParams {
        GameParams::new(m, 0.5, 0.5).unwrap()
    }

    #[test]
    fn density_examples() {
        let avoid = SubsetSpec::digit_avoiding(3, 1).unwrap();
        let r = density_check(&avoid, 1).unwrap();
        assert!(!r.dense_up_to);
        let gap = r.witness_gap.unwrap();
        assert_eq!(gap.left, ExactPoint::new(3, 1u32, 1).unwrap());
        assert_eq!(gap.right(), ExactPoint::new(3, 2u32, 1).unwrap());

        let last = SubsetSpec::last_digit(3, 0).unwrap();
        for d in [1, 5, 12, 31] {
            assert!(density_check(&last, d).unwrap().dense_up_to, "d = {d}");
        }
        let all = SubsetSpec::predicate(3, 6, |_| true).unwrap();
        for d in 0..=4 {
            assert!(density_check(&all, d).unwrap().dense_up_to);
        }
        assert!(matches!(
            density_check(&last, 33),
            Err(Error::InsufficientDepth { needed: 33, bound: 32 })
        ));
    }

    #[test]
    fn pa_examples() {
        let last = SubsetSpec::last_digit(3, 0).unwrap();
        let r = pa_check(&last, 4).unwrap();
        assert!(r.holds && r.exhaustive);
        assert_eq!(r.n, Some(1));

        let avoid = SubsetSpec::digit_avoiding(3, 1).unwrap();
        for n_max in [1, 5, 16] {
            let r = pa_check(&avoid, n_max).unwrap();
            assert!(!r.holds);
            assert!(r.failure_vertex.unwrap().digits().contains(&1));
        }

        let levels = SubsetSpec::full_levels(3, "2,4,8;finite".parse().unwrap()).unwrap();
        for n_max in 1..=8 {
            assert!(!pa_check(&levels, n_max).unwrap().holds);
        }
    }

    #[test]
    fn pa_implies_dense() {
        let specs = [
            SubsetSpec::last_digit(3, 0).unwrap(),
            SubsetSpec::last_digit(4, 2).unwrap(),
            SubsetSpec::predicate(2, 8, |v: &Vertex| v.level() % 3 == 2).unwrap(),
        ];
        for s in &specs {
            let pa = pa_check(s, 3).unwrap();
            assert!(pa.holds, "{s}");
            let d = s.depth_bound() - pa.n.unwrap();
            assert!(density_check(s, d).unwrap().dense_up_to, "{s}");
        }
    }

    #[test]
    fn rho_round_trip_ones_and_doubling() {
        let spec = SubsetSpec::rho_generated(3, "1,4,1,8,1,16".parse().unwrap(), 0).unwrap();
        let ledger = compute_rho(&spec, 6).unwrap();
        assert_eq!(ledger.rho, vec![1, 4, 1, 8, 1, 16]);
        assert_eq!(ledger.eta, vec![1, 5, 6, 14, 15, 31]);
        assert_eq!(ledger.p1_ok, Some(true));
        assert_eq!(ledger.p2_ok, Some(true));
        assert!(!ledger.quantifier_discrepancy);
    }

    #[test]
    fn rho_round_trip_other_lists() {
        for (list, digit) in [("2,3,1,5;finite", 1), ("1,1,1,1;finite", 0), ("3,1,2;finite", 2)] {
            let pattern: IntPattern = list.parse().unwrap();
            let expect = pattern.prefix(8);
            let spec = SubsetSpec::rho_generated(3, pattern, digit).unwrap();
            let ledger = compute_rho(&spec, expect.len()).unwrap();
            assert_eq!(ledger.rho, expect, "{list}");
            assert_eq!(ledger.p2_ok, Some(true));
        }
    }

    #[test]
    fn rho_small_cases() {
        let single = SubsetSpec::members(3, [Vertex::new(3, vec![0]).unwrap()]).unwrap();
        let ledger = compute_rho(&single, 1).unwrap();
        assert_eq!(ledger.rho, vec![1]);
        assert_eq!(ledger.p1_ok, Some(true));

        let level2 = SubsetSpec::full_levels(3, "2;finite".parse().unwrap()).unwrap();
        let ledger = compute_rho(&level2, 3).unwrap();
        assert_eq!(ledger.rho[0], 2);
        assert_eq!(ledger.p1_ok, Some(false));
        assert_eq!(ledger.p1_members, Some(9));
        assert!(ledger.stopped.is_some());
    }

    #[test]
    fn verdicts() {
        let p = half(3);
        let ex4 = SubsetSpec::rho_generated(3, "1,4,1,8,1,16".parse().unwrap(), 0).unwrap();
        let r = analyze(&ex4, &p, 6).unwrap();
        assert_eq!(r.verdict, Verdict::UcpCertified);
        assert!(r.density_result.dense_up_to);

        let conv = SubsetSpec::rho_generated(3, "1,2,3,4".parse().unwrap(), 0).unwrap();
        assert_eq!(analyze(&conv, &p, 6).unwrap().verdict, Verdict::NoUcpCertified);

        let avoid = SubsetSpec::digit_avoiding(3, 1).unwrap();
        assert_eq!(analyze(&avoid, &p, 3).unwrap().verdict, Verdict::NoUcpCertified);

        let last = SubsetSpec::last_digit(3, 0).unwrap();
        assert_eq!(analyze(&last, &p, 3).unwrap().verdict, Verdict::UcpCertified);

        let ex1 = SubsetSpec::full_levels(3, "2,4,8,16".parse().unwrap()).unwrap();
        let r = analyze(&ex1, &p, 3).unwrap();
        assert_eq!(r.verdict, Verdict::UcpCertified);
        assert!(r.full_level_shortcut);
        assert_eq!(r.p1_ok, Some(false));

        // finitely many stages leave psi(U) a finite set
        let finite = SubsetSpec::rho_generated(3, "2,2,2;finite".parse().unwrap(), 0).unwrap();
        assert_eq!(analyze(&finite, &p, 3).unwrap().verdict, Verdict::NoUcpCertified);
        // dense at a coarse resolution, but a finite list decides nothing
        let shallow = finite.with_depth_bound(6);
        let opts = AnalysisOptions {
            k_max: 3,
            resolution: Some(2),
            pa_max: None,
        };
        let r = Analyzer::new(&shallow).analyze(&p, &opts).unwrap();
        assert_eq!(r.verdict, Verdict::InconclusiveAtDepth(6));
        assert_eq!(r.rho, vec![2, 2, 2]);
    }

    #[test]
    fn probe() {
        let p = half(3);
        let ones = SubsetSpec::rho_generated(3, "1;cycle".parse().unwrap(), 0).unwrap();
        let b = unboundedness_probe(&ones, &p, 3).unwrap();
        let f = 12.0 / 7.0;
        for (k, x) in b.iter().enumerate() {
            assert!((x - f64::powi(f, k as i32 + 1)).abs() < 1e-12);
        }
        assert!(unboundedness_probe(&ones, &p, 0).unwrap().is_empty());
        let two = SubsetSpec::rho_generated(3, "1,4;finite".parse().unwrap(), 0).unwrap();
        let b = unboundedness_probe(&two, &p, 2).unwrap();
        let d: f64 = 5.0 / 12.0;
        assert!((b[1] - 1.0 / (1.0 - d) / (1.0 - d.powi(4))).abs() < 1e-12);
        let avoid = SubsetSpec::digit_avoiding(3, 1).unwrap();
        assert!(matches!(unboundedness_probe(&avoid, &p, 2), Err(Error::Refused(_))));
    }
}
