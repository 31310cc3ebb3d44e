//! A bounded nonzero p-harmonious function vanishing on a rho-generated
//! set whose series `Σ δ^{ρ_k}` converges.
//!
//! The function equals 1 at the root. Stage `k` runs from level `η_{k−1}`
//! to `η_k`: along the distinguished path it takes the values
//! `M_k (1 − δ^{ρ_k − i})`, reaching 0 at the member of `U`, and it equals
//! `M_k = Π_{i ≤ k} (1 − δ^{ρ_i})^{-1}` everywhere else in the stage.
//! Below members of `U` it vanishes. With successors valued `M` except one
//! valued `a ≤ M`, the average is `θM + δa`, and
//! `θ M_k + δ M_k (1 − δ^{ρ_k − i − 1}) = M_k (1 − δ^{ρ_k − i})` keeps
//! every residual at zero.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::dpp::{average_unchecked, GameParams, ValueOracle};
use crate::error::{Error, Result};
use crate::tree::Vertex;
use crate::ucp::pattern::{criterion_verdict, IntPattern};
use crate::ucp::subset::SubsetSpec;

/// Where a vertex sits in the construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Position {
    /// On or below a member of `U`.
    Zero,
    /// `pos` steps along the distinguished path of stage `stage` (1-based).
    Path { stage: usize, pos: u64 },
    /// Off the path, inside stage `stage`; after the last stage of a
    /// finite descriptor this persists forever.
    Flat { stage: usize },
}

/// `M_1, …, M_k` for the given gaps.
pub fn partial_products(rho: &[u64], delta: f64) -> Result<Vec<f64>> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param("delta", format!("must lie in (0, 1), got {delta}")));
    }
    let mut acc = 1.0;
    Ok(rho
        .iter()
        .map(|&r| {
            acc /= 1.0 - delta.powf(r as f64);
            acc
        })
        .collect())
}

#[derive(Debug, Clone)]
pub struct CounterexampleField {
    params: GameParams,
    digit: u32,
    pattern: IntPattern,
    /// Gaps of the stages that start above `depth`.
    rho: Vec<u64>,
    eta: Vec<u64>,
    /// `maxima[k]` is `M_k`, with `M_0 = 1`.
    maxima: Vec<f64>,
    depth: usize,
}

/// Builds the field to level `depth`, with paths along digit `digit`.
pub fn build_counterexample(
    rho: &IntPattern,
    params: &GameParams,
    digit: u32,
    depth: usize,
) -> Result<CounterexampleField> {
    let verdict = criterion_verdict(rho, params)?;
    if verdict.diverges == Some(true) {
        return Err(Error::Refused(format!(
            "the series for {rho} diverges; no bounded counterexample exists"
        )));
    }
    if digit >= params.m() {
        return Err(Error::param("digit", format!("{digit} out of range for m = {}", params.m())));
    }
    let mut gaps = Vec::new();
    let mut eta = Vec::new();
    let mut level = 0u64;
    while (level as usize) < depth {
        let Some(r) = rho.term(gaps.len()) else { break };
        if r == 0 {
            return Err(Error::param("rho", "gaps must be positive"));
        }
        level += r;
        gaps.push(r);
        eta.push(level);
    }
    let mut maxima = vec![1.0];
    maxima.extend(partial_products(&gaps, params.delta())?);
    Ok(CounterexampleField {
        params: *params,
        digit,
        pattern: rho.clone(),
        rho: gaps,
        eta,
        maxima,
        depth,
    })
}

impl CounterexampleField {
    pub fn params(&self) -> &GameParams {
        &self.params
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn rho(&self) -> &[u64] {
        &self.rho
    }

    /// `M_1, M_2, …` for the stages reaching the built depth.
    pub fn stage_maxima(&self) -> &[f64] {
        &self.maxima[1..]
    }

    /// Largest value attained up to the built depth.
    pub fn built_sup(&self) -> f64 {
        self.maxima.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `Π_k (1 − δ^{ρ_k})^{-1}` over the whole descriptor.
    pub fn sup_bound(&self) -> f64 {
        let delta = self.params.delta();
        let mut acc = 1.0;
        for k in 0.. {
            let Some(r) = self.pattern.term(k) else { break };
            let x = delta.powf(r as f64);
            if x < 1e-18 {
                break;
            }
            acc /= 1.0 - x;
        }
        acc
    }

    /// The subset `U` this field vanishes on.
    pub fn subset(&self) -> Result<SubsetSpec> {
        Ok(SubsetSpec::rho_generated(self.params.m(), self.pattern.clone(), self.digit)?.with_depth_bound(self.depth))
    }

    pub fn root_position(&self) -> Position {
        if self.rho.is_empty() {
            Position::Flat { stage: 0 }
        } else {
            Position::Path { stage: 1, pos: 0 }
        }
    }

    /// Position of the child with `digit` of a vertex at `pos` on `level`.
    pub fn step(&self, pos: Position, level: usize, digit: u32) -> Position {
        let next_stage = |stage: usize| {
            if stage < self.rho.len() {
                Position::Path {
                    stage: stage + 1,
                    pos: 0,
                }
            } else {
                Position::Flat { stage }
            }
        };
        match pos {
            Position::Zero => Position::Zero,
            Position::Path { stage, pos } => {
                let end = pos + 1 == self.rho[stage - 1];
                match (digit == self.digit, end) {
                    (true, true) => Position::Zero,
                    (true, false) => Position::Path { stage, pos: pos + 1 },
                    (false, true) => next_stage(stage),
                    (false, false) => Position::Flat { stage },
                }
            }
            Position::Flat { stage } => {
                if stage >= 1 && (level + 1) as u64 == self.eta[stage - 1] {
                    next_stage(stage)
                } else {
                    pos
                }
            }
        }
    }

    pub fn value_of(&self, pos: Position) -> f64 {
        match pos {
            Position::Zero => 0.0,
            Position::Flat { stage } => self.maxima[stage],
            Position::Path { stage, pos } => {
                let left = self.rho[stage - 1] - pos;
                self.maxima[stage] * (1.0 - self.params.delta().powf(left as f64))
            }
        }
    }

    pub fn position_of(&self, v: &Vertex) -> Position {
        v.digits()
            .iter()
            .enumerate()
            .fold(self.root_position(), |p, (level, &d)| self.step(p, level, d))
    }

    /// Value at `v`, or `None` past the built depth.
    pub fn value(&self, v: &Vertex) -> Option<f64> {
        (v.m() == self.params.m() && v.level() <= self.depth).then(|| self.value_of(self.position_of(v)))
    }

    /// Checks every vertex up to the built depth by sweeping the distinct
    /// (position, membership state) pairs of each level.
    pub fn check(&self) -> Result<CounterexampleCheck> {
        let subset = self.subset()?;
        let m = self.params.m();
        let mut level_map = BTreeMap::from([((self.root_position(), subset.root_state()), 1u128)]);
        let mut out = CounterexampleCheck {
            depth: self.depth,
            max_abs_residual: 0.0,
            worst_level: None,
            max_value: f64::NEG_INFINITY,
            min_value: f64::INFINITY,
            u_members_seen: 0,
            nonzero_on_u: 0,
            classes_checked: 0,
        };
        for level in 0..=self.depth {
            let mut next = BTreeMap::new();
            for ((pos, state), count) in &level_map {
                let value = self.value_of(*pos);
                out.classes_checked += 1;
                out.max_value = out.max_value.max(value);
                out.min_value = out.min_value.min(value);
                if subset.contains_state(state, level) {
                    out.u_members_seen = out.u_members_seen.saturating_add(*count);
                    if value != 0.0 {
                        out.nonzero_on_u = out.nonzero_on_u.saturating_add(*count);
                    }
                }
                if level == self.depth {
                    continue;
                }
                let mut succ = Vec::with_capacity(m as usize);
                for d in 0..m {
                    let child = self.step(*pos, level, d);
                    succ.push(self.value_of(child));
                    let e = next.entry((child, subset.step(state, level, d))).or_insert(0u128);
                    *e = e.saturating_add(*count);
                }
                let r = (value - average_unchecked(&self.params, &succ)).abs();
                if r > out.max_abs_residual {
                    out.max_abs_residual = r;
                    out.worst_level = Some(level);
                }
            }
            level_map = next;
        }
        Ok(out)
    }
}

impl ValueOracle for CounterexampleField {
    fn value_at(&self, v: &Vertex) -> Option<f64> {
        self.value(v)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleCheck {
    pub depth: usize,
    pub max_abs_residual: f64,
    pub worst_level: Option<usize>,
    pub max_value: f64,
    pub min_value: f64,
    /// Members of `U` up to the depth, counted with multiplicity.
    pub u_members_seen: u128,
    pub nonzero_on_u: u128,
    /// Distinct (position, membership state) classes visited.
    pub classes_checked: usize,
}
