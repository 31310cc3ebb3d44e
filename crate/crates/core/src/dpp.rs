//! The averaging operator
//!
//! ```text
//! u(x) = α/2 · (max_{y∈S(x)} u(y) + min_{y∈S(x)} u(y)) + β/m · Σ_{y∈S(x)} u(y)
//! ```
//!
//! and the sub/super/harmonicity predicates built on it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{check_branching, Vertex};

/// Default tolerance for harmonicity checks.
pub const DEFAULT_TOL: f64 = 1e-12;

const SUM_TOL: f64 = 1e-12;

/// Branching factor and coin probabilities `(m, α, β)` with `α + β = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    m: u32,
    alpha: f64,
    beta: f64,
}

impl GameParams {
    pub fn new(m: u32, alpha: f64, beta: f64) -> Result<Self> {
        check_branching(m)?;
        for (field, v) in [("alpha", alpha), ("beta", beta)] {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::param(field, format!("must lie in [0, 1], got {v}")));
            }
        }
        if (alpha + beta - 1.0).abs() > SUM_TOL {
            return Err(Error::param(
                "beta",
                format!("alpha + beta must equal 1, got {alpha} + {beta}"),
            ));
        }
        Ok(GameParams { m, alpha, beta })
    }

    /// `β = 1 − α`.
    pub fn from_alpha(m: u32, alpha: f64) -> Result<Self> {
        Self::new(m, alpha, 1.0 - alpha)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Weight carried by the maximum in the worst-case split: `α/2 + (m−1)β/m`.
    pub fn theta(&self) -> f64 {
        self.alpha / 2.0 + (self.m as f64 - 1.0) * self.beta / self.m as f64
    }

    /// `1 − θ = α/2 + β/m`, the smallest weight any successor receives
    /// when it is the minimum.
    pub fn delta(&self) -> f64 {
        self.alpha / 2.0 + self.beta / self.m as f64
    }
}

/// Applies the averaging operator to the values on `S(x)`.
pub fn dpp_average(params: &GameParams, succ_values: &[f64]) -> Result<f64> {
    if succ_values.len() != params.m as usize {
        return Err(Error::Contract(format!(
            "expected {} successor values, got {}",
            params.m,
            succ_values.len()
        )));
    }
    if let Some(bad) = succ_values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Contract(format!("non-finite successor value {bad}")));
    }
    Ok(average_unchecked(params, succ_values))
}

#[inline]
pub(crate) fn average_unchecked(params: &GameParams, vals: &[f64]) -> f64 {
    let mut max = f64::NEG_INFINITY;
    let mut min = f64::INFINITY;
    let mut sum = 0.0;
    for &v in vals {
        max = max.max(v);
        min = min.min(v);
        sum += v;
    }
    let avg = params.alpha / 2.0 * (max + min) + params.beta / params.m as f64 * sum;
    // rounding may push a convex combination a hair outside its range
    avg.clamp(min, max)
}

/// Anything that can report a value at a vertex.
pub trait ValueOracle {
    fn value_at(&self, v: &Vertex) -> Option<f64>;
}

impl<F> ValueOracle for F
where
    F: Fn(&Vertex) -> Option<f64>,
{
    fn value_at(&self, v: &Vertex) -> Option<f64> {
        self(v)
    }
}

/// Operator value on `S(v)` minus the value at `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual(pub f64);

fn fetch<O: ValueOracle + ?Sized>(field: &O, v: &Vertex) -> Result<f64> {
    field
        .value_at(v)
        .ok_or_else(|| Error::MissingValue(v.to_string()))
}

pub fn residual_at<O: ValueOracle + ?Sized>(
    field: &O,
    v: &Vertex,
    params: &GameParams,
) -> Result<Residual> {
    if v.m() != params.m() {
        return Err(Error::Contract(format!(
            "vertex has m = {}, params have m = {}",
            v.m(),
            params.m()
        )));
    }
    let here = fetch(field, v)?;
    let succ = v
        .successors()
        .map(|c| fetch(field, &c))
        .collect::<Result<Vec<_>>>()?;
    Ok(Residual(dpp_average(params, &succ)? - here))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Harmonicity {
    Harmonious,
    Subharmonious,
    Superharmonious,
    Neither,
}

impl Harmonicity {
    /// Classification of a single residual: `u(x) ≤ average` is sub,
    /// `u(x) ≥ average` is super, both is harmonious.
    pub fn of_residual(r: f64, tol: f64) -> Self {
        if r.is_nan() {
            Harmonicity::Neither
        } else if r.abs() <= tol {
            Harmonicity::Harmonious
        } else if r > 0.0 {
            Harmonicity::Subharmonious
        } else {
            Harmonicity::Superharmonious
        }
    }

    fn join(self, other: Harmonicity) -> Harmonicity {
        use Harmonicity::*;
        match (self, other) {
            (a, b) if a == b => a,
            (Harmonious, b) | (b, Harmonious) => b,
            _ => Neither,
        }
    }
}

pub fn classify<O: ValueOracle + ?Sized>(
    field: &O,
    v: &Vertex,
    params: &GameParams,
    tol: f64,
) -> Result<Harmonicity> {
    let Residual(r) = residual_at(field, v, params)?;
    Ok(Harmonicity::of_residual(r, tol))
}

/// Summary of a residual scan over every interior vertex of a field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldCheck {
    pub max_abs_residual: f64,
    /// `(level, index)` of the vertex with the largest |residual|.
    pub worst_vertex: Option<(usize, usize)>,
    pub classification: Harmonicity,
    pub interior_vertices: usize,
}

/// Scans levels `0..n` of per-level value arrays (level `k` holds `m^k`
/// values in lexicographic order).
pub fn check_levels(levels: &[Vec<f64>], params: &GameParams, tol: f64) -> Result<FieldCheck> {
    let m = params.m() as usize;
    let mut expected = 1usize;
    for (k, level) in levels.iter().enumerate() {
        if level.len() != expected {
            return Err(Error::Contract(format!(
                "level {k} holds {} values, expected {expected}",
                level.len()
            )));
        }
        expected = expected.saturating_mul(m);
    }
    let mut worst = 0.0f64;
    let mut worst_vertex = None;
    let mut class = Harmonicity::Harmonious;
    let mut count = 0;
    for k in 0..levels.len().saturating_sub(1) {
        let (parent, kids) = (&levels[k], &levels[k + 1]);
        for (j, &u) in parent.iter().enumerate() {
            let r = average_unchecked(params, &kids[j * m..(j + 1) * m]) - u;
            count += 1;
            class = class.join(Harmonicity::of_residual(r, tol));
            if r.abs() > worst || worst_vertex.is_none() {
                worst = worst.max(r.abs());
                worst_vertex = Some((k, j));
            }
        }
    }
    Ok(FieldCheck {
        max_abs_residual: worst,
        worst_vertex,
        classification: class,
        interior_vertices: count,
    })
}
