//! Finite-depth approximation `u_n` of the Dirichlet problem.
//!
//! The leaves at depth `n` carry the samples `F(j/m^n)`; every shallower
//! vertex gets the operator value of its successors. Below depth `n` the
//! field is constant on each subtree, equal to the leaf it hangs from.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::boundary::{BoundarySpec, SampledBoundary};
use crate::dpp::{average_unchecked, check_levels, FieldCheck, GameParams, ValueOracle};
use crate::error::{Error, Result};
use crate::tree::{SizeCap, Vertex};

const PAR_THRESHOLD: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq)]
pub struct LevelField {
    params: GameParams,
    n: usize,
    levels: Vec<Vec<f64>>,
    boundary: SampledBoundary,
}

impl LevelField {
    /// Assembles a field from its leaf samples by sweeping upward.
    pub fn from_boundary(params: GameParams, boundary: SampledBoundary) -> Result<Self> {
        if boundary.m != params.m() {
            return Err(Error::Contract(format!(
                "boundary sampled with m = {}, params have m = {}",
                boundary.m,
                params.m()
            )));
        }
        let n = boundary.n;
        let m = params.m() as usize;
        let mut levels = vec![Vec::new(); n + 1];
        levels[n] = boundary.values.clone();
        for k in (0..n).rev() {
            let kids = &levels[k + 1];
            let parent: Vec<f64> = if kids.len() >= PAR_THRESHOLD {
                kids.par_chunks(m).map(|c| average_unchecked(&params, c)).collect()
            } else {
                kids.chunks(m).map(|c| average_unchecked(&params, c)).collect()
            };
            levels[k] = parent;
        }
        Ok(LevelField {
            params,
            n,
            levels,
            boundary,
        })
    }

    pub fn params(&self) -> &GameParams {
        &self.params
    }

    pub fn depth(&self) -> usize {
        self.n
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    pub fn boundary(&self) -> &SampledBoundary {
        &self.boundary
    }

    pub fn root_value(&self) -> f64 {
        self.levels[0][0]
    }

    /// Value at `(level, index)` for `level <= n`.
    pub fn get(&self, level: usize, index: usize) -> Option<f64> {
        self.levels.get(level)?.get(index).copied()
    }

    /// `u_n(v)`; vertices deeper than `n` read their depth-`n` ancestor.
    pub fn evaluate(&self, v: &Vertex) -> f64 {
        assert_eq!(v.m(), self.params.m(), "vertex branching factor mismatch");
        let level = v.level().min(self.n);
        let m = self.params.m() as usize;
        let index = v.digits()[..level]
            .iter()
            .fold(0usize, |acc, &d| acc * m + d as usize);
        self.levels[level][index]
    }

    /// Residual scan over levels `0..n`.
    pub fn check(&self, tol: f64) -> FieldCheck {
        check_levels(&self.levels, &self.params, tol).expect("field levels are well formed")
    }

    /// Interior vertices whose value escapes `[min, max]` of their successors.
    pub fn max_principle_violations(&self) -> usize {
        let m = self.params.m() as usize;
        let mut bad = 0;
        for k in 0..self.n {
            for (j, &u) in self.levels[k].iter().enumerate() {
                let kids = &self.levels[k + 1][j * m..(j + 1) * m];
                let lo = kids.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = kids.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                if !(lo <= u && u <= hi) {
                    bad += 1;
                }
            }
        }
        bad
    }

    /// Writes `level,index,psi_left,value` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["level", "index", "psi_left", "value"])?;
        let m = self.params.m() as f64;
        for (k, level) in self.levels.iter().enumerate() {
            let width = m.powi(k as i32);
            for (j, v) in level.iter().enumerate() {
                w.write_record([
                    k.to_string(),
                    j.to_string(),
                    crate::report::fmt_f64(j as f64 / width),
                    crate::report::fmt_f64(*v),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reloads a field written by [`LevelField::write_csv`].
    pub fn read_csv<R: Read>(input: R, params: GameParams) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["level", "index", "psi_left", "value"] {
            return Err(Error::parse("field csv", format!("unexpected header {headers:?}")));
        }
        let mut levels: Vec<Vec<f64>> = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let field = |i: usize| rec.get(i).unwrap_or("").trim().to_string();
            let level: usize = field(0).parse().map_err(|_| Error::parse("field csv", "bad level"))?;
            let index: usize = field(1).parse().map_err(|_| Error::parse("field csv", "bad index"))?;
            let value: f64 = field(3).parse().map_err(|_| Error::parse("field csv", "bad value"))?;
            if levels.len() <= level {
                levels.resize(level + 1, Vec::new());
            }
            if levels[level].len() != index {
                return Err(Error::parse("field csv", format!("row ({level}, {index}) out of order")));
            }
            levels[level].push(value);
        }
        if levels.is_empty() {
            return Err(Error::parse("field csv", "no rows"));
        }
        let n = levels.len() - 1;
        let m = params.m();
        let mut expect = 1usize;
        for (k, l) in levels.iter().enumerate() {
            if l.len() != expect {
                return Err(Error::parse("field csv", format!("level {k} has {} rows", l.len())));
            }
            expect *= m as usize;
        }
        let boundary = SampledBoundary {
            m,
            n,
            values: levels[n].clone(),
        };
        Ok(LevelField {
            params,
            n,
            levels,
            boundary,
        })
    }
}

impl ValueOracle for LevelField {
    fn value_at(&self, v: &Vertex) -> Option<f64> {
        (v.m() == self.params.m()).then(|| self.evaluate(v))
    }
}

pub fn build_un(spec: &BoundarySpec, params: &GameParams, n: usize) -> Result<LevelField> {
    build_un_with_cap(spec, params, n, SizeCap::default())
}

pub fn build_un_with_cap(
    spec: &BoundarySpec,
    params: &GameParams,
    n: usize,
    cap: SizeCap,
) -> Result<LevelField> {
    if n == 0 {
        return Err(Error::param("n", "depth must be at least 1"));
    }
    let boundary = spec.sample(params.m(), n, cap)?;
    LevelField::from_boundary(*params, boundary)
}

/// `L / m^n` for boundary data with Lipschitz constant `L`.
pub fn error_bound(spec: &BoundarySpec, params: &GameParams, n: usize) -> Result<f64> {
    let l = spec.lipschitz_bound().ok_or_else(|| {
        Error::Unsupported("error bound needs Lipschitz metadata; use modulus_bound".into())
    })?;
    Ok(l / (params.m() as f64).powi(n as i32))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum StopRule {
    /// Stopped at the first depth whose Lipschitz bound met the tolerance.
    Lipschitz,
    /// Stopped when consecutive approximations agreed to `tol / 2`.
    Cauchy,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub field: LevelField,
    pub n_used: usize,
    pub rule: StopRule,
    /// Proven bound on `|u_n − u|` (Lipschitz rule only).
    pub certified_bound: Option<f64>,
    /// Observed `max |u_n − u_{n+1}|` (Cauchy rule only).
    pub empirical_bound: Option<f64>,
    /// False when the size cap stopped the search before `tol` was met.
    pub reached_tolerance: bool,
}

impl Solution {
    pub fn certified(&self) -> bool {
        self.reached_tolerance && self.certified_bound.is_some()
    }
}

pub fn solve_to_tolerance(spec: &BoundarySpec, params: &GameParams, tol: f64) -> Result<Solution> {
    solve_to_tolerance_with_cap(spec, params, tol, SizeCap::default())
}

pub fn solve_to_tolerance_with_cap(
    spec: &BoundarySpec,
    params: &GameParams,
    tol: f64,
    cap: SizeCap,
) -> Result<Solution> {
    if !(tol > 0.0) {
        return Err(Error::param("tol", format!("must be positive, got {tol}")));
    }
    let m = params.m();
    let max_n = (1..)
        .take_while(|&n| cap.level_size(m, n).is_ok())
        .last()
        .ok_or(Error::Capacity {
            requested: m as u128,
            cap: cap.0,
        })?;

    if spec.lipschitz_bound().is_some() {
        let mut n = 1;
        while n < max_n && error_bound(spec, params, n)? > tol {
            n += 1;
        }
        let bound = error_bound(spec, params, n)?;
        return Ok(Solution {
            field: build_un_with_cap(spec, params, n, cap)?,
            n_used: n,
            rule: StopRule::Lipschitz,
            certified_bound: Some(bound),
            empirical_bound: None,
            reached_tolerance: bound <= tol,
        });
    }

    let mut current = build_un_with_cap(spec, params, 1, cap)?;
    for n in 1..max_n {
        let next = build_un_with_cap(spec, params, n + 1, cap)?;
        let gap = max_gap(&current, &next);
        if gap <= tol / 2.0 {
            return Ok(Solution {
                field: current,
                n_used: n,
                rule: StopRule::Cauchy,
                certified_bound: None,
                empirical_bound: Some(gap),
                reached_tolerance: true,
            });
        }
        current = next;
    }
    Ok(Solution {
        n_used: current.depth(),
        field: current,
        rule: StopRule::Cauchy,
        certified_bound: None,
        empirical_bound: None,
        reached_tolerance: false,
    })
}

/// `max |coarse(v) − fine(v)|` over the stored vertices of `coarse`.
fn max_gap(coarse: &LevelField, fine: &LevelField) -> f64 {
    coarse
        .levels
        .iter()
        .zip(&fine.levels)
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max)
}

/// True iff `f ≤ g` at every stored vertex.
pub fn compare_fields(f: &LevelField, g: &LevelField) -> Result<bool> {
    if f.params != g.params || f.n != g.n {
        return Err(Error::Contract(format!(
            "fields differ in shape: (m={}, n={}) vs (m={}, n={})",
            f.params.m(),
            f.n,
            g.params.m(),
            g.n
        )));
    }
    Ok(f
        .levels
        .iter()
        .zip(&g.levels)
        .all(|(a, b)| a.iter().zip(b).all(|(x, y)| x <= y)))
}
