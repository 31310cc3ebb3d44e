//! Minimal Hausdorff dimension of the Fatou set of bounded p-harmonious
//! functions, and a numerical oracle for the minimization behind it.
//!
//! The Fatou set `F(u)` (branches along which `u` converges) and the set
//! `BV(u)` (branches of finite variation) appear only through this
//! dimension; neither is computed for a concrete `u`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dpp::GameParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionResult {
    pub m: u32,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// `(mα + 2(m−1)β) / 2m`, which equals `θ`.
    pub exponent_neg: f64,
    /// `(mα + 2β) / 2m`, which equals `δ`.
    pub exponent_pos: f64,
    pub objective: f64,
    pub dimension: f64,
}

pub fn fatou_dimension(params: &GameParams) -> DimensionResult {
    let m = params.m();
    let mf = m as f64;
    let (alpha, beta) = (params.alpha(), params.beta());
    let exponent_neg = (mf * alpha + 2.0 * (mf - 1.0) * beta) / (2.0 * mf);
    let exponent_pos = (mf * alpha + 2.0 * beta) / (2.0 * mf);
    let (gamma, objective, dimension) = if alpha == 0.0 {
        (1.0, mf, 1.0)
    } else {
        let gamma = (mf * alpha + 2.0 * (mf - 1.0) * beta) / ((mf - 1.0) * (mf * alpha + 2.0 * beta));
        let objective = gamma.powf(-exponent_neg) + (mf - 1.0) * gamma.powf(exponent_pos);
        (gamma, objective, objective.ln() / mf.ln())
    };
    DimensionResult {
        m,
        alpha,
        beta,
        gamma,
        exponent_neg,
        exponent_pos,
        objective,
        dimension,
    }
}

/// The `m → ∞` limit of the dimension, `(1 + β) / 2`.
pub fn dimension_large_m_limit(beta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::param("beta", format!("must lie in [0, 1], got {beta}")));
    }
    Ok((1.0 + beta) / 2.0)
}

/// The averaging operator applied to a point of `R^m`.
fn constraint(params: &GameParams, x: &[f64]) -> f64 {
    let (max, min) = x
        .iter()
        .fold((f64::NEG_INFINITY, f64::INFINITY), |(a, b), &v| (a.max(v), b.min(v)));
    let sum: f64 = x.iter().sum();
    params.alpha() / 2.0 * (max + min) + params.beta() / x.len() as f64 * sum
}

#[derive(Debug, Clone, Copy)]
pub struct OracleSettings {
    pub restarts: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Stop when the simplex values spread less than this.
    pub tol: f64,
}

impl Default for OracleSettings {
    fn default() -> Self {
        OracleSettings {
            restarts: 8,
            seed: 0,
            max_iter: 20_000,
            tol: 1e-14,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleResult {
    pub min_value: f64,
    pub argmin: Vec<f64>,
    /// Best value over `k` equal high coordinates and `m − k` equal low ones.
    pub structured_value: f64,
    pub structured_k: usize,
    /// Best value of the free search.
    pub unstructured_value: f64,
    /// False when the free search hit its iteration limit on every start.
    pub converged: bool,
}

/// Minimizes `Σ e^{x_j}` subject to `α/2 (max + min) + β/m Σ x_j = 0`.
pub fn kl_minimization_oracle(params: &GameParams, settings: &OracleSettings) -> Result<OracleResult> {
    let m = params.m() as usize;
    if m > 64 {
        return Err(Error::param("m", format!("oracle supports m <= 64, got {m}")));
    }
    let (structured_value, structured_k, structured_x) = structured_search(params);
    let (unstructured_value, unstructured_x, converged) = unstructured_search(params, settings);
    let (min_value, argmin) = if unstructured_value < structured_value {
        (unstructured_value, unstructured_x)
    } else {
        (structured_value, structured_x)
    };
    Ok(OracleResult {
        min_value,
        argmin,
        structured_value,
        structured_k,
        unstructured_value,
        converged,
    })
}

/// `k` coordinates at a high value `a` and `m − k` at a low value `b ≤ 0`;
/// the constraint fixes `a` from `b`, leaving a convex problem in `b`.
fn structured_search(params: &GameParams) -> (f64, usize, Vec<f64>) {
    let m = params.m() as usize;
    let mf = m as f64;
    let (alpha, beta) = (params.alpha(), params.beta());
    let mut best = (mf, 0, vec![0.0; m]);
    for k in 1..m {
        let kf = k as f64;
        let ca = alpha / 2.0 + kf * beta / mf;
        let cb = alpha / 2.0 + (mf - kf) * beta / mf;
        let high = |b: f64| -cb * b / ca;
        let f = |b: f64| kf * high(b).exp() + (mf - kf) * b.exp();
        let b = golden_section(f, -60.0, 0.0, 1e-13);
        let v = f(b);
        if v < best.0 {
            let mut x = vec![b; m];
            x[..k].fill(high(b));
            best = (v, k, x);
        }
    }
    best
}

fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d);
        }
    }
    (lo + hi) / 2.0
}

/// Free search over `y ∈ R^m` of `Σ e^{y_j − g(y)}`: shifting by `g(y)`
/// lands on the constraint surface because `g(y + c) = g(y) + c`.
fn unstructured_search(params: &GameParams, settings: &OracleSettings) -> (f64, Vec<f64>, bool) {
    let m = params.m() as usize;
    let project = |y: &[f64]| {
        let g = constraint(params, y);
        y.iter().map(|v| v - g).collect::<Vec<f64>>()
    };
    let h = |y: &[f64]| project(y).iter().map(|v| v.exp()).sum::<f64>();
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut best = (f64::INFINITY, vec![0.0; m]);
    let mut any_converged = false;
    for _ in 0..settings.restarts.max(1) {
        let start: Vec<f64> = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
        // polish with a few restarts from the last simplex minimum
        let mut x = start;
        let mut converged = false;
        for _ in 0..4 {
            let (y, ok) = nelder_mead(&h, &x, 0.5, settings.max_iter, settings.tol);
            x = y;
            converged = ok;
        }
        any_converged |= converged;
        let v = h(&x);
        if v < best.0 {
            best = (v, project(&x));
        }
    }
    (best.0, best.1, any_converged)
}

fn nelder_mead(f: &impl Fn(&[f64]) -> f64, x0: &[f64], step: f64, max_iter: usize, tol: f64) -> (Vec<f64>, bool) {
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = f(&x);
        simplex.push((x, v));
    }
    let lerp = |a: &[f64], b: &[f64], t: f64| a.iter().zip(b).map(|(p, q)| p + t * (q - p)).collect::<Vec<f64>>();
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[n].1 - simplex[0].1 <= tol * (1.0 + simplex[0].1.abs()) {
            return (simplex.swap_remove(0).0, true);
        }
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / n as f64;
            }
        }
        let worst = simplex[n].0.clone();
        let reflected = lerp(&centroid, &worst, -1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = lerp(&centroid, &worst, -2.0);
            let fe = f(&expanded);
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let contracted = if fr < simplex[n].1 {
                lerp(&centroid, &reflected, 0.5)
            } else {
                lerp(&centroid, &worst, 0.5)
            };
            let fc = f(&contracted);
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for (x, v) in simplex.iter_mut().skip(1) {
                    *x = lerp(&best, x, 0.5);
                    *v = f(x);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    (simplex.swap_remove(0).0, false)
}
