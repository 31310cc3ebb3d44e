//! Boundary data `F: [0, 1] → ℝ` and its piecewise-constant sampling on the
//! left endpoints `j/m^n` of the level-`n` intervals.

use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::tree::{check_branching, SizeCap};

#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryKind {
    /// `F(t) = t`
    Linear,
    /// `F(t) = (t − 1/2)²`
    QuadraticCentered,
    Constant(f64),
    /// Piecewise-linear interpolation of `(t, value)` samples.
    Tabulated(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySpec {
    kind: BoundaryKind,
    lipschitz_bound: Option<f64>,
    sup_norm: Option<f64>,
}

impl BoundarySpec {
    pub fn linear() -> Self {
        BoundarySpec {
            kind: BoundaryKind::Linear,
            lipschitz_bound: Some(1.0),
            sup_norm: Some(1.0),
        }
    }

    pub fn quadratic_centered() -> Self {
        BoundarySpec {
            kind: BoundaryKind::QuadraticCentered,
            lipschitz_bound: Some(1.0),
            sup_norm: Some(0.25),
        }
    }

    pub fn constant(c: f64) -> Self {
        BoundarySpec {
            kind: BoundaryKind::Constant(c),
            lipschitz_bound: Some(0.0),
            sup_norm: Some(c.abs()),
        }
    }

    /// Samples must start at `t = 0`, end at `t = 1` and be strictly increasing
    /// in `t`. The Lipschitz bound is the largest slope between neighbours,
    /// which is exact for the interpolant.
    pub fn tabulated(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::param("samples", "need at least the two endpoints"));
        }
        if samples.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(Error::param("samples", "non-finite entry"));
        }
        if samples[0].0 != 0.0 || samples[samples.len() - 1].0 != 1.0 {
            return Err(Error::param("samples", "first t must be 0 and last t must be 1"));
        }
        let mut slope = 0.0f64;
        for w in samples.windows(2) {
            let (t0, v0) = w[0];
            let (t1, v1) = w[1];
            if t1 <= t0 {
                return Err(Error::param("samples", format!("t not strictly increasing at {t1}")));
            }
            slope = slope.max((v1 - v0).abs() / (t1 - t0));
        }
        let sup = samples.iter().map(|s| s.1.abs()).fold(0.0, f64::max);
        Ok(BoundarySpec {
            kind: BoundaryKind::Tabulated(samples),
            lipschitz_bound: Some(slope),
            sup_norm: Some(sup),
        })
    }

    /// Reads a `t,value` CSV.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            t: f64,
            value: f64,
        }
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["t", "value"] {
            return Err(Error::parse("boundary csv", format!("expected header t,value, got {headers:?}")));
        }
        let samples = rdr
            .deserialize::<Row>()
            .map(|r| r.map(|r| (r.t, r.value)).map_err(|e| Error::parse("boundary csv", e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        Self::tabulated(samples)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_csv_reader(file)
    }

    /// Replaces (or strips) the Lipschitz metadata.
    pub fn with_lipschitz(mut self, bound: Option<f64>) -> Self {
        self.lipschitz_bound = bound;
        self
    }

    pub fn kind(&self) -> &BoundaryKind {
        &self.kind
    }

    pub fn lipschitz_bound(&self) -> Option<f64> {
        self.lipschitz_bound
    }

    pub fn sup_norm(&self) -> Option<f64> {
        self.sup_norm
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(t));
        }
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: f64) -> f64 {
        match &self.kind {
            BoundaryKind::Linear => t,
            BoundaryKind::QuadraticCentered => (t - 0.5) * (t - 0.5),
            BoundaryKind::Constant(c) => *c,
            BoundaryKind::Tabulated(s) => interpolate(s, t),
        }
    }

    /// Upper bound on `|F(x) − F(y)|` over `|x − y| ≤ scale`.
    pub fn modulus_bound(&self, scale: f64) -> Result<f64> {
        if !(scale > 0.0) {
            return Err(Error::param("scale", format!("must be positive, got {scale}")));
        }
        if let BoundaryKind::Constant(_) = self.kind {
            return Ok(0.0);
        }
        if let Some(l) = self.lipschitz_bound {
            return Ok(l * scale);
        }
        match &self.kind {
            BoundaryKind::Tabulated(s) => Ok(tabulated_modulus(s, scale)),
            _ => Err(Error::Unsupported(
                "no Lipschitz metadata for a builtin boundary".into(),
            )),
        }
    }

    /// `F(j/m^n)` for `j = 0..m^n`.
    pub fn sample(&self, m: u32, n: usize, cap: SizeCap) -> Result<SampledBoundary> {
        check_branching(m)?;
        let len = cap.level_size(m, n)?;
        let width = (m as f64).powi(n as i32);
        let values = (0..len).map(|j| self.eval_unchecked(j as f64 / width)).collect();
        Ok(SampledBoundary { m, n, values })
    }
}

fn interpolate(s: &[(f64, f64)], t: f64) -> f64 {
    let i = s.partition_point(|&(ti, _)| ti <= t);
    if i == 0 {
        return s[0].1;
    }
    if i >= s.len() {
        return s[s.len() - 1].1;
    }
    let (t0, v0) = s[i - 1];
    let (t1, v1) = s[i];
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}

/// Oscillation of the interpolant over windows of width `scale`. The
/// extremes of a piecewise-linear function over a window sit at the window
/// ends or at knots, so checking windows anchored at each knot suffices.
fn tabulated_modulus(s: &[(f64, f64)], scale: f64) -> f64 {
    let mut best = 0.0f64;
    let mut anchors: Vec<f64> = Vec::with_capacity(2 * s.len());
    for &(t, _) in s {
        anchors.push(t);
        anchors.push((t - scale).max(0.0));
    }
    for a in anchors {
        let b = (a + scale).min(1.0);
        let mut lo = interpolate(s, a).min(interpolate(s, b));
        let mut hi = interpolate(s, a).max(interpolate(s, b));
        for &(t, v) in s {
            if t > a && t < b {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        best = best.max(hi - lo);
    }
    best
}

impl fmt::Display for BoundarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            BoundaryKind::Linear => f.write_str("linear"),
            BoundaryKind::QuadraticCentered => f.write_str("quadratic-centered"),
            BoundaryKind::Constant(c) => write!(f, "constant:{c}"),
            BoundaryKind::Tabulated(s) => write!(f, "tabulated({} samples)", s.len()),
        }
    }
}

/// Builtin names: `linear`, `quadratic-centered`, `constant:<c>`.
impl FromStr for BoundarySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "linear" => Ok(Self::linear()),
            "quadratic-centered" => Ok(Self::quadratic_centered()),
            other => match other.strip_prefix("constant:") {
                Some(c) => c
                    .trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|c| c.is_finite())
                    .map(Self::constant)
                    .ok_or_else(|| Error::parse("boundary", format!("bad constant {c:?}"))),
                None => Err(Error::parse("boundary", format!("unknown boundary {other:?}"))),
            },
        }
    }
}

/// The piecewise-constant data `F_n`: entry `j` is `F(j/m^n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledBoundary {
    pub m: u32,
    pub n: usize,
    pub values: Vec<f64>,
}

impl SampledBoundary {
    /// Value of `F_n` at `t`, i.e. the sample of the level-`n` interval
    /// containing `t` (the last interval is closed at 1).
    pub fn at(&self, t: f64) -> f64 {
        let width = (self.m as f64).powi(self.n as i32);
        let j = ((t * width).floor() as usize).min(self.values.len() - 1);
        self.values[j]
    }
}
