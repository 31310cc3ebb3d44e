//! Command-line front end: `solve`, `simulate`, `ucp` and `dim`.
//!
//! Parsing and dispatch live here so they can be tested in-process; the
//! binary only forwards `argv` and maps errors to exit codes.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::fatou_dimension;
use crate::boundary::BoundarySpec;
use crate::dpp::{GameParams, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::game::{estimate_value, Builtin, McEstimate};
use crate::report::to_canonical_json;
use crate::solver::{build_un_with_cap, solve_to_tolerance_with_cap, LevelField, StopRule};
use crate::tree::{SizeCap, Vertex};
use crate::ucp::{parse_descriptor, AnalysisOptions, Analyzer, SubsetSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "phtree", version, about = "p-harmonious functions on m-ary trees")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Branching factor.
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub alpha: f64,
    /// Defaults to 1 − alpha.
    #[arg(long)]
    pub beta: Option<f64>,
}

impl ParamArgs {
    pub fn params(&self) -> Result<GameParams> {
        GameParams::new(self.m, self.alpha, self.beta.unwrap_or(1.0 - self.alpha))
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Report file; stdout when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Build u_n for a boundary function.
    Solve {
        #[command(flatten)]
        params: ParamArgs,
        /// `linear`, `quadratic-centered`, `constant:<c>` or a `t,value` CSV file.
        #[arg(long)]
        boundary: String,
        /// Depth of the approximation.
        #[arg(long, conflicts_with = "tol", required_unless_present = "tol")]
        n: Option<usize>,
        /// Pick the depth from a target accuracy instead.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Estimate a game value by Monte Carlo.
    Simulate {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        boundary: String,
        /// Truncation depth N.
        #[arg(long, default_value_t = 20)]
        depth: usize,
        #[arg(long, default_value_t = 100_000)]
        plays: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Depth of the field advising the greedy strategies.
        #[arg(long, default_value_t = 8)]
        advice_n: usize,
        /// Starting vertex as dotted digits; the root when empty.
        #[arg(long, default_value = "")]
        start: String,
        /// `greedy`, `random` or `digit:<d>`.
        #[arg(long, default_value = "greedy")]
        player_one: String,
        #[arg(long, default_value = "greedy")]
        player_two: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Unique continuation analysis of a subset.
    Ucp {
        #[command(flatten)]
        params: ParamArgs,
        /// Set descriptor (`last-digit:0`, `digit-avoiding:1`,
        /// `full-levels:2,4,8`, `rho:1,4,1,8,…`) or a member list file.
        #[arg(long)]
        set: String,
        #[arg(long, default_value_t = 6)]
        kmax: usize,
        /// Density resolution level.
        #[arg(long)]
        resolution: Option<usize>,
        /// Largest hitting distance tried by the PA check.
        #[arg(long)]
        pa_max: Option<usize>,
        /// Level up to which membership is trusted.
        #[arg(long)]
        depth_bound: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Minimal Fatou-set dimension.
    Dim {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

impl RunConfig {
    pub fn output(&self) -> &OutputArgs {
        match &self.command {
            Command::Solve { out, .. }
            | Command::Simulate { out, .. }
            | Command::Ucp { out, .. }
            | Command::Dim { out, .. } => out,
        }
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Capacity { .. } => EXIT_CAPACITY,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_VALIDATION,
    }
}

#[derive(Debug, Serialize)]
struct SolveReport {
    m: u32,
    alpha: f64,
    beta: f64,
    boundary: String,
    n: usize,
    root_value: f64,
    stop_rule: Option<StopRule>,
    error_bound: Option<f64>,
    empirical_gap: Option<f64>,
    reached_tolerance: bool,
    max_abs_residual: f64,
    max_principle_violations: usize,
}

#[derive(Debug, Serialize)]
struct SimulateReport {
    #[serde(flatten)]
    estimate: McEstimate,
    m: u32,
    alpha: f64,
    beta: f64,
    boundary: String,
    start: String,
    seed: u64,
    player_one: String,
    player_two: String,
    advice_n: usize,
    advice_value: f64,
}

fn parse_boundary(s: &str) -> Result<BoundarySpec> {
    if let Ok(b) = s.parse::<BoundarySpec>() {
        return Ok(b);
    }
    if Path::new(s).is_file() {
        return BoundarySpec::from_csv_path(s);
    }
    Err(Error::param(
        "boundary",
        format!("{s:?} is neither a builtin (linear, quadratic-centered, constant:<c>) nor a CSV file"),
    ))
}

fn parse_strategy(s: &str, advice: &Arc<LevelField>, maximize: bool) -> Result<Builtin> {
    match s {
        "greedy" if maximize => Ok(Builtin::GreedyMax(Arc::clone(advice))),
        "greedy" => Ok(Builtin::GreedyMin(Arc::clone(advice))),
        "random" => Ok(Builtin::UniformRandom),
        other => match other.strip_prefix("digit:").map(str::parse::<u32>) {
            Some(Ok(d)) if d < advice.params().m() => Ok(Builtin::FixedDigit(d)),
            _ => Err(Error::param("strategy", format!("unknown strategy {other:?}"))),
        },
    }
}

fn parse_set(s: &str, m: u32) -> Result<SubsetSpec> {
    let path = Path::new(s);
    if path.is_file() {
        let file = fs::File::open(path).map_err(|e| Error::Io(format!("{s}: {e}")))?;
        return SubsetSpec::members_from_reader(m, BufReader::new(file));
    }
    if !s.contains(':') {
        return Err(Error::param("set", format!("{s:?} is not a descriptor or a readable file")));
    }
    parse_descriptor(m, s).map_err(|e| Error::param("set", e.to_string()))
}

fn json_only(out: &OutputArgs, command: &str) -> Result<()> {
    if out.format == Format::Csv {
        return Err(Error::param("format", format!("{command} reports are JSON only")));
    }
    Ok(())
}

/// Runs one command and returns the report bytes.
pub fn run(config: &RunConfig) -> Result<Vec<u8>> {
    let cap = SizeCap::from_env()?;
    match &config.command {
        Command::Solve {
            params,
            boundary,
            n,
            tol,
            out,
        } => {
            let p = params.params()?;
            let spec = parse_boundary(boundary)?;
            let (field, rule, bound, gap, reached) = match (n, tol) {
                (Some(n), _) => {
                    let f = build_un_with_cap(&spec, &p, *n, cap)?;
                    let bound = spec.modulus_bound((p.m() as f64).powi(-(*n as i32))).ok();
                    (f, None, bound, None, true)
                }
                (None, Some(t)) => {
                    let s = solve_to_tolerance_with_cap(&spec, &p, *t, cap)?;
                    (s.field, Some(s.rule), s.certified_bound, s.empirical_bound, s.reached_tolerance)
                }
                (None, None) => return Err(Error::param("n", "give --n or --tol")),
            };
            match out.format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    field.write_csv(&mut buf)?;
                    Ok(buf)
                }
                Format::Json => {
                    let check = field.check(DEFAULT_TOL);
                    let report = SolveReport {
                        m: p.m(),
                        alpha: p.alpha(),
                        beta: p.beta(),
                        boundary: spec.to_string(),
                        n: field.depth(),
                        root_value: field.root_value(),
                        stop_rule: rule,
                        error_bound: bound,
                        empirical_gap: gap,
                        reached_tolerance: reached,
                        max_abs_residual: check.max_abs_residual,
                        max_principle_violations: field.max_principle_violations(),
                    };
                    Ok(to_canonical_json(&report)?.into_bytes())
                }
            }
        }
        Command::Simulate {
            params,
            boundary,
            depth,
            plays,
            seed,
            advice_n,
            start,
            player_one,
            player_two,
            out,
        } => {
            json_only(out, "simulate")?;
            let p = params.params()?;
            let spec = parse_boundary(boundary)?;
            let x0 = Vertex::parse(p.m(), start).map_err(|e| Error::param("start", e.to_string()))?;
            let advice = Arc::new(build_un_with_cap(&spec, &p, *advice_n, cap)?);
            let one = parse_strategy(player_one, &advice, true)?;
            let two = parse_strategy(player_two, &advice, false)?;
            let estimate = estimate_value(&x0, &one, &two, &spec, &p, *depth, *plays, *seed)?;
            let report = SimulateReport {
                estimate,
                m: p.m(),
                alpha: p.alpha(),
                beta: p.beta(),
                boundary: spec.to_string(),
                start: x0.to_string(),
                seed: *seed,
                player_one: player_one.clone(),
                player_two: player_two.clone(),
                advice_n: *advice_n,
                advice_value: advice.evaluate(&x0),
            };
            Ok(to_canonical_json(&report)?.into_bytes())
        }
        Command::Ucp {
            params,
            set,
            kmax,
            resolution,
            pa_max,
            depth_bound,
            out,
        } => {
            json_only(out, "ucp")?;
            let p = params.params()?;
            let mut spec = parse_set(set, p.m())?;
            if let Some(d) = depth_bound {
                spec = spec.with_depth_bound(*d);
            }
            let opts = AnalysisOptions {
                k_max: *kmax,
                resolution: *resolution,
                pa_max: *pa_max,
            };
            let report = Analyzer::new(&spec).with_cap(cap).analyze(&p, &opts)?;
            Ok(to_canonical_json(&report)?.into_bytes())
        }
        Command::Dim { params, out } => {
            json_only(out, "dim")?;
            let p = params.params()?;
            Ok(to_canonical_json(&fatou_dimension(&p))?.into_bytes())
        }
    }
}

/// Writes report bytes to the configured destination.
pub fn emit_report(config: &RunConfig, bytes: &[u8]) -> Result<()> {
    use std::io::Write;
    match &config.output().output {
        Some(path) => fs::write(path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(bytes).map_err(Error::from),
    }
}

/// Parses `args` (program name first), runs, and writes the report.
/// Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match run(&config).and_then(|bytes| emit_report(&config, &bytes)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("phtree: {e}");
            exit_code(&e)
        }
    }
}
