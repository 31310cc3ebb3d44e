//! Unique continuation: which subsets `U` force every bounded p-harmonious
//! function vanishing on `U` to vanish everywhere.

pub mod analyzer;
pub mod counterexample;
pub mod pattern;
pub mod subset;

pub use analyzer::{
    analyze, compute_rho, density_check, pa_check, unboundedness_probe, AnalysisOptions, Analyzer,
    DensityResult, PaResult, RhoLedger, UcpReport, Verdict,
};
pub use counterexample::{build_counterexample, partial_products, CounterexampleCheck, CounterexampleField};
pub use pattern::{criterion_verdict, CriterionVerdict, IntPattern};
pub use subset::{parse_descriptor, SubsetKind, SubsetSpec};
