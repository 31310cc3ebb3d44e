//! p-harmonious functions on the m-ary directed tree.
//!
//! The crate solves the Dirichlet problem for the averaging operator
//! `α/2 (max + min) + β/m Σ` by bottom-up sweeps, simulates the associated
//! tug-of-war game, analyzes unique continuation sets and evaluates the
//! Fatou-set dimension formula. See the `examples/` directory for a tour.

pub mod analysis;
pub mod boundary;
pub mod cli;
pub mod dpp;
pub mod error;
pub mod game;
pub mod report;
pub mod solver;
pub mod tree;
pub mod ucp;

pub use boundary::BoundarySpec;
pub use dpp::GameParams;
pub use error::{Error, Result};
pub use solver::{build_un, LevelField};
pub use tree::{SizeCap, Vertex};
