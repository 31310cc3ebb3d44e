//! Monte Carlo tug-of-war on the tree.
//!
//! Each turn a biased coin decides the move: with probability `α` a fair
//! coin hands the move to Player I or Player II, who pick a successor with
//! their strategy; with probability `β` the token moves to a uniformly random
//! successor. The game is cut after `N` moves and pays `F(ψ(x_N))`.
//!
//! Play `i` of an estimate draws from the ChaCha8 stream `i` of the master
//! seed, so results do not depend on thread scheduling.

use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::boundary::BoundarySpec;
use crate::dpp::GameParams;
use crate::error::{Error, Result};
use crate::solver::LevelField;
use crate::tree::{psi_f64, Vertex};

/// A rule picking the next successor from the history of positions.
///
/// `history` ends with the current vertex. The returned digit must be
/// smaller than the branching factor.
pub trait Strategy: Send + Sync {
    fn choose(&self, history: &[Vertex], rng: &mut dyn RngCore) -> u32;
}

/// The builtin, Markov strategies.
#[derive(Debug, Clone)]
pub enum Builtin {
    /// Successor maximizing the advice field; lowest digit on ties.
    GreedyMax(Arc<LevelField>),
    /// Successor minimizing the advice field; lowest digit on ties.
    GreedyMin(Arc<LevelField>),
    FixedDigit(u32),
    UniformRandom,
}

impl Builtin {
    fn greedy(advice: &LevelField, at: &Vertex, better: impl Fn(f64, f64) -> bool) -> u32 {
        let mut best = 0;
        let mut best_val = advice.evaluate(&at.child(0));
        for d in 1..at.m() {
            let v = advice.evaluate(&at.child(d));
            if better(v, best_val) {
                best = d;
                best_val = v;
            }
        }
        best
    }
}

impl Strategy for Builtin {
    fn choose(&self, history: &[Vertex], rng: &mut dyn RngCore) -> u32 {
        let at = history.last().expect("history holds the current vertex");
        match self {
            Builtin::GreedyMax(f) => Self::greedy(f, at, |a, b| a > b),
            Builtin::GreedyMin(f) => Self::greedy(f, at, |a, b| a < b),
            Builtin::FixedDigit(d) => (*d).min(at.m() - 1),
            Builtin::UniformRandom => rng.random_range(0..at.m()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coin {
    PlayerOne,
    PlayerTwo,
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlayRecord {
    /// `x_0, …, x_N`
    pub path: Vec<Vertex>,
    pub coin_outcomes: Vec<Coin>,
    pub payoff: f64,
    pub truncation_depth: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CoinCounts {
    pub player_one: u64,
    pub player_two: u64,
    pub random: u64,
}

impl CoinCounts {
    fn add(&mut self, c: Coin) {
        match c {
            Coin::PlayerOne => self.player_one += 1,
            Coin::PlayerTwo => self.player_two += 1,
            Coin::Random => self.random += 1,
        }
    }

    fn merge(mut self, o: CoinCounts) -> CoinCounts {
        self.player_one += o.player_one;
        self.player_two += o.player_two;
        self.random += o.random;
        self
    }

    pub fn total(&self) -> u64 {
        self.player_one + self.player_two + self.random
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub plays: usize,
    pub params: GameParams,
    pub truncation_depth: usize,
    /// Payoff uncertainty from stopping at depth `N`; absent when the
    /// boundary has no modulus information.
    pub truncation_error: Option<f64>,
    pub coin_counts: CoinCounts,
}

fn check_strategy_digit(d: u32, m: u32) -> u32 {
    assert!(d < m, "strategy returned digit {d} for m = {m}");
    d
}

fn toss(alpha: f64, rng: &mut ChaCha8Rng) -> Coin {
    let r: f64 = rng.random();
    if r < alpha / 2.0 {
        Coin::PlayerOne
    } else if r < alpha {
        Coin::PlayerTwo
    } else {
        Coin::Random
    }
}

struct Game<'a> {
    one: &'a dyn Strategy,
    two: &'a dyn Strategy,
    spec: &'a BoundarySpec,
    params: &'a GameParams,
    depth: usize,
}

impl Game<'_> {
    fn run(&self, x0: &Vertex, rng: &mut ChaCha8Rng, mut on_coin: impl FnMut(Coin)) -> Vec<Vertex> {
        let m = self.params.m();
        let mut path = Vec::with_capacity(self.depth + 1);
        path.push(x0.clone());
        for _ in 0..self.depth {
            let coin = toss(self.params.alpha(), rng);
            let digit = match coin {
                Coin::PlayerOne => check_strategy_digit(self.one.choose(&path, rng), m),
                Coin::PlayerTwo => check_strategy_digit(self.two.choose(&path, rng), m),
                Coin::Random => rng.random_range(0..m),
            };
            on_coin(coin);
            let next = path.last().expect("non-empty").child(digit);
            path.push(next);
        }
        path
    }

    fn payoff(&self, end: &Vertex) -> f64 {
        self.spec.eval_unchecked(psi_f64(end).min(1.0))
    }
}

fn validate(x0: &Vertex, params: &GameParams, depth: usize) -> Result<()> {
    if depth == 0 {
        return Err(Error::param("depth", "truncation depth must be at least 1"));
    }
    if x0.m() != params.m() {
        return Err(Error::Contract(format!(
            "start vertex has m = {}, params have m = {}",
            x0.m(),
            params.m()
        )));
    }
    Ok(())
}

/// Plays one truncated game from `x0` with its own seeded generator.
#[allow(clippy::too_many_arguments)]
pub fn play_once(
    x0: &Vertex,
    player_one: &dyn Strategy,
    player_two: &dyn Strategy,
    spec: &BoundarySpec,
    params: &GameParams,
    depth: usize,
    seed: u64,
) -> Result<PlayRecord> {
    validate(x0, params, depth)?;
    let game = Game {
        one: player_one,
        two: player_two,
        spec,
        params,
        depth,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coins = Vec::with_capacity(depth);
    let path = game.run(x0, &mut rng, |c| coins.push(c));
    let payoff = game.payoff(path.last().expect("non-empty"));
    Ok(PlayRecord {
        path,
        coin_outcomes: coins,
        payoff,
        truncation_depth: depth,
    })
}

/// Averages `plays` independent games. Play `i` uses stream `i` of
/// `master_seed`; the sum is compensated and taken in play order.
#[allow(clippy::too_many_arguments)]
pub fn estimate_value(
    x0: &Vertex,
    player_one: &dyn Strategy,
    player_two: &dyn Strategy,
    spec: &BoundarySpec,
    params: &GameParams,
    depth: usize,
    plays: usize,
    master_seed: u64,
) -> Result<McEstimate> {
    validate(x0, params, depth)?;
    if plays < 2 {
        return Err(Error::param("plays", "need at least two plays"));
    }
    let game = Game {
        one: player_one,
        two: player_two,
        spec,
        params,
        depth,
    };
    let outcomes: Vec<(f64, CoinCounts)> = (0..plays as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
            rng.set_stream(i);
            let mut counts = CoinCounts::default();
            let path = game.run(x0, &mut rng, |c| counts.add(c));
            (game.payoff(path.last().expect("non-empty")), counts)
        })
        .collect();

    let mean = kahan_sum(outcomes.iter().map(|o| o.0)) / plays as f64;
    let ss = kahan_sum(outcomes.iter().map(|o| (o.0 - mean) * (o.0 - mean)));
    let std_dev = (ss / (plays as f64 - 1.0)).sqrt();
    let coin_counts = outcomes
        .iter()
        .map(|o| o.1)
        .fold(CoinCounts::default(), CoinCounts::merge);
    Ok(McEstimate {
        mean,
        std_error: std_dev / (plays as f64).sqrt(),
        plays,
        params: *params,
        truncation_depth: depth,
        truncation_error: truncation_error(spec, params, depth).ok(),
        coin_counts,
    })
}

/// Neumaier's compensated sum.
fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Payoff uncertainty from truncating at depth `N`: every branch through
/// `x_N` stays within `m^-N` of `ψ(x_N)`.
pub fn truncation_error(spec: &BoundarySpec, params: &GameParams, depth: usize) -> Result<f64> {
    if depth == 0 {
        return Err(Error::param("depth", "truncation depth must be at least 1"));
    }
    spec.modulus_bound((params.m() as f64).powi(-(depth as i32)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::build_un;

    fn root() -> Vertex {
        Vertex::root(3)
    }

    #[test]
    fn pure_random_coin() {
        let p = GameParams::new(3, 0.0, 1.0).unwrap();
        let s = Builtin::UniformRandom;
        let rec = play_once(&root(), &s, &s, &BoundarySpec::linear(), &p, 12, 7).unwrap();
        assert!(rec.coin_outcomes.iter().all(|c| *c == Coin::Random));
        assert_eq!(rec.path.len(), 13);
        for w in rec.path.windows(2) {
            assert_eq!(w[1].parent().unwrap(), w[0]);
        }
        assert_eq!(rec.payoff, psi_f64(rec.path.last().unwrap()));
    }

    #[test]
    fn forced_players_walk_zeros() {
        let p = GameParams::new(3, 1.0, 0.0).unwrap();
        let s = Builtin::FixedDigit(0);
        for seed in 0..5 {
            let rec = play_once(&root(), &s, &s, &BoundarySpec::linear(), &p, 9, seed).unwrap();
            assert!(rec.path.last().unwrap().digits().iter().all(|&d| d == 0));
            assert_eq!(rec.payoff, 0.0);
            assert!(rec.coin_outcomes.iter().all(|c| *c != Coin::Random));
        }
    }

    #[test]
    fn constant_payoff() {
        let p = GameParams::new(3, 0.5, 0.5).unwrap();
        let s = Builtin::UniformRandom;
        let spec = BoundarySpec::constant(2.5);
        let rec = play_once(&root(), &s, &s, &spec, &p, 5, 1).unwrap();
        assert_eq!(rec.payoff, 2.5);
        let est = estimate_value(&root(), &s, &s, &spec, &p, 5, 100, 3).unwrap();
        assert_eq!((est.mean, est.std_error), (2.5, 0.0));
    }

    #[test]
    fn estimate_is_reproducible() {
        let p = GameParams::new(3, 0.5, 0.5).unwrap();
        let s = Builtin::UniformRandom;
        let a = estimate_value(&root(), &s, &s, &BoundarySpec::linear(), &p, 10, 2000, 42).unwrap();
        let b = estimate_value(&root(), &s, &s, &BoundarySpec::linear(), &p, 10, 2000, 42).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a, b);
        let c = estimate_value(&root(), &s, &s, &BoundarySpec::linear(), &p, 10, 2000, 43).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn greedy_ties_and_scaling() {
        let p = GameParams::new(3, 0.5, 0.5).unwrap();
        let field = Arc::new(build_un(&BoundarySpec::quadratic_centered(), &p, 3).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        // below depth n every child reads the same leaf: lowest digit wins
        let deep = vec![Vertex::new(3, vec![1, 1, 1, 2]).unwrap()];
        assert_eq!(Builtin::GreedyMax(field.clone()).choose(&deep, &mut rng), 0);
        assert_eq!(Builtin::GreedyMin(field.clone()).choose(&deep, &mut rng), 0);
        let at = vec![root()];
        let hi = Builtin::GreedyMax(field.clone()).choose(&at, &mut rng);
        let lo = Builtin::GreedyMin(field.clone()).choose(&at, &mut rng);
        assert_eq!(hi, 0);
        assert_eq!(lo, 1);
    }

    #[test]
    fn truncation_examples() {
        let p = GameParams::new(3, 0.5, 0.5).unwrap();
        let t = truncation_error(&BoundarySpec::linear(), &p, 10).unwrap();
        assert!((t - 3f64.powi(-10)).abs() < 1e-20);
        assert_eq!(truncation_error(&BoundarySpec::constant(1.0), &p, 4).unwrap(), 0.0);
        let tab = BoundarySpec::tabulated(vec![(0.0, 0.0), (0.5, 1.0), (1.0, 1.0)]).unwrap();
        assert!(truncation_error(&tab, &p, 5).unwrap() <= 2.0 / 243.0 + 1e-15);
        assert!(truncation_error(&tab, &p, 0).is_err());
    }

    #[test]
    fn compensated_sum() {
        let vals = std::iter::once(1e16).chain(std::iter::repeat_n(1.0, 1000)).chain(std::iter::once(-1e16));
        assert_eq!(kahan_sum(vals), 1000.0);
    }
}
