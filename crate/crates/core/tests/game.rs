use std::sync::Arc;

use phtree::game::{estimate_value, play_once, truncation_error, Builtin, Coin};
use phtree::{build_un, BoundarySpec, GameParams, Vertex};

#[test]
fn forced_players_stay_on_zeros() {
    let p = GameParams::new(3, 1.0, 0.0).unwrap();
    let f = BoundarySpec::linear();
    for seed in 0..20 {
        let rec = play_once(&Vertex::root(3), &Builtin::FixedDigit(0), &Builtin::FixedDigit(0), &f, &p, 15, seed).unwrap();
        assert!(rec.path.last().unwrap().digits().iter().all(|&d| d == 0));
        assert_eq!(rec.payoff, 0.0);
        assert!(rec.coin_outcomes.iter().all(|c| *c != Coin::Random));
    }
}

#[test]
fn greedy_play_tracks_the_solver() {
    let p = GameParams::new(3, 0.5, 0.5).unwrap();
    let f = BoundarySpec::linear();
    let advice = Arc::new(build_un(&f, &p, 8).unwrap());
    let est = estimate_value(
        &Vertex::root(3),
        &Builtin::GreedyMax(advice.clone()),
        &Builtin::GreedyMin(advice.clone()),
        &f,
        &p,
        20,
        100_000,
        7,
    )
    .unwrap();
    let gap = (est.mean - advice.root_value()).abs();
    assert!(gap <= 3.0 * est.std_error + 1e-2, "gap {gap}, se {}", est.std_error);

    // coin statistics: random moves ~ Binomial(n, 1/2)
    let n = est.coin_counts.total() as f64;
    let sd = (n * 0.25).sqrt();
    assert!((est.coin_counts.random as f64 - n / 2.0).abs() <= 4.0 * sd);
}

#[test]
fn random_walk_averages_the_boundary() {
    let p = GameParams::new(3, 0.0, 1.0).unwrap();
    let est = estimate_value(
        &Vertex::root(3),
        &Builtin::UniformRandom,
        &Builtin::UniformRandom,
        &BoundarySpec::linear(),
        &p,
        20,
        50_000,
        3,
    )
    .unwrap();
    assert!((est.mean - 0.5).abs() <= 3.0 * est.std_error);
    assert_eq!(est.coin_counts.random, est.coin_counts.total());
}

#[test]
fn constant_boundary_is_exact() {
    let p = GameParams::new(4, 0.3, 0.7).unwrap();
    let f = BoundarySpec::constant(2.5);
    let est = estimate_value(&Vertex::root(4), &Builtin::UniformRandom, &Builtin::FixedDigit(3), &f, &p, 6, 100, 1).unwrap();
    assert_eq!(est.mean, 2.5);
    assert_eq!(est.std_error, 0.0);
    assert_eq!(truncation_error(&f, &p, 6).unwrap(), 0.0);
}

#[test]
fn truncation_bounds() {
    let p = GameParams::new(3, 0.5, 0.5).unwrap();
    let lin = truncation_error(&BoundarySpec::linear(), &p, 10).unwrap();
    assert!((lin - 3f64.powi(-10)).abs() < 1e-18);
    let tab = BoundarySpec::tabulated(vec![(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)]).unwrap();
    assert!(truncation_error(&tab, &p, 5).unwrap() <= 2.0 / 243.0 + 1e-12);
}

#[test]
fn estimates_are_reproducible_and_start_anywhere() {
    let p = GameParams::new(2, 0.6, 0.4).unwrap();
    let f = BoundarySpec::quadratic_centered();
    let advice = Arc::new(build_un(&f, &p, 6).unwrap());
    let start = Vertex::parse(2, "1.0").unwrap();
    let run = |seed| {
        estimate_value(&start, &Builtin::GreedyMax(advice.clone()), &Builtin::UniformRandom, &f, &p, 12, 5000, seed)
            .unwrap()
    };
    assert_eq!(run(9), run(9));
    assert_ne!(run(9).mean, run(10).mean);
    let rec = play_once(&start, &Builtin::UniformRandom, &Builtin::UniformRandom, &f, &p, 12, 0).unwrap();
    assert!(rec.path.iter().all(|x| start.is_ancestor_of(x)));
    assert_eq!(rec.path.len(), 13);
}
