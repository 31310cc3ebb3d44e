//! Play the biased tug-of-war game with greedy players advised by the
//! solver, and compare the Monte Carlo mean with the solver value.

use std::sync::Arc;

use phtree::game::{estimate_value, play_once, Builtin};
use phtree::{build_un, BoundarySpec, GameParams, Vertex};

fn main() -> phtree::Result<()> {
    let p = GameParams::new(3, 0.5, 0.5)?;
    let f = BoundarySpec::linear();
    let advice = Arc::new(build_un(&f, &p, 8)?);
    let one = Builtin::GreedyMax(advice.clone());
    let two = Builtin::GreedyMin(advice.clone());
    let root = Vertex::root(3);

    let rec = play_once(&root, &one, &two, &f, &p, 10, 42)?;
    println!("one play: {} -> payoff {:.6}", rec.path.last().unwrap(), rec.payoff);
    println!("coins: {:?}", rec.coin_outcomes);

    let est = estimate_value(&root, &one, &two, &f, &p, 20, 100_000, 0)?;
    println!(
        "mean {:.5} +- {:.5} over {} plays, u_8(root) = {:.5}, truncation {:.1e}",
        est.mean,
        est.std_error,
        est.plays,
        advice.root_value(),
        est.truncation_error.unwrap_or(f64::NAN)
    );
    println!("coin counts: {:?}", est.coin_counts);
    Ok(())
}
