//! Solve the finite-level problem for a few boundary functions and watch
//! the root value settle as the level grows.

use phtree::solver::{error_bound, solve_to_tolerance};
use phtree::{build_un, BoundarySpec, GameParams};

fn main() -> phtree::Result<()> {
    let p = GameParams::new(3, 0.5, 0.5)?;
    let f = BoundarySpec::linear();
    println!("m = 3, alpha = beta = 1/2, F(t) = t");
    for n in 1..=10 {
        let u = build_un(&f, &p, n)?;
        println!("  n = {n:2}  u_n(root) = {:.12}  bound {:.2e}", u.root_value(), error_bound(&f, &p, n)?);
    }

    // pure averaging: the value is the mean of F
    let q = BoundarySpec::quadratic_centered();
    let avg = GameParams::new(3, 0.0, 1.0)?;
    let sol = solve_to_tolerance(&q, &avg, 1e-4)?;
    println!(
        "F(t) = (t - 1/2)^2, alpha = 0: root {:.8} at n = {} ({:?}), exact 1/12 = {:.8}",
        sol.field.root_value(),
        sol.field.depth(),
        sol.rule,
        1.0 / 12.0
    );

    // pure tug-of-war on F(t) = t approaches 1/2 by symmetry
    let tug = GameParams::new(3, 1.0, 0.0)?;
    let u = build_un(&f, &tug, 12)?;
    println!("alpha = 1: u_12(root) = {:.10}", u.root_value());
    Ok(())
}
