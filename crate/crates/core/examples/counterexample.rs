//! Build the bounded harmonious function that vanishes on a set with a
//! convergent gap series, then check it vertex by vertex.

use phtree::ucp::{build_counterexample, partial_products, IntPattern};
use phtree::{GameParams, Vertex};

fn main() -> phtree::Result<()> {
    let p = GameParams::new(3, 0.5, 0.5)?;
    let rho = IntPattern::Arithmetic { first: 1, step: 1 };
    let field = build_counterexample(&rho, &p, 0, 21)?;

    let products = partial_products(&rho.prefix(8), p.delta())?;
    for (k, m) in products.iter().enumerate() {
        println!("M_{} = {m:.10}", k + 1);
    }
    println!("sup bound {:.10}", field.sup_bound());

    for s in ["", "0", "1", "1.0", "1.0.0", "2.2.2"] {
        let v = Vertex::parse(3, s)?;
        println!("u({v}) = {:.10}", field.value(&v).unwrap());
    }

    let check = field.check()?;
    println!(
        "depth {}: max residual {:.1e}, {} U members seen, {} nonzero",
        check.depth, check.max_abs_residual, check.u_members_seen, check.nonzero_on_u
    );
    Ok(())
}
