//! Classify ad hoc functions on the tree as harmonious, sub or super.

use phtree::dpp::{classify, dpp_average, Harmonicity};
use phtree::tree::psi_f64;
use phtree::{build_un, BoundarySpec, GameParams, Vertex};

fn main() -> phtree::Result<()> {
    let p = GameParams::new(3, 0.5, 0.5)?;
    println!("average of [0, 1, 5] = {}", dpp_average(&p, &[0.0, 1.0, 5.0])?);

    let v = Vertex::parse(3, "1")?;
    // ψ itself: the mean of the children's left endpoints exceeds ψ(v)
    let left = |x: &Vertex| Some(psi_f64(x));
    let square = |x: &Vertex| Some(psi_f64(x).powi(2));
    let level = |x: &Vertex| Some(-(x.level() as f64));
    for (name, h) in [
        ("psi", classify(&left, &v, &p, 1e-12)?),
        ("psi^2", classify(&square, &v, &p, 1e-12)?),
        ("-level", classify(&level, &v, &p, 1e-12)?),
    ] {
        println!("{name:7} at {v}: {h:?}");
    }

    let u = build_un(&BoundarySpec::linear(), &p, 6)?;
    let check = u.check(1e-12);
    assert_eq!(check.classification, Harmonicity::Harmonious);
    println!("u_6: {:?} on {} interior vertices, max residual {:.1e}", check.classification, check.interior_vertices, check.max_abs_residual);
    Ok(())
}
