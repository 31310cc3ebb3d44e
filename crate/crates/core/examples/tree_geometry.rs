//! Vertices, their intervals and the tree metric, in exact arithmetic.

use phtree::tree::{interval_of, psi, tree_distance};
use phtree::Vertex;

fn main() -> phtree::Result<()> {
    let v = Vertex::parse(3, "2.0.2")?;
    println!("{v}: psi = {} = {:.6}, interval {}", psi(&v), psi(&v).to_f64(), interval_of(&v));
    println!("reflected: {}", v.reflect());
    println!("parent {}, children:", v.parent().unwrap());
    for c in v.successors() {
        println!("  {c} -> {}", interval_of(&c));
    }

    let a = [0, 2, 2, 2];
    let b = [0, 2, 1];
    println!("d({a:?}, {b:?}) = {}", tree_distance(3, &a, &b));

    // the Cantor set's left endpoints: digits 0 and 2 only
    let mut pts: Vec<_> = (0..8u64)
        .map(|i| Vertex::new(3, (0..3).map(|k| 2 * ((i >> (2 - k)) & 1) as u32).collect()).unwrap())
        .map(|v| psi(&v).reduced())
        .collect();
    pts.sort();
    let pts: Vec<String> = pts.iter().map(ToString::to_string).collect();
    println!("level-3 Cantor points: {}", pts.join(" "));
    Ok(())
}
