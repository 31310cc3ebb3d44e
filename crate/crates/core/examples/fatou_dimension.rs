//! Dimension of the Fatou set across the parameter range, with the
//! brute-force minimization as a cross-check.

use phtree::analysis::{dimension_large_m_limit, fatou_dimension, kl_minimization_oracle, OracleSettings};
use phtree::GameParams;

fn main() -> phtree::Result<()> {
    for m in [2u32, 3, 5, 10] {
        print!("m = {m:2}:");
        for a in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let d = fatou_dimension(&GameParams::from_alpha(m, a)?);
            print!("  {:.4}", d.dimension);
        }
        println!();
    }

    let p = GameParams::from_alpha(5, 0.4)?;
    let d = fatou_dimension(&p);
    let o = kl_minimization_oracle(&p, &OracleSettings::default())?;
    println!("m = 5, alpha = 0.4: closed form {:.12}, oracle {:.12}", d.objective, o.min_value);

    for m in [10u32, 1_000, 100_000, 10_000_000] {
        let d = fatou_dimension(&GameParams::from_alpha(m, 1.0)?);
        println!("alpha = 1, m = {m:8}: {:.6} (limit {})", d.dimension, dimension_large_m_limit(0.0)?);
    }
    Ok(())
}
