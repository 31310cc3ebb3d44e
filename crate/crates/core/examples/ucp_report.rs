//! Run the unique-continuation analysis on the standard subsets.

use phtree::ucp::{analyze, parse_descriptor};
use phtree::GameParams;

fn main() -> phtree::Result<()> {
    let p = GameParams::new(3, 0.5, 0.5)?;
    for desc in ["digit-avoiding:1", "last-digit:0", "full-levels:1,2,4,8,...", "rho:1,4,1,8,1,16,...", "rho:1,2,3,4,5,6"] {
        let u = parse_descriptor(3, desc)?;
        let r = analyze(&u, &p, 6)?;
        println!("{desc:26} rho {:?}  {}", r.rho, r.verdict);
        println!("{:26} {}", "", r.reason);
    }

    // the full report is plain JSON
    let u = parse_descriptor(3, "rho:1,4,1,8,1,16,...")?;
    let r = analyze(&u, &p, 6)?;
    println!("{}", serde_json::to_string_pretty(&r).expect("report serializes"));
    Ok(())
}
