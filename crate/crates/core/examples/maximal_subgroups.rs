//! Frattini subgroup, maximal subgroups and membership in P_n.
//!
//! ```text
//! cargo run --example maximal_subgroups [FILE] [N]
//! ```

use pcgroup::presentation::{instantiate_parameter, parse_presentation, Family};
use pcgroup::subgroups::{frattini_subgroup, maximal_subgroups, verify_pn, verify_pn_exhaustive};
use pcgroup::PcGroup;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let pres = match args.next() {
        Some(path) => parse_presentation(&std::fs::read_to_string(path)?).map_err(|d| format!("{d:?}"))?,
        None => instantiate_parameter(Family::ExampleP3, 2)?.presentation,
    };
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(3);
    let g = PcGroup::new(pres)?;

    let phi = frattini_subgroup(&g)?;
    println!("Frattini subgroup: order {}", phi.order());
    for (k, m) in maximal_subgroups(&g)?.iter().enumerate() {
        println!("M{} = {} (order {})", k + 1, m.describe(), m.order());
    }
    println!();
    println!("{}", verify_pn(&g, n)?);

    // small groups can be cross-checked against every subgroup
    let d16 = PcGroup::new(parse_presentation(include_str!("../data/dihedral16.pc")).unwrap())?;
    let fast = verify_pn(&d16, 2)?;
    let slow = verify_pn_exhaustive(&d16, 2)?;
    println!(
        "\nD16 in P_2: {} (maximal subgroups), {} (all {} proper subgroups)",
        fast.member, slow.member, slow.proper_subgroups
    );
    Ok(())
}
