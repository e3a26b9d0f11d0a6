//! Subgroup closure, membership, normal closure and canonical induced
//! sequences.

use pcgroup::presentation::{instantiate_parameter, Family};
use pcgroup::series::{close_subgroup, normal_closure};
use pcgroup::PcGroup;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = PcGroup::new(instantiate_parameter(Family::ExampleP3, 2)?.presentation)?;
    let el = |name: &str| g.named(name).unwrap();

    let h = close_subgroup(&g, &[el("b"), el("c")])?;
    println!("<b, c> = {} has order {}", h.describe(), h.order());
    println!("a in <b, c>: {}", h.contains(&el("a"))?);
    println!("[c, b] in <b, c>: {}", h.contains(&g.commutator(&el("c"), &el("b"))?)?);

    // a different generating set of the same subgroup gives the same
    // induced sequence
    let bc = g.multiply(&el("b"), &el("c"))?;
    let same = close_subgroup(&g, &[bc, el("c"), el("d2")])?;
    println!("<bc, c, d2> == <b, c>: {}", same == h);

    let n = normal_closure(&g, &g.generators(), &[el("c")])?;
    println!("normal closure of c: order {}, {}", n.order(), n.describe());
    Ok(())
}
