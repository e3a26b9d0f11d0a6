//! Normal forms, products, powers and commutators by collection.

use pcgroup::presentation::{instantiate_parameter, Family};
use pcgroup::PcGroup;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = instantiate_parameter(Family::ExampleP3, 2)?;
    let g = PcGroup::new(inst.presentation)?;
    let a = g.named("a").unwrap();
    let b = g.named("b").unwrap();
    let show = |v: &pcgroup::ExponentVector| g.format_element(v);

    println!("|G| = {}", g.group_order()?);
    let ab = g.multiply(&a, &b)?;
    println!("a b       = {}", show(&ab));
    println!("b a       = {}", show(&g.multiply(&b, &a)?));
    println!("[a, b]    = {}", show(&g.commutator(&a, &b)?));
    println!("(a b)^9   = {}", show(&g.power(&ab, 9)?));
    println!("(a b)^-1  = {}", show(&g.inverse(&ab)?));

    let w = g.left_normed_commutator(&[a.clone(), b.clone(), a.clone(), b.clone(), a.clone(), b.clone()])?;
    println!("[a,b,a,b,a,b] = {}", show(&w));

    let word = [(0, 5), (1, -1), (0, -2), (2, 1)];
    let nf = g.normalize(&word)?;
    println!("a^5 b^-1 a^-2 c = {}  exponents {}", show(&nf), nf);
    Ok(())
}
