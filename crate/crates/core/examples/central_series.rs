//! Lower central series, nilpotency class and derived subgroup.
//!
//! ```text
//! cargo run --example central_series [FILE]
//! ```

use pcgroup::presentation::{instantiate_parameter, parse_presentation, Family};
use pcgroup::series::{derived_subgroup, is_metabelian, lower_central_series};
use pcgroup::PcGroup;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pres = match std::env::args().nth(1) {
        Some(path) => parse_presentation(&std::fs::read_to_string(path)?).map_err(|d| format!("{d:?}"))?,
        None => instantiate_parameter(Family::ExampleP3, 2)?.presentation,
    };
    let g = PcGroup::new(pres)?;
    g.group_order()?;

    let gens = g.generators();
    let series = lower_central_series(&g, &gens)?;
    println!("class {}", series.class());
    print!("{}", series.render_table());

    let derived = derived_subgroup(&g, &gens)?;
    println!("G' = {} of order {}", derived.describe(), derived.order());
    println!("metabelian: {}", is_metabelian(&g, &gens)?);
    Ok(())
}
