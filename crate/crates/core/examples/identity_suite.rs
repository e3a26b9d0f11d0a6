//! Randomized commutator identity checks and the class bound theorem.
//!
//! ```text
//! cargo run --release --example identity_suite [SEED]
//! ```

use pcgroup::identities::{run_identity_suite, verify_main_theorem, IdentityId, CATALOG};
use pcgroup::presentation::{instantiate_parameter, Family, PcPresentation};
use pcgroup::PcGroup;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(0);
    let g = PcGroup::new(instantiate_parameter(Family::ExampleP3, 2)?.presentation)?;

    let report = run_identity_suite(&g, "example_p3(n=2)", &CATALOG, Some(200), seed)?;
    print!("{}", report.render_text(&g));
    println!("{}", verify_main_theorem(&g)?.line());

    // structure lemmas skip when their hypotheses cannot be met
    let abelian = PcGroup::new(PcPresentation::abelian(3, &[("x", 9), ("y", 3)]))?;
    let ids = [IdentityId::HallWitt, IdentityId::K6Structure];
    print!("\n{}", run_identity_suite(&abelian, "C9 x C3", &ids, Some(100), seed)?.render_lines(&abelian));
    Ok(())
}
