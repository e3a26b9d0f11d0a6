//! Reproduce every claim about the two built-in families in one report.
//!
//! ```text
//! cargo run --release --example verify_paper [N2] [N3] [SEED]
//! ```

use pcgroup::verifier::verify_paper;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<u64> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    let n2 = args.first().copied().unwrap_or(3) as u32;
    let n3 = args.get(1).copied().unwrap_or(2) as u32;
    let seed = args.get(2).copied().unwrap_or(0);

    let report = verify_paper(n2, n3, seed)?;
    print!("{}", report.render_text());
    std::process::exit(if report.passed() { 0 } else { 1 });
}
