//! Parse presentations from text, report diagnostics and run the
//! consistency check.
//!
//! ```text
//! cargo run --example parse_and_check [FILE]
//! ```

use pcgroup::presentation::{parse_presentation, printed_text, Family};
use pcgroup::PcGroup;

fn report(label: &str, text: &str) {
    println!("== {label}");
    match parse_presentation(text) {
        Err(diags) => {
            for d in diags {
                println!("  {d}");
            }
        }
        Ok(pres) => {
            let group = PcGroup::new(pres).expect("parsed presentations are structurally valid");
            for line in group.check_consistency().render(&group).lines() {
                println!("  {line}");
            }
            match group.group_order() {
                Ok(order) => println!("  order {order}"),
                Err(e) => println!("  {e}"),
            }
        }
    }
}

fn main() {
    if let Some(path) = std::env::args().nth(1) {
        let text = std::fs::read_to_string(&path).expect("readable file");
        report(&path, &text);
        return;
    }

    report("C5", "pgroup p=5\ngens a\norder a 5");
    report("Q8", include_str!("../data/quaternion8.pc"));
    report("bad relative order", "pgroup p=3\ngens a b\norder a 6\norder b 3\ncomm b a = a\n");
    report("x^2 = y contradicts [y,x] = z", include_str!("../data/inconsistent.pc"));

    // The p = 2 family as printed names a generator e3 that is never
    // declared; the parser rejects it, the built-in drops those relations.
    report("example_p2(3), printed", &printed_text(Family::ExampleP2, 3).unwrap());
    report("example_p2(3), e3 dropped", include_str!("../data/example_p2_n3.pc"));
}
