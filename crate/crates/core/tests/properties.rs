use std::sync::OnceLock;

use pcgroup::presentation::{instantiate_parameter, parse_presentation, serialize_presentation, Family, PcPresentation, Word};
use pcgroup::series::close_subgroup;
use pcgroup::{ExponentVector, PcGroup};
use proptest::prelude::*;

fn p3() -> &'static PcGroup {
    static G: OnceLock<PcGroup> = OnceLock::new();
    G.get_or_init(|| PcGroup::new(instantiate_parameter(Family::ExampleP3, 3).unwrap().presentation).unwrap())
}

fn element() -> impl Strategy<Value = ExponentVector> {
    let orders = p3().relative_orders().to_vec();
    orders
        .into_iter()
        .map(|o| 0..o)
        .collect::<Vec<_>>()
        .prop_map(|v| p3().element(&v).unwrap())
}

/// Structurally valid presentations: p-power relative orders and relation
/// words in strictly later generators. Not necessarily consistent.
fn presentation() -> impl Strategy<Value = PcPresentation> {
    (prop_oneof![Just(2u64), Just(3), Just(5)], 0usize..6).prop_flat_map(|(p, m)| {
        let orders = prop::collection::vec(1u32..4, m);
        let word_for = move |lo: usize| {
            prop::collection::vec((lo..m.max(lo + 1), -3i64..4), 0..3).prop_map(move |fs| {
                Word(fs.into_iter().filter(|&(g, e)| g < m && e != 0).collect())
            })
        };
        let powers: Vec<_> = (0..m).map(|i| word_for(i + 1)).collect();
        let comms: Vec<_> = (0..m).flat_map(|j| (0..j).map(move |i| (j, i))).map(|(j, i)| (Just((j, i)), word_for(i + 1))).collect();
        (orders, powers, comms).prop_map(move |(orders, powers, comms)| {
            let names: Vec<String> = (0..m).map(|i| format!("g{}", i + 1)).collect();
            let gens: Vec<(&str, u64)> = names.iter().zip(&orders).map(|(n, &k)| (n.as_str(), p.pow(k))).collect();
            let mut pres = PcPresentation::abelian(p, &gens);
            for (i, w) in powers.into_iter().enumerate() {
                pres.set_power(i, w);
            }
            for ((j, i), w) in comms {
                pres.set_commutator(j, i, w);
            }
            pres
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn associativity(x in element(), y in element(), z in element()) {
        let g = p3();
        let left = g.multiply(&g.multiply(&x, &y).unwrap(), &z).unwrap();
        let right = g.multiply(&x, &g.multiply(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn normal_forms_respect_relative_orders(x in element(), y in element()) {
        let g = p3();
        let xy = g.multiply(&x, &y).unwrap();
        for (e, o) in xy.exponents().iter().zip(g.relative_orders()) {
            prop_assert!(e < o);
        }
    }

    #[test]
    fn inverses_and_powers(x in element(), a in -30i64..30, b in -30i64..30) {
        let g = p3();
        prop_assert!(g.multiply(&x, &g.inverse(&x).unwrap()).unwrap().is_identity());
        let lhs = g.multiply(&g.power(&x, a).unwrap(), &g.power(&x, b).unwrap()).unwrap();
        prop_assert_eq!(lhs, g.power(&x, a + b).unwrap());
    }

    #[test]
    fn commutator_expansions(x in element(), y in element(), z in element()) {
        let g = p3();
        let c = |u: &ExponentVector, v: &ExponentVector| g.commutator(u, v).unwrap();
        let m = |fs: &[&ExponentVector]| g.product(fs.iter().copied()).unwrap();
        let yz = m(&[&y, &z]);
        let xy = m(&[&x, &y]);
        prop_assert_eq!(c(&x, &yz), m(&[&c(&x, &z), &c(&x, &y), &c(&c(&x, &y), &z)]));
        prop_assert_eq!(c(&xy, &z), m(&[&c(&x, &z), &c(&c(&x, &z), &y), &c(&y, &z)]));
        prop_assert_eq!(g.inverse(&c(&x, &y)).unwrap(), c(&y, &x));
    }

    #[test]
    fn closure_is_canonical(gens in prop::collection::vec(element(), 1..4), k in 0usize..4) {
        let g = p3();
        let h = close_subgroup(g, &gens).unwrap();
        // reorder, add a redundant product, and replace one generator by a power coprime to p
        let mut other: Vec<ExponentVector> = gens.iter().rev().cloned().collect();
        other.push(g.product(gens.iter()).unwrap());
        let i = k % other.len();
        other[i] = g.power(&other[i], 2).unwrap();
        let same = close_subgroup(g, &other).unwrap();
        prop_assert_eq!(h.induced_sequence(), same.induced_sequence());
    }

    #[test]
    fn presentation_round_trip(pres in presentation()) {
        let text = serialize_presentation(&pres);
        let parsed = parse_presentation(&text).unwrap();
        prop_assert_eq!(&parsed, &pres);
        prop_assert_eq!(serialize_presentation(&parsed), text);
    }
}
