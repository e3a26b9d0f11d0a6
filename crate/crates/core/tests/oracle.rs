mod common;

use common::{bfs_closure, brute_force_lcs_orders, Rewriter, Strategy};
use pcgroup::collector::OverlapKind;
use pcgroup::presentation::{instantiate_parameter, parse_presentation, Family};
use pcgroup::series::{close_subgroup, lower_central_series};
use pcgroup::{ExponentVector, PcGroup};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn builtin(family: Family, n: u32) -> PcGroup {
    PcGroup::new(instantiate_parameter(family, n).unwrap().presentation).unwrap()
}

fn file(text: &str) -> PcGroup {
    PcGroup::new(parse_presentation(text).unwrap()).unwrap()
}

fn all_elements(g: &PcGroup) -> Vec<ExponentVector> {
    let mut out = vec![vec![]];
    for &o in g.relative_orders() {
        out = out.into_iter().flat_map(|v: Vec<u64>| (0..o).map(move |e| [v.clone(), vec![e]].concat())).collect();
    }
    out.into_iter().map(|v| g.element(&v).unwrap()).collect()
}

#[test]
fn rewriting_agrees_with_collection_on_example_p3() {
    for n in [2, 3] {
        let g = builtin(Family::ExampleP3, n);
        let rw = Rewriter::new(g.presentation());
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        for k in 0..300 {
            let (u, v) = (g.random_element(&mut rng), g.random_element(&mut rng));
            let expected = g.multiply(&u, &v).unwrap();
            let strategy = if k % 2 == 0 { Strategy::Leftmost } else { Strategy::Rightmost };
            assert_eq!(rw.product(&u, &v, strategy), expected.exponents(), "{u} * {v}");
        }
        for _ in 0..30 {
            let (u, v) = (g.random_element(&mut rng), g.random_element(&mut rng));
            let mut word = Rewriter::letters(&u);
            word.extend(Rewriter::letters(&v));
            assert_eq!(rw.normal_form_random(&word, &mut rng), g.multiply(&u, &v).unwrap().exponents());
        }
    }
}

#[test]
fn rewriting_agrees_on_small_groups_exhaustively() {
    for text in [include_str!("../data/quaternion8.pc"), include_str!("../data/dihedral16.pc")] {
        let g = file(text);
        let rw = Rewriter::new(g.presentation());
        let elements = all_elements(&g);
        for u in &elements {
            for v in &elements {
                assert_eq!(rw.product(u, v, Strategy::Leftmost), g.multiply(u, v).unwrap().exponents());
            }
        }
    }
}

#[test]
fn rewriting_confirms_example_p2_overlaps() {
    // the printed p = 2 relations (e3 dropped) are not confluent: the two
    // bracketings of each reported overlap rewrite to different words
    for n in [3, 4] {
        let g = builtin(Family::ExampleP2, n);
        let report = g.check_consistency();
        assert!(!report.consistent);
        let rw = Rewriter::new(g.presentation());
        for f in &report.failures {
            assert_eq!(f.kind, OverlapKind::TripleOverlap);
            let word: Vec<usize> = f.generators.iter().map(|&(i, _)| i).collect();
            let left = rw.normal_form(&word, Strategy::Leftmost);
            let right = rw.normal_form(&word, Strategy::Rightmost);
            assert_ne!(left, right);
            assert_eq!(Some(left.as_slice()), f.left.as_ref().map(|v| v.exponents()));
            assert_eq!(Some(right.as_slice()), f.right.as_ref().map(|v| v.exponents()));
        }
        let names: Vec<Vec<&str>> = report
            .failures
            .iter()
            .map(|f| f.generators.iter().map(|&(i, _)| g.presentation().generators[i].as_str()).collect())
            .collect();
        assert_eq!(names, vec![vec!["c", "b", "a"], vec!["d1", "b", "a"]]);
    }
}

#[test]
fn bfs_enumerates_every_normal_form() {
    let g = builtin(Family::ExampleP3, 2);
    let closure = bfs_closure(&g, &g.generators());
    assert_eq!(closure.len(), 19683);
    assert!(all_elements(&g).iter().all(|v| closure.contains(v)));
}

#[test]
fn lower_central_series_matches_enumeration() {
    for g in [builtin(Family::ExampleP3, 2), file(include_str!("../data/dihedral16.pc")), file(include_str!("../data/quaternion8.pc"))] {
        let series = lower_central_series(&g, &g.generators()).unwrap();
        let engine: Vec<usize> = series.orders().iter().map(|&o| o as usize).collect();
        assert_eq!(engine, brute_force_lcs_orders(&g));
    }
}

#[test]
fn induced_order_matches_enumeration() {
    let g = builtin(Family::ExampleP3, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for k in 0..40 {
        let gens: Vec<ExponentVector> = (0..1 + k % 3).map(|_| g.random_element(&mut rng)).collect();
        let h = close_subgroup(&g, &gens).unwrap();
        let elements = bfs_closure(&g, &gens);
        assert_eq!(h.order(), elements.len() as u128);
        assert!(elements.iter().all(|x| h.contains(x).unwrap()));
    }
}
