//! Frattini subgroup, maximal subgroups, and membership in the family of
//! p-groups of class greater than `n` all of whose proper subgroups have class
//! at most `n`.
//!
//! Maximal subgroups of a p-group contain the Frattini subgroup and correspond
//! to hyperplanes of the elementary abelian quotient `G / Phi(G)`. Since
//! nilpotency class cannot grow on passing to a subgroup and every proper
//! subgroup lies in a maximal one, it is enough to look at maximal subgroups.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::collector::{CollectError, ExponentVector, GroupError, PcGroup};
use crate::series::{close_subgroup, nilpotency_class, normal_closure, Subgroup};

/// Largest group order accepted by [`all_subgroups`].
pub const EXHAUSTIVE_LIMIT: u128 = 729;

fn require_consistent(group: &PcGroup) -> Result<(), GroupError> {
    group.group_order().map(|_| ())
}

/// `Phi(G) = G' G^p`, as the normal closure of the pairwise commutators and
/// p-th powers of the pc generators.
pub fn frattini_subgroup(group: &PcGroup) -> Result<Subgroup, GroupError> {
    require_consistent(group)?;
    let gens = group.generators();
    let p = group.prime() as i64;
    let mut seeds = Vec::new();
    for (i, x) in gens.iter().enumerate() {
        seeds.push(group.power(x, p)?);
        for y in &gens[i + 1..] {
            seeds.push(group.commutator(x, y)?);
        }
    }
    Ok(normal_closure(group, &gens, &seeds)?)
}

/// Pc generators whose images form a basis of `G / Phi(G)`, chosen greedily
/// in generator order.
pub fn frattini_basis(group: &PcGroup, frattini: &Subgroup) -> Result<Vec<ExponentVector>, CollectError> {
    let mut basis = Vec::new();
    let mut span = frattini.clone();
    for g in group.generators() {
        if !span.contains(&g)? {
            let mut gens = span.induced_sequence().to_vec();
            gens.push(g.clone());
            span = close_subgroup(group, &gens)?;
            basis.push(g);
        }
    }
    Ok(basis)
}

fn log_p(mut value: u128, p: u128) -> usize {
    let mut e = 0;
    while value > 1 {
        debug_assert_eq!(value % p, 0);
        value /= p;
        e += 1;
    }
    e
}

/// `d(G)`, the rank of the Frattini quotient.
pub fn minimal_generator_count(group: &PcGroup) -> Result<usize, GroupError> {
    let phi = frattini_subgroup(group)?;
    let order = group.group_order()?;
    Ok(log_p(order / phi.order(), group.prime() as u128))
}

/// Non-zero vectors of `F_p^d` whose first non-zero coordinate is 1, grouped by
/// the position of that coordinate.
fn projective_points(p: u64, d: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for lead in 0..d {
        let free = d - lead - 1;
        let count = (p as usize).pow(free as u32);
        for mut code in 0..count {
            let mut v = vec![0; d];
            v[lead] = 1;
            for slot in v[lead + 1..].iter_mut().rev() {
                *slot = (code % p as usize) as u64;
                code /= p as usize;
            }
            out.push(v);
        }
    }
    out
}

/// All maximal subgroups, sorted by induced sequence. There are
/// `(p^d - 1) / (p - 1)` of them, each of index `p`.
pub fn maximal_subgroups(group: &PcGroup) -> Result<Vec<Subgroup>, GroupError> {
    let phi = frattini_subgroup(group)?;
    let basis = frattini_basis(group, &phi)?;
    let p = group.prime();
    let mut out = Vec::new();
    for functional in projective_points(p, basis.len()) {
        // kernel of x -> <functional, x>: spanned by b_j - f_j b_r, j != r
        let r = functional.iter().position(|&c| c == 1).unwrap();
        let mut gens = phi.induced_sequence().to_vec();
        for (j, b) in basis.iter().enumerate() {
            if j == r {
                continue;
            }
            let shift = group.power(&basis[r], -(functional[j] as i64))?;
            gens.push(group.multiply(b, &shift)?);
        }
        out.push(close_subgroup(group, &gens)?);
    }
    out.sort_by(|a, b| a.induced_sequence().cmp(b.induced_sequence()));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaximalClass {
    pub generators: Vec<ExponentVector>,
    pub order: u128,
    pub class: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PnVerdict {
    pub n: usize,
    pub group_class: usize,
    pub minimal_generators: usize,
    pub maximal_count: usize,
    pub per_maximal: Vec<MaximalClass>,
    pub member: bool,
}

impl PnVerdict {
    /// Re-derives the verdict for another `n` from the same class data.
    pub fn for_n(&self, n: usize) -> PnVerdict {
        let member = self.group_class > n && self.per_maximal.iter().all(|m| m.class <= n);
        PnVerdict { n, member, ..self.clone() }
    }

    pub fn render_lines(&self) -> String {
        let mut out = format!(
            "pn n={} class={} d={} maximals={} member={}\n",
            self.n, self.group_class, self.minimal_generators, self.maximal_count, self.member
        );
        for (k, m) in self.per_maximal.iter().enumerate() {
            out.push_str(&format!("maximal {} order {} class {}\n", k + 1, m.order, m.class));
        }
        out
    }
}

impl fmt::Display for PnVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "class of G: {}", self.group_class)?;
        writeln!(f, "d(G): {}", self.minimal_generators)?;
        writeln!(f, "maximal subgroups: {}", self.maximal_count)?;
        for (k, m) in self.per_maximal.iter().enumerate() {
            writeln!(f, "  M{}: order {}, class {}", k + 1, m.order, m.class)?;
        }
        let verdict = if self.member { "member" } else { "not a member" };
        write!(f, "P_{}: {verdict}", self.n)
    }
}

/// Class of `G` and of each maximal subgroup, and the resulting verdict.
pub fn verify_pn(group: &PcGroup, n: usize) -> Result<PnVerdict, GroupError> {
    assert!(n >= 1, "n must be positive");
    let maximals = maximal_subgroups(group)?;
    let d = minimal_generator_count(group)?;
    let group_class = nilpotency_class(group, &group.generators())?;
    let per_maximal = maximals
        .par_iter()
        .map(|m| {
            let gens = m.induced_sequence().to_vec();
            let class = nilpotency_class(group, &gens)?;
            Ok(MaximalClass { order: m.order(), generators: gens, class })
        })
        .collect::<Result<Vec<_>, CollectError>>()?;
    let member = group_class > n && per_maximal.iter().all(|m| m.class <= n);
    Ok(PnVerdict { n, group_class, minimal_generators: d, maximal_count: per_maximal.len(), per_maximal, member })
}

/// Every subgroup of a group of order at most [`EXHAUSTIVE_LIMIT`].
///
/// Built upwards: each non-trivial subgroup `K` of a p-group has a normal
/// subgroup `H` of index `p`, so `K = <H, x>` for some `x` normalizing `H`
/// with `x^p` in `H`.
pub fn all_subgroups(group: &PcGroup) -> Result<Vec<Subgroup>, GroupError> {
    let order = group.group_order()?;
    if order > EXHAUSTIVE_LIMIT {
        return Err(GroupError::TooLarge { order, limit: EXHAUSTIVE_LIMIT });
    }
    let elements = Subgroup::whole(group)?.elements()?;
    let p = group.prime() as i64;
    let mut found: BTreeMap<Vec<ExponentVector>, Subgroup> = BTreeMap::new();
    let trivial = Subgroup::trivial(group);
    found.insert(Vec::new(), trivial.clone());
    let mut frontier = vec![trivial];
    while let Some(h) = frontier.pop() {
        let mut covers: Vec<Subgroup> = Vec::new();
        'elements: for x in &elements {
            if h.contains(x)? || !h.contains(&group.power(x, p)?)? {
                continue;
            }
            for c in &covers {
                if c.contains(x)? {
                    continue 'elements;
                }
            }
            for s in h.induced_sequence() {
                if !h.contains(&group.commutator(s, x)?)? {
                    continue 'elements;
                }
            }
            let mut gens = h.induced_sequence().to_vec();
            gens.push(x.clone());
            let k = close_subgroup(group, &gens)?;
            if !found.contains_key(k.induced_sequence()) {
                found.insert(k.induced_sequence().to_vec(), k.clone());
                frontier.push(k.clone());
            }
            covers.push(k);
        }
    }
    Ok(found.into_values().collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExhaustiveVerdict {
    pub n: usize,
    pub group_class: usize,
    pub proper_subgroups: usize,
    pub max_proper_class: usize,
    pub member: bool,
}

/// Slow cross-check of [`verify_pn`]: examines every proper subgroup.
pub fn verify_pn_exhaustive(group: &PcGroup, n: usize) -> Result<ExhaustiveVerdict, GroupError> {
    let order = group.group_order()?;
    let subgroups = all_subgroups(group)?;
    let group_class = nilpotency_class(group, &group.generators())?;
    let mut max_proper_class = 0;
    let mut proper = 0;
    for h in subgroups.iter().filter(|h| h.order() < order) {
        proper += 1;
        max_proper_class = max_proper_class.max(nilpotency_class(group, h.induced_sequence())?);
    }
    Ok(ExhaustiveVerdict {
        n,
        group_class,
        proper_subgroups: proper,
        max_proper_class,
        member: group_class > n && max_proper_class <= n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{instantiate_parameter, parse_presentation, Family, PcPresentation};

    fn group(text: &str) -> PcGroup {
        PcGroup::new(parse_presentation(text).unwrap()).unwrap()
    }

    #[test]
    fn projective_point_counts() {
        assert_eq!(projective_points(3, 2), vec![vec![1, 0], vec![1, 1], vec![1, 2], vec![0, 1]]);
        assert_eq!(projective_points(2, 3).len(), 7);
        assert_eq!(projective_points(5, 1), vec![vec![1]]);
        assert!(projective_points(3, 0).is_empty());
    }

    #[test]
    fn frattini_of_small_groups() {
        let elem = PcGroup::new(PcPresentation::abelian(3, &[("x", 3), ("y", 3)])).unwrap();
        assert!(frattini_subgroup(&elem).unwrap().is_trivial());
        let cyclic = PcGroup::new(PcPresentation::abelian(5, &[("x", 25)])).unwrap();
        let phi = frattini_subgroup(&cyclic).unwrap();
        assert_eq!(phi.order(), 5);
        assert_eq!(minimal_generator_count(&cyclic).unwrap(), 1);
        let e3 = PcGroup::new(PcPresentation::abelian(2, &[("x", 2), ("y", 2), ("z", 2)])).unwrap();
        assert_eq!(minimal_generator_count(&e3).unwrap(), 3);
        assert_eq!(maximal_subgroups(&e3).unwrap().len(), 7);
    }

    #[test]
    fn cyclic_has_one_maximal() {
        let g = PcGroup::new(PcPresentation::abelian(3, &[("x", 3)])).unwrap();
        let ms = maximal_subgroups(&g).unwrap();
        assert_eq!(ms.len(), 1);
        assert!(ms[0].is_trivial());
    }

    #[test]
    fn example_p3_maximals() {
        let g = PcGroup::new(instantiate_parameter(Family::ExampleP3, 2).unwrap().presentation).unwrap();
        let phi = frattini_subgroup(&g).unwrap();
        assert_eq!(19683 / phi.order(), 9);
        let ms = maximal_subgroups(&g).unwrap();
        assert_eq!(ms.len(), 4);
        for m in &ms {
            assert_eq!(m.order(), 6561);
            assert!(phi.is_subgroup_of(m).unwrap());
        }
        let verdict = verify_pn(&g, 3).unwrap();
        assert!(verdict.member, "{verdict}");
        assert_eq!(verdict.group_class, 5);
        assert!(verdict.render_lines().contains("maximal 4 order 6561 class"));
    }

    #[test]
    fn elementary_abelian_not_in_p1() {
        let g = PcGroup::new(PcPresentation::abelian(3, &[("x", 3), ("y", 3)])).unwrap();
        let v = verify_pn(&g, 1).unwrap();
        assert!(!v.member);
        assert_eq!(v.group_class, 1);
    }

    // D16 with a relative order 8 generator
    const D16: &str = "pgroup p=2\ngens s r\norder s 2\norder r 8\ncomm r s = r^-2\n";

    #[test]
    fn dihedral_16_in_p2() {
        let g = group(D16);
        let v = verify_pn(&g, 2).unwrap();
        assert!(v.member);
        assert_eq!(v.group_class, 3);
        let mut classes: Vec<_> = v.per_maximal.iter().map(|m| m.class).collect();
        classes.sort();
        assert_eq!(classes, vec![1, 2, 2]);
        let ex = verify_pn_exhaustive(&g, 2).unwrap();
        assert!(ex.member);
        assert_eq!(ex.max_proper_class, 2);
    }

    #[test]
    fn exhaustive_subgroup_counts() {
        // D8 has 10 subgroups, Q8 has 6
        let d8 = group("pgroup p=2\ngens x y z\norder x 2\norder y 2\norder z 2\ncomm y x = z\n");
        assert_eq!(all_subgroups(&d8).unwrap().len(), 10);
        let q8 = group("pgroup p=2\ngens x y z\norder x 2\norder y 2\norder z 2\npow x = z\npow y = z\ncomm y x = z\n");
        assert_eq!(all_subgroups(&q8).unwrap().len(), 6);
        // C3 x C3 has 6 subgroups
        let e = PcGroup::new(PcPresentation::abelian(3, &[("x", 3), ("y", 3)])).unwrap();
        assert_eq!(all_subgroups(&e).unwrap().len(), 6);
    }

    #[test]
    fn exhaustive_refuses_large_groups() {
        let g = PcGroup::new(instantiate_parameter(Family::ExampleP3, 2).unwrap().presentation).unwrap();
        assert!(matches!(all_subgroups(&g), Err(GroupError::TooLarge { .. })));
    }
}
