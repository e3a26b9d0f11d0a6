//! Subgroups as induced pc-sequences, and the lower central series.
//!
//! A subgroup `H` is stored as an echelon sequence with at most one element per
//! leading index `d`. The entry at `d` has leading exponent `p^k` dividing the
//! relative order `o_d`, and every entry is reduced at the other pivots, which
//! makes the sequence a canonical invariant of `H`. The order of `H` is the
//! product of `o_d / p^k` over the entries.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use rand::Rng;

use crate::collector::{CollectError, ExponentVector, PcGroup};

#[derive(Clone)]
pub struct Subgroup {
    group: PcGroup,
    given: Vec<ExponentVector>,
    induced: Vec<ExponentVector>,
    order: u128,
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Subgroup")
            .field("order", &self.order)
            .field("induced", &self.induced)
            .finish()
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.induced == other.induced
    }
}

impl Eq for Subgroup {}

/// Modular inverse of `a` modulo `m` (`gcd(a, m) = 1`).
fn inverse_mod(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(m as i128) as u64
}

/// Working state of the sifting closure: one optional entry per level.
struct Echelon<'g> {
    group: &'g PcGroup,
    levels: Vec<Option<ExponentVector>>,
}

impl<'g> Echelon<'g> {
    fn new(group: &'g PcGroup) -> Self {
        Echelon { group, levels: vec![None; group.generator_count()] }
    }

    fn from_sequence(group: &'g PcGroup, seq: &[ExponentVector]) -> Self {
        let mut e = Self::new(group);
        for s in seq {
            let (d, _) = s.leading().expect("induced entries are non-trivial");
            e.levels[d] = Some(s.clone());
        }
        e
    }

    /// Reduces `u` as far as the current entries allow. The result is the
    /// identity iff `u` lies in the set of normal words of the sequence.
    fn sift(&self, mut u: ExponentVector) -> Result<ExponentVector, CollectError> {
        let orders = self.group.relative_orders();
        while let Some((d, x)) = u.leading() {
            let Some(s) = &self.levels[d] else { break };
            let lead = s.get(d);
            if x % lead != 0 {
                break;
            }
            let t = (orders[d] - x) / lead;
            u = self.group.multiply(&u, &self.group.power(s, t as i64)?)?;
        }
        Ok(u)
    }

    /// Power of `r` whose leading exponent is exactly the p-part of `r`'s.
    fn normalize_leading(&self, r: &ExponentVector) -> Result<ExponentVector, CollectError> {
        let p = self.group.prime();
        let (d, x) = r.leading().expect("non-trivial");
        let mut ppart = 1;
        while x % (ppart * p) == 0 {
            ppart *= p;
        }
        let modulus = self.group.relative_orders()[d] / ppart;
        let s = inverse_mod(x / ppart, modulus);
        if s == 1 || modulus == 1 {
            return Ok(r.clone());
        }
        self.group.power(r, s as i64)
    }

    fn entries(&self) -> impl Iterator<Item = &ExponentVector> {
        self.levels.iter().flatten()
    }

    /// Adds everything in `queue` and closes under powers and commutators.
    fn close(&mut self, mut queue: VecDeque<ExponentVector>) -> Result<(), CollectError> {
        let orders = self.group.relative_orders().to_vec();
        loop {
            while let Some(u) = queue.pop_front() {
                let r = self.sift(u)?;
                let Some((d, _)) = r.leading() else { continue };
                let r = self.normalize_leading(&r)?;
                let lead = r.get(d);
                if let Some(old) = self.levels[d].take() {
                    debug_assert!(lead < old.get(d));
                    queue.push_back(old);
                }
                queue.push_back(self.group.power(&r, (orders[d] / lead) as i64)?);
                for s in self.entries() {
                    queue.push_back(self.group.commutator(s, &r)?);
                }
                self.levels[d] = Some(r);
            }
            // every power and commutator must now sift through the final sequence
            let entries: Vec<ExponentVector> = self.entries().cloned().collect();
            for (i, s) in entries.iter().enumerate() {
                let (d, _) = s.leading().unwrap();
                let pw = self.group.power(s, (orders[d] / s.get(d)) as i64)?;
                if !self.sift(pw.clone())?.is_identity() {
                    queue.push_back(pw);
                }
                for t in &entries[i + 1..] {
                    let c = self.group.commutator(t, s)?;
                    if !self.sift(c.clone())?.is_identity() {
                        queue.push_back(c);
                    }
                }
            }
            if queue.is_empty() {
                return Ok(());
            }
        }
    }

    /// Reduces every entry at the later pivots into `[0, p^k)`.
    fn canonical(mut self) -> Result<Vec<ExponentVector>, CollectError> {
        let orders = self.group.relative_orders();
        let pivots: Vec<usize> = (0..self.levels.len()).filter(|&d| self.levels[d].is_some()).collect();
        for (pi, &d) in pivots.iter().enumerate() {
            let mut s = self.levels[d].take().unwrap();
            for &e in &pivots[pi + 1..] {
                let piv = self.levels[e].as_ref().unwrap();
                let lead = piv.get(e);
                let x = s.get(e);
                if x >= lead {
                    // x is shifted down by a multiple of lead, modulo o_e
                    let t = orders[e] / lead - x / lead;
                    s = self.group.multiply(&s, &self.group.power(piv, t as i64)?)?;
                }
            }
            self.levels[d] = Some(s);
        }
        Ok(self.levels.into_iter().flatten().collect())
    }
}

fn order_of(group: &PcGroup, induced: &[ExponentVector]) -> u128 {
    induced
        .iter()
        .map(|s| {
            let (d, lead) = s.leading().unwrap();
            (group.relative_orders()[d] / lead) as u128
        })
        .product()
}

/// The subgroup generated by `gens`.
pub fn close_subgroup(group: &PcGroup, gens: &[ExponentVector]) -> Result<Subgroup, CollectError> {
    for g in gens {
        if g.len() != group.generator_count() {
            return Err(CollectError::LengthMismatch { expected: group.generator_count(), got: g.len() });
        }
    }
    let mut e = Echelon::new(group);
    e.close(gens.iter().cloned().collect())?;
    let induced = e.canonical()?;
    Ok(Subgroup { order: order_of(group, &induced), group: group.clone(), given: gens.to_vec(), induced })
}

/// The smallest subgroup containing `gens` and normalized by every element of
/// `within`.
pub fn normal_closure(group: &PcGroup, within: &[ExponentVector], gens: &[ExponentVector]) -> Result<Subgroup, CollectError> {
    let mut h = close_subgroup(group, gens)?;
    loop {
        let mut extra = Vec::new();
        for s in &h.induced {
            for g in within {
                let c = group.commutator(s, g)?;
                if !h.contains(&c)? && !extra.contains(&c) {
                    extra.push(c);
                }
            }
        }
        if extra.is_empty() {
            h.given = gens.to_vec();
            return Ok(h);
        }
        let mut e = Echelon::from_sequence(group, &h.induced);
        e.close(extra.into())?;
        let induced = e.canonical()?;
        h = Subgroup { order: order_of(group, &induced), group: group.clone(), given: Vec::new(), induced };
    }
}

impl Subgroup {
    pub fn trivial(group: &PcGroup) -> Self {
        Subgroup { group: group.clone(), given: Vec::new(), induced: Vec::new(), order: 1 }
    }

    pub fn whole(group: &PcGroup) -> Result<Self, CollectError> {
        close_subgroup(group, &group.generators())
    }

    pub fn group(&self) -> &PcGroup {
        &self.group
    }

    pub fn given_generators(&self) -> &[ExponentVector] {
        &self.given
    }

    pub fn induced_sequence(&self) -> &[ExponentVector] {
        &self.induced
    }

    pub fn order(&self) -> u128 {
        self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.induced.is_empty()
    }

    /// Membership by sifting.
    pub fn contains(&self, u: &ExponentVector) -> Result<bool, CollectError> {
        if u.len() != self.group.generator_count() {
            return Err(CollectError::LengthMismatch { expected: self.group.generator_count(), got: u.len() });
        }
        Ok(Echelon::from_sequence(&self.group, &self.induced).sift(u.clone())?.is_identity())
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> Result<bool, CollectError> {
        for s in &self.induced {
            if !other.contains(s)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Relative order of each induced entry.
    fn relative_orders(&self) -> Vec<u64> {
        self.induced
            .iter()
            .map(|s| {
                let (d, lead) = s.leading().unwrap();
                self.group.relative_orders()[d] / lead
            })
            .collect()
    }

    /// Uniform element: `s_1^a_1 ... s_r^a_r` with independent uniform `a_i`.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ExponentVector, CollectError> {
        let mut acc = self.group.identity();
        for (s, o) in self.induced.iter().zip(self.relative_orders()) {
            let e = rng.gen_range(0..o);
            acc = self.group.multiply(&acc, &self.group.power(s, e as i64)?)?;
        }
        Ok(acc)
    }

    /// Every element, in a fixed order. Intended for small subgroups.
    pub fn elements(&self) -> Result<Vec<ExponentVector>, CollectError> {
        let mut out = vec![self.group.identity()];
        for (s, o) in self.induced.iter().zip(self.relative_orders()).rev() {
            let mut next = Vec::with_capacity(out.len() * o as usize);
            let mut pw = self.group.identity();
            for _ in 0..o {
                for x in &out {
                    next.push(self.group.multiply(&pw, x)?);
                }
                pw = self.group.multiply(&pw, s)?;
            }
            out = next;
        }
        Ok(out)
    }

    pub fn describe(&self) -> String {
        if self.induced.is_empty() {
            return "1".into();
        }
        let parts: Vec<String> = self.induced.iter().map(|s| self.group.format_element(s)).collect();
        format!("<{}>", parts.join(", "))
    }
}

/// `terms[0] = H`, `terms[i] = K_{i+1}(H)`, ending with the trivial subgroup.
#[derive(Clone, Debug)]
pub struct CentralSeries {
    pub terms: Vec<Subgroup>,
}

impl CentralSeries {
    pub fn class(&self) -> usize {
        self.terms.len() - 1
    }

    /// `K_n` for `n >= 1`; trivial past the end of the series.
    pub fn term(&self, n: usize) -> &Subgroup {
        assert!(n >= 1, "lower central series is indexed from K_1");
        self.terms.get(n - 1).unwrap_or_else(|| self.terms.last().unwrap())
    }

    pub fn orders(&self) -> Vec<u128> {
        self.terms.iter().map(Subgroup::order).collect()
    }

    pub fn render_table(&self) -> String {
        let mut out = String::from("term order generators\n");
        for (i, t) in self.terms.iter().enumerate() {
            out.push_str(&format!("K{} {} {}\n", i + 1, t.order(), t.describe()));
        }
        out
    }
}

/// Distinct non-trivial left-normed commutators of each weight in `gens`,
/// `layers[w - 1]` holding weight `w`. Stops at the first weight where every
/// commutator is trivial.
pub fn commutator_layers(group: &PcGroup, gens: &[ExponentVector]) -> Result<Vec<Vec<ExponentVector>>, CollectError> {
    let first: BTreeSet<ExponentVector> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
    let mut layers = vec![first.into_iter().collect::<Vec<_>>()];
    loop {
        let mut next = BTreeSet::new();
        for c in layers.last().unwrap() {
            for x in gens {
                let v = group.commutator(c, x)?;
                if !v.is_identity() {
                    next.insert(v);
                }
            }
        }
        if next.is_empty() {
            return Ok(layers);
        }
        layers.push(next.into_iter().collect());
    }
}

/// Lower central series of `<gens>`: `K_n` is generated by the left-normed
/// commutators of weight at least `n` in `gens`.
pub fn lower_central_series(group: &PcGroup, gens: &[ExponentVector]) -> Result<CentralSeries, CollectError> {
    let layers = commutator_layers(group, gens)?;
    let mut terms = vec![Subgroup::trivial(group)];
    if layers[0].is_empty() {
        return Ok(CentralSeries { terms });
    }
    for layer in layers.iter().rev() {
        let below = terms.last().unwrap();
        let mut e = Echelon::from_sequence(group, &below.induced);
        e.close(layer.iter().cloned().collect())?;
        let induced = e.canonical()?;
        terms.push(Subgroup { order: order_of(group, &induced), group: group.clone(), given: layer.clone(), induced });
    }
    terms.reverse();
    terms[0].given = gens.to_vec();
    Ok(CentralSeries { terms })
}

pub fn nilpotency_class(group: &PcGroup, gens: &[ExponentVector]) -> Result<usize, CollectError> {
    Ok(lower_central_series(group, gens)?.class())
}

/// `[H, H]` for `H = <gens>`: the normal closure in `H` of the pairwise
/// commutators of the generators.
pub fn derived_subgroup(group: &PcGroup, gens: &[ExponentVector]) -> Result<Subgroup, CollectError> {
    let mut comms = Vec::new();
    for (i, x) in gens.iter().enumerate() {
        for y in &gens[i + 1..] {
            comms.push(group.commutator(x, y)?);
        }
    }
    normal_closure(group, gens, &comms)
}

pub fn is_metabelian(group: &PcGroup, gens: &[ExponentVector]) -> Result<bool, CollectError> {
    let derived = derived_subgroup(group, gens)?;
    Ok(derived_subgroup(group, derived.induced_sequence())?.is_trivial())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{instantiate_parameter, Family, PcPresentation};

    fn p3() -> PcGroup {
        PcGroup::new(instantiate_parameter(Family::ExampleP3, 2).unwrap().presentation).unwrap()
    }

    fn named(g: &PcGroup, names: &[&str]) -> Vec<ExponentVector> {
        names.iter().map(|n| g.named(n).unwrap()).collect()
    }

    #[test]
    fn modular_inverse() {
        assert_eq!(inverse_mod(2, 9), 5);
        assert_eq!(inverse_mod(1, 1), 0);
        assert_eq!(inverse_mod(7, 8), 7);
    }

    #[test]
    fn basic_closures() {
        let g = p3();
        assert_eq!(close_subgroup(&g, &[]).unwrap().order(), 1);
        assert_eq!(Subgroup::whole(&g).unwrap().order(), 19683);
        let derived = close_subgroup(&g, &named(&g, &["c", "d1", "d2", "e1", "e2", "f"])).unwrap();
        assert_eq!(derived.order(), 729);
        assert_eq!(derived, derived_subgroup(&g, &named(&g, &["a", "b"])).unwrap());
    }

    #[test]
    fn membership() {
        let g = p3();
        let trivial = Subgroup::trivial(&g);
        assert!(trivial.contains(&g.identity()).unwrap());
        assert!(!trivial.contains(&g.named("a").unwrap()).unwrap());
        let a2 = close_subgroup(&g, &[g.power(&g.named("a").unwrap(), 3).unwrap()]).unwrap();
        assert_eq!(a2.order(), 3);
        assert!(!a2.contains(&g.named("a").unwrap()).unwrap());
        assert!(trivial.contains(&ExponentVector::identity(2)).is_err());
    }

    #[test]
    fn normal_closures() {
        let g = p3();
        let gens = g.generators();
        let c = normal_closure(&g, &gens, &named(&g, &["c"])).unwrap();
        assert_eq!(c.order(), 729);
        let f = normal_closure(&g, &gens, &named(&g, &["f"])).unwrap();
        assert_eq!(f.order(), 3);
        assert!(normal_closure(&g, &gens, &[g.identity()]).unwrap().is_trivial());
    }

    #[test]
    fn series_of_example_p3() {
        let g = p3();
        let series = lower_central_series(&g, &named(&g, &["a", "b"])).unwrap();
        assert_eq!(series.orders(), vec![19683, 729, 243, 27, 3, 1]);
        assert_eq!(series.class(), 5);
        assert!(series.term(5).contains(&g.named("f").unwrap()).unwrap());
        assert!(series.term(9).is_trivial());
        assert!(is_metabelian(&g, &g.generators()).unwrap());
    }

    #[test]
    fn abelian_and_empty() {
        let g = PcGroup::new(PcPresentation::abelian(3, &[("x", 3), ("y", 3)])).unwrap();
        let s = lower_central_series(&g, &g.generators()).unwrap();
        assert_eq!(s.orders(), vec![9, 1]);
        assert_eq!(s.class(), 1);
        let e = PcGroup::new(PcPresentation::abelian(3, &[])).unwrap();
        let s = lower_central_series(&e, &[]).unwrap();
        assert_eq!(s.class(), 0);
        assert_eq!(s.render_table(), "term order generators\nK1 1 1\n");
    }

    #[test]
    fn elements_enumeration() {
        let g = p3();
        let h = close_subgroup(&g, &named(&g, &["e1", "f"])).unwrap();
        let els = h.elements().unwrap();
        assert_eq!(els.len(), 9);
        assert_eq!(els.iter().collect::<BTreeSet<_>>().len(), 9);
    }
}
