//! Power-commutator presentations of finite p-groups.
//!
//! A presentation lists generators `g_1, ..., g_m` in polycyclic order. Each
//! generator has a relative order `p^e`, an optional power relation
//! `g_i^(p^e) = w` with `w` a word in later generators, and for every pair
//! `j > i` an optional commutator relation `[g_j, g_i] = w` with `w` a word in
//! generators of index greater than `i`.

mod builtin;
mod format;

use std::collections::BTreeMap;
use std::fmt;

pub use builtin::{instantiate_parameter, printed_text, Family, Instantiation};
pub use format::{parse_presentation, serialize_presentation};

use thiserror::Error;

/// A word over the generators, evaluated left to right.
///
/// Factors are kept exactly as written; `a^0` and repeated letters are legal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<(usize, i64)>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn generator(index: usize) -> Self {
        Word(vec![(index, 1)])
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    /// The formal inverse: factors reversed, exponents negated.
    pub fn formal_inverse(&self) -> Self {
        Word(self.0.iter().rev().map(|&(g, e)| (g, -e)).collect())
    }

    pub fn factors(&self) -> &[(usize, i64)] {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PcPresentation {
    pub prime: u64,
    pub generators: Vec<String>,
    pub relative_orders: Vec<u64>,
    /// `power_relations[i]` is the value of `g_i^(relative_orders[i])`.
    pub power_relations: Vec<Word>,
    /// Keyed by `(hi, lo)` with `hi > lo`; the value of `[g_hi, g_lo]`.
    /// Absent entries are trivial.
    pub commutator_relations: BTreeMap<(usize, usize), Word>,
}

impl PcPresentation {
    /// A presentation with the given generators and orders and no relations,
    /// i.e. a direct product of cyclic groups.
    pub fn abelian(prime: u64, generators: &[(&str, u64)]) -> Self {
        PcPresentation {
            prime,
            generators: generators.iter().map(|(n, _)| n.to_string()).collect(),
            relative_orders: generators.iter().map(|&(_, o)| o).collect(),
            power_relations: vec![Word::identity(); generators.len()],
            commutator_relations: BTreeMap::new(),
        }
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }

    pub fn power_relation(&self, i: usize) -> &Word {
        &self.power_relations[i]
    }

    pub fn commutator_relation(&self, hi: usize, lo: usize) -> Option<&Word> {
        self.commutator_relations.get(&(hi, lo))
    }

    /// Sets `[g_hi, g_lo] = word`; an identity word removes the relation.
    pub fn set_commutator(&mut self, hi: usize, lo: usize, word: Word) {
        if word.is_identity() {
            self.commutator_relations.remove(&(hi, lo));
        } else {
            self.commutator_relations.insert((hi, lo), word);
        }
    }

    pub fn set_power(&mut self, i: usize, word: Word) {
        self.power_relations[i] = word;
    }

    /// Product of the relative orders, `None` on overflow.
    pub fn order_bound(&self) -> Option<u128> {
        self.relative_orders
            .iter()
            .try_fold(1u128, |acc, &o| acc.checked_mul(o as u128))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Error => f.write_str("error"),
            Severity::Warning => f.write_str("warning"),
        }
    }
}

/// Where a diagnostic points: a source line, a relation, or both.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Location {
    pub line: Option<usize>,
    pub relation: Option<String>,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.line, &self.relation) {
            (Some(l), Some(r)) => write!(f, "line {l} ({r})"),
            (Some(l), None) => write!(f, "line {l}"),
            (None, Some(r)) => write!(f, "{r}"),
            (None, None) => f.write_str("presentation"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Diagnostic {
    pub severity: Severity,
    pub location: Location,
    pub message: String,
}

impl Diagnostic {
    pub fn error(location: Location, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, location, message: message.into() }
    }

    pub fn warning(location: Location, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, location, message: message.into() }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.severity, self.location, self.message)
    }
}

#[derive(Debug, Error)]
pub enum PresentationError {
    #[error("{family} requires n >= {min}, got {n}")]
    ParameterTooSmall { family: Family, n: u32, min: u32 },
    #[error("{family} with n = {n} overflows the supported exponent range")]
    ParameterTooLarge { family: Family, n: u32 },
    #[error("invalid presentation: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `Some(e)` when `value == p^e` with `e >= 1`.
pub(crate) fn p_power_exponent(value: u64, p: u64) -> Option<u32> {
    if p < 2 || value < p {
        return None;
    }
    let (mut v, mut e) = (value, 0);
    while v % p == 0 {
        v /= p;
        e += 1;
    }
    (v == 1).then_some(e)
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn relation_id(pres: &PcPresentation, kind: RelationKind) -> String {
    let name = |i: usize| {
        pres.generators.get(i).cloned().unwrap_or_else(|| format!("#{i}"))
    };
    match kind {
        RelationKind::Order(i) => format!("order {}", name(i)),
        RelationKind::Power(i) => format!("pow {}", name(i)),
        RelationKind::Commutator(hi, lo) => format!("comm {} {}", name(hi), name(lo)),
    }
}

#[derive(Clone, Copy)]
enum RelationKind {
    Order(usize),
    Power(usize),
    Commutator(usize, usize),
}

/// Structural checks only; consistency of the relations is decided by the
/// collector. Diagnostics come out in a fixed order: header, generators,
/// orders, power relations, commutator relations.
pub fn validate_structure(pres: &PcPresentation) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let at = |kind| Location { line: None, relation: Some(relation_id(pres, kind)) };
    let m = pres.generators.len();

    if !is_prime(pres.prime) {
        out.push(Diagnostic::error(Location::default(), format!("{} is not prime", pres.prime)));
    }
    if pres.relative_orders.len() != m {
        out.push(Diagnostic::error(
            Location::default(),
            format!("{} relative orders for {m} generators", pres.relative_orders.len()),
        ));
    }
    if pres.power_relations.len() != m {
        out.push(Diagnostic::error(
            Location::default(),
            format!("{} power relations for {m} generators", pres.power_relations.len()),
        ));
    }
    for (i, name) in pres.generators.iter().enumerate() {
        if !is_identifier(name) {
            out.push(Diagnostic::error(Location::default(), format!("invalid generator name {name:?}")));
        }
        if pres.generators[..i].contains(name) {
            out.push(Diagnostic::error(Location::default(), format!("duplicate generator name {name}")));
        }
    }
    for (i, &o) in pres.relative_orders.iter().enumerate() {
        if p_power_exponent(o, pres.prime).is_none() {
            out.push(Diagnostic::error(
                at(RelationKind::Order(i)),
                format!("relative order {o} not a p-power (p = {})", pres.prime),
            ));
        }
    }
    if pres.relative_orders.len() == m && pres.order_bound().is_none() {
        out.push(Diagnostic::error(Location::default(), "group order exceeds 2^128"));
    }

    let check_word = |out: &mut Vec<Diagnostic>, word: &Word, floor: usize, kind| {
        for &(g, _) in word.factors() {
            if g >= m {
                out.push(Diagnostic::error(at(kind), format!("undeclared generator #{g}")));
            } else if g <= floor {
                out.push(Diagnostic::error(
                    at(kind),
                    format!("RHS index not greater than i: {} appears in a relation at level {}", pres.generators[g], pres.generators[floor]),
                ));
            }
        }
    };
    for (i, word) in pres.power_relations.iter().enumerate().take(m) {
        check_word(&mut out, word, i, RelationKind::Power(i));
    }
    for (&(hi, lo), word) in &pres.commutator_relations {
        let kind = RelationKind::Commutator(hi, lo);
        if hi >= m || lo >= m {
            out.push(Diagnostic::error(at(kind), "commutator relation names an undeclared generator"));
            continue;
        }
        if hi <= lo {
            out.push(Diagnostic::error(at(kind), "commutator relation must be [g_j, g_i] with j > i"));
            continue;
        }
        check_word(&mut out, word, lo, kind);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_gen(prime: u64, orders: (u64, u64)) -> PcPresentation {
        PcPresentation::abelian(prime, &[("g1", orders.0), ("g2", orders.1)])
    }

    #[test]
    fn abelian_is_valid() {
        assert!(validate_structure(&two_gen(3, (3, 9))).is_empty());
    }

    #[test]
    fn commutator_rhs_must_be_deeper() {
        let mut pres = two_gen(3, (3, 3));
        pres.set_commutator(1, 0, Word::generator(0));
        let diags = validate_structure(&pres);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].is_error());
        assert!(diags[0].message.contains("RHS index not greater than i"), "{}", diags[0]);
    }

    #[test]
    fn non_p_power_order() {
        let diags = validate_structure(&two_gen(3, (6, 3)));
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("relative order 6 not a p-power"));
        assert_eq!(diags[0].location.relation.as_deref(), Some("order g1"));
    }

    #[test]
    fn power_relation_ordering() {
        let mut pres = two_gen(2, (2, 2));
        pres.set_power(1, Word::generator(0));
        assert_eq!(validate_structure(&pres).len(), 1);
        let mut pres = two_gen(2, (2, 2));
        pres.set_power(0, Word::generator(1));
        assert!(validate_structure(&pres).is_empty());
    }

    #[test]
    fn duplicate_names_and_composite_prime() {
        let pres = PcPresentation::abelian(4, &[("x", 4), ("x", 4)]);
        let msgs: Vec<_> = validate_structure(&pres).into_iter().map(|d| d.message).collect();
        assert!(msgs.iter().any(|m| m == "4 is not prime"));
        assert!(msgs.iter().any(|m| m == "duplicate generator name x"));
    }

    #[test]
    fn validation_is_deterministic() {
        let mut pres = two_gen(3, (6, 3));
        pres.set_commutator(1, 0, Word(vec![(0, 1), (5, 1)]));
        assert_eq!(validate_structure(&pres), validate_structure(&pres));
    }

    #[test]
    fn p_powers() {
        assert_eq!(p_power_exponent(27, 3), Some(3));
        assert_eq!(p_power_exponent(1, 3), None);
        assert_eq!(p_power_exponent(12, 2), None);
        assert!(is_prime(2) && is_prime(3) && !is_prime(1) && !is_prime(9));
    }
}
