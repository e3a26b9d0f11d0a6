//! Normal-form arithmetic by collection from the left.
//!
//! An element is stored as its exponent vector `(x_1, ..., x_m)` with
//! `0 <= x_i < o_i`, standing for `g_1^x_1 ... g_m^x_m`. Multiplying by a
//! generator `g_i` moves `g_i` left past the tail `g_{i+1}^.. ... g_m^..` by
//! conjugating the tail, using the precomputed normal forms of `g_j^(g_i)` and
//! `g_i^(o_i)`. Those tables are built from the last generator upwards, so
//! every table entry is computed with tables that are already complete.

use std::fmt;
use std::sync::{Arc, OnceLock};

use rand::Rng;
use thiserror::Error;

use crate::presentation::{validate_structure, Diagnostic, PcPresentation, Word};

/// Default number of elementary collection steps allowed per operation.
pub const DEFAULT_STEP_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentVector(Vec<u64>);

impl ExponentVector {
    pub fn identity(len: usize) -> Self {
        ExponentVector(vec![0; len])
    }

    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = vec![0; len];
        v[index] = 1;
        ExponentVector(v)
    }

    pub fn exponents(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Index and exponent of the first non-zero entry.
    pub fn leading(&self) -> Option<(usize, u64)> {
        self.0.iter().enumerate().find(|(_, &e)| e != 0).map(|(i, &e)| (i, e))
    }

    pub fn get(&self, i: usize) -> u64 {
        self.0[i]
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CollectError {
    #[error("collection exceeded the step budget of {0}")]
    BudgetExceeded(u64),
    #[error("word references generator #{0}, which is not declared")]
    UnknownGenerator(usize),
    #[error("element has {got} exponents, group has {expected} generators")]
    LengthMismatch { expected: usize, got: usize },
}

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("presentation fails structural validation: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
    #[error("presentation is inconsistent ({0} failing overlaps)")]
    Inconsistent(usize),
    #[error("group of order {order} exceeds the limit {limit} for exhaustive search")]
    TooLarge { order: u128, limit: u128 },
    #[error(transparent)]
    Collect(#[from] CollectError),
}

struct Budget {
    remaining: u64,
    limit: u64,
}

impl Budget {
    fn new(limit: u64) -> Self {
        Budget { remaining: limit, limit }
    }

    #[inline]
    fn tick(&mut self) -> Result<(), CollectError> {
        if self.remaining == 0 {
            return Err(CollectError::BudgetExceeded(self.limit));
        }
        self.remaining -= 1;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OverlapKind {
    TripleOverlap,
    PowerOverlap,
}

impl fmt::Display for OverlapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OverlapKind::TripleOverlap => "triple-overlap",
            OverlapKind::PowerOverlap => "power-overlap",
        })
    }
}

/// One overlap whose two collections disagree. `None` on either side means
/// that side ran out of collection steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencyFailure {
    pub kind: OverlapKind,
    /// The overlap word as `(generator, exponent)` factors, e.g. `g_j^(o_j) g_i`.
    pub generators: Vec<(usize, u64)>,
    pub left: Option<ExponentVector>,
    pub right: Option<ExponentVector>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub consistent: bool,
    pub overlaps_checked: usize,
    pub failures: Vec<ConsistencyFailure>,
}

impl ConsistencyReport {
    pub fn render(&self, group: &PcGroup) -> String {
        let mut out = format!(
            "consistent {} overlaps={} failures={}\n",
            self.consistent,
            self.overlaps_checked,
            self.failures.len()
        );
        for f in &self.failures {
            let names: Vec<String> = f
                .generators
                .iter()
                .map(|&(g, e)| {
                    let name = &group.presentation().generators[g];
                    if e == 1 { name.clone() } else { format!("{name}^{e}") }
                })
                .collect();
            let side = |v: &Option<ExponentVector>| match v {
                Some(v) => group.format_element(v),
                None => "<budget exceeded>".to_string(),
            };
            out.push_str(&format!(
                "failure {} {} left={} right={}\n",
                f.kind,
                names.join(","),
                side(&f.left),
                side(&f.right)
            ));
        }
        out
    }
}

struct Tables {
    presentation: PcPresentation,
    orders: Vec<u64>,
    /// Normal form of `g_i^(o_i)`.
    powers: Vec<ExponentVector>,
    /// `conjugates[j][i]` is the normal form of `g_j^(g_i)` for `j > i`.
    conjugates: Vec<Vec<ExponentVector>>,
    /// `commutes[j][i]` iff `[g_j, g_i] = 1`.
    commutes: Vec<Vec<bool>>,
    step_budget: u64,
    consistency: OnceLock<ConsistencyReport>,
    /// Built on first use once the presentation is known to be consistent.
    fast: OnceLock<Option<ConjugationPowers>>,
}

/// `levels[i][s][j - i - 1]` is `g_j^(g_i^(p^s))`. `period[i]` is the order
/// of conjugation by `g_i` on the tail when it was found below `o_i`.
struct ConjugationPowers {
    levels: Vec<Vec<Vec<ExponentVector>>>,
    period: Vec<Option<u64>>,
}

/// A group given by a structurally valid pc presentation, with its collection
/// tables. Cheap to clone; all clones share the tables.
#[derive(Clone)]
pub struct PcGroup {
    inner: Arc<Tables>,
}

impl fmt::Debug for PcGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PcGroup")
            .field("prime", &self.inner.presentation.prime)
            .field("generators", &self.inner.presentation.generators)
            .finish()
    }
}

impl PartialEq for PcGroup {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }
}

impl ConjugationPowers {
    /// `t^(g_i^e)` for `t` in the subgroup generated by `g_(i+1), ...`.
    fn conjugate_tail(&self, tables: &Tables, i: usize, mut t: ExponentVector, e: u64, b: &mut Budget) -> Result<ExponentVector, CollectError> {
        let p = tables.presentation.prime;
        let mut e = match self.period[i] {
            Some(r) => e % r,
            None => e,
        };
        for level in &self.levels[i] {
            if e == 0 {
                break;
            }
            for _ in 0..e % p {
                t = tables.apply_conjugation(i, level, &t, b)?;
            }
            e /= p;
        }
        Ok(t)
    }
}

impl Tables {
    fn len(&self) -> usize {
        self.orders.len()
    }

    fn mul_gen(&self, v: &mut [u64], i: usize, b: &mut Budget) -> Result<(), CollectError> {
        b.tick()?;
        let wraps = v[i] + 1 == self.orders[i];
        let commuting_tail = (i + 1..v.len()).all(|j| v[j] == 0 || self.commutes[j][i]);
        if commuting_tail && !wraps {
            v[i] += 1;
            return Ok(());
        }
        let tail: Vec<u64> = v[i + 1..].to_vec();
        v[i + 1..].iter_mut().for_each(|e| *e = 0);
        if wraps {
            v[i] = 0;
            self.mul_vec(v, &self.powers[i], b)?;
        } else {
            v[i] += 1;
        }
        for (k, &e) in tail.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let j = i + 1 + k;
            if self.commutes[j][i] {
                self.mul_gen_pow(v, j, e, b)?;
            } else if e > 2 && self.accelerated().is_some() {
                let c = self.power(&self.conjugates[j][i], e as i64, b)?;
                self.mul_vec(v, &c, b)?;
            } else {
                for _ in 0..e {
                    self.mul_vec(v, &self.conjugates[j][i], b)?;
                }
            }
        }
        Ok(())
    }

    /// `v <- v * g_j^e` for `0 <= e < o_j`.
    fn mul_gen_pow(&self, v: &mut [u64], j: usize, e: u64, b: &mut Budget) -> Result<(), CollectError> {
        if e == 0 {
            return Ok(());
        }
        if v[j + 1..].iter().all(|&x| x == 0) {
            b.tick()?;
            let sum = v[j] + e;
            if sum >= self.orders[j] {
                v[j] = sum - self.orders[j];
                self.mul_vec(v, &self.powers[j], b)?;
            } else {
                v[j] = sum;
            }
            return Ok(());
        }
        if let Some(fast) = self.accelerated().filter(|_| e > 1) {
            // v g_j^e = (prefix) g_j^(v_j + e) tail^(g_j^e)
            let mut tail = vec![0; v.len()];
            tail[j + 1..].copy_from_slice(&v[j + 1..]);
            let tail = fast.conjugate_tail(self, j, ExponentVector(tail), e, b)?;
            v[j + 1..].iter_mut().for_each(|x| *x = 0);
            let sum = v[j] + e;
            if sum >= self.orders[j] {
                v[j] = sum - self.orders[j];
                self.mul_vec(v, &self.powers[j], b)?;
            } else {
                v[j] = sum;
            }
            return self.mul_vec(v, &tail, b);
        }
        for _ in 0..e {
            self.mul_gen(v, j, b)?;
        }
        Ok(())
    }

    fn accelerated(&self) -> Option<&ConjugationPowers> {
        self.fast.get().and_then(Option::as_ref)
    }

    /// Image of `t`, an element of the subgroup generated by `g_(i+1), ...`,
    /// under the conjugation map `levels` describes.
    fn apply_conjugation(&self, i: usize, level: &[ExponentVector], t: &ExponentVector, b: &mut Budget) -> Result<ExponentVector, CollectError> {
        let mut out = vec![0; self.len()];
        for (k, &e) in t.0.iter().enumerate().skip(i + 1) {
            if e != 0 {
                let img = self.power(&level[k - i - 1], e as i64, b)?;
                self.mul_vec(&mut out, &img, b)?;
            }
        }
        Ok(ExponentVector(out))
    }

    fn build_conjugation_powers(&self) -> Result<ConjugationPowers, CollectError> {
        let m = self.len();
        let p = self.presentation.prime;
        let mut levels = Vec::with_capacity(m);
        let mut period = Vec::with_capacity(m);
        for i in 0..m {
            let mut b = Budget::new(self.step_budget);
            let mut these: Vec<Vec<ExponentVector>> = Vec::new();
            let mut current: Vec<ExponentVector> = (i + 1..m).map(|j| self.conjugates[j][i].clone()).collect();
            let mut found = None;
            let mut reach = 1u64;
            loop {
                if current.iter().enumerate().all(|(k, c)| *c == ExponentVector::unit(m, i + 1 + k)) {
                    found = Some(reach);
                    break;
                }
                these.push(current.clone());
                match reach.checked_mul(p) {
                    Some(r) if r < self.orders[i] => reach = r,
                    _ => break,
                }
                let mut next = Vec::with_capacity(current.len());
                for k in 0..current.len() {
                    let mut x = ExponentVector::unit(m, i + 1 + k);
                    for _ in 0..p {
                        x = self.apply_conjugation(i, &current, &x, &mut b)?;
                    }
                    next.push(x);
                }
                current = next;
            }
            levels.push(these);
            period.push(found);
        }
        Ok(ConjugationPowers { levels, period })
    }

    fn mul_vec(&self, v: &mut [u64], w: &ExponentVector, b: &mut Budget) -> Result<(), CollectError> {
        for (k, &e) in w.0.iter().enumerate() {
            self.mul_gen_pow(v, k, e, b)?;
        }
        Ok(())
    }

    fn inverse(&self, u: &ExponentVector, b: &mut Budget) -> Result<ExponentVector, CollectError> {
        let mut x = u.0.clone();
        let mut result = vec![0; self.len()];
        for i in 0..self.len() {
            if x[i] != 0 {
                let e = self.orders[i] - x[i];
                self.mul_gen_pow(&mut x, i, e, b)?;
                self.mul_gen_pow(&mut result, i, e, b)?;
            }
        }
        Ok(ExponentVector(result))
    }

    fn power(&self, u: &ExponentVector, k: i64, b: &mut Budget) -> Result<ExponentVector, CollectError> {
        let base = if k < 0 { self.inverse(u, b)? } else { u.clone() };
        let mut k = k.unsigned_abs();
        let mut acc = vec![0; self.len()];
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                self.mul_vec(&mut acc, &sq, b)?;
            }
            k >>= 1;
            if k > 0 {
                let mut next = sq.0.clone();
                self.mul_vec(&mut next, &sq, b)?;
                sq = ExponentVector(next);
            }
        }
        Ok(ExponentVector(acc))
    }

    fn eval_word(&self, word: &[(usize, i64)], b: &mut Budget) -> Result<ExponentVector, CollectError> {
        let mut v = vec![0; self.len()];
        for &(g, e) in word {
            if g >= self.len() {
                return Err(CollectError::UnknownGenerator(g));
            }
            let factor = self.power(&ExponentVector::unit(self.len(), g), e, b)?;
            self.mul_vec(&mut v, &factor, b)?;
        }
        Ok(ExponentVector(v))
    }
}

impl PcGroup {
    pub fn new(presentation: PcPresentation) -> Result<Self, GroupError> {
        Self::with_step_budget(presentation, DEFAULT_STEP_BUDGET)
    }

    pub fn with_step_budget(presentation: PcPresentation, step_budget: u64) -> Result<Self, GroupError> {
        let diags = validate_structure(&presentation);
        if diags.iter().any(Diagnostic::is_error) {
            return Err(GroupError::Invalid(diags));
        }
        let m = presentation.generator_count();
        let mut tables = Tables {
            orders: presentation.relative_orders.clone(),
            powers: vec![ExponentVector::identity(m); m],
            conjugates: (0..m).map(|j| vec![ExponentVector::unit(m, j); j]).collect(),
            commutes: (0..m).map(|j| vec![true; j]).collect(),
            presentation,
            step_budget,
            consistency: OnceLock::new(),
            fast: OnceLock::new(),
        };
        for i in (0..m).rev() {
            let mut b = Budget::new(step_budget);
            let power = tables.eval_word(tables.presentation.power_relation(i).factors(), &mut b)?;
            tables.powers[i] = power;
            for j in i + 1..m {
                let Some(comm) = tables.presentation.commutator_relation(j, i) else { continue };
                let mut word = vec![(j, 1)];
                word.extend_from_slice(comm.factors());
                let conj = tables.eval_word(&word, &mut b)?;
                tables.commutes[j][i] = conj == ExponentVector::unit(m, j);
                tables.conjugates[j][i] = conj;
            }
        }
        Ok(PcGroup { inner: Arc::new(tables) })
    }

    pub fn presentation(&self) -> &PcPresentation {
        &self.inner.presentation
    }

    pub fn prime(&self) -> u64 {
        self.inner.presentation.prime
    }

    pub fn generator_count(&self) -> usize {
        self.inner.len()
    }

    pub fn relative_orders(&self) -> &[u64] {
        &self.inner.orders
    }

    pub fn identity(&self) -> ExponentVector {
        ExponentVector::identity(self.generator_count())
    }

    pub fn generator(&self, i: usize) -> ExponentVector {
        ExponentVector::unit(self.generator_count(), i)
    }

    pub fn generators(&self) -> Vec<ExponentVector> {
        (0..self.generator_count()).map(|i| self.generator(i)).collect()
    }

    /// Looks up a generator by name.
    pub fn named(&self, name: &str) -> Option<ExponentVector> {
        self.inner.presentation.index_of(name).map(|i| self.generator(i))
    }

    /// Builds an element from raw exponents, reducing each modulo its
    /// relative order.
    pub fn element(&self, exponents: &[u64]) -> Result<ExponentVector, CollectError> {
        self.check_len(exponents.len())?;
        Ok(ExponentVector(exponents.iter().zip(&self.inner.orders).map(|(e, o)| e % o).collect()))
    }

    fn check_len(&self, got: usize) -> Result<(), CollectError> {
        if got != self.generator_count() {
            return Err(CollectError::LengthMismatch { expected: self.generator_count(), got });
        }
        Ok(())
    }

    fn budget(&self) -> Budget {
        let t = &self.inner;
        if t.fast.get().is_none() && self.check_consistency().consistent {
            t.fast.get_or_init(|| t.build_conjugation_powers().ok());
        }
        Budget::new(t.step_budget)
    }

    /// Normal form of a word of `(generator, exponent)` factors. Negative
    /// exponents go through the inverse of the generator.
    pub fn normalize(&self, word: &[(usize, i64)]) -> Result<ExponentVector, CollectError> {
        self.inner.eval_word(word, &mut self.budget())
    }

    pub fn evaluate(&self, word: &Word) -> Result<ExponentVector, CollectError> {
        self.normalize(word.factors())
    }

    pub fn multiply(&self, u: &ExponentVector, v: &ExponentVector) -> Result<ExponentVector, CollectError> {
        self.check_len(u.len())?;
        self.check_len(v.len())?;
        let mut out = u.0.clone();
        self.inner.mul_vec(&mut out, v, &mut self.budget())?;
        Ok(ExponentVector(out))
    }

    /// Left-to-right product of the factors.
    pub fn product<'a>(&self, factors: impl IntoIterator<Item = &'a ExponentVector>) -> Result<ExponentVector, CollectError> {
        let mut b = self.budget();
        let mut out = vec![0; self.generator_count()];
        for f in factors {
            self.check_len(f.len())?;
            self.inner.mul_vec(&mut out, f, &mut b)?;
        }
        Ok(ExponentVector(out))
    }

    pub fn inverse(&self, u: &ExponentVector) -> Result<ExponentVector, CollectError> {
        self.check_len(u.len())?;
        self.inner.inverse(u, &mut self.budget())
    }

    pub fn power(&self, u: &ExponentVector, k: i64) -> Result<ExponentVector, CollectError> {
        self.check_len(u.len())?;
        self.inner.power(u, k, &mut self.budget())
    }

    /// `[u, v] = u^-1 v^-1 u v`, computed as `(vu)^-1 (uv)`.
    pub fn commutator(&self, u: &ExponentVector, v: &ExponentVector) -> Result<ExponentVector, CollectError> {
        self.check_len(u.len())?;
        self.check_len(v.len())?;
        let t = &self.inner;
        let mut b = self.budget();
        let mut uv = u.0.clone();
        t.mul_vec(&mut uv, v, &mut b)?;
        let mut vu = v.0.clone();
        t.mul_vec(&mut vu, u, &mut b)?;
        let mut out = t.inverse(&ExponentVector(vu), &mut b)?.0;
        t.mul_vec(&mut out, &ExponentVector(uv), &mut b)?;
        Ok(ExponentVector(out))
    }

    /// `[x_1, ..., x_k] = [[...[x_1, x_2], ...], x_k]`.
    ///
    /// # Panics
    /// If fewer than two elements are given.
    pub fn left_normed_commutator(&self, xs: &[ExponentVector]) -> Result<ExponentVector, CollectError> {
        assert!(xs.len() >= 2, "left-normed commutator needs at least two entries");
        let mut acc = self.commutator(&xs[0], &xs[1])?;
        for x in &xs[2..] {
            acc = self.commutator(&acc, x)?;
        }
        Ok(acc)
    }

    /// `u^by = by^-1 u by`.
    pub fn conjugate(&self, u: &ExponentVector, by: &ExponentVector) -> Result<ExponentVector, CollectError> {
        let inv = self.inverse(by)?;
        self.product([&inv, u, by])
    }

    /// Runs the overlap tests once and caches the result.
    pub fn check_consistency(&self) -> &ConsistencyReport {
        self.inner.consistency.get_or_init(|| self.compute_consistency())
    }

    fn compute_consistency(&self) -> ConsistencyReport {
        let m = self.generator_count();
        let t = &self.inner;
        let g = |i| self.generator(i);
        let gp = |i: usize, e: u64| ExponentVector({
            let mut v = vec![0; m];
            v[i] = e;
            v
        });
        let mut failures = Vec::new();
        let mut checked = 0;
        let mut run = |kind, gens: Vec<(usize, u64)>, left: &dyn Fn() -> Result<ExponentVector, CollectError>, right: &dyn Fn() -> Result<ExponentVector, CollectError>| {
            checked += 1;
            let (l, r) = (left().ok(), right().ok());
            if l.is_none() || r.is_none() || l != r {
                failures.push(ConsistencyFailure { kind, generators: gens, left: l, right: r });
            }
        };
        // plain collection only: the accelerated path assumes consistency
        let mul = |u: &ExponentVector, v: &ExponentVector| {
            let mut out = u.0.clone();
            t.mul_vec(&mut out, v, &mut Budget::new(t.step_budget))?;
            Ok::<_, CollectError>(ExponentVector(out))
        };

        for k in 0..m {
            for j in 0..k {
                for i in 0..j {
                    run(
                        OverlapKind::TripleOverlap,
                        vec![(k, 1), (j, 1), (i, 1)],
                        &|| mul(&mul(&g(k), &g(j))?, &g(i)),
                        &|| mul(&g(k), &mul(&g(j), &g(i))?),
                    );
                }
            }
        }
        for j in 0..m {
            let oj = t.orders[j];
            for i in 0..j {
                let oi = t.orders[i];
                run(
                    OverlapKind::PowerOverlap,
                    vec![(j, oj), (i, 1)],
                    &|| mul(&t.powers[j], &g(i)),
                    &|| mul(&gp(j, oj - 1), &mul(&g(j), &g(i))?),
                );
                run(
                    OverlapKind::PowerOverlap,
                    vec![(j, 1), (i, oi)],
                    &|| mul(&g(j), &t.powers[i]),
                    &|| mul(&mul(&g(j), &g(i))?, &gp(i, oi - 1)),
                );
            }
            run(
                OverlapKind::PowerOverlap,
                vec![(j, oj + 1)],
                &|| mul(&t.powers[j], &g(j)),
                &|| mul(&g(j), &t.powers[j]),
            );
        }
        ConsistencyReport { consistent: failures.is_empty(), overlaps_checked: checked, failures }
    }

    /// Product of the relative orders; refused when the presentation is
    /// inconsistent, since the product is then only an upper bound.
    pub fn group_order(&self) -> Result<u128, GroupError> {
        let report = self.check_consistency();
        if !report.consistent {
            return Err(GroupError::Inconsistent(report.failures.len()));
        }
        Ok(self.inner.presentation.order_bound().expect("validated"))
    }

    /// Uniformly random element: each exponent drawn independently.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> ExponentVector {
        ExponentVector(self.inner.orders.iter().map(|&o| rng.gen_range(0..o)).collect())
    }

    /// Renders an element as a word in the generator names, `1` for identity.
    pub fn format_element(&self, v: &ExponentVector) -> String {
        let names = &self.inner.presentation.generators;
        let parts: Vec<String> = v
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != 0)
            .map(|(i, &e)| if e == 1 { names[i].clone() } else { format!("{}^{e}", names[i]) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" ")
        }
    }
}
