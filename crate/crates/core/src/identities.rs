//! Randomized checks of commutator identities and structure statements on a
//! concrete group.
//!
//! Every check samples tuples that satisfy its hypotheses, evaluates both
//! sides in normal form and records a witness for each disagreement. A check
//! whose hypotheses cannot be met is reported as skipped, never as passed.
//! Each check draws from its own generator seeded by `(seed, catalog index)`,
//! so a report depends only on the group, the seed and the trial counts.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::collector::{CollectError, ExponentVector, GroupError, PcGroup};
use crate::series::{
    close_subgroup, commutator_layers, derived_subgroup, is_metabelian, lower_central_series,
    CentralSeries, Subgroup,
};
use crate::subgroups::{frattini_basis, frattini_subgroup, verify_pn, PnVerdict};

/// Witnesses kept per check; the failure count is not capped.
const MAX_WITNESSES: usize = 16;
/// Sampling attempts allowed per requested trial before giving up.
const ATTEMPTS_PER_TRIAL: usize = 20;
/// Longest tail `z_1 .. z_s` examined by the vanishing check.
const VANISHING_MAX_TAIL: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdentityId {
    BasicExpansions,
    Multilinearity,
    MetabelianCriterion,
    MetabelianExpansion,
    ClassBound,
    Vanishing,
    SwapModK5,
    PowerExpansion,
    K6Structure,
    K5Structure,
    PthPowerDepth,
    HallWitt,
    Eq7Symmetry,
}

/// All checks, in report order.
pub const CATALOG: [IdentityId; 13] = [
    IdentityId::BasicExpansions,
    IdentityId::Multilinearity,
    IdentityId::MetabelianCriterion,
    IdentityId::MetabelianExpansion,
    IdentityId::ClassBound,
    IdentityId::Vanishing,
    IdentityId::SwapModK5,
    IdentityId::PowerExpansion,
    IdentityId::K6Structure,
    IdentityId::K5Structure,
    IdentityId::PthPowerDepth,
    IdentityId::HallWitt,
    IdentityId::Eq7Symmetry,
];

impl IdentityId {
    pub fn name(self) -> &'static str {
        match self {
            IdentityId::BasicExpansions => "basic_expansions",
            IdentityId::Multilinearity => "multilinearity",
            IdentityId::MetabelianCriterion => "metabelian_criterion",
            IdentityId::MetabelianExpansion => "metabelian_expansion",
            IdentityId::ClassBound => "class_bound",
            IdentityId::Vanishing => "vanishing",
            IdentityId::SwapModK5 => "swap_mod_K5",
            IdentityId::PowerExpansion => "power_expansion",
            IdentityId::K6Structure => "K6_structure",
            IdentityId::K5Structure => "K5_structure",
            IdentityId::PthPowerDepth => "pth_power_depth",
            IdentityId::HallWitt => "hall_witt",
            IdentityId::Eq7Symmetry => "eq7_symmetry",
        }
    }

    pub fn hypotheses(self) -> &'static str {
        match self {
            IdentityId::BasicExpansions | IdentityId::HallWitt => "any group",
            IdentityId::Multilinearity => "any group; congruence mod K_{n+1}, n in {2,3,4}",
            IdentityId::MetabelianCriterion => "<x,y> with K_5(<x,y>) = 1",
            IdentityId::MetabelianExpansion => "a, b in a metabelian group, c in its derived subgroup",
            IdentityId::ClassBound => "G in P_n",
            IdentityId::Vanishing => "G in P_n",
            IdentityId::SwapModK5 => "d(G) = 2",
            IdentityId::PowerExpansion => "G in P_3, <x,y> proper",
            IdentityId::K6Structure => "G in P_3, G = <a,b>",
            IdentityId::K5Structure => "G in P_3, G = <a,b>, p >= 3",
            IdentityId::PthPowerDepth => "G in P_3, d(G) = 2, p >= 3",
            IdentityId::Eq7Symmetry => "G in P_3, G = <a,b>",
        }
    }

    /// Default trial count: checks whose hypotheses need a subgroup closure
    /// per sample run fewer trials.
    pub fn default_trials(self) -> usize {
        match self {
            IdentityId::MetabelianCriterion
            | IdentityId::MetabelianExpansion
            | IdentityId::PowerExpansion
            | IdentityId::K6Structure
            | IdentityId::K5Structure
            | IdentityId::Eq7Symmetry => 100,
            _ => 1000,
        }
    }

    fn catalog_index(self) -> u64 {
        CATALOG.iter().position(|&c| c == self).unwrap() as u64
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown identity {0:?}")]
pub struct UnknownIdentity(pub String);

impl FromStr for IdentityId {
    type Err = UnknownIdentity;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CATALOG
            .iter()
            .copied()
            .find(|id| id.name() == s)
            .ok_or_else(|| UnknownIdentity(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Skip => "skip",
        })
    }
}

/// How the two sides of a failed assertion were compared.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Relation {
    Equal,
    /// Congruence modulo `K_n(G)`.
    CongruentModK(usize),
    /// A structural statement (subgroup equality, order bound) checked on the
    /// sampled elements; `lhs`/`rhs` hold the relevant generator.
    Structure,
}

/// A reproducible failure: the sampled inputs and both sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub assertion: String,
    pub inputs: Vec<(String, ExponentVector)>,
    pub relation: Relation,
    pub lhs: ExponentVector,
    pub rhs: ExponentVector,
}

impl Witness {
    pub fn render(&self, group: &PcGroup) -> String {
        let inputs: Vec<String> = self
            .inputs
            .iter()
            .map(|(name, v)| format!("{name}={}", v))
            .collect();
        let rel = match self.relation {
            Relation::Equal => "!=".to_string(),
            Relation::CongruentModK(k) => format!("!= mod K{k}"),
            Relation::Structure => "violates".to_string(),
        };
        format!(
            "{} | {} | lhs={} {rel} rhs={}",
            self.assertion,
            inputs.join(" "),
            group.format_element(&self.lhs),
            group.format_element(&self.rhs)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: String,
    pub hypotheses: String,
    pub status: CheckStatus,
    /// Trials executed with hypotheses satisfied.
    pub trials: usize,
    pub failures: usize,
    pub witnesses: Vec<Witness>,
    pub note: Option<String>,
}

impl IdentityCheck {
    fn skipped(name: &str, hypotheses: &str, note: impl Into<String>) -> Self {
        IdentityCheck {
            name: name.to_string(),
            hypotheses: hypotheses.to_string(),
            status: CheckStatus::Skip,
            trials: 0,
            failures: 0,
            witnesses: Vec::new(),
            note: Some(note.into()),
        }
    }

    pub fn line(&self) -> String {
        format!("check {} {} trials={} failures={}", self.name, self.status, self.trials, self.failures)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub group_id: String,
    pub seed: u64,
    pub checks: Vec<IdentityCheck>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub pass: usize,
    pub skip: usize,
    pub fail: usize,
}

impl VerificationReport {
    pub fn tally(&self) -> Tally {
        let mut t = Tally::default();
        for c in &self.checks {
            match c.status {
                CheckStatus::Pass => t.pass += 1,
                CheckStatus::Skip => t.skip += 1,
                CheckStatus::Fail => t.fail += 1,
            }
        }
        t
    }

    pub fn passed(&self) -> bool {
        self.tally().fail == 0
    }

    /// One `check` line per check, followed by its witnesses.
    pub fn render_lines(&self, group: &PcGroup) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&c.line());
            out.push('\n');
            for w in &c.witnesses {
                out.push_str(&format!("witness {} {}\n", c.name, w.render(group)));
            }
        }
        out
    }

    pub fn render_text(&self, group: &PcGroup) -> String {
        let mut out = format!("identity checks on {} (seed {})\n", self.group_id, self.seed);
        for c in &self.checks {
            out.push_str(&format!(
                "  {:<22} {:<4} trials={:<5} failures={:<3} [{}]",
                c.name, c.status, c.trials, c.failures, c.hypotheses
            ));
            if let Some(note) = &c.note {
                out.push_str(&format!(" ({note})"));
            }
            out.push('\n');
            for w in &c.witnesses {
                out.push_str(&format!("    witness: {}\n", w.render(group)));
            }
        }
        let t = self.tally();
        out.push_str(&format!("  total: {} pass, {} skip, {} fail\n", t.pass, t.skip, t.fail));
        out
    }
}

/// Group-level data shared by all checks.
pub struct GroupContext {
    group: PcGroup,
    order: u128,
    series: CentralSeries,
    frattini: Subgroup,
    d: usize,
    pn: PnVerdict,
    /// Generating pair from the Frattini basis when `d(G) = 2`.
    pair: Option<(ExponentVector, ExponentVector)>,
    metabelian: bool,
    derived: Subgroup,
}

impl GroupContext {
    pub fn new(group: &PcGroup) -> Result<Self, GroupError> {
        let order = group.group_order()?;
        let gens = group.generators();
        let series = lower_central_series(group, &gens)?;
        let frattini = frattini_subgroup(group)?;
        let basis = frattini_basis(group, &frattini)?;
        let pn = verify_pn(group, 1)?;
        let pair = (basis.len() == 2).then(|| (basis[0].clone(), basis[1].clone()));
        let derived = derived_subgroup(group, &gens)?;
        Ok(GroupContext {
            group: group.clone(),
            order,
            d: basis.len(),
            series,
            frattini,
            pn,
            pair,
            metabelian: is_metabelian(group, &gens)?,
            derived,
        })
    }

    pub fn group(&self) -> &PcGroup {
        &self.group
    }

    pub fn group_class(&self) -> usize {
        self.series.class()
    }

    pub fn series(&self) -> &CentralSeries {
        &self.series
    }

    pub fn minimal_generators(&self) -> usize {
        self.d
    }

    pub fn pn_verdict(&self, n: usize) -> PnVerdict {
        self.pn.for_n(n)
    }

    /// All `n` with `G` in `P_n`.
    pub fn member_ns(&self) -> Vec<usize> {
        (1..self.group_class()).filter(|&n| self.pn.for_n(n).member).collect()
    }

    fn in_p3(&self) -> bool {
        self.pn.for_n(3).member
    }

    fn k(&self, n: usize) -> &Subgroup {
        self.series.term(n)
    }

    fn generates(&self, a: &ExponentVector, b: &ExponentVector) -> Result<bool, CollectError> {
        let mut gens = self.frattini.induced_sequence().to_vec();
        gens.push(a.clone());
        gens.push(b.clone());
        Ok(close_subgroup(&self.group, &gens)?.order() == self.order)
    }
}

fn binomial(n: u64, k: u64) -> i64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

/// Collects assertion outcomes for one check.
struct Recorder<'c> {
    ctx: &'c GroupContext,
    failures: usize,
    witnesses: Vec<Witness>,
}

type Inputs<'a> = &'a [(&'a str, &'a ExponentVector)];

impl<'c> Recorder<'c> {
    fn new(ctx: &'c GroupContext) -> Self {
        Recorder { ctx, failures: 0, witnesses: Vec::new() }
    }

    fn fail(&mut self, assertion: &str, inputs: Inputs, relation: Relation, lhs: ExponentVector, rhs: ExponentVector) {
        self.failures += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(Witness {
                assertion: assertion.to_string(),
                inputs: inputs.iter().map(|(n, v)| (n.to_string(), (*v).clone())).collect(),
                relation,
                lhs,
                rhs,
            });
        }
    }

    fn equal(&mut self, assertion: &str, inputs: Inputs, lhs: ExponentVector, rhs: ExponentVector) {
        if lhs != rhs {
            self.fail(assertion, inputs, Relation::Equal, lhs, rhs);
        }
    }

    /// `lhs = rhs` modulo `K_k(G)`.
    fn congruent(&mut self, assertion: &str, inputs: Inputs, lhs: ExponentVector, rhs: ExponentVector, k: usize) -> Result<(), CollectError> {
        let g = &self.ctx.group;
        let quotient = g.multiply(&lhs, &g.inverse(&rhs)?)?;
        if !self.ctx.k(k).contains(&quotient)? {
            self.fail(assertion, inputs, Relation::CongruentModK(k), lhs, rhs);
        }
        Ok(())
    }

    fn holds(&mut self, assertion: &str, inputs: Inputs, ok: bool, lhs: ExponentVector, rhs: ExponentVector) {
        if !ok {
            self.fail(assertion, inputs, Relation::Structure, lhs, rhs);
        }
    }

    fn finish(self, id: IdentityId, trials: usize, note: Option<String>) -> IdentityCheck {
        let status = if trials == 0 {
            CheckStatus::Skip
        } else if self.failures > 0 {
            CheckStatus::Fail
        } else {
            CheckStatus::Pass
        };
        let note = note.or_else(|| (trials == 0).then(|| "hypotheses not met by any sample".to_string()));
        IdentityCheck {
            name: id.name().to_string(),
            hypotheses: id.hypotheses().to_string(),
            status,
            trials,
            failures: self.failures,
            witnesses: self.witnesses,
            note,
        }
    }
}

/// Shorthand for group arithmetic inside the checks.
struct Ops<'g>(&'g PcGroup);

impl Ops<'_> {
    fn comm(&self, xs: &[&ExponentVector]) -> Result<ExponentVector, CollectError> {
        let owned: Vec<ExponentVector> = xs.iter().map(|x| (*x).clone()).collect();
        self.0.left_normed_commutator(&owned)
    }

    fn mul(&self, xs: &[&ExponentVector]) -> Result<ExponentVector, CollectError> {
        self.0.product(xs.iter().copied())
    }

    fn pow(&self, x: &ExponentVector, k: i64) -> Result<ExponentVector, CollectError> {
        self.0.power(x, k)
    }

    fn inv(&self, x: &ExponentVector) -> Result<ExponentVector, CollectError> {
        self.0.inverse(x)
    }

    fn conj(&self, x: &ExponentVector, by: &ExponentVector) -> Result<ExponentVector, CollectError> {
        self.0.conjugate(x, by)
    }

    fn one(&self) -> ExponentVector {
        self.0.identity()
    }
}

fn rng_for(seed: u64, id: IdentityId) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (id.catalog_index() + 1))
}

/// Runs the requested checks in catalog order. `trials = None` uses each
/// check's default.
pub fn run_identity_suite(
    group: &PcGroup,
    group_id: &str,
    ids: &[IdentityId],
    trials: Option<usize>,
    seed: u64,
) -> Result<VerificationReport, GroupError> {
    let ctx = GroupContext::new(group)?;
    run_with_context(&ctx, group_id, ids, trials, seed)
}

pub fn run_with_context(
    ctx: &GroupContext,
    group_id: &str,
    ids: &[IdentityId],
    trials: Option<usize>,
    seed: u64,
) -> Result<VerificationReport, GroupError> {
    let mut ids: Vec<IdentityId> = ids.to_vec();
    ids.sort();
    ids.dedup();
    let checks = ids
        .par_iter()
        .map(|&id| {
            let target = trials.unwrap_or_else(|| id.default_trials()).max(1);
            run_check(ctx, id, target, &mut rng_for(seed, id))
        })
        .collect::<Result<Vec<_>, CollectError>>()?;
    Ok(VerificationReport { group_id: group_id.to_string(), seed, checks })
}

fn run_check(ctx: &GroupContext, id: IdentityId, target: usize, rng: &mut ChaCha8Rng) -> Result<IdentityCheck, CollectError> {
    match id {
        IdentityId::BasicExpansions => basic_expansions(ctx, target, rng),
        IdentityId::Multilinearity => multilinearity(ctx, target, rng),
        IdentityId::MetabelianCriterion => metabelian_criterion(ctx, target, rng),
        IdentityId::MetabelianExpansion => metabelian_expansion(ctx, target, rng),
        IdentityId::ClassBound => Ok(class_bound(ctx)),
        IdentityId::Vanishing => vanishing(ctx, target, rng),
        IdentityId::SwapModK5 => swap_mod_k5(ctx, target, rng),
        IdentityId::PowerExpansion => power_expansion(ctx, target, rng),
        IdentityId::K6Structure => k6_structure(ctx, target, rng),
        IdentityId::K5Structure => k5_structure(ctx, target, rng),
        IdentityId::PthPowerDepth => pth_power_depth(ctx, target, rng),
        IdentityId::HallWitt => hall_witt(ctx, target, rng),
        IdentityId::Eq7Symmetry => eq7_symmetry(ctx, target, rng),
    }
}

fn skip(id: IdentityId, note: impl Into<String>) -> IdentityCheck {
    IdentityCheck::skipped(id.name(), id.hypotheses(), note)
}

fn basic_expansions(ctx: &GroupContext, target: usize, rng: &mut ChaCha8Rng) -> Result<IdentityCheck, CollectError> {
    let g = &ctx.group;
    let o = Ops(g);
    let mut rec = Recorder::new(ctx);
    for _ in 0..target {
        let [x, y, z] = [(); 3].map(|_| g.random_element(rng));
        let inputs: Inputs = &[("x", &x), ("y", &y), ("z", &z)];
        let yz = o.mul(&[&y, &z])?;
        let xy = o.mul(&[&x, &y])?;
        let xy_z = o.comm(&[&x, &y, &z])?;
        rec.equal(
            "[x,yz] = [x,z][x,y][x,y,z]",
            inputs,
            o.comm(&[&x, &yz])?,
            o.mul(&[&o.comm(&[&x, &z])?, &o.comm(&[&x, &y])?, &xy_z])?,
        );
        rec.equal(
            "[xy,z] = [x,z][x,z,y][y,z]",
            inputs,
            o.comm(&[&xy, &z])?,
            o.mul(&[&o.comm(&[&x, &z])?, &o.comm(&[&x, &z, &y])?, &o.comm(&[&y, &z])?])?,
        );
        let xy_c = o.comm(&[&x, &y])?;
        let yx = o.comm(&[&y, &x])?;
        rec.equal("[x,y]^-1 = [y,x]", inputs, o.inv(&xy_c)?, yx.clone());
        rec.equal("[y,x] = [x,y^-1]^y", inputs, yx.clone(), o.conj(&o.comm(&[&x, &o.inv(&y)?])?, &y)?);
        rec.equal("[y,x] = [x^-1,y]^x", inputs, yx, o.conj(&o.comm(&[&o.inv(&x)?, &y])?, &x)?);
    }
    Ok(rec.finish(IdentityId::BasicExpansions, target, None))
}

fn multilinearity(ctx: &GroupContext, target: usize, rng: &mut ChaCha8Rng) -> Result<IdentityCheck, CollectError> {
    let g = &ctx.group;
    let o = Ops(g);
    let mut rec = Recorder::new(ctx);
    let bound = (g.prime() * g.prime()) as i64;
    for trial in 0..target {
        let n = 2 + trial % 3;
        let a: Vec<ExponentVector> = (0..n).map(|_| g.random_element(rng)).collect();
        let b = g.random_element(rng);
        let pos = rng.gen_range(0..n);
        let names = ["a1", "a2", "a3", "a4"];
        let mut inputs: Vec<(&str, &ExponentVector)> = names.iter().copied().zip(a.iter()).collect();
        inputs.push(("b", &b));

        let refs: Vec<&ExponentVector> = a.iter().collect();
        let base = o.comm(&refs)?;
        let ab = o.mul(&[&a[pos], &b])?;
        let mut with_product = refs.clone();
        with_product[pos] = &ab;
        let mut with_b = refs.clone();
        with_b[pos] = &b;
        rec.congruent(
            "[..,a_i b_i,..] = [..,a_i,..][..,b_i,..] mod K_{n+1}",
            &inputs,
            o.comm(&with_product)?,
            o.mul(&[&base, &o.comm(&with_b)?])?,
            n + 1,
        )?;

        let exps: Vec<i64> = (0..n).map(|_| rng.gen_range(-bound..=bound)).collect();
        let powered: Vec<ExponentVector> = a.iter().zip(&exps).map(|(x, &e)| o.pow(x, e)).collect::<Result<_, _>>()?;
        let powered_refs: Vec<&ExponentVector> = powered.iter().collect();
        let product: i64 = exps.iter().product();
        rec.congruent(
            &format!("[a_1^i_1,..] = [a_1,..]^(i_1..i_n) mod K_{{n+1}}, i = {exps:?}"),
            &inputs,
            o.comm(&powered_refs)?,
            o.pow(&base, product)?,
            n + 1,
        )?;
    }
    Ok(rec.finish(IdentityId::Multilinearity, target, None))
}

fn metabelian_criterion(ctx: &GroupContext, target: usize, rng: &mut ChaCha8Rng) -> Result<IdentityCheck, CollectError> {
    let g = &ctx.group;
    let mut rec = Recorder::new(ctx);
    let mut trials = 0;
    for _ in 0..target * ATTEMPTS_PER_TRIAL {
        if trials == target {
            break;
        }
        let (x, y) = (g.random_element(rng), g.random_element(rng));
        let gens = [x.clone(), y.clone()];
        if commutator_layers(g, &gens)?.len() >= 5 {
            continue;
        }
        trials += 1;
        let derived = derived_subgroup(g, &gens)?;
        let second = derived_subgroup(g, derived.induced_sequence())?;
        let witness = second.induced_sequence().first().cloned().unwrap_or_else(|| g.identity());
        rec.holds("K_5(<x,y>) = 1 implies <x,y>'' = 1", &[("x", &x), ("y", &y)], second.is_trivial(), witness, g.identity());
    }
    Ok(rec.finish(IdentityId::MetabelianCriterion, trials, None))
}

/// `[ia, jb]` for `1 <= i <= m`, `1 <= j <= n`, stored at `[i-1][j-1]`.
fn bracket_table(o: &Ops, a: &ExponentVector, b: &ExponentVector, m: usize, n: usize) -> Result<Vec<Vec<ExponentVector>>, CollectError> {
    let mut rows = Vec::with_capacity(m);
    let mut head = o.comm(&[a, b])?;
    for _ in 0..m {
        let mut row = Vec::with_capacity(n);
        let mut cur = head.clone();
        for _ in 0..n {
            row.push(cur.clone());
            cur = o.comm(&[&cur, b])?;
        }
        rows.push(row);
        head = o.comm(&[&head, a])?;
    }
    Ok(rows)
}

fn metabelian_expansion(ctx: &GroupContext, target: usize, rng: &mut ChaCha8Rng) -> Result<IdentityCheck, CollectError> {
    let g = &ctx.group;
    let o = Ops(g);
    let mut rec = Recorder::new(ctx);
    let bound = g.prime() * g.prime();
    let mut trials = 0;
    for _ in 0..target * ATTEMPTS_PER_TRIAL {
        if trials == target {
            break;
        }
        let (a, b) = (g.random_element(rng), g.random_element(rng));
        let c = if ctx.metabelian {
            ctx.derived.random_element(rng)?
        } else {
            let gens = [a.clone(), b.clone()];
            if !is_metabelian(g, &gens)? {
                continue;
            }
            derived_subgroup(g, &gens)?.random_element(rng)?
        };
        trials += 1;
        let m = rng.gen_range(1..=bound) as usize;
        let n = rng.gen_range(1..=bound) as usize;
        let table = bracket_table(&o, &a, &b, m, n)?;
        let mut rhs = o.one();
        for i in 1..=m {
            for j in 1..=n {
                let e = binomial(m as u64, i as u64) * binomial(n as u64, j as u64);
                rhs = o.mul(&[&rhs, &o.pow(&table[i - 1][j - 1], e)?])?;
            }
        }
        let inputs: Inputs = &[("a", &a), ("b", &b), ("c", &c)];
        let lhs = o.comm(&[&o.pow(&a, m as i64)?, &o.pow(&b, n as i64)?])?;
        rec.equal(&format!("[a^m,b^n] = prod [ia,jb]^(C(m,i)C(n,j)), m={m} n={n}"), inputs, lhs, rhs);
        rec.equal("[c,a,b] = [c,b,a]", inputs, o.comm(&[&c, &a, &b])?, o.comm(&[&c, &b, &a])?);
    }
    Ok(rec.finish(IdentityId::MetabelianExpansion, trials, None))
}

fn class_bound(ctx: &GroupContext) -> IdentityCheck {
    let id = IdentityId::ClassBound;
    let ns = ctx.member_ns();
    if ns.is_empty() {
        return skip(id, "G is in no P_n");
    }
    let mut rec = Recorder::new(ctx);
    let (c, d) = (ctx.group_class(), ctx.d);
    for &n in &ns {
        // c <= d n / (d - 1)
        let ok = d >= 2 && c * (d - 1) <= d * n;
        let g = &ctx.group;
        rec.holds(&format!("c(G) = {c} <= {d}*{n}/({d}-1)"), &[], ok, g.identity(), g.identity());
    }
    rec.finish(id, ns.len(), Some(format!("n in {ns:?}")))
}

fn vanishing(ctx: &GroupContext, target: usize, rng: &mut ChaCha8Rng) -> Result<IdentityCheck, CollectError> {
    let id = IdentityId::Vanishing;
    let ns = ctx.member_ns();
    if ns.is_empty() {
        return Ok(skip(id, "G is in no P_n"));
    }
    let g = &ctx.group;
    let o = Ops(g);
    let mut rec = Recorder::new(ctx);

    // depth-first over tails z_1..z_s in {x, y}; a trivial prefix stays trivial
    #[allow(clippy::too_many_arguments)]
    fn walk(o: &Ops, rec: &mut Recorder, n: usize, x: &ExponentVector, y: &ExponentVector, t: &ExponentVector, tail: &mut String, xs: usize, ys: usize) -> Result<(), CollectError> {
        if t.is_identity() || tail.len() == VANISHING_MAX_TAIL {
            return Ok(());
        }
        for (z, label) in [(x, 'x'), (y, 'y')] {
            let next = o.comm(&[t, z])?;
            let (nx, ny) = if label == 'x' { (xs + 1, ys) } else { (xs, ys + 1) };
            tail.push(label);
            if tail.len() >= n && (nx >= n || ny >= n) {
                let assertion = format!("[x,y,{}] = 1 (n = {n})", tail.chars().map(String::from).collect::<Vec<_>>().join(","));
                rec.equal(&assertion, &[("x", x), ("y", y)], next.clone(), o.one());
            }
            walk(o, rec, n, x, y, &next, tail, nx, ny)?;
            tail.pop();
        }
        Ok(())
    }

    for trial in 0..target {
        let (x, y) = match (&ctx.pair, trial) {
            (Some((a, b)), 0) => (a.clone(), b.clone()),
            _ => (g.random_element(rng), g.random_element(rng)),
        };
        let base = o.comm(&[&x, &y])?;
        for &n in &ns {
            walk(&o, &mut rec, n, &x, &y, &base, &mut String::new(), 0, 0)?;
        }
    }
    Ok(rec.finish(id, target, Some(format!("n in {ns:?}"))))
}

fn swap_mod_k5(ctx: &GroupContext, target: usize, rng: &mut ChaCha8Rng) -> Result<IdentityCheck, CollectError> {
    let id = IdentityId::SwapModK5;
    if ctx.d != 2 {
        return Ok(skip(id, format!("d(G) = {}", ctx.d)));
    }
    let g = &ctx.group;
    let o = Ops(g);
    let mut rec = Recorder::new(ctx);
    for _ in 0..target {
        let (a, b) = (g.random_element(rng), g.random_element(rng));
        rec.congruent(
            "[a,b,a,b] = [a,b,b,a] mod K5",
            &[("a", &a), ("b", &b)],
            o.comm(&[&a, &b, &a, &b])?,
            o.comm(&[&a, &b, &b, &a])?,
            5,
        )?;
    }
    Ok(rec.finish(id, target, None))
}

fn power_expansion(ctx: &GroupContext, target: usize, rng: &mut ChaCha8Rng) -> Result<IdentityCheck, CollectError> {
    let id = IdentityId::PowerExpansion;
    if !ctx.in_p3() {
        return Ok(skip(id, "G is not in P_3"));
    }
    let g = &ctx.group;
    let o = Ops(g);
    let mut rec = Recorder::new(ctx);
    let bound = 3 * g.prime() * g.prime();
    let mut trials = 0;
    for _ in 0..target * ATTEMPTS_PER_TRIAL {
        if trials == target {
            break;
        }
        let (x, y) = (g.random_element(rng), g.random_element(rng));
        if close_subgroup(g, &[x.clone(), y.clone()])?.order() == ctx.order {
            continue;
        }
        trials += 1;
        let n = rng.gen_range(1..=bound) as i64;
        let c2 = binomial(n as u64, 2);
        let inputs: Inputs = &[("x", &x), ("y", &y)];
        let xy = o.comm(&[&x, &y])?;
        let xyn = o.pow(&xy, n)?;
        rec.equal(
            &format!("[x^n,y] = [x,y]^n [x,y,x]^C(n,2), n={n}"),
            inputs,
            o.comm(&[&o.pow(&x, n)?, &y])?,
            o.mul(&[&xyn, &o.pow(&o.comm(&[&x, &y, &x])?, c2)?])?,
        );
        rec.equal(
            &format!("[x,y^n] = [x,y]^n [x,y,y]^C(n,2), n={n}"),
            inputs,
            o.comm(&[&x, &o.pow(&y, n)?])?,
            o.mul(&[&xyn, &o.pow(&o.comm(&[&x, &y, &y])?, c2)?])?,
        );
    }
    Ok(rec.finish(id, trials, None))
}

/// Generating pairs: the Frattini-basis pair first, then random ones.
fn generating_pairs(ctx: &GroupContext, target: usize, rng: &mut ChaCha8Rng) -> Result<Vec<(ExponentVector, ExponentVector)>, CollectError> {
    let g = &ctx.group;
    let mut out = Vec::with_capacity(target);
    if let Some(pair) = &ctx.pair {
        out.push(pair.clone());
    }
    let mut attempts = 0;
    while out.len() < target && attempts < target * ATTEMPTS_PER_TRIAL {
        attempts += 1;
        let (a, b) = (g.random_element(rng), g.random_element(rng));
        if ctx.generates(&a, &b)? {
            out.push((a, b));
        }
    }
    Ok(out)
}

/// Left-normed `[a, b, w_1, ..., w_k]` with `w` spelled over `{a, b}`.
fn ab_word(o: &Ops, a: &ExponentVector, b: &ExponentVector, spelling: &str) -> Result<ExponentVector, CollectError> {
    let xs: Vec<&ExponentVector> = spelling.chars().map(|ch| if ch == 'a' { a } else { b }).collect();
    o.comm(&xs)
}

fn p3_two_generator_gate(ctx: &GroupContext, id: IdentityId) -> Option<IdentityCheck> {
    if !ctx.in_p3() {
        return Some(skip(id, "G is not in P_3"));
    }
    if ctx.d != 2 {
        return Some(skip(id, format!("d(G) = {}", ctx.d)));
    }
    None
}

fn k6_structure(ctx: &GroupContext, target: usize, rng: &mut ChaCha8Rng) -> Result<IdentityCheck, CollectError> {
    let id = IdentityId::K6Structure;
    if let Some(s) = p3_two_generator_gate(ctx, id) {
        return Ok(s);
    }
    let g = &ctx.group;
    let o = Ops(g);
    let mut rec = Recorder::new(ctx);
    let pairs = generating_pairs(ctx, target, rng)?;
    let k6 = ctx.k(6);
    for (a, b) in &pairs {
        let w = |s: &str| ab_word(&o, a, b, s);
        let inputs: Inputs = &[("a", a), ("b", b)];
        let top = w("ababab")?;
        let cyclic = close_subgroup(g, std::slice::from_ref(&top))?;
        let k6_gen = k6.induced_sequence().first().cloned().unwrap_or_else(|| g.identity());
        rec.holds("K6(G) = <[a,b,a,b,a,b]>", inputs, cyclic == *k6, k6_gen, top.clone());
        rec.equal("[a,b,a,b,a,b]^p = 1", inputs, o.pow(&top, g.prime() as i64)?, o.one());
        let [bbbaa, bbaba, ababba, bbaab, abaabb] = ["abbbaa", "abbaba", "ababba", "abbaab", "abaabb"].map(w);
        let (bbbaa, bbaba, ababba, bbaab, abaabb) = (bbbaa?, bbaba?, ababba?, bbaab?, abaabb?);
        rec.equal("[a,b,b,b,a,a][a,b,b,a,b,a][a,b,a,b,b,a] = 1", inputs, o.mul(&[&bbbaa, &bbaba, &ababba])?, o.one());
        rec.equal("[a,b,b,b,a,a][a,b,b,a,b,a][a,b,b,a,a,b] = 1", inputs, o.mul(&[&bbbaa, &bbaba, &bbaab])?, o.one());
        rec.equal("[a,b,a,a,b,b][a,b,a,b,a,b][a,b,a,b,b,a] = 1", inputs, o.mul(&[&abaabb, &top, &ababba])?, o.one());
        rec.equal("[a,b,b,a,b,a] = [a,b,a,b,a,b]", inputs, bbaba, top.clone());
        rec.equal("[a,b,a,b,b,a] = [a,b,a,b,a,b]", inputs, ababba, top.clone());
        rec.equal("[a,b,b,a,a,b] = [a,b,a,b,a,b]", inputs, bbaab, top.clone());
        let inv2 = o.pow(&top, -2)?;
        rec.equal("[a,b,b,b,a,a] = [a,b,a,b,a,b]^-2", inputs, bbbaa, inv2.clone());
        rec.equal("[a,b,a,a,b,b] = [a,b,a,b,a,b]^-2", inputs, abaabb, inv2);
    }
    Ok(rec.finish(id, pairs.len(), None))
}

fn k5_structure(ctx: &GroupContext, target: usize, rng: &mut ChaCha8Rng) -> Result<IdentityCheck, CollectError> {
    let id = IdentityId::K5Structure;
    if ctx.group.prime() < 3 {
        return Ok(skip(id, "p < 3"));
    }
    if let Some(s) = p3_two_generator_gate(ctx, id) {
        return Ok(s);
    }
    let g = &ctx.group;
    let o = Ops(g);
    let p = g.prime();
    let mut rec = Recorder::new(ctx);
    let pairs = generating_pairs(ctx, target, rng)?;
    let (k5, k6) = (ctx.k(5), ctx.k(6));
    for (a, b) in &pairs {
        let w = |s: &str| ab_word(&o, a, b, s);
        let inputs: Inputs = &[("a", a), ("b", b)];
        let (ababa, abbab) = (w("ababa")?, w("abbab")?);
        let mut gens = vec![ababa.clone(), abbab.clone()];
        gens.extend_from_slice(k6.induced_sequence());
        let generated = close_subgroup(g, &gens)?;
        rec.holds("K5(G) = <[a,b,a,b,a], [a,b,b,a,b], K6(G)>", inputs, generated == *k5, ababa.clone(), abbab.clone());
        rec.equal("[a,b,a,b,a]^p = 1", inputs, o.pow(&ababa, p as i64)?, o.one());
        rec.equal("[a,b,b,a,b]^p = 1", inputs, o.pow(&abbab, p as i64)?, o.one());
        let divides = p.checked_pow(3).is_some_and(|p3| k5.order() <= p3 as u128);
        rec.holds("|K5(G)| divides p^3", inputs, divides, o.one(), o.one());
        rec.congruent("[a,b,b,a,a] = [a,b,a,b,a] mod K6", inputs, w("abbaa")?, ababa.clone(), 6)?;
        rec.congruent("[a,b,a,b,b] = [a,b,b,a,b] mod K6", inputs, w("ababb")?, abbab.clone(), 6)?;
        rec.congruent("[a,b,a,a,b] = [a,b,a,b,a]^-2 mod K6", inputs, w("abaab")?, o.pow(&ababa, -2)?, 6)?;
        rec.congruent("[a,b,b,b,a] = [a,b,b,a,b]^-2 mod K6", inputs, w("abbba")?, o.pow(&abbab, -2)?, 6)?;
    }
    Ok(rec.finish(id, pairs.len(), None))
}

fn pth_power_depth(ctx: &GroupContext, target: usize, rng: &mut ChaCha8Rng) -> Result<IdentityCheck, CollectError> {
    let id = IdentityId::PthPowerDepth;
    if ctx.group.prime() < 3 {
        return Ok(skip(id, "p < 3"));
    }
    if let Some(s) = p3_two_generator_gate(ctx, id) {
        return Ok(s);
    }
    let g = &ctx.group;
    let o = Ops(g);
    let p = g.prime() as i64;
    let c3 = binomial(p as u64, 3);
    let mut rec = Recorder::new(ctx);
    for _ in 0..target {
        let [x, y, z, t] = [(); 4].map(|_| g.random_element(rng));
        let inputs: Inputs = &[("x", &x), ("y", &y), ("z", &z), ("t", &t)];
        let xp = o.pow(&x, p)?;
        rec.equal(
            "[x^p,y,z,t] = [x,y,z,t]^p [x,y,x,x,z,t]^C(p,3)",
            inputs,
            o.comm(&[&xp, &y, &z, &t])?,
            o.mul(&[&o.pow(&o.comm(&[&x, &y, &z, &t])?, p)?, &o.pow(&o.comm(&[&x, &y, &x, &x, &z, &t])?, c3)?])?,
        );
        rec.equal(
            "[y,x^p,z,t] = [y,x,z,t]^p [y,x,x,x,z,t]^C(p,3)",
            inputs,
            o.comm(&[&y, &xp, &z, &t])?,
            o.mul(&[&o.pow(&o.comm(&[&y, &x, &z, &t])?, p)?, &o.pow(&o.comm(&[&y, &x, &x, &x, &z, &t])?, c3)?])?,
        );
        for (zz, tt, label) in [(&x, &t, "z=x"), (&z, &x, "t=x")] {
            rec.equal(
                &format!("[x^p,y,z,t] = [x,y,z,t]^p ({label})"),
                inputs,
                o.comm(&[&xp, &y, zz, tt])?,
                o.pow(&o.comm(&[&x, &y, zz, tt])?, p)?,
            );
            rec.equal(
                &format!("[y,x^p,z,t] = [y,x,z,t]^p ({label})"),
                inputs,
                o.comm(&[&y, &xp, zz, tt])?,
                o.pow(&o.comm(&[&y, &x, zz, tt])?, p)?,
            );
        }
    }
    Ok(rec.finish(id, target, None))
}

fn hall_witt(ctx: &GroupContext, target: usize, rng: &mut ChaCha8Rng) -> Result<IdentityCheck, CollectError> {
    let g = &ctx.group;
    let o = Ops(g);
    let mut rec = Recorder::new(ctx);
    for _ in 0..target {
        let [x, a, b] = [(); 3].map(|_| g.random_element(rng));
        let lhs = o.mul(&[
            &o.comm(&[&x, &a, &o.conj(&b, &x)?])?,
            &o.comm(&[&b, &x, &o.conj(&a, &b)?])?,
            &o.comm(&[&a, &b, &o.conj(&x, &a)?])?,
        ])?;
        rec.equal("[x,a,b^x][b,x,a^b][a,b,x^a] = 1", &[("x", &x), ("a", &a), ("b", &b)], lhs, o.one());
    }
    Ok(rec.finish(IdentityId::HallWitt, target, None))
}

fn eq7_symmetry(ctx: &GroupContext, target: usize, rng: &mut ChaCha8Rng) -> Result<IdentityCheck, CollectError> {
    let id = IdentityId::Eq7Symmetry;
    if let Some(s) = p3_two_generator_gate(ctx, id) {
        return Ok(s);
    }
    let o = Ops(&ctx.group);
    let mut rec = Recorder::new(ctx);
    let pairs = generating_pairs(ctx, target, rng)?;
    for (a, b) in &pairs {
        let reference = ab_word(&o, a, b, "abaabb")?;
        for spelling in ["abbbaa", "ababab", "ababba", "abbaab", "abbaba"] {
            let label: Vec<String> = spelling.chars().map(String::from).collect();
            rec.equal(
                &format!("[a,b,a,a,b,b] = [{}]", label.join(",")),
                &[("a", a), ("b", b)],
                reference.clone(),
                ab_word(&o, a, b, spelling)?,
            );
        }
    }
    Ok(rec.finish(id, pairs.len(), None))
}

#[derive(Debug, Error)]
pub enum TheoremError {
    #[error("the class bound is stated for p = 2 or 3, not p = {0}")]
    UnsupportedPrime(u64),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// If `G` is in `P_3` and `p` is 2 or 3, checks `c(G) <= 5` and `K_6(G) = 1`.
pub fn verify_main_theorem(group: &PcGroup) -> Result<IdentityCheck, TheoremError> {
    if !matches!(group.prime(), 2 | 3) {
        return Err(TheoremError::UnsupportedPrime(group.prime()));
    }
    let ctx = GroupContext::new(group)?;
    verify_main_theorem_with(&ctx)
}

pub fn verify_main_theorem_with(ctx: &GroupContext) -> Result<IdentityCheck, TheoremError> {
    let p = ctx.group.prime();
    if !matches!(p, 2 | 3) {
        return Err(TheoremError::UnsupportedPrime(p));
    }
    let name = "main_theorem";
    let hypotheses = "G in P_3, p in {2,3}";
    let class = ctx.group_class();
    if !ctx.in_p3() {
        return Ok(IdentityCheck::skipped(name, hypotheses, format!("hypothesis fails: class {class}, G not in P_3")));
    }
    let mut rec = Recorder::new(ctx);
    let one = ctx.group.identity();
    rec.holds(&format!("c(G) = {class} <= 5"), &[], class <= 5, one.clone(), one.clone());
    let k6 = ctx.k(6);
    let k6_gen = k6.induced_sequence().first().cloned().unwrap_or_else(|| one.clone());
    rec.holds("K6(G) = 1", &[], k6.is_trivial(), k6_gen, one);
    let status = if rec.failures == 0 { CheckStatus::Pass } else { CheckStatus::Fail };
    Ok(IdentityCheck {
        name: name.to_string(),
        hypotheses: hypotheses.to_string(),
        status,
        trials: 1,
        failures: rec.failures,
        witnesses: rec.witnesses,
        note: Some(format!("class {class}, |K6| = {}", k6.order())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{instantiate_parameter, parse_presentation, Family, PcPresentation};

    fn p3() -> PcGroup {
        PcGroup::new(instantiate_parameter(Family::ExampleP3, 2).unwrap().presentation).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for id in CATALOG {
            assert_eq!(id.name().parse::<IdentityId>().unwrap(), id);
        }
        assert_eq!("no_such_identity".parse::<IdentityId>(), Err(UnknownIdentity("no_such_identity".into())));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(9, 4), 126);
        assert_eq!(binomial(3, 3), 1);
        assert_eq!(binomial(2, 3), 0);
        assert_eq!(binomial(1, 0), 1);
    }

    #[test]
    fn hall_witt_on_example_p3() {
        let report = run_identity_suite(&p3(), "p3", &[IdentityId::HallWitt], Some(1000), 7).unwrap();
        let check = &report.checks[0];
        assert_eq!(check.status, CheckStatus::Pass);
        assert_eq!(check.trials, 1000);
        assert_eq!(check.line(), "check hall_witt pass trials=1000 failures=0");
    }

    #[test]
    fn vanishing_includes_generator_instances() {
        let g = p3();
        let report = run_identity_suite(&g, "p3", &[IdentityId::Vanishing], Some(50), 1).unwrap();
        assert_eq!(report.checks[0].status, CheckStatus::Pass);
        let (a, b) = (g.named("a").unwrap(), g.named("b").unwrap());
        let o = Ops(&g);
        assert!(o.comm(&[&a, &b, &a, &a, &a]).unwrap().is_identity());
        assert!(o.comm(&[&a, &b, &b, &b, &b]).unwrap().is_identity());
    }

    #[test]
    fn theorem_skips_outside_family() {
        let g = PcGroup::new(PcPresentation::abelian(2, &[("x", 2), ("y", 2)])).unwrap();
        let check = verify_main_theorem(&g).unwrap();
        assert_eq!(check.status, CheckStatus::Skip);
        let g5 = PcGroup::new(PcPresentation::abelian(5, &[("x", 5)])).unwrap();
        assert!(matches!(verify_main_theorem(&g5), Err(TheoremError::UnsupportedPrime(5))));
    }

    #[test]
    fn structure_checks_skip_on_abelian_groups() {
        let g = PcGroup::new(PcPresentation::abelian(3, &[("x", 9), ("y", 3)])).unwrap();
        let report = run_identity_suite(&g, "abelian", &CATALOG, Some(20), 0).unwrap();
        for c in &report.checks {
            match c.name.as_str() {
                "basic_expansions" | "multilinearity" | "metabelian_criterion" | "metabelian_expansion"
                | "swap_mod_K5" | "hall_witt" => assert_eq!(c.status, CheckStatus::Pass, "{}", c.line()),
                _ => assert_eq!(c.status, CheckStatus::Skip, "{}", c.line()),
            }
        }
    }

    #[test]
    fn failing_assertion_keeps_reproducible_witness() {
        // [x, y] = 1 is false in D8; the recorder must capture a witness that
        // still disagrees when re-evaluated
        let text = "pgroup p=2\ngens x y z\norder x 2\norder y 2\norder z 2\ncomm y x = z\n";
        let g = PcGroup::new(parse_presentation(text).unwrap()).unwrap();
        let ctx = GroupContext::new(&g).unwrap();
        let mut rec = Recorder::new(&ctx);
        let (x, y) = (g.generator(0), g.generator(1));
        rec.equal("[x,y] = 1", &[("x", &x), ("y", &y)], g.commutator(&x, &y).unwrap(), g.identity());
        let check = rec.finish(IdentityId::HallWitt, 1, None);
        assert_eq!(check.status, CheckStatus::Fail);
        let w = &check.witnesses[0];
        let (wx, wy) = (&w.inputs[0].1, &w.inputs[1].1);
        assert_ne!(g.commutator(wx, wy).unwrap(), g.identity());
        assert!(w.render(&g).contains("lhs=z != rhs=1"));
    }

    #[test]
    fn report_is_deterministic() {
        let g = p3();
        let ids = [IdentityId::BasicExpansions, IdentityId::PowerExpansion];
        let r1 = run_identity_suite(&g, "p3", &ids, Some(30), 11).unwrap();
        let r2 = run_identity_suite(&g, "p3", &ids, Some(30), 11).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(r1.render_lines(&g), r2.render_lines(&g));
    }
}
