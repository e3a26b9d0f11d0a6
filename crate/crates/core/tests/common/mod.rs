//! Independent oracles shared by the integration tests.
//!
//! `Rewriter` computes normal forms by rewriting words letter by letter with
//! the raw presentation relations, never touching the collector tables.
//! `bfs_closure` and `bfs_normal_closure` enumerate subgroups element by
//! element, never touching induced sequences.

#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use pcgroup::presentation::PcPresentation;
use pcgroup::{ExponentVector, PcGroup};
use rand::Rng;

/// Which redex the rewriter contracts next.
#[derive(Clone, Copy, Debug)]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

pub struct Rewriter {
    orders: Vec<u64>,
    /// Positive word for `g_i^(o_i)`.
    powers: Vec<Vec<usize>>,
    /// `swaps[j][i]`: positive word for `[g_j, g_i]`, `j > i`.
    swaps: Vec<Vec<Vec<usize>>>,
}

impl Rewriter {
    pub fn new(pres: &PcPresentation) -> Self {
        let m = pres.generator_count();
        let orders = pres.relative_orders.clone();
        // positive inverses, built from the last generator down:
        // g^-1 = g^(o-1) (g^o)^-1
        let mut inverses: Vec<Vec<usize>> = vec![Vec::new(); m];
        for i in (0..m).rev() {
            let mut w = vec![i; orders[i] as usize - 1];
            for &(k, e) in pres.power_relation(i).formal_inverse().factors() {
                w.extend(Self::positive_factor(&inverses, k, e));
            }
            inverses[i] = w;
        }
        let positive = |factors: &[(usize, i64)]| -> Vec<usize> {
            factors.iter().flat_map(|&(k, e)| Self::positive_factor(&inverses, k, e)).collect()
        };
        let powers = (0..m).map(|i| positive(pres.power_relation(i).factors())).collect();
        let swaps = (0..m)
            .map(|j| {
                (0..j)
                    .map(|i| pres.commutator_relation(j, i).map(|w| positive(w.factors())).unwrap_or_default())
                    .collect()
            })
            .collect();
        Rewriter { orders, powers, swaps }
    }

    fn positive_factor(inverses: &[Vec<usize>], k: usize, e: i64) -> Vec<usize> {
        if e >= 0 {
            vec![k; e as usize]
        } else {
            inverses[k].repeat(e.unsigned_abs() as usize)
        }
    }

    pub fn letters(v: &ExponentVector) -> Vec<usize> {
        v.exponents().iter().enumerate().flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize)).collect()
    }

    /// Position and kind of every redex: `(k, None)` for an inversion at
    /// `k, k+1`, `(k, Some(i))` for a run of `o_i` copies of `i` from `k`.
    fn redexes(&self, w: &[usize], first_only: bool) -> Vec<(usize, Option<usize>)> {
        let mut out = Vec::new();
        let mut run = 0;
        for k in 0..w.len() {
            run = if k > 0 && w[k] == w[k - 1] { run + 1 } else { 1 };
            if run as u64 == self.orders[w[k]] {
                out.push((k + 1 - run, Some(w[k])));
                if first_only {
                    return out;
                }
            }
            if k + 1 < w.len() && w[k] > w[k + 1] {
                out.push((k, None));
                if first_only {
                    return out;
                }
            }
        }
        out
    }

    fn contract(&self, w: &mut Vec<usize>, redex: (usize, Option<usize>)) {
        match redex {
            (k, None) => {
                let (j, i) = (w[k], w[k + 1]);
                let mut replacement = vec![i, j];
                replacement.extend_from_slice(&self.swaps[j][i]);
                w.splice(k..k + 2, replacement);
            }
            (k, Some(i)) => {
                let len = self.orders[i] as usize;
                w.splice(k..k + len, self.powers[i].iter().copied());
            }
        }
    }

    fn to_vector(&self, w: &[usize]) -> Vec<u64> {
        let mut v = vec![0; self.orders.len()];
        for &g in w {
            v[g] += 1;
        }
        v
    }

    /// Rewrites `word` to normal form, contracting redexes in the given
    /// order.
    pub fn normal_form(&self, word: &[usize], strategy: Strategy) -> Vec<u64> {
        let mut w = word.to_vec();
        loop {
            let redex = match strategy {
                Strategy::Leftmost => self.redexes(&w, true).first().copied(),
                Strategy::Rightmost => self.redexes(&w, false).last().copied(),
            };
            match redex {
                Some(r) => self.contract(&mut w, r),
                None => return self.to_vector(&w),
            }
        }
    }

    /// Rewrites `word` contracting a uniformly random redex each step.
    pub fn normal_form_random<R: Rng>(&self, word: &[usize], rng: &mut R) -> Vec<u64> {
        let mut w = word.to_vec();
        loop {
            let all = self.redexes(&w, false);
            if all.is_empty() {
                return self.to_vector(&w);
            }
            let r = all[rng.gen_range(0..all.len())];
            self.contract(&mut w, r);
        }
    }

    pub fn product(&self, u: &ExponentVector, v: &ExponentVector, strategy: Strategy) -> Vec<u64> {
        let mut w = Self::letters(u);
        w.extend(Self::letters(v));
        self.normal_form(&w, strategy)
    }
}

/// Every element of the subgroup generated by `gens`, by breadth-first
/// search over right multiplication.
pub fn bfs_closure(group: &PcGroup, gens: &[ExponentVector]) -> HashSet<ExponentVector> {
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(group.identity());
    queue.push_back(group.identity());
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = group.multiply(&x, g).unwrap();
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen
}

/// Every element of the normal closure of `seeds` in the group generated by
/// `conjugators`: breadth-first search over right multiplication by seeds
/// and conjugation by conjugators.
pub fn bfs_normal_closure(group: &PcGroup, seeds: &[ExponentVector], conjugators: &[ExponentVector]) -> HashSet<ExponentVector> {
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(group.identity());
    queue.push_back(group.identity());
    while let Some(x) = queue.pop_front() {
        let next = seeds
            .iter()
            .map(|s| group.multiply(&x, s).unwrap())
            .chain(conjugators.iter().map(|c| group.conjugate(&x, c).unwrap()));
        for y in next.collect::<Vec<_>>() {
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen
}

/// Orders of `K_1 = G, K_(i+1) = [K_i, G]` by element enumeration, down to
/// the trivial term.
pub fn brute_force_lcs_orders(group: &PcGroup) -> Vec<usize> {
    let gens = group.generators();
    let mut term: HashSet<ExponentVector> = bfs_closure(group, &gens);
    let mut orders = vec![term.len()];
    while term.len() > 1 {
        let seeds: HashSet<ExponentVector> = term
            .iter()
            .flat_map(|x| gens.iter().map(|g| group.commutator(x, g).unwrap()).collect::<Vec<_>>())
            .filter(|c| !c.is_identity())
            .collect();
        let seeds: Vec<ExponentVector> = seeds.into_iter().collect();
        term = bfs_normal_closure(group, &seeds, &gens);
        orders.push(term.len());
    }
    orders
}
