//! Shared helpers for the integration test suites: formula pool builders,
//! seeded random generators, and an independent truth-table oracle for
//! deterministic matrices.

#![allow(dead_code)]

use platypus_core::formula::Formula;
use platypus_core::nmatrix::{Nmatrix, Sequent};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every formula of depth `<= depth` over the given connectives and
/// variables, in canonical order.
pub fn formula_pool(conns: &[(&str, usize)], vars: &[&str], depth: usize) -> Vec<Formula> {
    let mut set: BTreeSet<Formula> = vars.iter().map(|v| Formula::var(*v)).collect();
    for _ in 0..depth {
        let prev: Vec<Formula> = set.iter().cloned().collect();
        for &(name, arity) in conns {
            for args in args_product(&prev, arity) {
                set.insert(Formula::app(name, args));
            }
        }
    }
    set.into_iter().collect()
}

fn args_product(pool: &[Formula], k: usize) -> Vec<Vec<Formula>> {
    let mut acc = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::with_capacity(acc.len() * pool.len());
        for partial in &acc {
            for f in pool {
                let mut row = partial.clone();
                row.push(f.clone());
                next.push(row);
            }
        }
        acc = next;
    }
    acc
}

/// All subsets of `pool` with at most `k` elements (the empty set included).
pub fn subsets_up_to(pool: &[Formula], k: usize) -> Vec<Vec<Formula>> {
    fn rec(
        pool: &[Formula],
        start: usize,
        k: usize,
        cur: &mut Vec<Formula>,
        out: &mut Vec<Vec<Formula>>,
    ) {
        if cur.len() == k {
            return;
        }
        for i in start..pool.len() {
            cur.push(pool[i].clone());
            out.push(cur.clone());
            rec(pool, i + 1, k, cur, out);
            cur.pop();
        }
    }
    let mut out = vec![Vec::new()];
    let mut cur = Vec::new();
    rec(pool, 0, k, &mut cur, &mut out);
    out
}

/// A random formula of depth `<= depth`; leaves are picked uniformly from
/// `vars`, and interior positions stop early with probability one quarter.
pub fn random_formula(
    rng: &mut ChaCha8Rng,
    conns: &[(&str, usize)],
    vars: &[&str],
    depth: usize,
) -> Formula {
    if depth == 0 || rng.random_range(0..4) == 0 {
        Formula::var(vars[rng.random_range(0..vars.len())])
    } else {
        let (name, arity) = conns[rng.random_range(0..conns.len())];
        let args = (0..arity)
            .map(|_| random_formula(rng, conns, vars, depth - 1))
            .collect();
        Formula::app(name, args)
    }
}

/// A random set of at most `max` formulas (possibly empty; duplicates merge).
pub fn random_side(
    rng: &mut ChaCha8Rng,
    conns: &[(&str, usize)],
    vars: &[&str],
    depth: usize,
    max: usize,
) -> BTreeSet<Formula> {
    let n = rng.random_range(0..=max);
    (0..n)
        .map(|_| random_formula(rng, conns, vars, depth))
        .collect()
}

/// A seeded sample of `n` elements of `pool` (all of it when `n` covers the
/// pool), returned in canonical order so corpora stay deterministic.
pub fn sample_pool(rng: &mut ChaCha8Rng, pool: &[Formula], n: usize) -> Vec<Formula> {
    if pool.len() <= n {
        return pool.to_vec();
    }
    let mut shuffled = pool.to_vec();
    shuffled.shuffle(rng);
    shuffled.truncate(n);
    shuffled.sort();
    shuffled
}

/// Brute-force truth-table entailment for deterministic matrices, evaluated
/// without the valuation machinery: every assignment of matrix values to the
/// sequent's variables is tried directly against the tables.
pub fn classical_entails(m: &Nmatrix, s: &Sequent) -> bool {
    assert!(
        m.is_deterministic(),
        "classical_entails needs single-valued tables"
    );
    let vars: Vec<String> = s
        .premises()
        .iter()
        .chain(s.conclusions().iter())
        .flat_map(|f| f.variables())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let values = m.values();
    let mut env: BTreeMap<&str, &str> = BTreeMap::new();
    let mut counters = vec![0usize; vars.len()];
    loop {
        for (i, v) in vars.iter().enumerate() {
            env.insert(v, &values[counters[i]]);
        }
        let designated = |f: &Formula| {
            let value = eval_deterministic(m, f, &env);
            m.is_designated(&value).expect("value of the matrix")
        };
        let premises_hold = s.premises().iter().all(&designated);
        let conclusions_fail = s.conclusions().iter().all(|f| !designated(f));
        if premises_hold && conclusions_fail {
            return false;
        }
        // odometer over assignments
        let mut i = 0;
        loop {
            if i == vars.len() {
                return true;
            }
            counters[i] += 1;
            if counters[i] < values.len() {
                break;
            }
            counters[i] = 0;
            i += 1;
        }
    }
}

fn eval_deterministic(m: &Nmatrix, f: &Formula, env: &BTreeMap<&str, &str>) -> String {
    match f {
        Formula::Var(name) => env[name.as_str()].to_string(),
        Formula::App(name, args) => {
            let arg_values: Vec<String> = args
                .iter()
                .map(|a| eval_deterministic(m, a, env))
                .collect();
            let refs: Vec<&str> = arg_values.iter().map(String::as_str).collect();
            let cell = m.cell(name, &refs);
            assert_eq!(cell.len(), 1, "deterministic cell");
            cell.into_iter().next().unwrap()
        }
    }
}
