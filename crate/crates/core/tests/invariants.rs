//! Cross-module invariants: independent oracles for entailment and normal
//! forms, round-trip laws for the text formats, prover output validity, and
//! synthesis checked on randomly drawn matrices.

mod common;

use common::*;
use platypus_core::axiomatizer::axiomatize_boolean;
use platypus_core::calculus::{check_derivation, check_soundness, decide_mc, prove, RuleSet};
use platypus_core::formula::{parse_formula_loose, Formula};
use platypus_core::nmatrix::{Nmatrix, Sequent};
use platypus_core::platypus::{decide_sc, in_language_of, nf, tower};
use rand::prelude::*;
use std::collections::BTreeSet;

const PL: &[(&str, usize)] = &[("pl", 2)];

#[test]
fn deterministic_matrices_agree_with_truth_tables() {
    let cases: &[(&str, &[(&str, usize)])] = &[
        ("BM_and", &[("and", 2)]),
        ("BM_or", &[("or", 2)]),
        ("BM_and_or", &[("and", 2), ("or", 2)]),
        ("Wronski_C", &[("dot", 2)]),
    ];
    for (name, conns) in cases {
        let m = Nmatrix::builtin(name).unwrap();
        assert!(m.is_deterministic(), "{name} should be deterministic");
        let mut rng = rng(42);
        for _ in 0..200 {
            let lhs = random_side(&mut rng, conns, &["p", "q", "r"], 3, 3);
            let rhs = random_side(&mut rng, conns, &["p", "q", "r"], 3, 3);
            let s = Sequent::new(lhs, rhs);
            assert_eq!(
                m.entails(&s).is_valid(),
                classical_entails(&m, &s),
                "{name} disagrees with its truth table on {s}"
            );
        }
    }
}

#[test]
fn towers_collapse_to_their_base() {
    let m = Nmatrix::builtin("BM_pl").unwrap();
    let p = Formula::var("p");
    for n in 0..=5 {
        let t = tower(n, &p);
        assert!(m.entails(&Sequent::new([p.clone()], [t.clone()])).is_valid());
        assert!(m.entails(&Sequent::new([t.clone()], [p.clone()])).is_valid());
        assert_eq!(nf(&t).unwrap(), p);
    }
}

#[test]
fn one_variable_formulas_are_equivalent_to_the_variable() {
    let m = Nmatrix::builtin("BM_pl").unwrap();
    let p = Formula::var("p");
    let pool = formula_pool(PL, &["p"], 4);
    assert_eq!(pool.len(), 677);
    for f in &pool {
        assert!(m.entails(&Sequent::new([f.clone()], [p.clone()])).is_valid());
        assert!(m.entails(&Sequent::new([p.clone()], [f.clone()])).is_valid());
        assert_eq!(nf(f).unwrap(), p, "nf({f}) should collapse");
        assert!(decide_sc(&BTreeSet::from([f.clone()]), &p).unwrap());
        assert!(decide_sc(&BTreeSet::from([p.clone()]), f).unwrap());
    }
}

#[test]
fn nf_is_the_smallest_expressing_subformula() {
    let mut rng = rng(77);
    for _ in 0..300 {
        let f = random_formula(&mut rng, PL, &["p", "q"], 4);
        // oracle: scan subformulas smallest-first for one that expresses f
        let oracle = f
            .subformulas()
            .into_iter()
            .find(|candidate| {
                in_language_of(&f, &BTreeSet::from([candidate.clone()])).unwrap()
            })
            .expect("f itself always qualifies");
        assert_eq!(nf(&f).unwrap(), oracle, "nf({f})");
    }
}

#[test]
fn text_formats_round_trip() {
    // formulas over a mixed signature
    let conns: &[(&str, usize)] = &[("and", 2), ("or", 2), ("pl", 2)];
    let mut rng = rng(88);
    for _ in 0..300 {
        let f = random_formula(&mut rng, conns, &["p", "q", "r"], 4);
        assert_eq!(parse_formula_loose(&f.to_string()).unwrap(), f);
    }

    // sequents, including empty sides
    for _ in 0..100 {
        let lhs = random_side(&mut rng, conns, &["p", "q", "r"], 3, 3);
        let rhs = random_side(&mut rng, conns, &["p", "q", "r"], 3, 3);
        let s = Sequent::new(lhs, rhs);
        assert_eq!(Sequent::parse_loose(&s.to_string()).unwrap(), s);
    }

    // every bundled matrix and the M_n family
    for name in Nmatrix::builtin_names() {
        let m = Nmatrix::builtin(name).unwrap();
        assert_eq!(Nmatrix::parse(&m.format()).unwrap(), m, "{name}");
    }
    for n in 1..=3 {
        let m = Nmatrix::build_mn(n).unwrap();
        assert_eq!(Nmatrix::parse(&m.format()).unwrap(), m, "M_{n}");
    }

    // every bundled calculus
    for name in RuleSet::builtin_names() {
        let r = RuleSet::builtin(name).unwrap();
        assert_eq!(RuleSet::parse(&r.format()).unwrap(), r, "{name}");
    }
}

#[test]
fn prover_output_always_passes_the_checker() {
    let cases: &[(&str, &[(&str, usize)])] = &[
        ("R_pl", &[("pl", 2)]),
        ("R_and_or_pl", &[("and", 2), ("or", 2), ("pl", 2)]),
        ("R_wronski6", &[("dot", 2)]),
    ];
    for (name, conns) in cases {
        let rules = RuleSet::builtin(name).unwrap();
        let mut rng = rng(99);
        let mut found = 0usize;
        for _ in 0..300 {
            let lhs = random_side(&mut rng, conns, &["p", "q"], 2, 2);
            let rhs = random_side(&mut rng, conns, &["p", "q"], 2, 2);
            let s = Sequent::new(lhs, rhs);
            if let Some(d) = prove(&rules, &s, &[]) {
                check_derivation(&rules, &s, &d)
                    .unwrap_or_else(|e| panic!("{name}: bad derivation for {s}: {e}"));
                found += 1;
            }
        }
        assert!(found > 0, "{name}: corpus should contain derivable sequents");
    }
}

#[test]
fn synthesis_agrees_with_semantics_on_random_matrices() {
    let mut rng = rng(123);
    let pool = formula_pool(&[("f", 2)], &["p", "q"], 2);
    assert_eq!(pool.len(), 38);
    let sides = subsets_up_to(&pool, 1);
    for _ in 0..30 {
        let mut text = String::from("values: 0 1\ndesignated: 1\nop f 2\n");
        for (x, y) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let cell = match rng.random_range(1..=3) {
                1 => "0",
                2 => "1",
                _ => "0 1",
            };
            text.push_str(&format!("{x} {y} : {cell}\n"));
        }
        let m = Nmatrix::parse(&text).unwrap();
        let calculus = axiomatize_boolean(&m).unwrap();
        for rule in calculus.rules() {
            assert!(
                check_soundness(&m, rule).is_valid(),
                "unsound synthesized rule {} for\n{text}",
                rule.name
            );
        }
        for lhs in &sides {
            for rhs in &sides {
                let s = Sequent::new(lhs.iter().cloned(), rhs.iter().cloned());
                assert_eq!(
                    decide_mc(&calculus, &s),
                    m.entails(&s).is_valid(),
                    "disagreement on {s} for\n{text}"
                );
            }
        }
    }
}
