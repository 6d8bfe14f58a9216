//! Mechanical axiomatization of two-valued Nmatrices.
//!
//! For a total matrix over two values with exactly one designated, every
//! determined table cell yields one multiple-conclusion rule, and nothing
//! else is needed:
//!
//! * a cell `{undesignated}` at input tuple `x` gives
//!   `{p_i : x_i designated} ∪ {©(p1..pk)} |- {p_i : x_i undesignated}`;
//! * a cell `{designated}` gives
//!   `{p_i : x_i designated} |- {p_i : x_i undesignated} ∪ {©(p1..pk)}`;
//! * a fully nondeterministic cell `{0,1}` constrains nothing and yields no
//!   rule.
//!
//! The result is sound and complete for the matrix, analytic over
//! subformulas, and modular: the rules of a multi-connective matrix are the
//! union of the rules of its single-connective fragments.

use thiserror::Error;

use crate::calculus::{Rule, RuleSet};
use crate::formula::Formula;
use crate::nmatrix::Nmatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AxiomatizeError {
    #[error("the matrix has {0} values; the recipe needs exactly two")]
    NotTwoValued(usize),
    #[error("the recipe needs exactly one designated value")]
    BadDesignation,
    #[error("the recipe does not cover partial matrices")]
    Partial,
}

/// Axiomatizes a total two-valued Nmatrix with a single designated value.
/// Rules are named `CONNECTIVE_BITS` (`1` marking designated inputs), in
/// connective order, input tuples ascending.
pub fn axiomatize_boolean(matrix: &Nmatrix) -> Result<RuleSet, AxiomatizeError> {
    if matrix.values().len() != 2 {
        return Err(AxiomatizeError::NotTwoValued(matrix.values().len()));
    }
    let designated = match matrix.designated_values().as_slice() {
        [d] => d.to_string(),
        _ => return Err(AxiomatizeError::BadDesignation),
    };
    if matrix.is_partial() {
        return Err(AxiomatizeError::Partial);
    }
    let undesignated = matrix
        .values()
        .iter()
        .find(|v| **v != designated)
        .expect("two values")
        .clone();

    let mut rules = Vec::new();
    for (name, arity) in matrix.signature().iter() {
        for row in 0..(1usize << arity) {
            let bits: Vec<bool> = (0..arity).map(|i| (row >> (arity - 1 - i)) & 1 == 1).collect();
            let args: Vec<&str> = bits
                .iter()
                .map(|&b| if b { designated.as_str() } else { undesignated.as_str() })
                .collect();
            let cell = matrix.cell(name, &args);
            let has_designated = cell.iter().any(|v| *v == designated);
            let has_undesignated = cell.iter().any(|v| *v != designated);
            if has_designated && has_undesignated {
                continue;
            }

            let vars: Vec<Formula> = (1..=arity).map(|i| Formula::var(format!("p{i}"))).collect();
            let compound = Formula::app(name, vars.clone());
            let marked = |want: bool| {
                vars.iter()
                    .zip(&bits)
                    .filter(move |(_, &b)| b == want)
                    .map(|(v, _)| v.clone())
            };
            let rule_name = if arity == 0 {
                name.to_string()
            } else {
                let suffix: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
                format!("{name}_{suffix}")
            };
            let rule = if has_designated {
                Rule::new(
                    &rule_name,
                    marked(true),
                    marked(false).chain([compound.clone()]),
                )
            } else {
                Rule::new(
                    &rule_name,
                    marked(true).chain([compound.clone()]),
                    marked(false),
                )
            };
            rules.push(rule);
        }
    }
    Ok(RuleSet::new(rules).expect("generated rule names are unique"))
}
