//! The platypus connective `pl` and its dedicated decision machinery.
//!
//! Over the Boolean matrix `BM_pl`, `pl` behaves like a connective that may
//! return either argument's truth value but must be truthful when they agree.
//! Its single-conclusion consequence has a purely syntactic description: a
//! formula follows from `Γ` exactly when it can be generated from the normal
//! forms of `Γ` by applications of `pl`.  This module implements that
//! criterion, the tower/φ formula families, and the polynomial reduction
//! from 3-SAT to sequent *invalidity* over `BM_pl`.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::formula::Formula;
use crate::nmatrix::Sequent;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LanguageError {
    #[error("`{name}` is not a platypus-language connective")]
    ForeignConnective { name: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DimacsError {
    #[error("missing `p cnf VARS CLAUSES` header")]
    MissingHeader,
    #[error("line {line}: malformed header")]
    BadHeader { line: usize },
    #[error("line {line}: `{token}` is not a literal")]
    BadLiteral { line: usize, token: String },
    #[error("literal {literal} is out of range for {num_vars} variable(s)")]
    LiteralOutOfRange { literal: i32, num_vars: usize },
    #[error("clause {index} is empty")]
    EmptyClause { index: usize },
    #[error("clause {index} has {found} literals; at most three are supported")]
    TooManyLiterals { index: usize, found: usize },
    #[error("last clause is not terminated by 0")]
    UnterminatedClause,
}

/// `pl(a, b)`.
pub fn pl(a: Formula, b: Formula) -> Formula {
    Formula::app("pl", vec![a, b])
}

/// The platypus normal form: variables are their own normal form, and
/// `pl(a,b)` collapses to the shared normal form of its arguments when they
/// agree — otherwise the formula is already normal.
pub fn nf(f: &Formula) -> Result<Formula, LanguageError> {
    match f {
        Formula::Var(_) => Ok(f.clone()),
        Formula::App(name, args) if name == "pl" && args.len() == 2 => {
            let a = nf(&args[0])?;
            let b = nf(&args[1])?;
            Ok(if a == b { a } else { f.clone() })
        }
        Formula::App(name, _) => Err(LanguageError::ForeignConnective { name: name.clone() }),
    }
}

/// Is `candidate` generated from `basis` by applications of `pl`?  Basis
/// membership is checked before the connective, so basis formulas may be
/// arbitrary; foreign connectives anywhere else are an error.
pub fn in_language_of(
    candidate: &Formula,
    basis: &BTreeSet<Formula>,
) -> Result<bool, LanguageError> {
    if basis.contains(candidate) {
        return Ok(true);
    }
    match candidate {
        Formula::Var(_) => Ok(false),
        Formula::App(name, args) if name == "pl" && args.len() == 2 => {
            Ok(in_language_of(&args[0], basis)? && in_language_of(&args[1], basis)?)
        }
        Formula::App(name, _) => Err(LanguageError::ForeignConnective { name: name.clone() }),
    }
}

/// Decides the single-conclusion consequence `premises |- candidate` of the
/// platypus matrix: the candidate must lie in the `pl`-language generated by
/// the premises' normal forms.
pub fn decide_sc(premises: &BTreeSet<Formula>, candidate: &Formula) -> Result<bool, LanguageError> {
    let basis: BTreeSet<Formula> = premises.iter().map(nf).collect::<Result<_, _>>()?;
    in_language_of(candidate, &basis)
}

/// `tower(0, f) = f` and `tower(n+1, f) = pl(tower(n, f), f)`.
pub fn tower(n: usize, f: &Formula) -> Formula {
    let mut t = f.clone();
    for _ in 0..n {
        t = pl(t, f.clone());
    }
    t
}

/// `φ_n = pl(tower(n, p), q)`: pairwise inequivalent over the platypus
/// matrix, although every `tower(n, p)` collapses to `p`.
pub fn phi_family(n: usize) -> Formula {
    pl(tower(n, &Formula::var("p")), Formula::var("q"))
}

/// A 3-CNF instance; clauses hold DIMACS literals (positive or negated
/// 1-based variable numbers), padded to width three.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<[i32; 3]>,
}

impl Cnf {
    /// Variables that actually occur, ascending.
    pub fn occurring_vars(&self) -> Vec<usize> {
        let mut vars: BTreeSet<usize> = BTreeSet::new();
        for clause in &self.clauses {
            for &lit in clause {
                vars.insert(lit.unsigned_abs() as usize);
            }
        }
        vars.into_iter().collect()
    }
}

/// Parses DIMACS CNF.  `c` lines are comments; the `p cnf` header is
/// required (its clause count is not enforced); clauses are 0-terminated
/// and may list one to three literals — shorter clauses are padded by
/// repeating their last literal.
pub fn parse_dimacs(text: &str) -> Result<Cnf, DimacsError> {
    let mut num_vars: Option<usize> = None;
    let mut clauses: Vec<[i32; 3]> = Vec::new();
    let mut current: Vec<i32> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('c') {
            continue;
        }
        if t.starts_with('p') {
            if num_vars.is_some() {
                return Err(DimacsError::BadHeader { line });
            }
            let toks: Vec<&str> = t.split_whitespace().collect();
            match toks.as_slice() {
                ["p", "cnf", vars, _clauses] => {
                    num_vars =
                        Some(vars.parse().map_err(|_| DimacsError::BadHeader { line })?);
                }
                _ => return Err(DimacsError::BadHeader { line }),
            }
            continue;
        }
        let Some(nv) = num_vars else {
            return Err(DimacsError::MissingHeader);
        };
        for tok in t.split_whitespace() {
            let lit: i32 = tok.parse().map_err(|_| DimacsError::BadLiteral {
                line,
                token: tok.to_string(),
            })?;
            if lit == 0 {
                let index = clauses.len() + 1;
                match current.len() {
                    0 => return Err(DimacsError::EmptyClause { index }),
                    1..=3 => {
                        let last = *current.last().expect("nonempty");
                        while current.len() < 3 {
                            current.push(last);
                        }
                        clauses.push([current[0], current[1], current[2]]);
                        current.clear();
                    }
                    found => return Err(DimacsError::TooManyLiterals { index, found }),
                }
            } else {
                if lit.unsigned_abs() as usize > nv {
                    return Err(DimacsError::LiteralOutOfRange {
                        literal: lit,
                        num_vars: nv,
                    });
                }
                current.push(lit);
            }
        }
    }
    if num_vars.is_none() {
        return Err(DimacsError::MissingHeader);
    }
    if !current.is_empty() {
        return Err(DimacsError::UnterminatedClause);
    }
    Ok(Cnf {
        num_vars: num_vars.expect("checked"),
        clauses,
    })
}

fn literal_var(lit: i32) -> Formula {
    let v = lit.unsigned_abs();
    if lit > 0 {
        Formula::var(format!("q_p_{v}"))
    } else {
        Formula::var(format!("q_np_{v}"))
    }
}

/// Encodes satisfiability as sequent *invalidity* over `BM_pl`: the instance
/// is satisfiable exactly when the returned sequent has a countervaluation.
///
/// Each clause `(L1,L2,L3)` becomes the premise `pl(L1, pl(L2, L3))` over
/// fresh variables `q_p_v`/`q_np_v`; for every occurring variable the premise
/// `pl(q_p_v, q_np_v)` and the conclusion `pl(q_np_v, q_p_v)` tie the two
/// polarities together.
///
/// Caveat: a clause whose last two literals are complementary makes its inner
/// formula coincide with one of those polarity conclusions, which can force
/// an unsatisfiable sequent even for a satisfiable instance.  Instances whose
/// clauses repeat no variable are always encoded faithfully.
pub fn sat_to_sequent(cnf: &Cnf) -> Sequent {
    let mut premises: Vec<Formula> = cnf
        .clauses
        .iter()
        .map(|&[l1, l2, l3]| pl(literal_var(l1), pl(literal_var(l2), literal_var(l3))))
        .collect();
    let mut conclusions = Vec::new();
    for v in cnf.occurring_vars() {
        let pos = Formula::var(format!("q_p_{v}"));
        let neg = Formula::var(format!("q_np_{v}"));
        premises.push(pl(pos.clone(), neg.clone()));
        conclusions.push(pl(neg, pos));
    }
    Sequent::new(premises, conclusions)
}

/// Brute-force satisfiability over all assignments; a test oracle, capped at
/// 24 variables.
pub fn sat_oracle(cnf: &Cnf) -> bool {
    assert!(cnf.num_vars <= 24, "oracle is exponential in variables");
    let satisfied = |assignment: u32, lit: i32| {
        let bit = assignment >> (lit.unsigned_abs() - 1) & 1 == 1;
        if lit > 0 {
            bit
        } else {
            !bit
        }
    };
    (0u32..1 << cnf.num_vars).any(|assignment| {
        cnf.clauses
            .iter()
            .all(|clause| clause.iter().any(|&lit| satisfied(assignment, lit)))
    })
}
