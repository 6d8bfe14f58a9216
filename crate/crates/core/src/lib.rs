//! Finite nondeterministic-matrix semantics and multiple-conclusion Hilbert
//! calculi, built around the binary "platypus" connective `pl` — the
//! nondeterministic union of classical conjunction and disjunction.
//!
//! - [`formula`]: prefix-syntax formulas, signatures, substitution, matching
//! - [`multifun`]: Boolean multi-functions, liberal/synchronized composition
//! - [`nmatrix`]: (P)Nmatrices, valuations, entailment, strict products
//! - [`calculus`]: multiple-conclusion rules, derivations, analytic proof search
//! - [`axiomatizer`]: calculus synthesis from two-valued matrices
//! - [`platypus`]: the single-conclusion fragment of `pl` and a 3-SAT bridge

pub mod axiomatizer;
pub mod calculus;
pub mod formula;
pub mod multifun;
pub mod nmatrix;
pub mod platypus;
