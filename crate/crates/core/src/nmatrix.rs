//! Finite nondeterministic matrices: a value set with a designated subset and,
//! per connective, a table mapping value tuples to sets of values.  A matrix
//! with an empty cell is *partial* (a PNmatrix); valuations simply never reach
//! past an empty cell.
//!
//! Valuations are legal assignments on a subformula-closed domain, where the
//! value of a compound formula is chosen from the table cell of its immediate
//! subformulas' values.  `entails` searches for a countervaluation: all
//! premises designated, no conclusion designated.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::formula::{
    closure, is_identifier, parse_formula_list, parse_formula_list_loose, Formula, ParseError,
    Signature, SignatureError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown builtin matrix `{0}`")]
    UnknownBuiltin(String),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("matrix family index must be at least 1")]
    BadFamilyIndex,
    #[error("more than 255 truth values")]
    TooManyValues,
    #[error("domain is not closed under subformulas: missing {0}")]
    DomainNotClosed(Formula),
    #[error("`{name}` with {found} argument(s) is not interpreted by this matrix")]
    UninterpretedConnective { name: String, found: usize },
    #[error("formula {0} has variables other than `p`")]
    NotOneVariable(Formula),
    #[error("unknown truth value `{0}`")]
    UnknownValue(String),
    #[error("formula {0} from the base valuation is outside the requested domain")]
    BaseOutsideDomain(Formula),
    #[error("rename map must send value `{0}` to exactly one fresh token")]
    BadRename(String),
}

fn is_value_token(s: &str) -> bool {
    !s.is_empty() && s != ":" && s.chars().all(|c| !c.is_whitespace() && c != '#' && c != ':')
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Table {
    arity: usize,
    /// Tuple-indexed (first argument most significant); each cell holds
    /// ascending value indices.
    cells: Vec<Vec<u8>>,
}

/// A finite (P)Nmatrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nmatrix {
    signature: Signature,
    values: Vec<String>,
    designated: Vec<bool>,
    tables: BTreeMap<String, Table>,
    partial: bool,
}

fn tuple_count(n_values: usize, arity: usize) -> usize {
    n_values.pow(arity as u32)
}

/// Value-index tuples in row order: first position most significant.
fn tuples(n_values: usize, arity: usize) -> impl Iterator<Item = Vec<u8>> {
    (0..tuple_count(n_values, arity)).map(move |mut i| {
        let mut t = vec![0u8; arity];
        for pos in (0..arity).rev() {
            t[pos] = (i % n_values) as u8;
            i /= n_values;
        }
        t
    })
}

impl Nmatrix {
    fn new_raw(
        signature: Signature,
        values: Vec<String>,
        designated: Vec<bool>,
        tables: BTreeMap<String, Table>,
        declared_partial: bool,
    ) -> Result<Self, MatrixError> {
        if values.len() > 255 {
            return Err(MatrixError::TooManyValues);
        }
        let has_empty = tables.values().any(|t| t.cells.iter().any(Vec::is_empty));
        Ok(Nmatrix {
            signature,
            values,
            designated,
            tables,
            partial: declared_partial || has_empty,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn is_designated(&self, value: &str) -> Option<bool> {
        self.value_index(value).map(|i| self.designated[i])
    }

    /// Designated values in declaration order.
    pub fn designated_values(&self) -> Vec<&str> {
        self.values
            .iter()
            .zip(&self.designated)
            .filter(|(_, &d)| d)
            .map(|(v, _)| v.as_str())
            .collect()
    }

    pub fn is_partial(&self) -> bool {
        self.partial
    }

    pub fn is_deterministic(&self) -> bool {
        self.tables
            .values()
            .all(|t| t.cells.iter().all(|c| c.len() == 1))
    }

    fn value_index(&self, value: &str) -> Option<usize> {
        self.values.iter().position(|v| v == value)
    }

    /// Table cell, as value tokens.  Panics on an unknown connective or value;
    /// intended for tests and display code.
    pub fn cell(&self, connective: &str, args: &[&str]) -> Vec<String> {
        let table = self
            .tables
            .get(connective)
            .unwrap_or_else(|| panic!("no table for `{connective}`"));
        assert_eq!(args.len(), table.arity, "argument count");
        let idx = args.iter().fold(0usize, |acc, v| {
            acc * self.values.len()
                + self
                    .value_index(v)
                    .unwrap_or_else(|| panic!("unknown value `{v}`"))
        });
        table.cells[idx]
            .iter()
            .map(|&i| self.values[i as usize].clone())
            .collect()
    }

    /// Parses the line-oriented matrix format:
    ///
    /// ```text
    /// values: 0 1
    /// designated: 1
    /// partial: false        # optional, defaults to false
    /// op pl 2
    /// 0 0 : 0
    /// 0 1 : 0 1
    /// 1 0 : 0 1
    /// 1 1 : 1
    /// ```
    ///
    /// `#` starts a comment; rows may appear in any order within their block.
    pub fn parse(text: &str) -> Result<Self, MatrixError> {
        let err = |line: usize, message: String| MatrixError::Parse { line, message };
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .filter_map(|(i, raw)| {
                let t = raw.split('#').next().unwrap_or("").trim();
                (!t.is_empty()).then_some((i + 1, t))
            })
            .collect();
        let mut cursor = 0usize;

        let (vline, vrest) = match lines.first() {
            Some(&(n, l)) if l.starts_with("values:") => (n, &l["values:".len()..]),
            Some(&(n, _)) => return Err(err(n, "expected `values:` line".into())),
            None => return Err(err(1, "empty matrix description".into())),
        };
        cursor += 1;
        let mut values: Vec<String> = Vec::new();
        for tok in vrest.split_whitespace() {
            if !is_value_token(tok) {
                return Err(err(vline, format!("invalid value token `{tok}`")));
            }
            if values.iter().any(|v| v == tok) {
                return Err(err(vline, format!("duplicate value `{tok}`")));
            }
            values.push(tok.to_string());
        }
        if values.is_empty() {
            return Err(err(vline, "no values declared".into()));
        }

        let (dline, drest) = match lines.get(cursor) {
            Some(&(n, l)) if l.starts_with("designated:") => (n, &l["designated:".len()..]),
            Some(&(n, _)) => return Err(err(n, "expected `designated:` line".into())),
            None => return Err(err(vline + 1, "expected `designated:` line".into())),
        };
        cursor += 1;
        let mut designated = vec![false; values.len()];
        for tok in drest.split_whitespace() {
            match values.iter().position(|v| v == tok) {
                Some(i) => designated[i] = true,
                None => return Err(err(dline, format!("designated value `{tok}` not declared"))),
            }
        }

        let mut declared_partial = false;
        if let Some(&(n, l)) = lines.get(cursor) {
            if let Some(rest) = l.strip_prefix("partial:") {
                declared_partial = match rest.trim() {
                    "true" => true,
                    "false" => false,
                    other => return Err(err(n, format!("expected true or false, got `{other}`"))),
                };
                cursor += 1;
            }
        }

        let mut tables: BTreeMap<String, Table> = BTreeMap::new();
        let mut signature = Signature::new();
        while cursor < lines.len() {
            let (oline, olit) = lines[cursor];
            cursor += 1;
            let toks: Vec<&str> = olit.split_whitespace().collect();
            if toks.first() != Some(&"op") {
                return Err(err(oline, format!("expected an `op` line, got `{olit}`")));
            }
            if toks.len() != 3 {
                return Err(err(oline, "expected `op NAME ARITY`".into()));
            }
            let name = toks[1];
            if !is_identifier(name) {
                return Err(err(oline, format!("invalid connective name `{name}`")));
            }
            let arity: usize = toks[2]
                .parse()
                .map_err(|_| err(oline, format!("invalid arity `{}`", toks[2])))?;
            if tables.contains_key(name) {
                return Err(err(oline, format!("connective `{name}` declared twice")));
            }

            let n_rows = tuple_count(values.len(), arity);
            let mut cells: Vec<Option<Vec<u8>>> = vec![None; n_rows];
            let mut seen = 0usize;
            while seen < n_rows {
                let Some(&(rline, rlit)) = lines.get(cursor) else {
                    break;
                };
                let toks: Vec<&str> = rlit.split_whitespace().collect();
                if toks.first() == Some(&"op") {
                    break;
                }
                cursor += 1;
                let sep = toks
                    .iter()
                    .position(|&t| t == ":")
                    .ok_or_else(|| err(rline, "expected `:` in table row".into()))?;
                if toks[sep + 1..].contains(&":") {
                    return Err(err(rline, "more than one `:` in table row".into()));
                }
                if sep != arity {
                    return Err(err(
                        rline,
                        format!("row lists {sep} argument value(s), arity is {arity}"),
                    ));
                }
                let lookup = |tok: &str| {
                    values
                        .iter()
                        .position(|v| v == tok)
                        .map(|i| i as u8)
                        .ok_or_else(|| err(rline, format!("unknown value `{tok}`")))
                };
                let args = toks[..sep]
                    .iter()
                    .map(|t| lookup(t))
                    .collect::<Result<Vec<u8>, _>>()?;
                let mut out = toks[sep + 1..]
                    .iter()
                    .map(|t| lookup(t))
                    .collect::<Result<Vec<u8>, _>>()?;
                out.sort_unstable();
                out.dedup();
                if out.is_empty() && !declared_partial {
                    return Err(err(rline, "empty cell in a non-partial matrix".into()));
                }
                let idx = args
                    .iter()
                    .fold(0usize, |acc, &a| acc * values.len() + a as usize);
                if cells[idx].is_some() {
                    return Err(err(rline, "duplicate table row".into()));
                }
                cells[idx] = Some(out);
                seen += 1;
            }
            if seen < n_rows {
                let missing = tuples(values.len(), arity)
                    .enumerate()
                    .find(|(i, _)| cells[*i].is_none())
                    .map(|(_, t)| {
                        t.iter()
                            .map(|&i| values[i as usize].as_str())
                            .collect::<Vec<_>>()
                            .join(" ")
                    })
                    .unwrap_or_default();
                return Err(err(
                    oline,
                    format!("missing table row for `{name}` at `{missing}`"),
                ));
            }
            signature.declare(name, arity)?;
            tables.insert(
                name.to_string(),
                Table {
                    arity,
                    cells: cells.into_iter().map(Option::unwrap).collect(),
                },
            );
        }

        Self::new_raw(signature, values, designated, tables, declared_partial)
    }

    /// Canonical text form; `parse` of the result reproduces the matrix.
    pub fn format(&self) -> String {
        let mut out = String::new();
        out.push_str("values:");
        for v in &self.values {
            out.push(' ');
            out.push_str(v);
        }
        out.push('\n');
        out.push_str("designated:");
        for v in self.designated_values() {
            out.push(' ');
            out.push_str(v);
        }
        out.push('\n');
        if self.partial {
            out.push_str("partial: true\n");
        }
        for (name, table) in &self.tables {
            out.push_str(&format!("op {name} {}\n", table.arity));
            for (idx, tuple) in tuples(self.values.len(), table.arity).enumerate() {
                let mut line = String::new();
                for &a in &tuple {
                    line.push_str(&self.values[a as usize]);
                    line.push(' ');
                }
                line.push(':');
                for &v in &table.cells[idx] {
                    line.push(' ');
                    line.push_str(&self.values[v as usize]);
                }
                out.push_str(line.trim_start());
                out.push('\n');
            }
        }
        out
    }

    pub fn builtin_names() -> &'static [&'static str] {
        &[
            "BM_and",
            "BM_or",
            "BM_pl",
            "BM_and_or",
            "BM_and_pl",
            "BM_or_pl",
            "BM_and_or_pl",
            "BM_imp",
            "BM_pl_in",
            "BM_pl_el",
            "Wronski_C",
        ]
    }

    /// The bundled matrices.  `BM_pl` interprets the platypus connective over
    /// the Boolean values; `BM_pl_in`/`BM_pl_el` are its two strict-product
    /// factors; `Wronski_C` is the three-valued single-connective matrix whose
    /// logic has no finite single-conclusion axiomatization.
    pub fn builtin(name: &str) -> Result<Self, MatrixError> {
        const AND: &str = "op and 2\n0 0 : 0\n0 1 : 0\n1 0 : 0\n1 1 : 1\n";
        const OR: &str = "op or 2\n0 0 : 0\n0 1 : 1\n1 0 : 1\n1 1 : 1\n";
        const PL: &str = "op pl 2\n0 0 : 0\n0 1 : 0 1\n1 0 : 0 1\n1 1 : 1\n";
        const IMP: &str = "op imp 2\n0 0 : 0\n0 1 : 0 1\n1 0 : 0 1\n1 1 : 1\n";
        const PL_IN: &str = "op pl 2\n0 0 : 0 1\n0 1 : 0 1\n1 0 : 0 1\n1 1 : 1\n";
        const PL_EL: &str = "op pl 2\n0 0 : 0\n0 1 : 0 1\n1 0 : 0 1\n1 1 : 0 1\n";
        const BOOL: &str = "values: 0 1\ndesignated: 1\n";

        let text = match name {
            "BM_and" => format!("{BOOL}{AND}"),
            "BM_or" => format!("{BOOL}{OR}"),
            "BM_pl" => format!("{BOOL}{PL}"),
            "BM_and_or" => format!("{BOOL}{AND}{OR}"),
            "BM_and_pl" => format!("{BOOL}{AND}{PL}"),
            "BM_or_pl" => format!("{BOOL}{OR}{PL}"),
            "BM_and_or_pl" => format!("{BOOL}{AND}{OR}{PL}"),
            "BM_imp" => format!("{BOOL}{IMP}"),
            "BM_pl_in" => format!("{BOOL}{PL_IN}"),
            "BM_pl_el" => format!("{BOOL}{PL_EL}"),
            "Wronski_C" => "values: 0 1 2\ndesignated: 2\nop dot 2\n\
                            0 0 : 1\n0 1 : 2\n0 2 : 2\n\
                            1 0 : 2\n1 1 : 2\n1 2 : 2\n\
                            2 0 : 1\n2 1 : 2\n2 2 : 2\n"
                .to_string(),
            other => return Err(MatrixError::UnknownBuiltin(other.to_string())),
        };
        Ok(Self::parse(&text).expect("builtin matrix text"))
    }

    /// The witness family `M_n` over values `a0..an, 1` (designated `1`):
    /// `pl(1,x) = pl(x,1) = {1,x}`, the `a0`/`an` pair maps to `{1,a0}`, and
    /// every other `pl(ai,aj)` steps down deterministically to
    /// `a(min(i,j)-1)` (floored at `a0`).
    pub fn build_mn(n: usize) -> Result<Self, MatrixError> {
        if n < 1 {
            return Err(MatrixError::BadFamilyIndex);
        }
        let mut values: Vec<String> = (0..=n).map(|i| format!("a{i}")).collect();
        values.push("1".to_string());
        let one = (n + 1) as u8;
        let mut designated = vec![false; n + 2];
        designated[n + 1] = true;

        let cell = |x: u8, y: u8| -> Vec<u8> {
            if x == one || y == one {
                let other = if x == one { y } else { x };
                if other == one {
                    vec![one]
                } else {
                    vec![other, one]
                }
            } else {
                let (i, j) = (x.min(y) as usize, x.max(y) as usize);
                if i == 0 && j == n && n > 0 && x != y {
                    vec![0, one]
                } else {
                    vec![i.saturating_sub(1) as u8]
                }
            }
        };
        let cells = tuples(n + 2, 2).map(|t| cell(t[0], t[1])).collect();
        let signature = Signature::of(&[("pl", 2)]);
        let mut tables = BTreeMap::new();
        tables.insert("pl".to_string(), Table { arity: 2, cells });
        Self::new_raw(signature, values, designated, tables, false)
    }

    /// Legal valuations on a subformula-closed domain, in a fixed order:
    /// formulas are assigned smallest-first, values in declaration order.
    pub fn enumerate_valuations(
        &self,
        domain: &BTreeSet<Formula>,
    ) -> Result<ValuationIter<'_>, MatrixError> {
        self.iterator_with_pins(domain, Vec::new())
    }

    /// Legal valuations on `domain` that agree with `base` on its formulas.
    pub fn enumerate_extensions(
        &self,
        base: &Valuation,
        domain: &BTreeSet<Formula>,
    ) -> Result<ValuationIter<'_>, MatrixError> {
        let mut pins = Vec::new();
        for (f, v) in base.iter() {
            if !domain.contains(f) {
                return Err(MatrixError::BaseOutsideDomain(f.clone()));
            }
            let idx = self
                .value_index(v)
                .ok_or_else(|| MatrixError::UnknownValue(v.to_string()))?;
            pins.push((f.clone(), idx as u8));
        }
        self.iterator_with_pins(domain, pins)
    }

    fn iterator_with_pins(
        &self,
        domain: &BTreeSet<Formula>,
        pin_list: Vec<(Formula, u8)>,
    ) -> Result<ValuationIter<'_>, MatrixError> {
        let domain: Vec<Formula> = domain.iter().cloned().collect();
        let kinds = self.build_slots(&domain)?;
        let mut pins = vec![None; domain.len()];
        for (f, v) in pin_list {
            let i = domain.binary_search(&f).expect("pin inside domain");
            pins[i] = Some(v);
        }
        Ok(ValuationIter {
            matrix: self,
            domain,
            kinds,
            pins,
            levels: Vec::new(),
            first: true,
            done: false,
        })
    }

    /// One slot per domain formula, with argument back-references.  Fails if
    /// the domain is not subformula-closed or uses foreign connectives.
    fn build_slots<'m>(&'m self, domain: &[Formula]) -> Result<Vec<Slot<'m>>, MatrixError> {
        let index: HashMap<&Formula, usize> =
            domain.iter().enumerate().map(|(i, f)| (f, i)).collect();
        domain
            .iter()
            .enumerate()
            .map(|(i, f)| match f {
                Formula::Var(_) => Ok(Slot::Var),
                Formula::App(name, args) => {
                    let table = self
                        .tables
                        .get(name)
                        .filter(|t| t.arity == args.len())
                        .ok_or_else(|| MatrixError::UninterpretedConnective {
                            name: name.clone(),
                            found: args.len(),
                        })?;
                    let arg_slots = args
                        .iter()
                        .map(|a| {
                            index
                                .get(a)
                                .copied()
                                .filter(|&j| j < i)
                                .ok_or_else(|| MatrixError::DomainNotClosed(a.clone()))
                        })
                        .collect::<Result<Vec<usize>, _>>()?;
                    Ok(Slot::App { table, arg_slots })
                }
            })
            .collect()
    }

    /// Decides `premises |- conclusions`: valid iff no legal valuation on the
    /// subformula closure designates every premise and no conclusion.
    ///
    /// # Panics
    ///
    /// If the sequent uses a connective the matrix does not interpret.
    pub fn entails(&self, sequent: &Sequent) -> Entailment {
        let domain: Vec<Formula> =
            closure(sequent.premises.iter().chain(sequent.conclusions.iter()))
                .into_iter()
                .collect();
        let kinds = self
            .build_slots(&domain)
            .expect("sequent connectives must be interpreted by the matrix");

        // A countervaluation must designate Γ members and avoid designating
        // Δ members; everything else is free.
        #[derive(Clone, Copy, PartialEq)]
        enum Need {
            Any,
            Designated,
            Undesignated,
        }
        let need: Vec<Need> = domain
            .iter()
            .map(|f| {
                match (
                    sequent.premises.contains(f),
                    sequent.conclusions.contains(f),
                ) {
                    (true, true) => Need::Designated, // intersect with Undesignated below
                    (true, false) => Need::Designated,
                    (false, true) => Need::Undesignated,
                    (false, false) => Need::Any,
                }
            })
            .collect();
        // Overlapping formula: no assignment can serve both sides.
        if domain
            .iter()
            .any(|f| sequent.premises.contains(f) && sequent.conclusions.contains(f))
        {
            return Entailment::Valid;
        }

        let n_values = self.values.len();
        let admits = |need: Need, v: u8| match need {
            Need::Any => true,
            Need::Designated => self.designated[v as usize],
            Need::Undesignated => !self.designated[v as usize],
        };

        fn dfs(
            level: usize,
            assigned: &mut Vec<u8>,
            kinds: &[Slot<'_>],
            need: &[Need],
            n_values: usize,
            admits: &impl Fn(Need, u8) -> bool,
        ) -> bool {
            if level == kinds.len() {
                return true;
            }
            match &kinds[level] {
                Slot::Var => {
                    for v in 0..n_values as u8 {
                        if admits(need[level], v) {
                            assigned.push(v);
                            if dfs(level + 1, assigned, kinds, need, n_values, admits) {
                                return true;
                            }
                            assigned.pop();
                        }
                    }
                }
                Slot::App { table, arg_slots } => {
                    let idx = arg_slots
                        .iter()
                        .fold(0usize, |acc, &s| acc * n_values + assigned[s] as usize);
                    for &v in &table.cells[idx] {
                        if admits(need[level], v) {
                            assigned.push(v);
                            if dfs(level + 1, assigned, kinds, need, n_values, admits) {
                                return true;
                            }
                            assigned.pop();
                        }
                    }
                }
            }
            false
        }

        let mut assigned = Vec::with_capacity(domain.len());
        if dfs(0, &mut assigned, &kinds, &need, n_values, &admits) {
            let entries = domain
                .into_iter()
                .zip(assigned.iter().map(|&v| self.values[v as usize].clone()))
                .collect();
            Entailment::Invalid(Valuation { entries })
        } else {
            Entailment::Valid
        }
    }

    /// The multi-function a formula induces: for each assignment of values to
    /// its variables, the set of values the formula can take under some legal
    /// valuation extending that assignment.
    ///
    /// # Panics
    ///
    /// If the formula uses a connective the matrix does not interpret.
    pub fn formula_multifunction(&self, f: &Formula) -> FormulaMultifunction {
        let variables: Vec<String> = f.variables().into_iter().collect();
        self.formula_multifunction_over(f, &variables)
    }

    /// Same, over an explicit variable list (a superset of the formula's own
    /// variables).
    pub fn formula_multifunction_over(
        &self,
        f: &Formula,
        variables: &[String],
    ) -> FormulaMultifunction {
        for v in f.variables() {
            assert!(
                variables.contains(&v),
                "variable `{v}` missing from the index list"
            );
        }
        let mut domain = closure([f]);
        for v in variables {
            domain.insert(Formula::var(v.clone()));
        }
        let mut table = BTreeMap::new();
        for assignment in tuples(self.values.len(), variables.len()) {
            let pins: Vec<(Formula, u8)> = variables
                .iter()
                .zip(&assignment)
                .map(|(v, &val)| (Formula::var(v.clone()), val))
                .collect();
            let iter = self
                .iterator_with_pins(&domain, pins)
                .expect("formula connectives must be interpreted by the matrix");
            let mut outputs = BTreeSet::new();
            for valuation in iter {
                outputs.insert(valuation.get(f).unwrap().to_string());
            }
            let key: Vec<String> = assignment
                .iter()
                .map(|&v| self.values[v as usize].clone())
                .collect();
            table.insert(key, outputs);
        }
        FormulaMultifunction {
            variables: variables.to_vec(),
            table,
        }
    }

    /// Checks that the one-variable formulas in `separators` tell every pair
    /// of distinct values apart: some formula must be designated-only on one
    /// value and undesignated-only on the other.
    pub fn separates(&self, separators: &[Formula]) -> Result<SeparationVerdict, MatrixError> {
        let p = "p".to_string();
        for f in separators {
            if f.variables().iter().any(|v| v != "p") {
                return Err(MatrixError::NotOneVariable(f.clone()));
            }
        }
        // per formula, per value: is the output set all-designated / all-not?
        let mut all_d = Vec::new();
        let mut all_u = Vec::new();
        for f in separators {
            let table = self.formula_multifunction_over(f, std::slice::from_ref(&p));
            let mut d = Vec::new();
            let mut u = Vec::new();
            for v in &self.values {
                let out = table.get(&[v]).expect("total over the value set");
                d.push(!out.is_empty() && out.iter().all(|o| self.is_designated(o).unwrap()));
                u.push(!out.is_empty() && out.iter().all(|o| !self.is_designated(o).unwrap()));
            }
            all_d.push(d);
            all_u.push(u);
        }
        for i in 0..self.values.len() {
            for j in i + 1..self.values.len() {
                let separated = (0..separators.len())
                    .any(|f| (all_d[f][i] && all_u[f][j]) || (all_u[f][i] && all_d[f][j]));
                if !separated {
                    return Ok(SeparationVerdict::Unseparated {
                        left: self.values[i].clone(),
                        right: self.values[j].clone(),
                    });
                }
            }
        }
        Ok(SeparationVerdict::Separating)
    }

    /// Strict product: values are the designation-matched pairs
    /// `(D1×D2) ∪ ((V1∖D1)×(V2∖D2))`, designated exactly on `D1×D2`.  A
    /// connective interpreted on one side constrains that component only; a
    /// shared connective constrains both.  Cells can come out empty, making
    /// the product partial.
    pub fn strict_product(&self, other: &Nmatrix) -> Result<Nmatrix, MatrixError> {
        let signature = self.signature.merged(&other.signature)?;
        let mut pairs: Vec<(u8, u8)> = Vec::new();
        let mut values = Vec::new();
        let mut designated = Vec::new();
        for (i, vi) in self.values.iter().enumerate() {
            for (j, vj) in other.values.iter().enumerate() {
                if self.designated[i] == other.designated[j] {
                    pairs.push((i as u8, j as u8));
                    values.push(format!("({vi},{vj})"));
                    designated.push(self.designated[i]);
                }
            }
        }
        if values.len() > 255 {
            return Err(MatrixError::TooManyValues);
        }

        let mut tables = BTreeMap::new();
        for (name, arity) in signature.iter() {
            let t1 = self.tables.get(name);
            let t2 = other.tables.get(name);
            let cells = tuples(values.len(), arity)
                .map(|tuple| {
                    let firsts: Vec<u8> = tuple.iter().map(|&x| pairs[x as usize].0).collect();
                    let seconds: Vec<u8> = tuple.iter().map(|&x| pairs[x as usize].1).collect();
                    let c1 = t1.map(|t| {
                        let idx = firsts
                            .iter()
                            .fold(0usize, |acc, &a| acc * self.values.len() + a as usize);
                        &t.cells[idx]
                    });
                    let c2 = t2.map(|t| {
                        let idx = seconds
                            .iter()
                            .fold(0usize, |acc, &a| acc * other.values.len() + a as usize);
                        &t.cells[idx]
                    });
                    (0..values.len() as u8)
                        .filter(|&z| {
                            let (z1, z2) = pairs[z as usize];
                            c1.is_none_or(|c| c.contains(&z1))
                                && c2.is_none_or(|c| c.contains(&z2))
                        })
                        .collect()
                })
                .collect();
            tables.insert(name.to_string(), Table { arity, cells });
        }
        Nmatrix::new_raw(signature, values, designated, tables, false)
    }

    /// Renames every value; `map` must be a bijection from the current values
    /// onto fresh tokens.
    pub fn rename_values(&self, map: &BTreeMap<String, String>) -> Result<Nmatrix, MatrixError> {
        let mut new_values = Vec::with_capacity(self.values.len());
        for v in &self.values {
            let new = map.get(v).ok_or_else(|| MatrixError::BadRename(v.clone()))?;
            if !is_value_token(new) {
                return Err(MatrixError::UnknownValue(new.clone()));
            }
            if new_values.contains(new) {
                return Err(MatrixError::BadRename(v.clone()));
            }
            new_values.push(new.clone());
        }
        if map.len() != self.values.len() {
            let extra = map
                .keys()
                .find(|k| self.value_index(k).is_none())
                .cloned()
                .unwrap_or_default();
            return Err(MatrixError::UnknownValue(extra));
        }
        Ok(Nmatrix {
            signature: self.signature.clone(),
            values: new_values,
            designated: self.designated.clone(),
            tables: self.tables.clone(),
            partial: self.partial,
        })
    }

    /// Searches for a designation-preserving bijection of values mapping every
    /// table cell onto the corresponding cell.  Requires identical signatures.
    pub fn is_isomorphic_to(&self, other: &Nmatrix) -> Option<BTreeMap<String, String>> {
        if self.signature != other.signature
            || self.values.len() != other.values.len()
            || self.designated.iter().filter(|&&d| d).count()
                != other.designated.iter().filter(|&&d| d).count()
        {
            return None;
        }
        let n = self.values.len();
        let mut perm: Vec<u8> = vec![0; n];
        let mut used = vec![false; n];

        fn assign(
            pos: usize,
            perm: &mut Vec<u8>,
            used: &mut Vec<bool>,
            a: &Nmatrix,
            b: &Nmatrix,
        ) -> bool {
            let n = a.values.len();
            if pos == n {
                return tables_match(a, b, perm);
            }
            for cand in 0..n {
                if !used[cand] && a.designated[pos] == b.designated[cand] {
                    used[cand] = true;
                    perm[pos] = cand as u8;
                    if assign(pos + 1, perm, used, a, b) {
                        return true;
                    }
                    used[cand] = false;
                }
            }
            false
        }

        fn tables_match(a: &Nmatrix, b: &Nmatrix, perm: &[u8]) -> bool {
            let n = a.values.len();
            for (name, ta) in &a.tables {
                let tb = &b.tables[name];
                for (idx, tuple) in tuples(n, ta.arity).enumerate() {
                    let mapped_tuple: Vec<u8> = tuple.iter().map(|&x| perm[x as usize]).collect();
                    let b_idx = mapped_tuple
                        .iter()
                        .fold(0usize, |acc, &x| acc * n + x as usize);
                    let mut mapped_cell: Vec<u8> =
                        ta.cells[idx].iter().map(|&x| perm[x as usize]).collect();
                    mapped_cell.sort_unstable();
                    if mapped_cell != tb.cells[b_idx] {
                        return false;
                    }
                }
            }
            true
        }

        assign(0, &mut perm, &mut used, self, other).then(|| {
            self.values
                .iter()
                .enumerate()
                .map(|(i, v)| (v.clone(), other.values[perm[i] as usize].clone()))
                .collect()
        })
    }
}

impl fmt::Display for Nmatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format())
    }
}

enum Slot<'m> {
    Var,
    App {
        table: &'m Table,
        arg_slots: Vec<usize>,
    },
}

/// Iterator over the legal valuations of a domain; see
/// [`Nmatrix::enumerate_valuations`].
pub struct ValuationIter<'m> {
    matrix: &'m Nmatrix,
    domain: Vec<Formula>,
    kinds: Vec<Slot<'m>>,
    pins: Vec<Option<u8>>,
    levels: Vec<(Vec<u8>, usize)>, // (options, chosen index)
    first: bool,
    done: bool,
}

impl ValuationIter<'_> {
    fn value_at(&self, level: usize) -> u8 {
        let (opts, choice) = &self.levels[level];
        opts[*choice]
    }

    fn options_for(&self, level: usize) -> Vec<u8> {
        let raw: Vec<u8> = match &self.kinds[level] {
            Slot::Var => (0..self.matrix.values.len() as u8).collect(),
            Slot::App { table, arg_slots } => {
                let idx = arg_slots.iter().fold(0usize, |acc, &s| {
                    acc * self.matrix.values.len() + self.value_at(s) as usize
                });
                table.cells[idx].clone()
            }
        };
        match self.pins[level] {
            Some(p) => raw.into_iter().filter(|&v| v == p).collect(),
            None => raw,
        }
    }

    fn bump(&mut self) -> bool {
        while let Some((opts, choice)) = self.levels.last_mut() {
            if *choice + 1 < opts.len() {
                *choice += 1;
                return true;
            }
            self.levels.pop();
        }
        false
    }

    fn fill(&mut self) -> bool {
        while self.levels.len() < self.domain.len() {
            let opts = self.options_for(self.levels.len());
            if opts.is_empty() {
                if !self.bump() {
                    return false;
                }
            } else {
                self.levels.push((opts, 0));
            }
        }
        true
    }
}

impl Iterator for ValuationIter<'_> {
    type Item = Valuation;

    fn next(&mut self) -> Option<Valuation> {
        if self.done {
            return None;
        }
        let moved = if self.first {
            self.first = false;
            true
        } else {
            self.bump()
        };
        if !moved || !self.fill() {
            self.done = true;
            return None;
        }
        let entries = self
            .domain
            .iter()
            .enumerate()
            .map(|(i, f)| {
                (
                    f.clone(),
                    self.matrix.values[self.value_at(i) as usize].clone(),
                )
            })
            .collect();
        Some(Valuation { entries })
    }
}

/// A legal valuation: formula/value pairs in canonical formula order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation {
    entries: Vec<(Formula, String)>,
}

impl Valuation {
    pub fn get(&self, f: &Formula) -> Option<&str> {
        self.entries
            .binary_search_by(|(g, _)| g.cmp(f))
            .ok()
            .map(|i| self.entries[i].1.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Formula, &str)> {
        self.entries.iter().map(|(f, v)| (f, v.as_str()))
    }

    /// One `formula = value` line per domain formula, canonically ordered.
    pub fn render(&self, indent: &str) -> String {
        let mut out = String::new();
        for (f, v) in &self.entries {
            out.push_str(indent);
            out.push_str(&f.to_string());
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(""))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entailment {
    Valid,
    Invalid(Valuation),
}

impl Entailment {
    pub fn is_valid(&self) -> bool {
        matches!(self, Entailment::Valid)
    }

    pub fn countervaluation(&self) -> Option<&Valuation> {
        match self {
            Entailment::Valid => None,
            Entailment::Invalid(v) => Some(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeparationVerdict {
    Separating,
    Unseparated { left: String, right: String },
}

/// The multi-function induced by a formula; see
/// [`Nmatrix::formula_multifunction`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaMultifunction {
    pub variables: Vec<String>,
    pub table: BTreeMap<Vec<String>, BTreeSet<String>>,
}

impl FormulaMultifunction {
    pub fn get(&self, args: &[&str]) -> Option<&BTreeSet<String>> {
        let key: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        self.table.get(&key)
    }
}

/// `premises |- conclusions`, both finite formula sets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Sequent {
    premises: BTreeSet<Formula>,
    conclusions: BTreeSet<Formula>,
}

impl Sequent {
    pub fn new<P, C>(premises: P, conclusions: C) -> Self
    where
        P: IntoIterator<Item = Formula>,
        C: IntoIterator<Item = Formula>,
    {
        Sequent {
            premises: premises.into_iter().collect(),
            conclusions: conclusions.into_iter().collect(),
        }
    }

    pub fn premises(&self) -> &BTreeSet<Formula> {
        &self.premises
    }

    pub fn conclusions(&self) -> &BTreeSet<Formula> {
        &self.conclusions
    }

    /// Parses `f1, f2 |- g1, g2`; either side may be empty.
    pub fn parse(text: &str, sig: &Signature) -> Result<Self, ParseError> {
        let (lhs, rhs) = split_turnstile(text)?;
        Ok(Sequent::new(
            parse_formula_list(lhs, sig)?,
            parse_formula_list(rhs, sig)?,
        ))
    }

    /// Signature-free variant (see [`crate::formula::parse_formula_loose`]).
    pub fn parse_loose(text: &str) -> Result<Self, ParseError> {
        let (lhs, rhs) = split_turnstile(text)?;
        Ok(Sequent::new(
            parse_formula_list_loose(lhs)?,
            parse_formula_list_loose(rhs)?,
        ))
    }
}

fn split_turnstile(text: &str) -> Result<(&str, &str), ParseError> {
    let pos = text.find("|-").ok_or_else(|| ParseError::Syntax {
        pos: text.len(),
        message: "expected `|-`".to_string(),
    })?;
    let (lhs, rest) = (&text[..pos], &text[pos + 2..]);
    if let Some(second) = rest.find("|-") {
        return Err(ParseError::Syntax {
            pos: pos + 2 + second,
            message: "more than one `|-`".to_string(),
        });
    }
    Ok((lhs, rest))
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |side: &BTreeSet<Formula>| {
            side.iter()
                .map(|g| g.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        let (lhs, rhs) = (join(&self.premises), join(&self.conclusions));
        match (lhs.is_empty(), rhs.is_empty()) {
            (true, true) => f.write_str("|-"),
            (true, false) => write!(f, "|- {rhs}"),
            (false, true) => write!(f, "{lhs} |-"),
            (false, false) => write!(f, "{lhs} |- {rhs}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn bm(name: &str) -> Nmatrix {
        Nmatrix::builtin(name).unwrap()
    }

    fn seq(m: &Nmatrix, text: &str) -> Sequent {
        Sequent::parse(text, m.signature()).unwrap()
    }

    #[test]
    fn builtin_tables() {
        let pl = bm("BM_pl");
        assert_eq!(pl.cell("pl", &["0", "0"]), ["0"]);
        assert_eq!(pl.cell("pl", &["0", "1"]), ["0", "1"]);
        assert_eq!(pl.cell("pl", &["1", "0"]), ["0", "1"]);
        assert_eq!(pl.cell("pl", &["1", "1"]), ["1"]);
        assert!(!pl.is_deterministic() && !pl.is_partial());

        let pl_in = bm("BM_pl_in");
        assert_eq!(pl_in.cell("pl", &["0", "0"]), ["0", "1"]);
        assert_eq!(pl_in.cell("pl", &["1", "1"]), ["1"]);
        let pl_el = bm("BM_pl_el");
        assert_eq!(pl_el.cell("pl", &["0", "0"]), ["0"]);
        assert_eq!(pl_el.cell("pl", &["1", "1"]), ["0", "1"]);

        let c = bm("Wronski_C");
        assert_eq!(c.values(), ["0", "1", "2"]);
        assert_eq!(c.designated_values(), ["2"]);
        assert_eq!(c.cell("dot", &["0", "0"]), ["1"]);
        assert_eq!(c.cell("dot", &["2", "0"]), ["1"]);
        assert_eq!(c.cell("dot", &["1", "0"]), ["2"]);
        assert!(c.is_deterministic());

        let both = bm("BM_and_or_pl");
        assert_eq!(both.signature().len(), 3);
        assert_eq!(both.cell("and", &["1", "0"]), ["0"]);
        assert_eq!(both.cell("or", &["1", "0"]), ["1"]);
    }

    #[test]
    fn parse_and_format_round_trip() {
        for name in Nmatrix::builtin_names() {
            let m = bm(name);
            assert_eq!(Nmatrix::parse(&m.format()).unwrap(), m, "{name}");
        }
    }

    #[test]
    fn parse_accepts_comments_and_any_row_order() {
        let m = Nmatrix::parse(
            "# a comment\nvalues: 0 1\ndesignated: 1\nop pl 2\n1 1 : 1\n0 1 : 0 1  # swap\n1 0 : 1 0\n0 0 : 0\n",
        )
        .unwrap();
        assert_eq!(m, bm("BM_pl"));
    }

    #[test]
    fn parse_errors() {
        let assert_parse_err = |text: &str, needle: &str| {
            match Nmatrix::parse(text) {
                Err(MatrixError::Parse { message, .. }) => {
                    assert!(message.contains(needle), "`{message}` vs `{needle}`")
                }
                other => panic!("expected parse error containing `{needle}`, got {other:?}"),
            };
        };
        assert_parse_err("designated: 1\n", "expected `values:`");
        assert_parse_err("values: 0 0\n", "duplicate value");
        assert_parse_err("values: 0 1\ndesignated: 2\n", "not declared");
        assert_parse_err(
            "values: 0 1\ndesignated: 1\nop pl 2\n0 0 : 0\n",
            "missing table row for `pl` at `0 1`",
        );
        assert_parse_err(
            "values: 0 1\ndesignated: 1\nop pl 2\n0 0 :\n0 1 : 1\n1 0 : 1\n1 1 : 1\n",
            "empty cell",
        );
        assert_parse_err(
            "values: 0 1\ndesignated: 1\nop pl 2\n0 0 : 2\n",
            "unknown value",
        );
        assert_parse_err(
            "values: 0 1\ndesignated: 1\nop pl 1\n0 0 : 1\n1 : 1\n",
            "arity is 1",
        );
    }

    #[test]
    fn partial_matrix_is_flagged() {
        let m = Nmatrix::parse(
            "values: 0 1\ndesignated: 1\npartial: true\nop f 1\n0 :\n1 : 1\n",
        )
        .unwrap();
        assert!(m.is_partial());
        assert!(m.format().contains("partial: true"));
        // a declared-partial matrix with no empty cells stays partial
        let n = Nmatrix::parse("values: 0 1\ndesignated: 1\npartial: true\n").unwrap();
        assert!(n.is_partial());
    }

    #[test]
    fn valuation_enumeration_counts_and_order() {
        let m = bm("BM_pl");
        let f = parse_formula("pl(p,q)", m.signature()).unwrap();
        let domain = f.subformulas();
        let vals: Vec<Valuation> = m.enumerate_valuations(&domain).unwrap().collect();
        assert_eq!(vals.len(), 6);
        let first = &vals[0];
        assert_eq!(first.render(""), "p = 0\nq = 0\npl(p,q) = 0\n");
        // deterministic matrix: exactly |V|^|vars| valuations
        let and = bm("BM_and");
        let g = parse_formula("and(p,q)", and.signature()).unwrap();
        assert_eq!(and.enumerate_valuations(&g.subformulas()).unwrap().count(), 4);
    }

    #[test]
    fn enumeration_rejects_open_domains() {
        let m = bm("BM_pl");
        let f = parse_formula("pl(p,q)", m.signature()).unwrap();
        let mut domain = BTreeSet::new();
        domain.insert(f);
        assert!(matches!(
            m.enumerate_valuations(&domain),
            Err(MatrixError::DomainNotClosed(_))
        ));
    }

    #[test]
    fn extension_enumeration_respects_pins() {
        let m = bm("BM_pl");
        let f = parse_formula("pl(p,q)", m.signature()).unwrap();
        let small: BTreeSet<Formula> = [Formula::var("p"), Formula::var("q")]
            .into_iter()
            .collect();
        let base = m
            .enumerate_valuations(&small)
            .unwrap()
            .nth(1)
            .unwrap(); // p = 0, q = 1
        assert_eq!(base.get(&Formula::var("q")), Some("1"));
        let big = f.subformulas();
        let exts: Vec<Valuation> = m.enumerate_extensions(&base, &big).unwrap().collect();
        assert_eq!(exts.len(), 2); // the pl cell at (0,1) is {0,1}
        for e in &exts {
            assert_eq!(e.get(&Formula::var("p")), Some("0"));
        }
    }

    #[test]
    fn entailment_basics() {
        let m = bm("BM_pl");
        assert!(m.entails(&seq(&m, "pl(p,q) |- p, q")).is_valid());
        assert!(m.entails(&seq(&m, "p, q |- pl(p,q)")).is_valid());
        assert!(m.entails(&seq(&m, "p |- pl(p,p)")).is_valid());
        assert!(m.entails(&seq(&m, "pl(p,p) |- p")).is_valid());
        assert!(m.entails(&seq(&m, "p |- p, q")).is_valid());
        assert!(!m.entails(&seq(&m, "p |- q")).is_valid());
        assert!(!m.entails(&seq(&m, "|-")).is_valid());
        assert!(!m.entails(&seq(&m, "|- pl(p,q)")).is_valid());
    }

    #[test]
    fn platypus_is_not_commutative() {
        let m = bm("BM_pl");
        let verdict = m.entails(&seq(&m, "pl(p,q) |- pl(q,p)"));
        let counter = verdict.countervaluation().expect("invalid");
        assert_eq!(
            counter.render(""),
            "p = 0\nq = 1\npl(p,q) = 1\npl(q,p) = 0\n"
        );
    }

    #[test]
    fn countervaluations_are_legal_and_witnessing(){
        let m = bm("BM_and_or_pl");
        let s = seq(&m, "pl(p,q), and(p,p) |- or(q,q), pl(q,p)");
        if let Entailment::Invalid(v) = m.entails(&s) {
            for f in s.premises() {
                assert_eq!(m.is_designated(v.get(f).unwrap()), Some(true));
            }
            for f in s.conclusions() {
                assert_eq!(m.is_designated(v.get(f).unwrap()), Some(false));
            }
            // every app entry is inside its table cell
            for (f, val) in v.iter() {
                if let Formula::App(name, args) = f {
                    let arg_vals: Vec<&str> =
                        args.iter().map(|a| v.get(a).unwrap()).collect();
                    assert!(m.cell(name, &arg_vals).iter().any(|c| c == val));
                }
            }
        } else {
            panic!("expected a countervaluation");
        }
    }

    #[test]
    fn induced_multifunction_of_pl_formula() {
        let m = bm("BM_pl");
        let f = parse_formula("pl(p,q)", m.signature()).unwrap();
        let table = m.formula_multifunction(&f);
        assert_eq!(table.variables, ["p", "q"]);
        let set = |vals: &[&str]| {
            vals.iter()
                .map(|s| s.to_string())
                .collect::<BTreeSet<String>>()
        };
        assert_eq!(table.get(&["0", "0"]).unwrap(), &set(&["0"]));
        assert_eq!(table.get(&["0", "1"]).unwrap(), &set(&["0", "1"]));
        assert_eq!(table.get(&["1", "1"]).unwrap(), &set(&["1"]));

        // one-variable diagonal: forced to the variable's value
        let diag = parse_formula("pl(p,p)", m.signature()).unwrap();
        let dt = m.formula_multifunction(&diag);
        assert_eq!(dt.get(&["0"]).unwrap(), &set(&["0"]));
        assert_eq!(dt.get(&["1"]).unwrap(), &set(&["1"]));
    }

    #[test]
    fn wronski_separators() {
        let c = bm("Wronski_C");
        let p = Formula::var("p");
        let dpp = parse_formula("dot(p,p)", c.signature()).unwrap();
        assert_eq!(
            c.separates(&[p.clone(), dpp]).unwrap(),
            SeparationVerdict::Separating
        );
        assert_eq!(
            c.separates(&[p]).unwrap(),
            SeparationVerdict::Unseparated {
                left: "0".to_string(),
                right: "1".to_string()
            }
        );
    }

    #[test]
    fn strict_product_factors_platypus() {
        let product = bm("BM_pl_in").strict_product(&bm("BM_pl_el")).unwrap();
        assert_eq!(product.values(), ["(0,0)", "(1,1)"]);
        assert_eq!(product.designated_values(), ["(1,1)"]);
        assert!(!product.is_partial());
        let iso = product.is_isomorphic_to(&bm("BM_pl")).unwrap();
        assert_eq!(iso[&"(0,0)".to_string()], "0");
        assert_eq!(iso[&"(1,1)".to_string()], "1");
    }

    #[test]
    fn disjoint_product_runs_components_side_by_side() {
        let product = bm("BM_and").strict_product(&bm("BM_or")).unwrap();
        assert_eq!(product.values(), ["(0,0)", "(1,1)"]);
        assert!(product.is_deterministic());
        assert_eq!(product.cell("and", &["(1,1)", "(0,0)"]), ["(0,0)"]);
        assert_eq!(product.cell("or", &["(1,1)", "(0,0)"]), ["(1,1)"]);
    }

    #[test]
    fn conflicting_shared_connective_makes_the_product_partial() {
        // `f` must output 0 on the left component and 1 on the right; no
        // designation-matched pair satisfies both.
        let left = Nmatrix::parse("values: 0 1\ndesignated: 1\nop f 1\n0 : 0\n1 : 0\n").unwrap();
        let right = Nmatrix::parse("values: 0 1\ndesignated: 1\nop f 1\n0 : 1\n1 : 1\n").unwrap();
        let product = left.strict_product(&right).unwrap();
        assert!(product.is_partial());
        assert!(product.format().contains("partial: true"));
        assert!(product.cell("f", &["(0,0)"]).is_empty());
    }

    #[test]
    fn isomorphism_respects_tables_and_designation() {
        let m = bm("BM_pl");
        let renamed = m
            .rename_values(
                &[("0".to_string(), "F".to_string()), ("1".to_string(), "T".to_string())]
                    .into_iter()
                    .collect(),
            )
            .unwrap();
        let iso = m.is_isomorphic_to(&renamed).unwrap();
        assert_eq!(iso[&"0".to_string()], "F");
        assert!(bm("BM_and").is_isomorphic_to(&bm("BM_or")).is_none());
        assert!(bm("BM_pl").is_isomorphic_to(&bm("BM_pl_in")).is_none());
    }

    #[test]
    fn mn_family_tables() {
        assert!(matches!(Nmatrix::build_mn(0), Err(MatrixError::BadFamilyIndex)));
        let m1 = Nmatrix::build_mn(1).unwrap();
        assert_eq!(m1.values(), ["a0", "a1", "1"]);
        assert_eq!(m1.designated_values(), ["1"]);
        assert_eq!(m1.cell("pl", &["a0", "a1"]), ["a0", "1"]);
        assert_eq!(m1.cell("pl", &["a1", "a0"]), ["a0", "1"]);
        assert_eq!(m1.cell("pl", &["a0", "a0"]), ["a0"]);
        assert_eq!(m1.cell("pl", &["a1", "a1"]), ["a0"]);
        assert_eq!(m1.cell("pl", &["1", "a0"]), ["a0", "1"]);
        assert_eq!(m1.cell("pl", &["1", "1"]), ["1"]);
        assert!(!m1.is_deterministic());

        let m3 = Nmatrix::build_mn(3).unwrap();
        assert_eq!(m3.cell("pl", &["a1", "a2"]), ["a0"]);
        assert_eq!(m3.cell("pl", &["a2", "a3"]), ["a1"]);
        assert_eq!(m3.cell("pl", &["a0", "a3"]), ["a0", "1"]);
        assert_eq!(m3.cell("pl", &["a0", "a2"]), ["a0"]);
    }

    #[test]
    fn sequent_text_round_trips() {
        let m = bm("BM_pl");
        for text in ["pl(p,q) |- p, q", "|- p", "p |-", "|-", "p, pl(p,q) |- q"] {
            let s = seq(&m, text);
            assert_eq!(s.to_string(), text);
            assert_eq!(Sequent::parse(&s.to_string(), m.signature()).unwrap(), s);
        }
        assert!(Sequent::parse("p - q", m.signature()).is_err());
        assert!(Sequent::parse("p |- q |- r", m.signature()).is_err());
    }
}
