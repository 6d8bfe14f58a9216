//! Multiple-conclusion Hilbert calculi: finitely many schematic rules
//! `premises |- conclusions`, closed under substitution.
//!
//! Derivations are the bushy trees of multiple-conclusion proof theory: a
//! step instantiates a rule whose premise instances are already *available*
//! (an original premise, or a formula on the path from the root), and opens
//! one child branch per formula in the instantiated conclusion set.  A rule
//! with no conclusions discontinues its branch.  Every surviving leaf must
//! have reached one of the sequent's conclusions.
//!
//! [`prove`] searches for derivations bottom-up over the subformula universe
//! of the sequent (plus optional extra generators), which decides derivability
//! outright for the analytic calculi produced by [`crate::axiomatizer`].

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::formula::{
    closure, is_identifier, match_into, Formula, Signature, SignatureError, Substitution,
};
use crate::nmatrix::{Entailment, Nmatrix, Sequent};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CalculusError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate rule name `{0}`")]
    DuplicateRule(String),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("unknown builtin calculus `{0}`")]
    UnknownBuiltin(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DerivationError {
    #[error("derivation uses unknown rule `{0}`")]
    UnknownRule(String),
    #[error("premise {premise} of `{rule}` is not available on this branch")]
    PremiseNotAvailable { rule: String, premise: Formula },
    #[error("children of a `{rule}` step must carry exactly its conclusion instances")]
    ChildrenMismatch {
        rule: String,
        expected: Vec<Formula>,
        found: Vec<Formula>,
    },
    #[error("a rule instance with no conclusions must discontinue the branch (and only such an instance may)")]
    DiscontinuedMismatch { rule: String },
    #[error("open branch: no sequent conclusion was reached")]
    OpenBranch { label: Option<Formula> },
}

/// A named schematic rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub premises: BTreeSet<Formula>,
    pub conclusions: BTreeSet<Formula>,
}

impl Rule {
    pub fn new<P, C>(name: &str, premises: P, conclusions: C) -> Self
    where
        P: IntoIterator<Item = Formula>,
        C: IntoIterator<Item = Formula>,
    {
        Rule {
            name: name.to_string(),
            premises: premises.into_iter().collect(),
            conclusions: conclusions.into_iter().collect(),
        }
    }

    /// The rule read as a concrete sequent over its schematic variables.
    pub fn sequent(&self) -> Sequent {
        Sequent::new(self.premises.clone(), self.conclusions.clone())
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {} : {}", self.name, self.sequent())
    }
}

/// An ordered collection of uniquely named rules with a consistent signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSet {
    rules: Vec<Rule>,
    signature: Signature,
}

impl RuleSet {
    pub fn new(rules: Vec<Rule>) -> Result<Self, CalculusError> {
        let mut names = BTreeSet::new();
        for r in &rules {
            if !is_identifier(&r.name) {
                return Err(CalculusError::Parse {
                    line: 0,
                    message: format!("invalid rule name `{}`", r.name),
                });
            }
            if !names.insert(r.name.clone()) {
                return Err(CalculusError::DuplicateRule(r.name.clone()));
            }
        }
        let signature = crate::formula::infer_signature(
            rules
                .iter()
                .flat_map(|r| r.premises.iter().chain(r.conclusions.iter())),
        )?;
        Ok(RuleSet { rules, signature })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn get(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Connective arities inferred from the rule formulas.
    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    /// Concatenation; rule names must stay unique.
    pub fn union(&self, other: &RuleSet) -> Result<RuleSet, CalculusError> {
        let mut rules = self.rules.clone();
        rules.extend(other.rules.iter().cloned());
        RuleSet::new(rules)
    }

    /// Parses one `rule NAME : f1, f2 |- g1, g2` per line; `#` starts a
    /// comment.  Connectives are inferred from use and must have consistent
    /// arities.
    pub fn parse(text: &str) -> Result<Self, CalculusError> {
        let mut rules = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let t = raw.split('#').next().unwrap_or("").trim();
            if t.is_empty() {
                continue;
            }
            let rest = t.strip_prefix("rule ").ok_or_else(|| CalculusError::Parse {
                line,
                message: format!("expected `rule NAME : ...`, got `{t}`"),
            })?;
            let colon = rest.find(':').ok_or_else(|| CalculusError::Parse {
                line,
                message: "expected `:` after the rule name".to_string(),
            })?;
            let name = rest[..colon].trim();
            if !is_identifier(name) {
                return Err(CalculusError::Parse {
                    line,
                    message: format!("invalid rule name `{name}`"),
                });
            }
            let sequent =
                Sequent::parse_loose(&rest[colon + 1..]).map_err(|e| CalculusError::Parse {
                    line,
                    message: e.to_string(),
                })?;
            rules.push(Rule {
                name: name.to_string(),
                premises: sequent.premises().clone(),
                conclusions: sequent.conclusions().clone(),
            });
        }
        RuleSet::new(rules)
    }

    /// Canonical text form; `parse` of the result reproduces the set.
    pub fn format(&self) -> String {
        let mut out = String::new();
        for r in &self.rules {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }

    pub fn builtin_names() -> &'static [&'static str] {
        &[
            "R_pl",
            "R_sc_and",
            "R_sc_or",
            "R_sc_and_or",
            "R_mc_or",
            "R_mp",
            "R_wronski6",
            "R_and_pl",
            "R_or_pl",
            "R_and_or_pl",
        ]
    }

    /// The bundled calculi.  `R_pl` is the two-rule axiomatization of the
    /// platypus matrix; the `R_sc_*` sets are single-conclusion fragments;
    /// `R_wronski6` is a six-rule multiple-conclusion set sound for
    /// `Wronski_C`; the `R_*_pl` sets are unions.
    pub fn builtin(name: &str) -> Result<Self, CalculusError> {
        const PL: &str = "rule r_sc : p, q |- pl(p,q)\nrule r_mc : pl(p,q) |- p, q\n";
        const SC_AND: &str = "rule r_and_1 : and(p,q) |- p\n\
                              rule r_and_2 : and(p,q) |- q\n\
                              rule r_and_3 : p, q |- and(p,q)\n";
        const SC_OR: &str = "rule r_or_1 : p |- or(p,q)\n\
                             rule r_or_2 : or(p,p) |- p\n\
                             rule r_or_3 : or(p,q) |- or(q,p)\n\
                             rule r_or_4 : or(p,or(q,r)) |- or(or(p,q),r)\n";
        const AO: &str = "rule r_ao_1 : or(p,q), or(p,r) |- or(p,and(q,r))\n\
                          rule r_ao_2 : or(p,and(q,r)) |- or(p,q)\n\
                          rule r_ao_3 : or(p,and(q,r)) |- or(p,r)\n";
        const MC_OR: &str = "rule r_or_mc_1 : p |- or(p,q)\n\
                             rule r_or_mc_2 : q |- or(p,q)\n\
                             rule r_or_mc_3 : or(p,q) |- p, q\n";
        const MP: &str = "rule r_mp : p, imp(p,q) |- q\n";
        const W6: &str = "rule w1 : |- dot(dot(p,q),dot(p,q))\n\
                          rule w2 : q |- dot(p,q)\n\
                          rule w3 : dot(q,q) |- q, dot(p,q)\n\
                          rule w4 : dot(p,p) |- p, dot(p,q)\n\
                          rule w5 : p, dot(p,q) |- dot(q,q)\n\
                          rule w6 : dot(p,q) |- dot(p,p), dot(q,q)\n";

        let text = match name {
            "R_pl" => PL.to_string(),
            "R_sc_and" => SC_AND.to_string(),
            "R_sc_or" => SC_OR.to_string(),
            "R_sc_and_or" => format!("{SC_AND}{SC_OR}{AO}"),
            "R_mc_or" => MC_OR.to_string(),
            "R_mp" => MP.to_string(),
            "R_wronski6" => W6.to_string(),
            "R_and_pl" => format!("{SC_AND}{PL}"),
            "R_or_pl" => format!("{MC_OR}{PL}"),
            "R_and_or_pl" => format!("{SC_AND}{MC_OR}{PL}"),
            other => return Err(CalculusError::UnknownBuiltin(other.to_string())),
        };
        Ok(Self::parse(&text).expect("builtin calculus text"))
    }
}

impl fmt::Display for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format())
    }
}

/// One applied rule instance inside a derivation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationStep {
    pub rule: String,
    pub substitution: Substitution,
    pub children: Vec<DerivationChild>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DerivationChild {
    Formula(DerivationNode),
    Discontinued,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationNode {
    pub label: Formula,
    pub step: Option<DerivationStep>,
}

/// A derivation tree.  The root carries no formula; a root without a step
/// claims that a premise is already one of the sequent's conclusions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub step: Option<DerivationStep>,
}

impl Derivation {
    pub fn render(&self) -> String {
        let mut out = String::new();
        render_line(&mut out, 0, ".", self.step.as_ref());
        out
    }
}

fn render_line(out: &mut String, depth: usize, text: &str, step: Option<&DerivationStep>) {
    for _ in 0..depth {
        out.push_str("  ");
    }
    out.push_str(text);
    if let Some(s) = step {
        out.push_str(&format!("  [{} @ {}]", s.rule, s.substitution));
    }
    out.push('\n');
    if let Some(s) = step {
        for child in &s.children {
            match child {
                DerivationChild::Discontinued => {
                    for _ in 0..depth + 1 {
                        out.push_str("  ");
                    }
                    out.push_str("* discontinued\n");
                }
                DerivationChild::Formula(node) => {
                    render_line(out, depth + 1, &node.label.to_string(), node.step.as_ref());
                }
            }
        }
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Validates a derivation tree against a rule set and target sequent.
pub fn check_derivation(
    rules: &RuleSet,
    sequent: &Sequent,
    derivation: &Derivation,
) -> Result<(), DerivationError> {
    let mut path = Vec::new();
    check_node(rules, sequent, &mut path, None, derivation.step.as_ref())
}

fn check_node(
    rules: &RuleSet,
    sequent: &Sequent,
    path: &mut Vec<Formula>,
    label: Option<&Formula>,
    step: Option<&DerivationStep>,
) -> Result<(), DerivationError> {
    let available = |f: &Formula, path: &[Formula]| {
        sequent.premises().contains(f) || path.contains(f)
    };
    let Some(s) = step else {
        // a surviving leaf must have reached a conclusion
        if sequent.conclusions().iter().any(|c| available(c, path)) {
            return Ok(());
        }
        return Err(DerivationError::OpenBranch {
            label: label.cloned(),
        });
    };

    let rule = rules
        .get(&s.rule)
        .ok_or_else(|| DerivationError::UnknownRule(s.rule.clone()))?;
    let premises: BTreeSet<Formula> = rule
        .premises
        .iter()
        .map(|f| f.substitute(&s.substitution))
        .collect();
    let conclusions: BTreeSet<Formula> = rule
        .conclusions
        .iter()
        .map(|f| f.substitute(&s.substitution))
        .collect();
    for p in &premises {
        if !available(p, path) {
            return Err(DerivationError::PremiseNotAvailable {
                rule: s.rule.clone(),
                premise: p.clone(),
            });
        }
    }

    if conclusions.is_empty() {
        return match s.children.as_slice() {
            [DerivationChild::Discontinued] => Ok(()),
            _ => Err(DerivationError::DiscontinuedMismatch {
                rule: s.rule.clone(),
            }),
        };
    }
    let mut labels = BTreeSet::new();
    for child in &s.children {
        match child {
            DerivationChild::Discontinued => {
                return Err(DerivationError::DiscontinuedMismatch {
                    rule: s.rule.clone(),
                })
            }
            DerivationChild::Formula(node) => {
                labels.insert(node.label.clone());
            }
        }
    }
    if labels != conclusions {
        return Err(DerivationError::ChildrenMismatch {
            rule: s.rule.clone(),
            expected: conclusions.into_iter().collect(),
            found: labels.into_iter().collect(),
        });
    }
    for child in &s.children {
        if let DerivationChild::Formula(node) = child {
            path.push(node.label.clone());
            let result = check_node(rules, sequent, path, Some(&node.label), node.step.as_ref());
            path.pop();
            result?;
        }
    }
    Ok(())
}

/// Is the rule's schematic sequent valid in the matrix?  By structurality
/// this decides soundness of all its instances.  An `Invalid` result carries
/// the countervaluation.
///
/// # Panics
///
/// If the rule uses a connective the matrix does not interpret.
pub fn check_soundness(matrix: &Nmatrix, rule: &Rule) -> Entailment {
    matrix.entails(&rule.sequent())
}

/// Searches for a derivation over the subformula closure of the sequent and
/// `generators`, widened by one round of the rules' one-variable patterns
/// (see [`one_variable_schemas`]).  For calculi built by the axiomatizer, and
/// for separator-based sets like the bundled three-valued calculus, this
/// decides derivability; richer calculi may need extra generators.
pub fn prove(rules: &RuleSet, sequent: &Sequent, generators: &[Formula]) -> Option<Derivation> {
    prove_with_depth(rules, sequent, generators, usize::MAX)
}

/// [`prove`] restricted to derivations at most `max_depth` rule applications
/// deep along any branch.
pub fn prove_with_depth(
    rules: &RuleSet,
    sequent: &Sequent,
    generators: &[Formula],
    max_depth: usize,
) -> Option<Derivation> {
    let base = closure(
        sequent
            .premises()
            .iter()
            .chain(sequent.conclusions().iter())
            .chain(generators.iter()),
    );
    let mut widened = base.clone();
    for schema in one_variable_schemas(rules) {
        let var = schema
            .variables()
            .into_iter()
            .next()
            .expect("schema has a variable");
        for f in &base {
            let instance = schema.substitute(&Substitution::of(&[(var.as_str(), f.clone())]));
            widened.insert(instance);
        }
    }
    let universe: Vec<Formula> = closure(widened.iter()).into_iter().collect();
    let index: HashMap<&Formula, usize> =
        universe.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let words = universe.len().div_ceil(64).max(1);

    let mut instances = Vec::new();
    for (rule_idx, rule) in rules.rules().iter().enumerate() {
        for subst in rule_substitutions(rule, &universe) {
            let mut premise_mask = vec![0u64; words];
            for p in &rule.premises {
                set_bit(&mut premise_mask, index[&p.substitute(&subst)]);
            }
            let mut conclusion_idxs: Vec<usize> = rule
                .conclusions
                .iter()
                .map(|c| index[&c.substitute(&subst)])
                .collect();
            conclusion_idxs.sort_unstable();
            conclusion_idxs.dedup();
            let mut conclusion_mask = vec![0u64; words];
            for &c in &conclusion_idxs {
                set_bit(&mut conclusion_mask, c);
            }
            instances.push(Instance {
                rule_idx,
                subst,
                premise_mask,
                conclusion_idxs,
                conclusion_mask,
            });
        }
    }

    let mut delta_mask = vec![0u64; words];
    for c in sequent.conclusions() {
        set_bit(&mut delta_mask, index[c]);
    }
    let mut initial = vec![0u64; words];
    for p in sequent.premises() {
        set_bit(&mut initial, index[p]);
    }

    // Any branch applies at most |universe| growing steps plus one
    // discontinuation, so this budget means "unlimited".
    let budget = max_depth.min(universe.len() + 1);
    let mut search = Search {
        instances,
        delta_mask,
        memo: HashMap::new(),
    };
    if search.solve(initial.clone(), budget) {
        Some(Derivation {
            step: search.rebuild(rules, &universe, &initial),
        })
    } else {
        None
    }
}

/// Derivability over the sequent's own subformulas; see [`prove`].
pub fn decide_mc(rules: &RuleSet, sequent: &Sequent) -> bool {
    prove(rules, sequent, &[]).is_some()
}

/// The compound one-variable subformulas of the rules, each renamed to the
/// variable `p`.  Calculi synthesized from a matrix with non-trivial
/// separator formulas state those separators inside their rules (the
/// three-valued bundled calculus uses `dot(p,p)`), and their derivations are
/// complete only once the search universe carries the separators' instances
/// over the sequent's subformulas.  Rule sets whose schemas are plain
/// variables and multi-variable compounds contribute nothing here, keeping
/// the search universe at the plain subformula closure.
fn one_variable_schemas(rules: &RuleSet) -> BTreeSet<Formula> {
    let mut out = BTreeSet::new();
    for rule in rules.rules() {
        for formula in rule.premises.iter().chain(rule.conclusions.iter()) {
            for sub in formula.subformulas() {
                if matches!(sub, Formula::Var(_)) {
                    continue;
                }
                let vars: Vec<String> = sub.variables().into_iter().collect();
                if let [only] = vars.as_slice() {
                    let renamed =
                        sub.substitute(&Substitution::of(&[(only.as_str(), Formula::var("p"))]));
                    out.insert(renamed);
                }
            }
        }
    }
    out
}

/// All substitutions sending every schema formula of the rule into the
/// universe, found by structural matching (largest schemas first).
fn rule_substitutions(rule: &Rule, universe: &[Formula]) -> BTreeSet<Substitution> {
    let mut schemas: Vec<&Formula> = rule
        .premises
        .iter()
        .chain(rule.conclusions.iter())
        .collect();
    schemas.sort_by(|a, b| b.size().cmp(&a.size()).then_with(|| b.cmp(a)));
    schemas.dedup();

    let mut out = BTreeSet::new();
    fn extend(
        schemas: &[&Formula],
        k: usize,
        current: &Substitution,
        universe: &[Formula],
        out: &mut BTreeSet<Substitution>,
    ) {
        if k == schemas.len() {
            out.insert(current.clone());
            return;
        }
        for candidate in universe {
            let mut trial = current.clone();
            if match_into(schemas[k], candidate, &mut trial) {
                extend(schemas, k + 1, &trial, universe, out);
            }
        }
    }
    extend(&schemas, 0, &Substitution::new(), universe, &mut out);
    out
}

struct Instance {
    rule_idx: usize,
    subst: Substitution,
    premise_mask: Vec<u64>,
    conclusion_idxs: Vec<usize>,
    conclusion_mask: Vec<u64>,
}

#[derive(Clone, Copy)]
enum Close {
    /// The state already contains a sequent conclusion.
    Overlap,
    /// Applying this instance closes every child branch.
    Step(usize),
}

enum Entry {
    Closed(Close),
    /// Failed when this many depth units remained; retry only with more.
    Failed(usize),
}

struct Search {
    instances: Vec<Instance>,
    delta_mask: Vec<u64>,
    memo: HashMap<Vec<u64>, Entry>,
}

impl Search {
    fn solve(&mut self, state: Vec<u64>, remaining: usize) -> bool {
        if intersects(&state, &self.delta_mask) {
            self.memo.insert(state, Entry::Closed(Close::Overlap));
            return true;
        }
        if let Some(entry) = self.memo.get(&state) {
            match entry {
                Entry::Closed(_) => return true,
                Entry::Failed(r) if remaining <= *r => return false,
                Entry::Failed(_) => {}
            }
        }
        if remaining > 0 {
            for ii in 0..self.instances.len() {
                let inst = &self.instances[ii];
                if !subset(&inst.premise_mask, &state) {
                    continue;
                }
                if inst.conclusion_idxs.is_empty() {
                    self.memo.insert(state, Entry::Closed(Close::Step(ii)));
                    return true;
                }
                // An instance with a conclusion already available cannot
                // shorten anything: that child's subtree would already be a
                // derivation on its own.
                if intersects(&inst.conclusion_mask, &state) {
                    continue;
                }
                let conclusions = inst.conclusion_idxs.clone();
                let closed = conclusions.iter().all(|&c| {
                    let mut next = state.clone();
                    set_bit(&mut next, c);
                    self.solve(next, remaining - 1)
                });
                if closed {
                    self.memo.insert(state, Entry::Closed(Close::Step(ii)));
                    return true;
                }
            }
        }
        self.memo.insert(state, Entry::Failed(remaining));
        false
    }

    fn rebuild(
        &self,
        rules: &RuleSet,
        universe: &[Formula],
        state: &[u64],
    ) -> Option<DerivationStep> {
        match self.memo[state] {
            Entry::Closed(Close::Overlap) => None,
            Entry::Closed(Close::Step(ii)) => {
                let inst = &self.instances[ii];
                let children = if inst.conclusion_idxs.is_empty() {
                    vec![DerivationChild::Discontinued]
                } else {
                    inst.conclusion_idxs
                        .iter()
                        .map(|&c| {
                            let mut next = state.to_vec();
                            set_bit(&mut next, c);
                            DerivationChild::Formula(DerivationNode {
                                label: universe[c].clone(),
                                step: self.rebuild(rules, universe, &next),
                            })
                        })
                        .collect()
                };
                Some(DerivationStep {
                    rule: rules.rules()[inst.rule_idx].name.clone(),
                    substitution: inst.subst.clone(),
                    children,
                })
            }
            Entry::Failed(_) => unreachable!("rebuild only visits closed states"),
        }
    }
}

fn set_bit(mask: &mut [u64], i: usize) {
    mask[i / 64] |= 1 << (i % 64);
}

fn subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn intersects(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}
