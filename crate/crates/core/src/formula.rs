//! Formulas over a declared signature of connectives.
//!
//! Concrete syntax is prefix-only: `pl(p,q)`, `and(pl(p,q),r)`.  An identifier
//! that is not declared as a connective is a variable; a nullary connective is
//! written as a bare identifier.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// `[a-zA-Z_][a-zA-Z0-9_]*`
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Maps connective names to arities.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    arities: BTreeMap<String, usize>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignatureError {
    #[error("`{0}` is not a valid connective name")]
    InvalidName(String),
    #[error("connective `{0}` declared twice")]
    Duplicate(String),
    #[error("connective `{name}` used with arity {left} and with arity {right}")]
    ArityConflict { name: String, left: usize, right: usize },
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, name: impl Into<String>, arity: usize) -> Result<(), SignatureError> {
        let name = name.into();
        if !is_identifier(&name) {
            return Err(SignatureError::InvalidName(name));
        }
        if self.arities.contains_key(&name) {
            return Err(SignatureError::Duplicate(name));
        }
        self.arities.insert(name, arity);
        Ok(())
    }

    /// Convenience constructor; panics on an invalid or duplicate name.
    pub fn of(pairs: &[(&str, usize)]) -> Self {
        let mut sig = Self::new();
        for &(name, arity) in pairs {
            sig.declare(name, arity).unwrap();
        }
        sig
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.arities.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.arities.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.arities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arities.is_empty()
    }

    /// Connectives in name order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.arities.iter().map(|(n, &a)| (n.as_str(), a))
    }

    /// Union of two signatures; a shared name must have the same arity in both.
    pub fn merged(&self, other: &Self) -> Result<Self, SignatureError> {
        let mut out = self.clone();
        for (name, &arity) in &other.arities {
            match out.arities.get(name) {
                Some(&a) if a != arity => {
                    return Err(SignatureError::ArityConflict {
                        name: name.clone(),
                        left: a,
                        right: arity,
                    })
                }
                Some(_) => {}
                None => {
                    out.arities.insert(name.clone(), arity);
                }
            }
        }
        Ok(out)
    }
}

/// Collects the connectives used in `formulas`, erroring if a name occurs with
/// two different arities.
pub fn infer_signature<'a, I>(formulas: I) -> Result<Signature, SignatureError>
where
    I: IntoIterator<Item = &'a Formula>,
{
    fn walk(f: &Formula, sig: &mut Signature) -> Result<(), SignatureError> {
        if let Formula::App(name, args) = f {
            match sig.arity(name) {
                Some(a) if a != args.len() => {
                    return Err(SignatureError::ArityConflict {
                        name: name.clone(),
                        left: a,
                        right: args.len(),
                    })
                }
                Some(_) => {}
                None => sig.declare(name.clone(), args.len())?,
            }
            for a in args {
                walk(a, sig)?;
            }
        }
        Ok(())
    }
    let mut sig = Signature::new();
    for f in formulas {
        walk(f, &mut sig)?;
    }
    Ok(sig)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Var(String),
    App(String, Vec<Formula>),
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Self {
        Formula::Var(name.into())
    }

    pub fn app(name: impl Into<String>, args: Vec<Formula>) -> Self {
        Formula::App(name.into(), args)
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Var(_) => 1,
            Formula::App(_, args) => 1 + args.iter().map(Formula::size).sum::<usize>(),
        }
    }

    /// Nesting depth; variables have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Var(_) => 0,
            Formula::App(_, args) => 1 + args.iter().map(Formula::depth).max().unwrap_or(0),
        }
    }

    /// All subformulas, itself included.
    pub fn subformulas(&self) -> BTreeSet<Formula> {
        closure([self])
    }

    pub fn variables(&self) -> BTreeSet<String> {
        fn walk(f: &Formula, out: &mut BTreeSet<String>) {
            match f {
                Formula::Var(v) => {
                    out.insert(v.clone());
                }
                Formula::App(_, args) => args.iter().for_each(|a| walk(a, out)),
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut out);
        out
    }

    pub fn substitute(&self, subst: &Substitution) -> Formula {
        match self {
            Formula::Var(v) => subst.get(v).cloned().unwrap_or_else(|| self.clone()),
            Formula::App(name, args) => Formula::App(
                name.clone(),
                args.iter().map(|a| a.substitute(subst)).collect(),
            ),
        }
    }
}

/// Subformula closure of a set of formulas.
pub fn closure<'a, I>(formulas: I) -> BTreeSet<Formula>
where
    I: IntoIterator<Item = &'a Formula>,
{
    fn walk(f: &Formula, out: &mut BTreeSet<Formula>) {
        if out.insert(f.clone()) {
            if let Formula::App(_, args) = f {
                args.iter().for_each(|a| walk(a, out));
            }
        }
    }
    let mut out = BTreeSet::new();
    for f in formulas {
        walk(f, &mut out);
    }
    out
}

/// Matches `schema` against `target`, binding the schema's variables.
/// Rejects conflicting bindings (`pl(p,p)` does not match `pl(a,b)`).
pub fn match_schema(schema: &Formula, target: &Formula) -> Option<Substitution> {
    let mut subst = Substitution::new();
    match_into(schema, target, &mut subst).then_some(subst)
}

/// Extends `subst` so that `schema.substitute(subst) == target`.  On failure
/// `subst` may hold partial bindings; callers that need rollback clone first.
pub(crate) fn match_into(schema: &Formula, target: &Formula, subst: &mut Substitution) -> bool {
    match schema {
        Formula::Var(v) => match subst.get(v) {
            Some(bound) => bound == target,
            None => {
                subst.bind(v.clone(), target.clone());
                true
            }
        },
        Formula::App(name, args) => match target {
            Formula::App(tname, targs) if tname == name && targs.len() == args.len() => args
                .iter()
                .zip(targs)
                .all(|(a, t)| match_into(a, t, subst)),
            _ => false,
        },
    }
}

// Canonical order: size, then printed form, then structure.  The structural
// tiebreak keeps the order consistent with `Eq` when a variable and a nullary
// connective print identically.
impl Ord for Formula {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size()
            .cmp(&other.size())
            .then_with(|| self.to_string().cmp(&other.to_string()))
            .then_with(|| structural_cmp(self, other))
    }
}

impl PartialOrd for Formula {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn structural_cmp(a: &Formula, b: &Formula) -> Ordering {
    match (a, b) {
        (Formula::Var(x), Formula::Var(y)) => x.cmp(y),
        (Formula::Var(_), Formula::App(..)) => Ordering::Less,
        (Formula::App(..), Formula::Var(_)) => Ordering::Greater,
        (Formula::App(n, xs), Formula::App(m, ys)) => n
            .cmp(m)
            .then_with(|| xs.len().cmp(&ys.len()))
            .then_with(|| {
                xs.iter()
                    .zip(ys)
                    .map(|(x, y)| structural_cmp(x, y))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            }),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Var(name) => f.write_str(name),
            Formula::App(name, args) => {
                f.write_str(name)?;
                if args.is_empty() {
                    return Ok(());
                }
                f.write_str("(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Finite map from variable names to formulas.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Substitution {
    map: BTreeMap<String, Formula>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn of(pairs: &[(&str, Formula)]) -> Self {
        let mut s = Self::new();
        for (v, f) in pairs {
            s.bind((*v).to_string(), f.clone());
        }
        s
    }

    pub fn bind(&mut self, var: String, formula: Formula) {
        self.map.insert(var, formula);
    }

    pub fn get(&self, var: &str) -> Option<&Formula> {
        self.map.get(var)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Formula)> {
        self.map.iter().map(|(v, f)| (v.as_str(), f))
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}:={t}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown connective `{name}` at byte {pos}")]
    UnknownConnective { name: String, pos: usize },
    #[error("connective `{name}` expects {expected} argument(s), found {found} (byte {pos})")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
        pos: usize,
    },
}

/// Parses one formula against `sig`.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text, Mode::Strict(sig))?;
    let f = p.formula()?;
    p.expect_end()?;
    Ok(f)
}

/// Parses one formula without a signature: every identifier followed by `(`
/// is a connective, every bare identifier a variable.  Arity consistency is
/// the caller's concern (see [`infer_signature`]).
pub fn parse_formula_loose(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text, Mode::Loose)?;
    let f = p.formula()?;
    p.expect_end()?;
    Ok(f)
}

/// Parses a comma-separated formula list; blank input is the empty list.
pub fn parse_formula_list(text: &str, sig: &Signature) -> Result<Vec<Formula>, ParseError> {
    parse_list_with(text, Mode::Strict(sig))
}

pub fn parse_formula_list_loose(text: &str) -> Result<Vec<Formula>, ParseError> {
    parse_list_with(text, Mode::Loose)
}

fn parse_list_with(text: &str, mode: Mode<'_>) -> Result<Vec<Formula>, ParseError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut p = Parser::new(text, mode)?;
    let mut out = vec![p.formula()?];
    while p.eat_comma() {
        out.push(p.formula()?);
    }
    p.expect_end()?;
    Ok(out)
}

#[derive(Clone, Copy)]
enum Mode<'a> {
    Strict(&'a Signature),
    Loose,
}

#[derive(Debug, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    mode: Mode<'a>,
}

impl<'a> Parser<'a> {
    fn new(text: &str, mode: Mode<'a>) -> Result<Self, ParseError> {
        let mut toks = Vec::new();
        let bytes = text.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_ascii_whitespace() {
                i += 1;
            } else if c == '(' {
                toks.push((Tok::LParen, i));
                i += 1;
            } else if c == ')' {
                toks.push((Tok::RParen, i));
                i += 1;
            } else if c == ',' {
                toks.push((Tok::Comma, i));
                i += 1;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((Tok::Ident(text[start..i].to_string()), start));
            } else {
                return Err(ParseError::Syntax {
                    pos: i,
                    message: format!("unexpected character `{c}`"),
                });
            }
        }
        Ok(Parser {
            toks,
            pos: 0,
            end: text.len(),
            mode,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn eat_comma(&mut self) -> bool {
        if matches!(self.peek(), Some(Tok::Comma)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            Err(ParseError::Syntax {
                pos: self.here(),
                message: "trailing input".to_string(),
            })
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let (name, name_pos) = match self.toks.get(self.pos) {
            Some((Tok::Ident(name), p)) => (name.clone(), *p),
            _ => {
                return Err(ParseError::Syntax {
                    pos: self.here(),
                    message: "expected a formula".to_string(),
                })
            }
        };
        self.pos += 1;

        if matches!(self.peek(), Some(Tok::LParen)) {
            self.pos += 1;
            let mut args = vec![self.formula()?];
            loop {
                match self.peek() {
                    Some(Tok::Comma) => {
                        self.pos += 1;
                        args.push(self.formula()?);
                    }
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        break;
                    }
                    _ => {
                        return Err(ParseError::Syntax {
                            pos: self.here(),
                            message: "expected `,` or `)`".to_string(),
                        })
                    }
                }
            }
            match self.mode {
                Mode::Strict(sig) => match sig.arity(&name) {
                    None => Err(ParseError::UnknownConnective {
                        name,
                        pos: name_pos,
                    }),
                    Some(k) if k != args.len() => Err(ParseError::Arity {
                        name,
                        expected: k,
                        found: args.len(),
                        pos: name_pos,
                    }),
                    Some(_) => Ok(Formula::App(name, args)),
                },
                Mode::Loose => Ok(Formula::App(name, args)),
            }
        } else {
            match self.mode {
                Mode::Strict(sig) => match sig.arity(&name) {
                    None => Ok(Formula::Var(name)),
                    Some(0) => Ok(Formula::App(name, Vec::new())),
                    Some(k) => Err(ParseError::Arity {
                        name,
                        expected: k,
                        found: 0,
                        pos: name_pos,
                    }),
                },
                Mode::Loose => Ok(Formula::Var(name)),
            }
        }
    }
}
