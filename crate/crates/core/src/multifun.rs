//! Multi-functions on the Booleans: total maps `{0,1}^k -> nonempty subsets
//! of {0,1}`, with two composition disciplines and the platypus
//! decomposition `f = pl(g0, g1)`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MultifunError {
    #[error("expected {expected} table cells, found {found}")]
    CellCount { expected: usize, found: usize },
    #[error("outer function has arity {outer}, but {inner} inner functions were supplied")]
    InnerCount { outer: usize, inner: usize },
    #[error("inner function {index} has arity {arity}, but its wiring lists {wired} slots")]
    WiringShape {
        index: usize,
        arity: usize,
        wired: usize,
    },
    #[error("wiring references slot {slot}, but the composite arity is {arity}")]
    SlotOutOfRange { slot: usize, arity: usize },
    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },
    #[error("multi-function is not single-valued everywhere")]
    NotBoolean,
}

/// A nonempty subset of `{0,1}`: bit 0 holds `0`, bit 1 holds `1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoolSet(u8);

impl BoolSet {
    pub const ZERO: BoolSet = BoolSet(0b01);
    pub const ONE: BoolSet = BoolSet(0b10);
    pub const BOTH: BoolSet = BoolSet(0b11);

    pub fn singleton(v: bool) -> Self {
        if v {
            Self::ONE
        } else {
            Self::ZERO
        }
    }

    pub fn contains(self, v: bool) -> bool {
        self.0 & (1 << v as u8) != 0
    }

    pub fn union(self, other: BoolSet) -> BoolSet {
        BoolSet(self.0 | other.0)
    }

    pub fn is_singleton(self) -> bool {
        self.0 != 0b11
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        false
    }

    /// Members in value order: `false` before `true`.
    pub fn iter(self) -> impl Iterator<Item = bool> {
        [false, true].into_iter().filter(move |&v| self.contains(v))
    }
}

impl fmt::Display for BoolSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BoolSet::ZERO => f.write_str("{0}"),
            BoolSet::ONE => f.write_str("{1}"),
            _ => f.write_str("{0,1}"),
        }
    }
}

/// Total multi-function `{0,1}^arity -> nonempty subsets of {0,1}`.
///
/// Cells are indexed with the first argument most significant, so the cell
/// order for arity 2 is `(0,0), (0,1), (1,0), (1,1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiFunction {
    arity: usize,
    cells: Vec<BoolSet>,
}

impl MultiFunction {
    pub fn new(arity: usize, cells: Vec<BoolSet>) -> Result<Self, MultifunError> {
        let expected = 1usize << arity;
        if cells.len() != expected {
            return Err(MultifunError::CellCount {
                expected,
                found: cells.len(),
            });
        }
        Ok(MultiFunction { arity, cells })
    }

    pub fn from_fn(arity: usize, f: impl Fn(&[bool]) -> BoolSet) -> Self {
        let cells = tuples(arity).map(|t| f(&t)).collect();
        MultiFunction { arity, cells }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn get(&self, args: &[bool]) -> BoolSet {
        assert_eq!(args.len(), self.arity, "argument count");
        self.cells[tuple_index(args)]
    }

    pub fn cells(&self) -> &[BoolSet] {
        &self.cells
    }

    pub fn is_boolean(&self) -> bool {
        self.cells.iter().all(|c| c.is_singleton())
    }

    /// The platypus table: deterministic on agreeing inputs, both values
    /// otherwise.  Entry-wise it is the union of conjunction and disjunction.
    pub fn platypus() -> Self {
        MultiFunction::from_fn(2, |args| {
            if args[0] == args[1] {
                BoolSet::singleton(args[0])
            } else {
                BoolSet::BOTH
            }
        })
    }

    pub fn conjunction() -> BooleanFunction {
        BooleanFunction(MultiFunction::from_fn(2, |a| {
            BoolSet::singleton(a[0] && a[1])
        }))
    }

    pub fn disjunction() -> BooleanFunction {
        BooleanFunction(MultiFunction::from_fn(2, |a| {
            BoolSet::singleton(a[0] || a[1])
        }))
    }

    pub fn projection(arity: usize, slot: usize) -> Self {
        assert!(slot < arity);
        MultiFunction::from_fn(arity, |a| BoolSet::singleton(a[slot]))
    }

    /// All `3^(2^arity)` multi-functions, in a fixed odometer order.
    pub fn enumerate(arity: usize) -> impl Iterator<Item = MultiFunction> {
        let n_cells = 1usize << arity;
        let total = 3usize.pow(n_cells as u32);
        const CHOICES: [BoolSet; 3] = [BoolSet::ZERO, BoolSet::ONE, BoolSet::BOTH];
        (0..total).map(move |mut code| {
            let cells = (0..n_cells)
                .map(|_| {
                    let c = CHOICES[code % 3];
                    code /= 3;
                    c
                })
                .collect();
            MultiFunction { arity, cells }
        })
    }

    /// All `2^(2^arity)` single-valued multi-functions.
    pub fn enumerate_boolean(arity: usize) -> impl Iterator<Item = BooleanFunction> {
        let n_cells = 1usize << arity;
        let total = 1usize << n_cells;
        (0..total).map(move |code| {
            let cells = (0..n_cells)
                .map(|i| BoolSet::singleton(code >> i & 1 == 1))
                .collect();
            BooleanFunction(MultiFunction { arity, cells })
        })
    }
}

/// All input tuples of the given arity, first argument most significant.
pub fn tuples(arity: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1usize << arity).map(move |i| {
        (0..arity)
            .map(|pos| i >> (arity - 1 - pos) & 1 == 1)
            .collect()
    })
}

fn tuple_index(args: &[bool]) -> usize {
    args.iter().fold(0, |acc, &b| acc << 1 | b as usize)
}

/// A multi-function that is single-valued everywhere.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BooleanFunction(MultiFunction);

impl BooleanFunction {
    pub fn arity(&self) -> usize {
        self.0.arity
    }

    pub fn eval(&self, args: &[bool]) -> bool {
        self.0.get(args).contains(true)
    }

    pub fn as_multifunction(&self) -> &MultiFunction {
        &self.0
    }

    pub fn into_multifunction(self) -> MultiFunction {
        self.0
    }
}

impl TryFrom<MultiFunction> for BooleanFunction {
    type Error = MultifunError;

    fn try_from(f: MultiFunction) -> Result<Self, MultifunError> {
        if f.is_boolean() {
            Ok(BooleanFunction(f))
        } else {
            Err(MultifunError::NotBoolean)
        }
    }
}

fn check_wiring(
    f: &MultiFunction,
    inner: &[MultiFunction],
    wiring: &[Vec<usize>],
    arity: usize,
) -> Result<(), MultifunError> {
    if inner.len() != f.arity {
        return Err(MultifunError::InnerCount {
            outer: f.arity,
            inner: inner.len(),
        });
    }
    if wiring.len() != inner.len() {
        return Err(MultifunError::InnerCount {
            outer: f.arity,
            inner: wiring.len(),
        });
    }
    for (i, (g, w)) in inner.iter().zip(wiring).enumerate() {
        if w.len() != g.arity {
            return Err(MultifunError::WiringShape {
                index: i,
                arity: g.arity,
                wired: w.len(),
            });
        }
        if let Some(&slot) = w.iter().find(|&&s| s >= arity) {
            return Err(MultifunError::SlotOutOfRange { slot, arity });
        }
    }
    Ok(())
}

fn project(args: &[bool], wires: &[usize]) -> Vec<bool> {
    wires.iter().map(|&s| args[s]).collect()
}

/// Composite `f(g_1(x|w_1), ..., g_k(x|w_k))` where every inner output choice
/// is made independently: the union of `f` over the full product of the inner
/// output sets.
pub fn compose_liberal(
    f: &MultiFunction,
    inner: &[MultiFunction],
    wiring: &[Vec<usize>],
    arity: usize,
) -> Result<MultiFunction, MultifunError> {
    check_wiring(f, inner, wiring, arity)?;
    Ok(MultiFunction::from_fn(arity, |args| {
        let options: Vec<BoolSet> = inner
            .iter()
            .zip(wiring)
            .map(|(g, w)| g.get(&project(args, w)))
            .collect();
        union_over_choices(f, &options, None)
    }))
}

/// Like [`compose_liberal`], except that argument slots fed by an identical
/// inner term — the same multi-function wired to the same input slots — must
/// receive the same output value.
pub fn compose_synchronized(
    f: &MultiFunction,
    inner: &[MultiFunction],
    wiring: &[Vec<usize>],
    arity: usize,
) -> Result<MultiFunction, MultifunError> {
    check_wiring(f, inner, wiring, arity)?;
    // group[i] = index of the first slot carrying the same term as slot i
    let mut group = vec![0usize; inner.len()];
    for i in 0..inner.len() {
        group[i] = (0..i)
            .find(|&j| inner[j] == inner[i] && wiring[j] == wiring[i])
            .unwrap_or(i);
    }
    Ok(MultiFunction::from_fn(arity, |args| {
        let options: Vec<BoolSet> = inner
            .iter()
            .zip(wiring)
            .map(|(g, w)| g.get(&project(args, w)))
            .collect();
        union_over_choices(f, &options, Some(&group))
    }))
}

/// Union of `f(y)` over admissible inner output vectors `y`.  With `group`
/// set, slots in the same group are forced to a common value.
fn union_over_choices(f: &MultiFunction, options: &[BoolSet], group: Option<&[usize]>) -> BoolSet {
    let k = options.len();
    let mut out: u8 = 0;
    let mut y = vec![false; k];
    // depth-first over slot choices; grouped followers copy their leader
    fn rec(f: &MultiFunction, options: &[BoolSet], group: Option<&[usize]>, y: &mut Vec<bool>, slot: usize, out: &mut u8) {
        if slot == options.len() {
            *out |= f.get(y).0;
            return;
        }
        if let Some(g) = group {
            if g[slot] != slot {
                y[slot] = y[g[slot]];
                rec(f, options, group, y, slot + 1, out);
                return;
            }
        }
        for v in options[slot].iter() {
            y[slot] = v;
            rec(f, options, group, y, slot + 1, out);
        }
    }
    rec(f, options, group, &mut y, 0, &mut out);
    BoolSet(out)
}

/// Splits `f` as `pl(g0, g1)`: where `f` is two-valued the components take 0
/// and 1 respectively, elsewhere both equal `f`.
pub fn decompose_platypus(f: &MultiFunction) -> (BooleanFunction, BooleanFunction) {
    let pick = |v: bool| {
        MultiFunction::from_fn(f.arity, |args| {
            let cell = f.get(args);
            if cell.is_singleton() {
                cell
            } else {
                BoolSet::singleton(v)
            }
        })
    };
    (BooleanFunction(pick(false)), BooleanFunction(pick(true)))
}

/// Synchronized composite `pl(g0, g1)` of two Boolean functions sharing all
/// input slots; pointwise it is `{g0(x)} ∪ {g1(x)}`.
pub fn recompose(g0: &BooleanFunction, g1: &BooleanFunction) -> Result<MultiFunction, MultifunError> {
    if g0.arity() != g1.arity() {
        return Err(MultifunError::ArityMismatch {
            left: g0.arity(),
            right: g1.arity(),
        });
    }
    Ok(MultiFunction::from_fn(g0.arity(), |args| {
        BoolSet::singleton(g0.eval(args)).union(BoolSet::singleton(g1.eval(args)))
    }))
}
