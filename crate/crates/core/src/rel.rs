//! Finite binary relations over an indexed carrier.

use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::model::StateId;

/// Which state set a relation lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Carrier {
    Source,
    Target,
    Combined,
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Carrier::Source => "source",
            Carrier::Target => "target",
            Carrier::Combined => "combined",
        })
    }
}

impl FromStr for Carrier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "source" => Ok(Carrier::Source),
            "target" => Ok(Carrier::Target),
            "combined" => Ok(Carrier::Combined),
            other => Err(Error::Parse(format!("unknown carrier `{other}` (expected source|target|combined)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClosureOp {
    Refl,
    Sym,
    Trans,
}

impl fmt::Display for ClosureOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClosureOp::Refl => "refl",
            ClosureOp::Sym => "sym",
            ClosureOp::Trans => "trans",
        })
    }
}

impl FromStr for ClosureOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "refl" => Ok(ClosureOp::Refl),
            "sym" => Ok(ClosureOp::Sym),
            "trans" => Ok(ClosureOp::Trans),
            other => Err(Error::Parse(format!("unknown closure `{other}` (expected refl|sym|trans)"))),
        }
    }
}

/// A set of ordered pairs over `0..size`, stored as one bit row per left
/// component. Iteration order is row-major, i.e. lexicographic over the
/// carrier's state order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rel {
    carrier: Carrier,
    rows: Vec<FixedBitSet>,
}

impl Rel {
    pub fn empty(carrier: Carrier, size: usize) -> Self {
        Rel { carrier, rows: vec![FixedBitSet::with_capacity(size); size] }
    }

    pub fn identity(carrier: Carrier, size: usize) -> Self {
        let mut rel = Rel::empty(carrier, size);
        for i in 0..size {
            rel.rows[i].insert(i);
        }
        rel
    }

    pub fn full(carrier: Carrier, size: usize) -> Self {
        let mut rel = Rel::empty(carrier, size);
        for row in &mut rel.rows {
            row.insert_range(..);
        }
        rel
    }

    pub fn from_pairs(carrier: Carrier, size: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut rel = Rel::empty(carrier, size);
        for (a, b) in pairs {
            rel.insert(a, b);
        }
        rel
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.rows[a].contains(b)
    }

    pub fn insert(&mut self, a: usize, b: usize) -> bool {
        assert!(a < self.size() && b < self.size(), "pair ({a},{b}) outside carrier");
        !self.rows[a].put(b)
    }

    pub fn remove(&mut self, a: usize, b: usize) {
        self.rows[a].set(b, false);
    }

    pub fn set(&mut self, a: usize, b: usize, present: bool) {
        self.rows[a].set(b, present);
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones(..)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|r| r.is_clear())
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows.iter().enumerate().flat_map(|(a, row)| row.ones().map(move |b| (a, b)))
    }

    /// Right components related to `a`.
    pub fn image(&self, a: usize) -> &FixedBitSet {
        &self.rows[a]
    }

    pub fn with_carrier(mut self, carrier: Carrier) -> Self {
        self.carrier = carrier;
        self
    }

    pub fn union(&self, other: &Rel) -> Rel {
        self.check_compatible(other);
        let mut out = self.clone();
        for (row, o) in out.rows.iter_mut().zip(&other.rows) {
            row.union_with(o);
        }
        out
    }

    pub fn intersection(&self, other: &Rel) -> Rel {
        self.check_compatible(other);
        let mut out = self.clone();
        for (row, o) in out.rows.iter_mut().zip(&other.rows) {
            row.intersect_with(o);
        }
        out
    }

    pub fn difference(&self, other: &Rel) -> Rel {
        self.check_compatible(other);
        let mut out = self.clone();
        for (row, o) in out.rows.iter_mut().zip(&other.rows) {
            row.difference_with(o);
        }
        out
    }

    pub fn is_subset(&self, other: &Rel) -> bool {
        self.check_compatible(other);
        self.rows.iter().zip(&other.rows).all(|(a, b)| a.is_subset(b))
    }

    pub fn inverse(&self) -> Rel {
        Rel::from_pairs(self.carrier, self.size(), self.pairs().map(|(a, b)| (b, a)))
    }

    pub fn closure(&self, op: ClosureOp) -> Rel {
        match op {
            ClosureOp::Refl => self.union(&Rel::identity(self.carrier, self.size())),
            ClosureOp::Sym => self.union(&self.inverse()),
            ClosureOp::Trans => self.transitive_closure(),
        }
    }

    /// Applies closures left to right.
    pub fn closed_under(&self, ops: &[ClosureOp]) -> Rel {
        ops.iter().fold(self.clone(), |rel, op| rel.closure(*op))
    }

    fn transitive_closure(&self) -> Rel {
        let mut out = self.clone();
        let n = self.size();
        for k in 0..n {
            let via = out.rows[k].clone();
            for i in 0..n {
                if out.rows[i].contains(k) {
                    out.rows[i].union_with(&via);
                }
            }
        }
        out
    }

    /// Keeps exactly the pairs whose components both satisfy `keep`.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> Rel {
        let n = self.size();
        Rel::from_pairs(self.carrier, n, self.pairs().filter(|&(a, b)| keep(a) && keep(b)))
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.size()).all(|i| self.contains(i, i))
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs().all(|(a, b)| self.contains(b, a))
    }

    pub fn is_transitive(&self) -> bool {
        self.pairs().all(|(a, b)| self.rows[b].is_subset(&self.rows[a]))
    }

    pub fn is_preorder(&self) -> bool {
        self.is_reflexive() && self.is_transitive()
    }

    pub fn is_equivalence(&self) -> bool {
        self.is_preorder() && self.is_symmetric()
    }

    pub fn named_pairs(&self, names: &[StateId]) -> Vec<(String, String)> {
        assert_eq!(names.len(), self.size());
        self.pairs().map(|(a, b)| (names[a].to_string(), names[b].to_string())).collect()
    }

    fn check_compatible(&self, other: &Rel) {
        assert_eq!(self.size(), other.size(), "relations over carriers of different size");
    }
}

impl fmt::Debug for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rel[{}; {}]", self.carrier, self.size())?;
        f.debug_set().entries(self.pairs()).finish()
    }
}
