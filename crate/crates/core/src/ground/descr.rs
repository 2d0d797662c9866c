use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::space::{Point, Space, SpaceSeq};
use crate::error::{Error, Result};

/// An eventually periodic 0-1 word `prefix⌢period⌢period⌢…`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PeriodicWord {
    pub prefix: Vec<u8>,
    pub period: Vec<u8>,
}

impl PeriodicWord {
    pub fn new(prefix: Vec<u8>, period: Vec<u8>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidArgument("period must be nonempty".into()));
        }
        if prefix.iter().chain(&period).any(|&b| b > 1) {
            return Err(Error::InvalidArgument("words are over {0, 1}".into()));
        }
        Ok(PeriodicWord { prefix, period })
    }

    pub fn constant(bit: u8) -> Self {
        PeriodicWord {
            prefix: Vec::new(),
            period: vec![bit],
        }
    }

    pub fn at(&self, i: usize) -> u8 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    pub fn restrict(&self, n: usize) -> Vec<u8> {
        (0..n).map(|i| self.at(i)).collect()
    }

    pub fn has_prefix(&self, word: &[u8]) -> bool {
        word.iter().enumerate().all(|(i, &b)| self.at(i) == b)
    }

    /// Two eventually periodic words that agree up to this length are equal.
    pub fn agreement_bound(&self, other: &PeriodicWord) -> usize {
        let p = self.prefix.len().max(other.prefix.len());
        p + num_integer::lcm(self.period.len(), other.period.len())
    }

    pub fn same_word(&self, other: &PeriodicWord) -> bool {
        let n = self.agreement_bound(other);
        (0..n).all(|i| self.at(i) == other.at(i))
    }
}

/// Finite syntax for a possibly infinite subset of a ground space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SetDescription {
    Empty,
    Full,
    Finite(Vec<u64>),
    Complement(Box<SetDescription>),
    Union(Box<SetDescription>, Box<SetDescription>),
    Intersection(Box<SetDescription>, Box<SetDescription>),
    /// `{i} × right` in a product, or column `i` of `Δ`.
    Column(u64),
    /// `left × {j}` in a product, or row `j` of `Δ`.
    Row(u64),
    /// One summand of a disjoint sum, one section of the Mazur sum, or one level of a tree.
    Section(u64),
    /// `A_x = {x↾n : n ∈ ω}`
    Branch(PeriodicWord),
    /// `ω ∖ k`
    Threshold(u64),
    Rectangle(Box<SetDescription>, Box<SetDescription>),
    /// `{n : n mod m ∈ residues}` in `ω`.
    Residues(u64, Vec<u64>),
    /// `{n} × d` inside a disjoint sum.
    Lift(u64, Box<SetDescription>),
    /// `{(n, 0) : n ∈ d}` inside a disjoint sum, where `0` is the first point of summand `n`.
    Diagonal(Box<SetDescription>),
}

use SetDescription as D;

impl SetDescription {
    pub fn finite(codes: impl IntoIterator<Item = u64>) -> Self {
        let set: BTreeSet<u64> = codes.into_iter().collect();
        D::Finite(set.into_iter().collect())
    }

    pub fn complement(d: SetDescription) -> Self {
        D::Complement(Box::new(d))
    }

    pub fn union(a: SetDescription, b: SetDescription) -> Self {
        D::Union(Box::new(a), Box::new(b))
    }

    pub fn intersection(a: SetDescription, b: SetDescription) -> Self {
        D::Intersection(Box::new(a), Box::new(b))
    }

    pub fn rectangle(a: SetDescription, b: SetDescription) -> Self {
        D::Rectangle(Box::new(a), Box::new(b))
    }

    pub fn lift(n: u64, d: SetDescription) -> Self {
        D::Lift(n, Box::new(d))
    }

    pub fn diagonal(d: SetDescription) -> Self {
        D::Diagonal(Box::new(d))
    }

    pub fn difference(a: SetDescription, b: SetDescription) -> Self {
        D::intersection(a, D::complement(b))
    }

    pub fn evens() -> Self {
        D::Residues(2, vec![0])
    }

    /// Union of a nonempty list, folded to the left.
    pub fn union_all(parts: impl IntoIterator<Item = SetDescription>) -> Self {
        let mut iter = parts.into_iter();
        match iter.next() {
            None => D::Empty,
            Some(first) => iter.fold(first, D::union),
        }
    }

    /// True when the tree only uses `Empty`, `Full`, `Finite` and Boolean operations.
    pub fn is_boolean_of_finite(&self) -> bool {
        match self {
            D::Empty | D::Full | D::Finite(_) => true,
            D::Complement(a) => a.is_boolean_of_finite(),
            D::Union(a, b) | D::Intersection(a, b) => {
                a.is_boolean_of_finite() && b.is_boolean_of_finite()
            }
            _ => false,
        }
    }

    /// All codes listed in `Finite` leaves at the top level of this space.
    pub fn listed_codes(&self) -> BTreeSet<u64> {
        let mut out = BTreeSet::new();
        self.visit_top(&mut |d| {
            if let D::Finite(cs) = d {
                out.extend(cs.iter().copied());
            }
        });
        out
    }

    /// Visit the nodes that are interpreted in the same space as `self`.
    pub fn visit_top(&self, f: &mut impl FnMut(&SetDescription)) {
        f(self);
        match self {
            D::Complement(a) => a.visit_top(f),
            D::Union(a, b) | D::Intersection(a, b) => {
                a.visit_top(f);
                b.visit_top(f);
            }
            _ => {}
        }
    }

    /// Evaluate the Boolean skeleton with leaves replaced by `leaf`.
    pub fn eval_with(&self, leaf: &mut impl FnMut(&SetDescription) -> Result<bool>) -> Result<bool> {
        match self {
            D::Empty => Ok(false),
            D::Full => Ok(true),
            D::Complement(a) => Ok(!a.eval_with(leaf)?),
            D::Union(a, b) => Ok(a.eval_with(leaf)? || b.eval_with(leaf)?),
            D::Intersection(a, b) => Ok(a.eval_with(leaf)? && b.eval_with(leaf)?),
            other => leaf(other),
        }
    }

    /// Rebuild the Boolean skeleton with leaves mapped by `leaf`.
    pub fn map_leaves(
        &self,
        leaf: &mut impl FnMut(&SetDescription) -> Result<SetDescription>,
    ) -> Result<SetDescription> {
        Ok(match self {
            D::Empty => D::Empty,
            D::Full => D::Full,
            D::Complement(a) => D::complement(a.map_leaves(leaf)?),
            D::Union(a, b) => D::union(a.map_leaves(leaf)?, b.map_leaves(leaf)?),
            D::Intersection(a, b) => D::intersection(a.map_leaves(leaf)?, b.map_leaves(leaf)?),
            other => leaf(other)?,
        })
    }
}

fn mismatch(d: &SetDescription, space: &Space) -> Error {
    Error::SpaceMismatch(format!(
        "{} is not a subset description of {space}",
        super::sexpr::print(d)
    ))
}

/// Membership of the point with code `code` in the set denoted by `d`.
pub fn member(space: &Space, d: &SetDescription, code: u64) -> Result<bool> {
    let point = space.decode(code)?;
    member_point(space, d, code, &point)
}

fn member_point(space: &Space, d: &SetDescription, code: u64, point: &Point) -> Result<bool> {
    d.eval_with(&mut |leaf| member_leaf(space, leaf, code, point))
}

fn member_leaf(space: &Space, leaf: &SetDescription, code: u64, point: &Point) -> Result<bool> {
    match (leaf, space, point) {
        (D::Finite(codes), _, _) => Ok(codes.binary_search(&code).is_ok()),
        (D::Threshold(k), Space::Omega, _) => Ok(code >= *k),
        (D::Residues(m, rs), Space::Omega, _) => {
            if *m == 0 {
                return Err(Error::InvalidArgument("modulus 0".into()));
            }
            Ok(rs.contains(&(code % m)))
        }
        (D::Column(i), Space::Product(l, _), Point::Pair(a, _)) => Ok(l.encode(a)? == *i),
        (D::Row(j), Space::Product(_, r), Point::Pair(_, b)) => Ok(r.encode(b)? == *j),
        (D::Rectangle(d1, d2), Space::Product(l, r), Point::Pair(a, b)) => {
            let ca = l.encode(a)?;
            let cb = r.encode(b)?;
            Ok(member_point(l, d1, ca, a)? && member_point(r, d2, cb, b)?)
        }
        (D::Column(i), Space::Delta, Point::Tri(a, _)) => Ok(a == i),
        (D::Row(j), Space::Delta, Point::Tri(_, b)) => Ok(b == j),
        (D::Section(n), Space::DisjointSum(_), Point::Sum(m, _)) => Ok(m == n),
        (D::Section(n), Space::MazurSum, Point::Mazur { n: m, .. }) => Ok(m == n),
        (D::Section(n), Space::BinarySeq, Point::Word(w)) => Ok(w.len() as u64 == *n),
        (D::Section(n), Space::TreeSeq(_), Point::TreeWord(w)) => Ok(w.len() as u64 == *n),
        (D::Lift(n, inner), Space::DisjointSum(seq), Point::Sum(m, local)) => {
            if m != n {
                return Ok(false);
            }
            let part = seq.part(*m).ok_or_else(|| mismatch(leaf, space))?;
            let lc = part.encode(local)?;
            member_point(&part, inner, lc, local)
        }
        (D::Diagonal(inner), Space::DisjointSum(seq), Point::Sum(m, local)) => {
            let part = seq.part(*m).ok_or_else(|| mismatch(leaf, space))?;
            Ok(part.encode(local)? == 0 && member(&Space::Omega, inner, *m)?)
        }
        (D::Branch(x), Space::BinarySeq, Point::Word(w)) => Ok(x.has_prefix(w)),
        (D::Branch(x), Space::TreeSeq(_), Point::TreeWord(w)) => Ok(w
            .iter()
            .enumerate()
            .all(|(i, &digit)| digit == x.at(i) as u64)),
        _ => Err(mismatch(leaf, space)),
    }
}

/// Check that every leaf of `d` makes sense in `space`.
pub fn check_description(space: &Space, d: &SetDescription) -> Result<()> {
    let mut result = Ok(());
    d.visit_top(&mut |leaf| {
        if result.is_err() {
            return;
        }
        let ok = match (leaf, space) {
            (D::Empty | D::Full | D::Complement(_) | D::Union(..) | D::Intersection(..), _) => Ok(()),
            (D::Finite(cs), _) => match cs.iter().find(|&&c| !space.contains_code(c)) {
                Some(&c) => Err(Error::InvalidCode {
                    code: c,
                    space: space.to_string(),
                }),
                None => Ok(()),
            },
            (D::Threshold(_), Space::Omega) => Ok(()),
            (D::Residues(m, _), Space::Omega) => {
                if *m == 0 {
                    Err(Error::InvalidArgument("modulus 0".into()))
                } else {
                    Ok(())
                }
            }
            (D::Column(_) | D::Row(_), Space::Product(..) | Space::Delta) => Ok(()),
            (D::Rectangle(a, b), Space::Product(l, r)) => {
                check_description(l, a).and_then(|_| check_description(r, b))
            }
            (
                D::Section(_),
                Space::DisjointSum(_) | Space::MazurSum | Space::BinarySeq | Space::TreeSeq(_),
            ) => Ok(()),
            (D::Lift(n, inner), Space::DisjointSum(seq)) => match seq.part(*n) {
                Some(part) => check_description(&part, inner),
                None => Err(mismatch(leaf, space)),
            },
            (D::Diagonal(inner), Space::DisjointSum(_)) => check_description(&Space::Omega, inner),
            (D::Branch(_), Space::BinarySeq | Space::TreeSeq(_)) => Ok(()),
            _ => Err(mismatch(leaf, space)),
        };
        if let Err(e) = ok {
            result = Err(e);
        }
    });
    result
}

/// Members among the codes `0..n`.
pub fn members_below(space: &Space, d: &SetDescription, n: u64) -> Result<Vec<u64>> {
    let n = space.size().map_or(n, |s| s.min(n));
    let mut out = Vec::new();
    for c in 0..n {
        if member(space, d, c)? {
            out.push(c);
        }
    }
    Ok(out)
}

/// Summand of a sum space, with a readable error.
pub fn sum_part(seq: &SpaceSeq, n: u64) -> Result<Space> {
    seq.part(n)
        .ok_or_else(|| Error::SpaceMismatch(format!("disjoint sum has no summand {n}")))
}
