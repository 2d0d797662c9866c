use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Prefix of a sequence `c ∈ ω^ω` together with a rule that extends it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GrowthVector {
    pub entries: Vec<u64>,
    pub extension: Extension,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Extension {
    Constant(u64),
    /// `c(n) = a·n + b`
    Affine(u64, u64),
}

impl GrowthVector {
    pub fn new(entries: Vec<u64>, extension: Extension) -> Result<Self> {
        let g = GrowthVector { entries, extension };
        if g.entries.iter().any(|&e| e == 0) {
            return Err(Error::InvalidSpace("growth entries must be >= 1".into()));
        }
        match extension {
            Extension::Constant(0) => {
                return Err(Error::InvalidSpace("growth extension must be >= 1".into()))
            }
            Extension::Affine(0, 0) => {
                return Err(Error::InvalidSpace("growth extension must be >= 1".into()))
            }
            _ => {}
        }
        // Affine(0, b) with b >= 1 and Affine(a, b) with a >= 1 may still be 0 at n = 0.
        if let Extension::Affine(_, 0) = extension {
            if g.entries.is_empty() {
                return Err(Error::InvalidSpace("c(0) would be 0".into()));
            }
        }
        Ok(g)
    }

    /// The growth `c(n) = n + 2` used by the antichain tree witness.
    pub fn shifted_identity() -> Self {
        GrowthVector {
            entries: Vec::new(),
            extension: Extension::Affine(1, 2),
        }
    }

    pub fn at(&self, n: usize) -> u64 {
        if let Some(&e) = self.entries.get(n) {
            return e;
        }
        match self.extension {
            Extension::Constant(k) => k,
            Extension::Affine(a, b) => a * n as u64 + b,
        }
    }
}

/// Sequence of summands of a disjoint sum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpaceSeq {
    /// Finitely many summands, coded by interleaving.
    Finite(Vec<Space>),
    /// Countably many summands, constant from some index on.
    EventuallyConstant { prefix: Vec<Space>, tail: Box<Space> },
    /// The summand at `n` is `ω^{n+1}`.
    FinPowers,
}

impl SpaceSeq {
    pub fn part(&self, n: u64) -> Option<Space> {
        match self {
            SpaceSeq::Finite(parts) => parts.get(n as usize).cloned(),
            SpaceSeq::EventuallyConstant { prefix, tail } => Some(
                prefix
                    .get(n as usize)
                    .cloned()
                    .unwrap_or_else(|| (**tail).clone()),
            ),
            SpaceSeq::FinPowers => Some(Space::omega_power(n as usize + 1)),
        }
    }

    /// Number of summands, `None` when countably infinite.
    pub fn len(&self) -> Option<u64> {
        match self {
            SpaceSeq::Finite(parts) => Some(parts.len() as u64),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// Indices below this bound may carry summands different from the tail.
    pub fn distinct_prefix(&self) -> u64 {
        match self {
            SpaceSeq::Finite(parts) => parts.len() as u64,
            SpaceSeq::EventuallyConstant { prefix, .. } => prefix.len() as u64,
            SpaceSeq::FinPowers => 0,
        }
    }
}

/// A countable ground set with a fixed coding of its points by naturals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Space {
    Omega,
    Product(Box<Space>, Box<Space>),
    DisjointSum(SpaceSeq),
    BinarySeq,
    TreeSeq(GrowthVector),
    /// `{(i, j) : i >= j}`
    Delta,
    /// `Σ_{n>=1} (2n)^n`
    MazurSum,
    /// Subsets of `2^l` of size `2^{l-1}`, i.e. clopen halves at resolution `l`.
    ClopenHalf(u32),
}

/// A decoded point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Point {
    Nat(u64),
    Pair(Box<Point>, Box<Point>),
    Sum(u64, Box<Point>),
    Word(Vec<u8>),
    TreeWord(Vec<u64>),
    Tri(u64, u64),
    Mazur { n: u64, values: Vec<u64> },
    /// Bit `i` set when cell `i` of `2^l` belongs to the set.
    Clopen(u64),
}

impl Space {
    pub fn product(left: Space, right: Space) -> Space {
        Space::Product(Box::new(left), Box::new(right))
    }

    pub fn omega_squared() -> Space {
        Space::product(Space::Omega, Space::Omega)
    }

    /// `ω^k` as right-nested products; `ω^1 = ω`.
    pub fn omega_power(k: usize) -> Space {
        let mut space = Space::Omega;
        for _ in 1..k {
            space = Space::product(Space::Omega, space);
        }
        space
    }

    pub fn two_part_sum(left: Space, right: Space) -> Space {
        Space::DisjointSum(SpaceSeq::Finite(vec![left, right]))
    }

    pub fn constant_sum(part: Space) -> Space {
        Space::DisjointSum(SpaceSeq::EventuallyConstant {
            prefix: Vec::new(),
            tail: Box::new(part),
        })
    }

    /// Number of points, `None` when infinite.
    pub fn size(&self) -> Option<u64> {
        match self {
            Space::Omega
            | Space::BinarySeq
            | Space::TreeSeq(_)
            | Space::Delta
            | Space::MazurSum
            | Space::DisjointSum(_) => None,
            Space::Product(l, r) => match (l.size(), r.size()) {
                (Some(a), Some(b)) => a.checked_mul(b),
                _ => None,
            },
            Space::ClopenHalf(l) => {
                let cells = 1u64 << *l;
                binomial(cells, cells / 2).and_then(|b| u64::try_from(b).ok())
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.size().is_some()
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Space::Product(l, r) => {
                l.validate()?;
                r.validate()
            }
            Space::DisjointSum(seq) => {
                let check = |s: &Space| -> Result<()> {
                    s.validate()?;
                    if s.is_finite() {
                        return Err(Error::InvalidSpace(format!(
                            "summand {s} of a disjoint sum must be infinite"
                        )));
                    }
                    Ok(())
                };
                match seq {
                    SpaceSeq::Finite(parts) => {
                        if parts.is_empty() {
                            return Err(Error::InvalidSpace("empty disjoint sum".into()));
                        }
                        parts.iter().try_for_each(check)
                    }
                    SpaceSeq::EventuallyConstant { prefix, tail } => {
                        prefix.iter().try_for_each(check)?;
                        check(tail)
                    }
                    SpaceSeq::FinPowers => Ok(()),
                }
            }
            Space::ClopenHalf(l) => {
                if *l == 0 || *l > 6 {
                    Err(Error::ResolutionTooLarge(*l))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    pub fn encode(&self, point: &Point) -> Result<u64> {
        let bad = || Error::SpaceMismatch(format!("point {point:?} does not live in {self}"));
        match (self, point) {
            (Space::Omega, Point::Nat(n)) => Ok(*n),
            (Space::Product(l, r), Point::Pair(a, b)) => {
                let i = l.encode(a)?;
                let j = r.encode(b)?;
                self.combine_product(l, r, i, j)
            }
            (Space::DisjointSum(seq), Point::Sum(n, local)) => {
                let part = seq.part(*n).ok_or_else(bad)?;
                let local = part.encode(local)?;
                match seq {
                    SpaceSeq::Finite(parts) => local
                        .checked_mul(parts.len() as u64)
                        .and_then(|c| c.checked_add(*n))
                        .ok_or_else(|| Error::CodingOverflow(self.to_string())),
                    _ => checked_pair(*n, local).ok_or_else(|| Error::CodingOverflow(self.to_string())),
                }
            }
            (Space::BinarySeq, Point::Word(w)) => {
                encode_binseq_checked(w).ok_or_else(|| Error::CodingOverflow(self.to_string()))
            }
            (Space::TreeSeq(c), Point::TreeWord(w)) => encode_tree_word(c, w)
                .and_then(|o| o.ok_or_else(bad)),
            (Space::Delta, Point::Tri(i, j)) => {
                if j > i {
                    return Err(bad());
                }
                triangle(*i)
                    .and_then(|t| t.checked_add(*j))
                    .ok_or_else(|| Error::CodingOverflow(self.to_string()))
            }
            (Space::MazurSum, Point::Mazur { n, values }) => {
                if *n == 0 || values.len() as u64 != *n || values.iter().any(|&v| v >= 2 * n) {
                    return Err(bad());
                }
                let offset = mazur_offset(*n).ok_or_else(|| Error::CodingOverflow(self.to_string()))?;
                let mut local: u64 = 0;
                for &v in values {
                    local = local
                        .checked_mul(2 * n)
                        .and_then(|x| x.checked_add(v))
                        .ok_or_else(|| Error::CodingOverflow(self.to_string()))?;
                }
                offset
                    .checked_add(local)
                    .ok_or_else(|| Error::CodingOverflow(self.to_string()))
            }
            (Space::ClopenHalf(l), Point::Clopen(mask)) => {
                let cells = 1u32 << l;
                if (cells < 64 && mask >> cells != 0) || mask.count_ones() != cells / 2 {
                    return Err(bad());
                }
                let elems: Vec<u64> = (0..cells as u64).filter(|i| mask >> i & 1 == 1).collect();
                let rank = combination_rank(cells as u64, &elems);
                u64::try_from(rank).map_err(|_| Error::CodingOverflow(self.to_string()))
            }
            _ => Err(bad()),
        }
    }

    fn combine_product(&self, l: &Space, r: &Space, i: u64, j: u64) -> Result<u64> {
        let overflow = || Error::CodingOverflow(self.to_string());
        match (l.size(), r.size()) {
            (None, None) => checked_pair(i, j).ok_or_else(overflow),
            (Some(a), None) => j.checked_mul(a).and_then(|x| x.checked_add(i)).ok_or_else(overflow),
            (_, Some(b)) => i.checked_mul(b).and_then(|x| x.checked_add(j)).ok_or_else(overflow),
        }
    }

    pub fn decode(&self, code: u64) -> Result<Point> {
        let invalid = || Error::InvalidCode {
            code,
            space: self.to_string(),
        };
        if let Some(size) = self.size() {
            if code >= size {
                return Err(invalid());
            }
        }
        match self {
            Space::Omega => Ok(Point::Nat(code)),
            Space::Product(l, r) => {
                let (i, j) = match (l.size(), r.size()) {
                    (None, None) => unpair(code),
                    (Some(a), None) => (code % a, code / a),
                    (_, Some(b)) => (code / b, code % b),
                };
                Ok(Point::Pair(Box::new(l.decode(i)?), Box::new(r.decode(j)?)))
            }
            Space::DisjointSum(seq) => {
                let (n, local) = match seq {
                    SpaceSeq::Finite(parts) => {
                        let k = parts.len() as u64;
                        (code % k, code / k)
                    }
                    _ => unpair(code),
                };
                let part = seq.part(n).ok_or_else(invalid)?;
                Ok(Point::Sum(n, Box::new(part.decode(local)?)))
            }
            Space::BinarySeq => Ok(Point::Word(decode_binseq(code))),
            Space::TreeSeq(c) => decode_tree_word(c, code)
                .map(Point::TreeWord)
                .ok_or_else(|| Error::CodingOverflow(self.to_string())),
            Space::Delta => {
                let (i, j) = untriangle(code);
                Ok(Point::Tri(i, j))
            }
            Space::MazurSum => {
                let mut n = 1u64;
                let mut rest = code;
                loop {
                    let size = mazur_section_size(n).ok_or_else(invalid)?;
                    if rest < size {
                        break;
                    }
                    rest -= size;
                    n += 1;
                }
                let base = 2 * n;
                let mut values = vec![0u64; n as usize];
                for slot in values.iter_mut().rev() {
                    *slot = rest % base;
                    rest /= base;
                }
                Ok(Point::Mazur { n, values })
            }
            Space::ClopenHalf(l) => {
                let cells = 1u64 << l;
                let elems = combination_unrank(cells, cells / 2, code as u128);
                Ok(Point::Clopen(elems.iter().fold(0u64, |m, &e| m | 1 << e)))
            }
        }
    }

    /// The first `n` codes in canonical order.
    pub fn enumerate(&self, n: u64) -> Result<Vec<u64>> {
        if let Some(size) = self.size() {
            if n > size {
                return Err(Error::CountExceedsSpace {
                    requested: n,
                    size,
                    space: self.to_string(),
                });
            }
        }
        Ok((0..n).collect())
    }

    pub fn contains_code(&self, code: u64) -> bool {
        self.decode(code).is_ok()
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Omega => write!(f, "omega"),
            Space::Product(l, r) => write!(f, "({l} x {r})"),
            Space::DisjointSum(SpaceSeq::Finite(parts)) => {
                write!(f, "sum[")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, "]")
            }
            Space::DisjointSum(SpaceSeq::EventuallyConstant { prefix, tail }) => {
                write!(f, "sum[")?;
                for p in prefix {
                    write!(f, "{p}, ")?;
                }
                write!(f, "{tail}...]")
            }
            Space::DisjointSum(SpaceSeq::FinPowers) => write!(f, "sum[omega^(n+1)]"),
            Space::BinarySeq => write!(f, "2^<omega"),
            Space::TreeSeq(c) => write!(f, "T_c{:?}", c.entries),
            Space::Delta => write!(f, "delta"),
            Space::MazurSum => write!(f, "mazur-sum"),
            Space::ClopenHalf(l) => write!(f, "clopen-half({l})"),
        }
    }
}

/// Cantor pairing `π(i, j) = (i + j)(i + j + 1)/2 + j`.
pub fn pair(i: u64, j: u64) -> u64 {
    checked_pair(i, j).expect("pairing overflow")
}

pub fn checked_pair(i: u64, j: u64) -> Option<u64> {
    let s = i.checked_add(j)?;
    triangle(s)?.checked_add(j)
}

pub fn unpair(z: u64) -> (u64, u64) {
    let (w, t) = untriangle_base(z);
    let j = z - t;
    (w - j, j)
}

fn triangle(n: u64) -> Option<u64> {
    let n = n as u128;
    u64::try_from(n * (n + 1) / 2).ok()
}

/// Largest `w` with `w(w+1)/2 <= z`, and that triangular number.
fn untriangle_base(z: u64) -> (u64, u64) {
    let z128 = z as u128;
    let mut w = (((8 * z128 + 1) as f64).sqrt() as u128).saturating_sub(1) / 2;
    while (w + 1) * (w + 2) / 2 <= z128 {
        w += 1;
    }
    while w * (w + 1) / 2 > z128 {
        w -= 1;
    }
    (w as u64, (w * (w + 1) / 2) as u64)
}

fn untriangle(code: u64) -> (u64, u64) {
    let (i, t) = untriangle_base(code);
    (i, code - t)
}

/// `code(∅) = 0`, `code(s⌢b) = 2·code(s) + b + 1`.
pub fn encode_binseq(word: &[u8]) -> u64 {
    encode_binseq_checked(word).expect("binary word too long to code")
}

fn encode_binseq_checked(word: &[u8]) -> Option<u64> {
    word.iter().try_fold(0u64, |c, &b| {
        c.checked_mul(2)?.checked_add(b as u64 & 1)?.checked_add(1)
    })
}

pub fn decode_binseq(mut code: u64) -> Vec<u8> {
    let mut word = Vec::new();
    while code > 0 {
        if code % 2 == 1 {
            word.push(0);
            code = (code - 1) / 2;
        } else {
            word.push(1);
            code = (code - 2) / 2;
        }
    }
    word.reverse();
    word
}

/// Number of nodes of `T_c` at each level, while it fits in `u64`.
fn tree_level_size(c: &GrowthVector, level: usize) -> Option<u64> {
    (0..level).try_fold(1u64, |acc, i| acc.checked_mul(c.at(i)))
}

fn encode_tree_word(c: &GrowthVector, word: &[u64]) -> Result<Option<u64>> {
    let overflow = || Error::CodingOverflow("tree coding".into());
    let mut offset = 0u64;
    for level in 0..word.len() {
        offset = offset
            .checked_add(tree_level_size(c, level).ok_or_else(overflow)?)
            .ok_or_else(overflow)?;
    }
    let mut index = 0u64;
    for (i, &digit) in word.iter().enumerate() {
        if digit >= c.at(i) {
            return Ok(None);
        }
        index = index
            .checked_mul(c.at(i))
            .and_then(|x| x.checked_add(digit))
            .ok_or_else(overflow)?;
    }
    offset.checked_add(index).map(Some).ok_or_else(overflow)
}

fn decode_tree_word(c: &GrowthVector, code: u64) -> Option<Vec<u64>> {
    let mut rest = code;
    let mut level = 0usize;
    loop {
        let size = tree_level_size(c, level)?;
        if rest < size {
            break;
        }
        rest -= size;
        level += 1;
    }
    let mut word = vec![0u64; level];
    for i in (0..level).rev() {
        word[i] = rest % c.at(i);
        rest /= c.at(i);
    }
    Some(word)
}

pub fn mazur_section_size(n: u64) -> Option<u64> {
    (2 * n).checked_pow(u32::try_from(n).ok()?)
}

/// Code of the first point of section `n` of the Mazur sum.
pub fn mazur_offset(n: u64) -> Option<u64> {
    (1..n).try_fold(0u64, |acc, m| acc.checked_add(mazur_section_size(m)?))
}

pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Lexicographic rank of a sorted `k`-subset of `0..n`.
fn combination_rank(n: u64, elems: &[u64]) -> u128 {
    let k = elems.len() as u64;
    let mut rank: u128 = 0;
    let mut prev: i64 = -1;
    for (pos, &e) in elems.iter().enumerate() {
        for smaller in (prev + 1) as u64..e {
            rank += binomial(n - smaller - 1, k - pos as u64 - 1).unwrap_or(0);
        }
        prev = e as i64;
    }
    rank
}

fn combination_unrank(n: u64, k: u64, mut rank: u128) -> Vec<u64> {
    let mut out = Vec::with_capacity(k as usize);
    let mut next = 0u64;
    for pos in 0..k {
        loop {
            let count = binomial(n - next - 1, k - pos - 1).unwrap_or(0);
            if rank < count {
                break;
            }
            rank -= count;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cantor_pairing_small_values() {
        assert_eq!(pair(0, 0), 0);
        assert_eq!(pair(1, 0), 1);
        assert_eq!(pair(0, 1), 2);
        for z in 0..500 {
            let (i, j) = unpair(z);
            assert_eq!(pair(i, j), z);
        }
    }

    #[test]
    fn binseq_codes() {
        assert_eq!(encode_binseq(&[]), 0);
        assert_eq!(encode_binseq(&[0]), 1);
        assert_eq!(encode_binseq(&[0, 1]), 4);
        for c in 0..300 {
            assert_eq!(encode_binseq(&decode_binseq(c)), c);
        }
    }

    #[test]
    fn binseq_prefixes_have_smaller_codes() {
        for c in 1..300 {
            let w = decode_binseq(c);
            assert!(encode_binseq(&w[..w.len() - 1]) < c);
        }
    }

    #[test]
    fn clopen_half_sizes() {
        assert_eq!(Space::ClopenHalf(1).size(), Some(2));
        assert_eq!(Space::ClopenHalf(2).size(), Some(6));
        assert_eq!(Space::ClopenHalf(3).size(), Some(70));
        let s = Space::ClopenHalf(3);
        for c in 0..70 {
            let p = s.decode(c).unwrap();
            assert_eq!(s.encode(&p).unwrap(), c);
        }
        assert!(s.decode(70).is_err());
    }

    #[test]
    fn enumerate_finite_space_overflow() {
        assert_eq!(Space::Omega.enumerate(3).unwrap(), vec![0, 1, 2]);
        assert_eq!(Space::ClopenHalf(1).enumerate(2).unwrap(), vec![0, 1]);
        assert!(matches!(
            Space::ClopenHalf(1).enumerate(3),
            Err(Error::CountExceedsSpace { .. })
        ));
    }

    #[test]
    fn clopen_half_one_members_are_single_cells() {
        let s = Space::ClopenHalf(1);
        assert_eq!(s.decode(0).unwrap(), Point::Clopen(0b01));
        assert_eq!(s.decode(1).unwrap(), Point::Clopen(0b10));
    }

    #[test]
    fn mazur_sum_order() {
        let s = Space::MazurSum;
        assert_eq!(s.decode(0).unwrap(), Point::Mazur { n: 1, values: vec![0] });
        assert_eq!(s.decode(1).unwrap(), Point::Mazur { n: 1, values: vec![1] });
        assert_eq!(s.decode(2).unwrap(), Point::Mazur { n: 2, values: vec![0, 0] });
        assert_eq!(s.decode(3).unwrap(), Point::Mazur { n: 2, values: vec![0, 1] });
        assert_eq!(mazur_offset(3), Some(18));
    }

    #[test]
    fn delta_and_tree_roundtrip() {
        for c in 0..200 {
            let p = Space::Delta.decode(c).unwrap();
            assert_eq!(Space::Delta.encode(&p).unwrap(), c);
        }
        let t = Space::TreeSeq(GrowthVector::shifted_identity());
        assert_eq!(t.decode(0).unwrap(), Point::TreeWord(vec![]));
        assert_eq!(t.decode(1).unwrap(), Point::TreeWord(vec![0]));
        assert_eq!(t.decode(3).unwrap(), Point::TreeWord(vec![0, 0]));
        for c in 0..500 {
            let p = t.decode(c).unwrap();
            assert_eq!(t.encode(&p).unwrap(), c);
        }
    }

    #[test]
    fn two_part_sum_interleaves() {
        let s = Space::two_part_sum(Space::Omega, Space::Omega);
        assert_eq!(s.decode(0).unwrap(), Point::Sum(0, Box::new(Point::Nat(0))));
        assert_eq!(s.decode(1).unwrap(), Point::Sum(1, Box::new(Point::Nat(0))));
        assert_eq!(s.decode(5).unwrap(), Point::Sum(1, Box::new(Point::Nat(2))));
    }

    #[test]
    fn finite_summands_rejected() {
        let s = Space::two_part_sum(Space::Omega, Space::ClopenHalf(2));
        assert!(s.validate().is_err());
    }
}
