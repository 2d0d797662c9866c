//! Decidable structural queries: emptiness and finiteness of described sets,
//! and the decomposition of a described set into its sections.
//!
//! Every description mentions finitely many constants. Points beyond all of
//! them fall into finitely many types, and one representative per type decides
//! the behaviour of the whole type.

use std::collections::BTreeSet;

use super::descr::{check_description, member, PeriodicWord, SetDescription as D};
use super::space::{decode_binseq, encode_binseq, mazur_offset, mazur_section_size, Point, Space};
use crate::error::{Error, Result};

const MAX_PERIOD: u64 = 1 << 20;
const MAX_TYPES: usize = 12;
const MAX_WORD_DEPTH: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub empty: bool,
    pub finite: bool,
}

pub fn shape(space: &Space, d: &D) -> Result<Shape> {
    check_description(space, d)?;
    shape_unchecked(space, d)
}

pub fn is_empty(space: &Space, d: &D) -> Result<bool> {
    Ok(shape(space, d)?.empty)
}

pub fn is_finite(space: &Space, d: &D) -> Result<bool> {
    Ok(shape(space, d)?.finite)
}

pub fn is_cofinite(space: &Space, d: &D) -> Result<bool> {
    is_finite(space, &D::complement(d.clone()))
}

/// `d1 ⊆ d2` decided as emptiness of `d1 ∖ d2`.
pub fn is_subset(space: &Space, d1: &D, d2: &D) -> Result<bool> {
    is_empty(space, &D::difference(d1.clone(), d2.clone()))
}

fn shape_unchecked(space: &Space, d: &D) -> Result<Shape> {
    if d.is_boolean_of_finite() {
        return boolean_of_finite_shape(space, d);
    }
    match space {
        Space::Omega => omega_shape(d),
        Space::Product(..) => {
            let sections = product_sections(space, d)?;
            let Space::Product(_, right) = space else { unreachable!() };
            combine_sections(
                sections.fixed.iter().map(|(_, s)| (right.as_ref().clone(), s.clone())),
                sections.generic.iter().map(|g| (right.as_ref().clone(), g)),
                |s| shape_unchecked(&s.0, &s.1),
            )
        }
        Space::DisjointSum(_) => {
            let sections = sum_sections(space, d)?;
            let rep = sections.generic_part.clone();
            combine_sections(
                sections.fixed.iter().map(|(_, p, s)| (p.clone(), s.clone())),
                sections.generic.iter().map(|g| (rep.clone().unwrap_or(Space::Omega), g)),
                |s| shape_unchecked(&s.0, &s.1),
            )
        }
        Space::Delta => delta_shape(d),
        Space::BinarySeq => binseq_shape(d),
        Space::MazurSum => mazur_shape(d),
        Space::TreeSeq(_) | Space::ClopenHalf(_) => Err(Error::UndecidableFiniteness(format!(
            "{d} in {space}"
        ))),
    }
}

/// A generic type of index: the set of indices of that type and the common section.
#[derive(Debug, Clone, PartialEq)]
pub struct GenericSection {
    pub indices: D,
    pub indices_shape: Shape,
    pub section: D,
}

fn combine_sections<'g, T>(
    fixed: impl Iterator<Item = T>,
    generic: impl Iterator<Item = (Space, &'g GenericSection)>,
    shape_of: impl Fn(&T) -> Result<Shape>,
) -> Result<Shape> {
    let mut out = Shape {
        empty: true,
        finite: true,
    };
    for item in fixed {
        let s = shape_of(&item)?;
        out.empty &= s.empty;
        out.finite &= s.finite;
    }
    for (space, g) in generic {
        if g.indices_shape.empty {
            continue;
        }
        let s = shape_unchecked(&space, &g.section)?;
        out.empty &= s.empty;
        out.finite &= s.empty || (s.finite && g.indices_shape.finite);
    }
    Ok(out)
}

fn boolean_of_finite_shape(space: &Space, d: &D) -> Result<Shape> {
    let listed = d.listed_codes();
    let unlisted_member = d.eval_with(&mut |_| Ok(false))?;
    let mut any_listed = false;
    for &c in &listed {
        if member(space, d, c)? {
            any_listed = true;
            break;
        }
    }
    if !unlisted_member {
        return Ok(Shape {
            empty: !any_listed,
            finite: true,
        });
    }
    match space.size() {
        None => Ok(Shape {
            empty: false,
            finite: false,
        }),
        Some(size) => Ok(Shape {
            empty: !any_listed && size <= listed.len() as u64,
            finite: true,
        }),
    }
}

/// Largest constant and period of an `ω`-description; membership is periodic beyond the constant.
fn omega_constants(d: &D) -> Result<(u64, u64)> {
    let mut k = 0u64;
    let mut period = 1u64;
    let mut err = None;
    d.visit_top(&mut |leaf| match leaf {
        D::Finite(cs) => k = k.max(cs.last().copied().unwrap_or(0)),
        D::Threshold(t) => k = k.max(*t),
        D::Residues(m, _) => {
            period = num_integer::lcm(period, (*m).max(1));
            if period > MAX_PERIOD {
                err = Some(Error::UndecidableFiniteness("period too large".into()));
            }
        }
        _ => {}
    });
    match err {
        Some(e) => Err(e),
        None => Ok((k, period)),
    }
}

fn omega_shape(d: &D) -> Result<Shape> {
    let (k, period) = omega_constants(d)?;
    let mut empty = true;
    let mut finite = true;
    for n in 0..=k + period {
        if member(&Space::Omega, d, n)? {
            empty = false;
            if n > k {
                finite = false;
                break;
            }
        }
    }
    Ok(Shape { empty, finite })
}

/// Constant and period bounds of an `ω`-description, for callers that pick representatives.
pub fn omega_bounds(d: &D) -> Result<(u64, u64)> {
    omega_constants(d)
}

fn split_pair(space: &Space, code: u64) -> Result<(u64, u64)> {
    match (space, space.decode(code)?) {
        (Space::Product(l, r), Point::Pair(a, b)) => Ok((l.encode(&a)?, r.encode(&b)?)),
        _ => Err(Error::SpaceMismatch(format!("{space} is not a product"))),
    }
}

/// Sections `A_(a) = {b : (a, b) ∈ A}` of a subset of a product.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSections {
    /// Left points named by a constant of the description.
    pub fixed: Vec<(u64, D)>,
    /// All other left points, grouped by type.
    pub generic: Vec<GenericSection>,
}

pub fn product_sections(space: &Space, d: &D) -> Result<ProductSections> {
    let Space::Product(left, _) = space else {
        return Err(Error::SpaceMismatch(format!("{space} is not a product")));
    };
    check_description(space, d)?;
    let mut constants = BTreeSet::new();
    let mut rects: Vec<D> = Vec::new();
    let mut codes = Vec::new();
    d.visit_top(&mut |leaf| match leaf {
        D::Column(c) => {
            constants.insert(*c);
        }
        D::Finite(cs) => codes.extend(cs.iter().copied()),
        D::Rectangle(a, _) => {
            if !rects.contains(a) {
                rects.push((**a).clone());
            }
        }
        _ => {}
    });
    for c in codes {
        constants.insert(split_pair(space, c)?.0);
    }
    constants.retain(|&c| left.contains_code(c));
    if rects.len() > MAX_TYPES {
        return Err(Error::UndecidableFiniteness("too many rectangles".into()));
    }

    let mut fixed = Vec::new();
    for &c in &constants {
        let section = d.map_leaves(&mut |leaf| {
            Ok(match leaf {
                D::Column(i) => {
                    if *i == c {
                        D::Full
                    } else {
                        D::Empty
                    }
                }
                D::Row(j) => D::finite([*j]),
                D::Finite(cs) => {
                    let mut out = Vec::new();
                    for &code in cs {
                        let (a, b) = split_pair(space, code)?;
                        if a == c {
                            out.push(b);
                        }
                    }
                    D::finite(out)
                }
                D::Rectangle(a, b) => {
                    if member(left, a, c)? {
                        (**b).clone()
                    } else {
                        D::Empty
                    }
                }
                other => other.clone(),
            })
        })?;
        fixed.push((c, section));
    }

    let not_constant = D::complement(D::finite(constants.iter().copied()));
    let mut generic = Vec::new();
    for v in 0u64..1 << rects.len() {
        let indices = rects.iter().enumerate().fold(not_constant.clone(), |acc, (k, r)| {
            let part = if v >> k & 1 == 1 {
                r.clone()
            } else {
                D::complement(r.clone())
            };
            D::intersection(acc, part)
        });
        let indices_shape = shape_unchecked(left, &indices)?;
        if indices_shape.empty {
            continue;
        }
        let section = d.map_leaves(&mut |leaf| {
            Ok(match leaf {
                D::Column(_) | D::Finite(_) => D::Empty,
                D::Row(j) => D::finite([*j]),
                D::Rectangle(a, b) => {
                    let k = rects.iter().position(|r| r == a.as_ref()).unwrap();
                    if v >> k & 1 == 1 {
                        (**b).clone()
                    } else {
                        D::Empty
                    }
                }
                other => other.clone(),
            })
        })?;
        generic.push(GenericSection {
            indices,
            indices_shape,
            section,
        });
    }
    Ok(ProductSections { fixed, generic })
}

/// Sections of a subset of a disjoint sum.
#[derive(Debug, Clone, PartialEq)]
pub struct SumSections {
    /// `(n, summand n, section)` for indices named by a constant.
    pub fixed: Vec<(u64, Space, D)>,
    /// Remaining indices by type; sections only use `Empty`, `Full` and `Finite`.
    pub generic: Vec<GenericSection>,
    /// A summand standing for every generic index.
    pub generic_part: Option<Space>,
}

pub fn sum_sections(space: &Space, d: &D) -> Result<SumSections> {
    let Space::DisjointSum(seq) = space else {
        return Err(Error::SpaceMismatch(format!("{space} is not a disjoint sum")));
    };
    check_description(space, d)?;
    let mut constants: BTreeSet<u64> = (0..seq.distinct_prefix()).collect();
    let mut diagonals: Vec<D> = Vec::new();
    let mut codes = Vec::new();
    d.visit_top(&mut |leaf| match leaf {
        D::Section(n) | D::Lift(n, _) => {
            constants.insert(*n);
        }
        D::Finite(cs) => codes.extend(cs.iter().copied()),
        D::Diagonal(a) => {
            if !diagonals.contains(a) {
                diagonals.push((**a).clone());
            }
        }
        _ => {}
    });
    let split = |code: u64| -> Result<(u64, u64, Space)> {
        match space.decode(code)? {
            Point::Sum(n, local) => {
                let part = seq.part(n).ok_or_else(|| Error::InvalidCode {
                    code,
                    space: space.to_string(),
                })?;
                Ok((n, part.encode(&local)?, part))
            }
            _ => unreachable!(),
        }
    };
    for &c in &codes {
        constants.insert(split(c)?.0);
    }
    if let Some(len) = seq.len() {
        constants.retain(|&n| n < len);
    }
    if diagonals.len() > MAX_TYPES {
        return Err(Error::UndecidableFiniteness("too many diagonals".into()));
    }

    let mut fixed = Vec::new();
    for &n in &constants {
        let part = seq.part(n).unwrap();
        let section = d.map_leaves(&mut |leaf| {
            Ok(match leaf {
                D::Section(m) => {
                    if *m == n {
                        D::Full
                    } else {
                        D::Empty
                    }
                }
                D::Lift(m, inner) => {
                    if *m == n {
                        (**inner).clone()
                    } else {
                        D::Empty
                    }
                }
                D::Diagonal(inner) => {
                    if member(&Space::Omega, inner, n)? {
                        D::finite([0])
                    } else {
                        D::Empty
                    }
                }
                D::Finite(cs) => {
                    let mut out = Vec::new();
                    for &code in cs {
                        let (m, local, _) = split(code)?;
                        if m == n {
                            out.push(local);
                        }
                    }
                    D::finite(out)
                }
                other => other.clone(),
            })
        })?;
        fixed.push((n, part, section));
    }

    let mut generic = Vec::new();
    let mut generic_part = None;
    if seq.len().is_none() {
        let top = constants.iter().next_back().map_or(0, |m| m + 1);
        generic_part = seq.part(top);
        let not_constant = D::complement(D::finite(constants.iter().copied()));
        for v in 0u64..1 << diagonals.len() {
            let indices = diagonals.iter().enumerate().fold(not_constant.clone(), |acc, (k, r)| {
                let part = if v >> k & 1 == 1 {
                    r.clone()
                } else {
                    D::complement(r.clone())
                };
                D::intersection(acc, part)
            });
            let indices_shape = shape_unchecked(&Space::Omega, &indices)?;
            if indices_shape.empty {
                continue;
            }
            let section = d.map_leaves(&mut |leaf| {
                Ok(match leaf {
                    D::Section(_) | D::Lift(..) | D::Finite(_) => D::Empty,
                    D::Diagonal(a) => {
                        let k = diagonals.iter().position(|r| r == a.as_ref()).unwrap();
                        if v >> k & 1 == 1 {
                            D::finite([0])
                        } else {
                            D::Empty
                        }
                    }
                    other => other.clone(),
                })
            })?;
            generic.push(GenericSection {
                indices,
                indices_shape,
                section,
            });
        }
    }
    Ok(SumSections {
        fixed,
        generic,
        generic_part,
    })
}

/// Columns `{j ≤ i : (i, j) ∈ A}` of a subset of `Δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaColumns {
    pub fixed: Vec<(u64, Vec<u64>)>,
    /// Every other column `i` equals this `ω`-description intersected with `[0, i]`.
    pub generic: D,
    /// Columns above this bound are generic.
    pub bound: u64,
}

pub fn delta_columns(d: &D) -> Result<DeltaColumns> {
    check_description(&Space::Delta, d)?;
    let mut constants = BTreeSet::new();
    d.visit_top(&mut |leaf| match leaf {
        D::Column(c) => {
            constants.insert(*c);
        }
        D::Finite(cs) => {
            for &c in cs {
                if let Ok(Point::Tri(i, _)) = Space::Delta.decode(c) {
                    constants.insert(i);
                }
            }
        }
        _ => {}
    });
    let mut fixed = Vec::new();
    for &i in &constants {
        let mut col = Vec::new();
        for j in 0..=i {
            let code = Space::Delta.encode(&Point::Tri(i, j))?;
            if member(&Space::Delta, d, code)? {
                col.push(j);
            }
        }
        fixed.push((i, col));
    }
    let generic = d.map_leaves(&mut |leaf| {
        Ok(match leaf {
            D::Column(_) | D::Finite(_) => D::Empty,
            D::Row(j) => D::finite([*j]),
            other => other.clone(),
        })
    })?;
    Ok(DeltaColumns {
        fixed,
        generic,
        bound: constants.iter().next_back().copied().unwrap_or(0),
    })
}

fn delta_shape(d: &D) -> Result<Shape> {
    let cols = delta_columns(d)?;
    let generic_empty = omega_shape(&cols.generic)?.empty;
    Ok(Shape {
        empty: generic_empty && cols.fixed.iter().all(|(_, c)| c.is_empty()),
        finite: generic_empty,
    })
}

fn binseq_shape(d: &D) -> Result<Shape> {
    let mut depth = 0usize;
    let mut branches: Vec<PeriodicWord> = Vec::new();
    d.visit_top(&mut |leaf| match leaf {
        D::Finite(cs) => {
            for &c in cs {
                depth = depth.max(decode_binseq(c).len());
            }
        }
        D::Section(n) => depth = depth.max(*n as usize),
        D::Branch(x) => {
            depth = depth.max(x.prefix.len() + x.period.len());
            if !branches.iter().any(|b| b.same_word(x)) {
                branches.push(x.clone());
            }
        }
        _ => {}
    });
    for a in &branches {
        for b in &branches {
            depth = depth.max(a.agreement_bound(b));
        }
    }
    while (1usize << (depth + 1).min(63)) <= branches.len() + 1 {
        depth += 1;
    }
    if depth > MAX_WORD_DEPTH {
        return Err(Error::UndecidableFiniteness(format!(
            "branch depth {depth} exceeds {MAX_WORD_DEPTH}"
        )));
    }
    let space = Space::BinarySeq;
    let mut finite = true;
    for x in &branches {
        if member(&space, d, encode_binseq(&x.restrict(depth + 1)))? {
            finite = false;
        }
    }
    let level_start = (1u64 << (depth + 1)) - 1;
    let off_branch = (level_start..2 * level_start + 1)
        .find(|&c| {
            let w = decode_binseq(c);
            !branches.iter().any(|x| x.has_prefix(&w))
        })
        .expect("some word of the level avoids every branch");
    if member(&space, d, off_branch)? {
        finite = false;
    }
    let mut empty = finite;
    if empty {
        for c in 0..level_start {
            if member(&space, d, c)? {
                empty = false;
                break;
            }
        }
    }
    Ok(Shape { empty, finite })
}

fn mazur_shape(d: &D) -> Result<Shape> {
    let space = Space::MazurSum;
    let mut top = 0u64;
    let listed = d.listed_codes();
    d.visit_top(&mut |leaf| {
        if let D::Section(n) = leaf {
            top = top.max(*n);
        }
    });
    let section_of = |c: u64| -> Result<u64> {
        match space.decode(c)? {
            Point::Mazur { n, .. } => Ok(n),
            _ => unreachable!(),
        }
    };
    for &c in &listed {
        top = top.max(section_of(c)?);
    }
    let overflow = || Error::CodingOverflow(space.to_string());
    let generic = mazur_offset(top + 1).ok_or_else(overflow)?;
    let finite = !member(&space, d, generic)?;
    let mut empty = finite;
    if empty {
        for &c in &listed {
            if member(&space, d, c)? {
                empty = false;
                break;
            }
        }
    }
    if empty {
        for n in 1..=top {
            let start = mazur_offset(n).ok_or_else(overflow)?;
            let size = mazur_section_size(n).ok_or_else(overflow)?;
            if let Some(c) = (start..start + size).find(|c| !listed.contains(c)) {
                if member(&space, d, c)? {
                    empty = false;
                    break;
                }
            }
        }
    }
    Ok(Shape { empty, finite })
}

/// Indices `n` of summands that a subset of a sum space meets.
pub fn sum_support(space: &Space, d: &D) -> Result<(Vec<u64>, Vec<D>)> {
    let sections = sum_sections(space, d)?;
    let mut fixed = Vec::new();
    for (n, part, s) in &sections.fixed {
        if !shape_unchecked(part, s)?.empty {
            fixed.push(*n);
        }
    }
    let mut generic = Vec::new();
    if let Some(part) = &sections.generic_part {
        for g in &sections.generic {
            if !shape_unchecked(part, &g.section)?.empty {
                generic.push(g.indices.clone());
            }
        }
    }
    Ok((fixed, generic))
}
