use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::ground::{FiniteSet, Point, Space};
use crate::rational::ExtRational;
use crate::ground::space::{mazur_offset, mazur_section_size};

use super::for_each_combination;

pub fn range_mask(values: &[u64]) -> u64 {
    values.iter().fold(0u64, |m, &v| m | 1 << v)
}

/// `φ_n` on a family given by the ranges of its functions.
///
/// `B ⊆ ∪_{i∈F} M_i^n` exactly when no range contains `F`, so the first such `F`
/// in order of size gives the value.
pub fn mazur_phi_masks(n: u64, ranges: &[u64]) -> usize {
    let ranges: BTreeSet<u64> = ranges.iter().copied().collect();
    let indices = 2 * n as usize;
    for k in 0..=indices {
        let found = for_each_combination(indices, k, &mut |f| ranges.iter().all(|&r| r & f != f));
        if found {
            return k;
        }
    }
    indices
}

fn section_of(code: u64) -> Result<(u64, Vec<u64>)> {
    match Space::MazurSum.decode(code)? {
        Point::Mazur { n, values } => Ok((n, values)),
        _ => unreachable!(),
    }
}

pub fn mazur_phi(n: u64, set: &FiniteSet) -> Result<ExtRational> {
    if n == 0 {
        return Err(Error::IndexZero);
    }
    if set.space != Space::MazurSum {
        return Err(Error::SpaceMismatch(format!("{} is not the Mazur sum", set.space)));
    }
    if n > 32 {
        return Err(Error::InvalidArgument(format!("section {n} is too large")));
    }
    let mut masks = Vec::with_capacity(set.len());
    for &c in set.codes() {
        let (m, values) = section_of(c)?;
        if m != n {
            return Err(Error::SpaceMismatch(format!("code {c} lies in section {m}, not {n}")));
        }
        masks.push(range_mask(&values));
    }
    Ok(ExtRational::from_int(mazur_phi_masks(n, &masks) as i64))
}

pub(super) fn mazur_value(codes: &[u64]) -> usize {
    let mut sections: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for &c in codes {
        if let Ok((n, values)) = section_of(c) {
            sections.entry(n).or_default().push(range_mask(&values));
        }
    }
    sections
        .iter()
        .map(|(&n, masks)| mazur_phi_masks(n, masks))
        .max()
        .unwrap_or(0)
}

/// Codes of section `n`.
pub fn section_codes(n: u64) -> Result<std::ops::Range<u64>> {
    let overflow = || Error::CodingOverflow("mazur sum".into());
    let start = mazur_offset(n).ok_or_else(overflow)?;
    let size = mazur_section_size(n).ok_or_else(overflow)?;
    Ok(start..start + size)
}

/// `S_i^n = M_i^n ∖ ∪_{j<i} M_j^n` for `i ≤ n`: the functions whose least missing value is `i`.
pub fn mazur_partition_functions(n: u64) -> Result<Vec<FiniteSet>> {
    if n == 0 {
        return Err(Error::IndexZero);
    }
    let mut parts: Vec<Vec<u64>> = vec![Vec::new(); n as usize + 1];
    for c in section_codes(n)? {
        let (_, values) = section_of(c)?;
        let mask = range_mask(&values);
        let i = (!mask).trailing_zeros() as usize;
        parts[i].push(c);
    }
    parts
        .into_iter()
        .map(|codes| FiniteSet::new(Space::MazurSum, codes))
        .collect()
}

/// `{(∪_{i∈F} M_i^n ∩ ground, |F|) : ∅ ≠ F ⊆ 2n}` for a ground inside one section.
pub(super) fn cover_union_family(ground: &FiniteSet) -> Result<Vec<(FiniteSet, ExtRational)>> {
    let mut n = None;
    let mut masks = Vec::new();
    for &c in ground.codes() {
        let (m, values) = section_of(c)?;
        if *n.get_or_insert(m) != m {
            return Err(Error::NoReducedFamily(
                "mazur cover unions need a ground inside one section".into(),
            ));
        }
        masks.push(range_mask(&values));
    }
    let Some(n) = n else {
        return Ok(Vec::new());
    };
    let indices = 2 * n as u32;
    if indices > 20 {
        return Err(Error::NoReducedFamily(format!("section {n} is too large")));
    }
    let mut family = Vec::new();
    for f in 1u64..1 << indices {
        let codes = ground
            .codes()
            .iter()
            .zip(&masks)
            .filter(|(_, &r)| r & f != f)
            .map(|(&c, _)| c);
        family.push((
            FiniteSet::new(Space::MazurSum, codes)?,
            ExtRational::from_int(f.count_ones() as i64),
        ));
    }
    Ok(family)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn section(n: u64) -> FiniteSet {
        FiniteSet::new(Space::MazurSum, section_codes(n).unwrap()).unwrap()
    }

    #[test]
    fn small_values() {
        let empty = FiniteSet::empty(Space::MazurSum);
        assert_eq!(mazur_phi(2, &empty).unwrap(), ExtRational::zero());
        for c in section_codes(2).unwrap() {
            let single = FiniteSet::new(Space::MazurSum, [c]).unwrap();
            assert_eq!(mazur_phi(2, &single).unwrap(), ExtRational::one());
        }
        assert_eq!(mazur_phi(2, &section(2)).unwrap(), ExtRational::from_int(3));
        assert_eq!(mazur_phi(0, &empty), Err(Error::IndexZero));
    }

    #[test]
    fn partition_of_section_one() {
        let parts = mazur_partition_functions(1).unwrap();
        let one = Space::MazurSum
            .encode(&Point::Mazur { n: 1, values: vec![1] })
            .unwrap();
        let zero = Space::MazurSum
            .encode(&Point::Mazur { n: 1, values: vec![0] })
            .unwrap();
        assert_eq!(parts[0].codes(), &[one]);
        assert_eq!(parts[1].codes(), &[zero]);
        let both = parts[0].union(&parts[1]).unwrap();
        assert_eq!(mazur_phi(1, &both).unwrap(), ExtRational::from_int(2));
        assert_eq!(mazur_partition_functions(2).unwrap()[0].len(), 9);
    }
}
