use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::space::Space;
use crate::error::{Error, Result};

/// A finite set of codes of one space, kept strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteSet {
    pub space: Space,
    codes: Vec<u64>,
}

impl FiniteSet {
    pub fn new(space: Space, codes: impl IntoIterator<Item = u64>) -> Result<Self> {
        let codes: BTreeSet<u64> = codes.into_iter().collect();
        if let Some(size) = space.size() {
            if let Some(&bad) = codes.iter().find(|&&c| c >= size) {
                return Err(Error::InvalidCode {
                    code: bad,
                    space: space.to_string(),
                });
            }
        }
        Ok(FiniteSet {
            space,
            codes: codes.into_iter().collect(),
        })
    }

    pub fn empty(space: Space) -> Self {
        FiniteSet {
            space,
            codes: Vec::new(),
        }
    }

    /// `{0, .., n-1}`
    pub fn prefix(space: Space, n: u64) -> Result<Self> {
        let codes = space.enumerate(n)?;
        Ok(FiniteSet { space, codes })
    }

    pub fn codes(&self) -> &[u64] {
        &self.codes
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn contains(&self, code: u64) -> bool {
        self.codes.binary_search(&code).is_ok()
    }

    pub fn max(&self) -> Option<u64> {
        self.codes.last().copied()
    }

    pub fn is_subset(&self, other: &FiniteSet) -> bool {
        self.codes.iter().all(|&c| other.contains(c))
    }

    fn same_space(&self, other: &FiniteSet) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch(format!(
                "{} versus {}",
                self.space, other.space
            )));
        }
        Ok(())
    }

    pub fn union(&self, other: &FiniteSet) -> Result<FiniteSet> {
        self.same_space(other)?;
        let codes: BTreeSet<u64> = self.codes.iter().chain(&other.codes).copied().collect();
        Ok(FiniteSet {
            space: self.space.clone(),
            codes: codes.into_iter().collect(),
        })
    }

    pub fn intersection(&self, other: &FiniteSet) -> Result<FiniteSet> {
        self.same_space(other)?;
        Ok(self.filter(|c| other.contains(c)))
    }

    pub fn difference(&self, other: &FiniteSet) -> Result<FiniteSet> {
        self.same_space(other)?;
        Ok(self.filter(|c| !other.contains(c)))
    }

    pub fn filter(&self, keep: impl Fn(u64) -> bool) -> FiniteSet {
        FiniteSet {
            space: self.space.clone(),
            codes: self.codes.iter().copied().filter(|&c| keep(c)).collect(),
        }
    }

    /// Subset selected by the bits of `mask` over the positions of `self`.
    pub fn subset_by_mask(&self, mask: u64) -> FiniteSet {
        FiniteSet {
            space: self.space.clone(),
            codes: self
                .codes
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &c)| c)
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_are_sorted_and_deduplicated() {
        let s = FiniteSet::new(Space::Omega, [5, 1, 5, 3]).unwrap();
        assert_eq!(s.codes(), &[1, 3, 5]);
        assert!(s.contains(3));
        assert!(!s.contains(4));
    }

    #[test]
    fn invalid_codes_in_finite_spaces() {
        assert!(FiniteSet::new(Space::ClopenHalf(1), [2]).is_err());
    }

    #[test]
    fn mixing_spaces_is_rejected() {
        let a = FiniteSet::new(Space::Omega, [1]).unwrap();
        let b = FiniteSet::new(Space::BinarySeq, [1]).unwrap();
        assert!(matches!(a.union(&b), Err(Error::SpaceMismatch(_))));
    }
}
