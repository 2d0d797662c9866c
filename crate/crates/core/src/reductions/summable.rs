//! Diagonalization against a candidate reduction of `I_b` to a summable ideal.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground::{encode_binseq, FiniteSet, Space};
use crate::rational::{serde_rational, Rational};
use crate::submeasures::WeightRule;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub k: u32,
    /// Length of the run of ones after `k` zeros.
    pub ones: u32,
    pub word: Vec<u8>,
    #[serde(with = "serde_rational")]
    pub weight: Rational,
    /// The weight is not below `2^{-k}` within the prefix.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagonalization {
    pub prefix: u64,
    pub selections: Vec<Selection>,
    pub c_prefix: FiniteSet,
    #[serde(with = "serde_rational")]
    pub preimage_weight: Rational,
}

/// For each `k < levels` pick `n_k ≥ 1` minimizing the weight of `f⁻¹[{0_k⌢1^{n_k}}] ∩ [0, N)`.
///
/// `f` maps ω into `2^{<ω}` codes. Runs of ones longer than every image word have weight 0, so
/// the search stops one past the longest image.
pub fn summable_diagonalize(
    weights: &WeightRule,
    f: &dyn Fn(u64) -> u64,
    prefix: u64,
    levels: u32,
) -> Result<Diagonalization> {
    if levels == 0 {
        return Err(Error::InvalidArgument("at least one level is needed".into()));
    }
    let mut by_image: BTreeMap<u64, Rational> = BTreeMap::new();
    let mut longest = 0u32;
    for i in 0..prefix {
        let image = f(i);
        longest = longest.max(crate::ground::decode_binseq(image).len() as u32);
        *by_image.entry(image).or_insert_with(Rational::zero) += weights.weight(i);
    }
    let mut selections = Vec::with_capacity(levels as usize);
    let mut total = Rational::zero();
    for k in 0..levels {
        let top = longest.saturating_sub(k) + 1;
        let mut best: Option<(Rational, u32)> = None;
        for ones in 1..=top.max(1) {
            let word = run_word(k, ones);
            let w = by_image
                .get(&encode_binseq(&word))
                .cloned()
                .unwrap_or_else(Rational::zero);
            if best.as_ref().map_or(true, |(b, _)| w < *b) {
                best = Some((w, ones));
            }
        }
        let (weight, ones) = best.expect("at least one candidate");
        let bound = Rational::one() / Rational::from_integer((1u64 << k.min(62)).into());
        total += &weight;
        selections.push(Selection {
            k,
            ones,
            word: run_word(k, ones),
            flagged: weight >= bound,
            weight,
        });
    }
    let c_prefix = FiniteSet::new(
        Space::BinarySeq,
        selections.iter().map(|s| encode_binseq(&s.word)),
    )?;
    Ok(Diagonalization {
        prefix,
        selections,
        c_prefix,
        preimage_weight: total,
    })
}

fn run_word(k: u32, ones: u32) -> Vec<u8> {
    let mut w = vec![0u8; k as usize];
    w.extend(std::iter::repeat(1u8).take(ones as usize));
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_map_has_no_weight() {
        let d = summable_diagonalize(&WeightRule::Harmonic, &|_| 0, 256, 5).unwrap();
        assert!(d.preimage_weight.is_zero());
        assert!(d.selections.iter().all(|s| s.ones == 1 && !s.flagged));
    }

    #[test]
    fn single_level() {
        let d = summable_diagonalize(&WeightRule::Harmonic, &|i| i, 64, 1).unwrap();
        assert_eq!(d.c_prefix.len(), 1);
        assert_eq!(d.selections[0].word.iter().filter(|&&b| b == 0).count(), 0);
    }
}
