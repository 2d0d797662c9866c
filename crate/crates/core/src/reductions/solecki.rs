//! The map from clopen halves to binary words, and the clopen sets avoiding finitely many points.
//!
//! Cell `i` at resolution `l` is the cylinder of the length-`l` word whose bits are those of `i`,
//! most significant first.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground::{encode_binseq, Point, Space};

pub fn cell_word(l: u32, cell: u64) -> Vec<u8> {
    (0..l).rev().map(|b| (cell >> b & 1) as u8).collect()
}

pub fn word_cell(word: &[u8]) -> u64 {
    word.iter().fold(0u64, |c, &b| c << 1 | b as u64)
}

fn cells_of(l: u32, code: u64) -> Result<Vec<u64>> {
    match Space::ClopenHalf(l).decode(code)? {
        Point::Clopen(mask) => Ok((0..1u64 << l).filter(|i| mask >> i & 1 == 1).collect()),
        _ => unreachable!(),
    }
}

/// Maximal cylinders contained in the union of the given cells, as pairwise incomparable words.
pub fn components(l: u32, cells: &[u64]) -> Vec<Vec<u8>> {
    let mut words: Vec<Vec<u8>> = cells.iter().map(|&c| cell_word(l, c)).collect();
    words.sort();
    for _ in 0..l {
        let mut merged = Vec::with_capacity(words.len());
        let mut k = 0;
        while k < words.len() {
            let w = &words[k];
            let sibling_next = k + 1 < words.len()
                && !w.is_empty()
                && *w.last().unwrap() == 0
                && words[k + 1].len() == w.len()
                && words[k + 1][..w.len() - 1] == w[..w.len() - 1]
                && words[k + 1][w.len() - 1] == 1;
            if sibling_next {
                merged.push(w[..w.len() - 1].to_vec());
                k += 2;
            } else {
                merged.push(w.clone());
                k += 1;
            }
        }
        merged.sort();
        if merged.len() == words.len() {
            break;
        }
        words = merged;
    }
    words
}

/// `s ≼ t`: the words first differ at some `m < min(|s|, |t|)` with `s(m) < t(m)`.
pub fn precedes(s: &[u8], t: &[u8]) -> bool {
    s.iter().zip(t).find(|(a, b)| a != b).is_some_and(|(a, b)| a < b)
}

/// Image of a clopen half at resolution `l` in `2^{<ω}`: the first coordinate dropped from the
/// `≼`-least component.
pub fn solecki_to_ib_word(l: u32, code: u64) -> Result<Vec<u8>> {
    if l == 0 {
        return Err(Error::ResolutionTooLarge(l));
    }
    let comps = components(l, &cells_of(l, code)?);
    let least = comps
        .iter()
        .find(|s| comps.iter().all(|t| t == *s || precedes(s, t)))
        .expect("components are pairwise incomparable");
    if least.is_empty() {
        return Err(Error::EmptySequence);
    }
    Ok(least[1..].to_vec())
}

pub fn solecki_to_ib(l: u32, code: u64) -> Result<u64> {
    Ok(encode_binseq(&solecki_to_ib_word(l, code)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub resolution: u32,
    pub code: u64,
    pub cells: Vec<u64>,
    /// Index of the chosen antichain element.
    pub chosen: usize,
    pub word: Vec<u8>,
}

fn is_prefix(a: &[u8], b: &[u8]) -> bool {
    a.len() <= b.len() && b[..a.len()] == *a
}

/// Bit `i` of the point `p⌢000…`.
fn point_bit(p: &[u8], i: usize) -> u8 {
    p.get(i).copied().unwrap_or(0)
}

fn point_has_prefix(p: &[u8], w: &[u8]) -> bool {
    w.iter().enumerate().all(|(i, &b)| point_bit(p, i) == b)
}

/// A clopen half `C` with `f(C) = s_n` for some antichain member `s_n` while no point lies in `C`.
///
/// Points are finite words read as `p⌢000…`.
pub fn solecki_counterexample(antichain: &[Vec<u8>], points: &[Vec<u8>]) -> Result<Counterexample> {
    for (i, s) in antichain.iter().enumerate() {
        if s.iter().any(|&b| b > 1) {
            return Err(Error::InvalidArgument("words must be binary".into()));
        }
        for (j, t) in antichain.iter().enumerate() {
            if i != j && is_prefix(s, t) {
                return Err(Error::InvalidArgument(format!(
                    "antichain members {i} and {j} are comparable"
                )));
            }
        }
    }
    let k = points.len();
    let (chosen, s_n) = antichain
        .iter()
        .enumerate()
        .find(|(_, s)| {
            let mut w = vec![0u8];
            w.extend_from_slice(s);
            points.iter().all(|p| !point_has_prefix(p, &w))
        })
        .ok_or(Error::NoAvoidingElement)?;
    let m = s_n.len() as u32 + 1;
    let mut l = m + 1;
    while (1u64 << (l - m)) < k as u64 {
        l += 1;
    }
    if l > 6 {
        return Err(Error::ResolutionTooLarge(l));
    }
    let p = (1u64 << (l - 1)) - (1u64 << (l - m));
    let mut head = vec![0u8];
    head.extend_from_slice(s_n);
    let base = word_cell(&head) << (l - m);
    let mut cells: Vec<u64> = (base..base + (1u64 << (l - m))).collect();
    let free = (0..1u64 << (l - 1)).filter(|&t| {
        let mut w = vec![1u8];
        w.extend(cell_word(l - 1, t));
        points.iter().all(|x| !point_has_prefix(x, &w))
    });
    let picked: Vec<u64> = free.take(p as usize).map(|t| (1u64 << (l - 1)) | t).collect();
    if picked.len() < p as usize {
        return Err(Error::NoAvoidingElement);
    }
    cells.extend(picked);
    cells.sort_unstable();
    let mask = cells.iter().fold(0u64, |acc, &c| acc | 1 << c);
    let code = Space::ClopenHalf(l).encode(&Point::Clopen(mask))?;
    debug_assert_eq!(solecki_to_ib_word(l, code).ok().as_deref(), Some(s_n.as_slice()));
    Ok(Counterexample {
        resolution: l,
        code,
        cells,
        chosen,
        word: s_n.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code_of(l: u32, cells: &[u64]) -> u64 {
        let mask = cells.iter().fold(0, |m, &c| m | 1 << c);
        Space::ClopenHalf(l).encode(&Point::Clopen(mask)).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(solecki_to_ib_word(2, code_of(2, &[0, 1])).unwrap(), Vec::<u8>::new());
        assert_eq!(solecki_to_ib_word(2, code_of(2, &[0, 2])).unwrap(), vec![0]);
        assert_eq!(solecki_to_ib_word(1, code_of(1, &[1])).unwrap(), Vec::<u8>::new());
    }

    #[test]
    fn components_merge() {
        assert_eq!(components(3, &[0, 1, 2, 3]), vec![vec![0]]);
        assert_eq!(components(3, &[1, 2, 4, 5]), vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0]]);
    }

    #[test]
    fn counterexample_one_point() {
        let ce = solecki_counterexample(&[vec![0], vec![1]], &[vec![0, 0]]).unwrap();
        assert_eq!(ce.chosen, 1);
        assert_eq!(ce.resolution, 3);
        // [01] ∪ [100] ∪ [101]
        assert_eq!(ce.cells, vec![2, 3, 4, 5]);
    }

    #[test]
    fn counterexample_no_points() {
        let ce = solecki_counterexample(&[vec![1, 1]], &[]).unwrap();
        assert_eq!(ce.cells.len(), 1 << (ce.resolution - 1));
        assert_eq!(solecki_to_ib_word(ce.resolution, ce.code).unwrap(), vec![1, 1]);
    }
}
