use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Rational};

/// Finite union of half-open intervals `[a, b)` inside `[0, 1)`, kept sorted and disjoint.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntervalSet {
    parts: Vec<(Rational, Rational)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet::default()
    }

    pub fn unit() -> Self {
        IntervalSet {
            parts: vec![(Rational::zero(), Rational::one())],
        }
    }

    pub fn new(parts: impl IntoIterator<Item = (Rational, Rational)>) -> Result<Self> {
        let mut raw: Vec<(Rational, Rational)> = Vec::new();
        for (a, b) in parts {
            if a < Rational::zero() || b > Rational::one() || a > b {
                return Err(Error::InvalidArgument(format!(
                    "[{}, {}) is not an interval inside [0, 1)",
                    format_rational(&a),
                    format_rational(&b)
                )));
            }
            if a < b {
                raw.push((a, b));
            }
        }
        raw.sort();
        let mut parts: Vec<(Rational, Rational)> = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            match parts.last_mut() {
                Some(last) if a <= last.1 => {
                    if b > last.1 {
                        last.1 = b;
                    }
                }
                _ => parts.push((a, b)),
            }
        }
        Ok(IntervalSet { parts })
    }

    pub fn interval(a: Rational, b: Rational) -> Result<Self> {
        IntervalSet::new([(a, b)])
    }

    pub fn parts(&self) -> &[(Rational, Rational)] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Lebesgue measure.
    pub fn measure(&self) -> Rational {
        self.parts.iter().map(|(a, b)| b - a).sum()
    }

    /// `λ(M ∩ [a, b))`
    pub fn overlap(&self, a: &Rational, b: &Rational) -> Rational {
        let mut total = Rational::zero();
        for (x, y) in &self.parts {
            let lo = if x > a { x } else { a };
            let hi = if y < b { y } else { b };
            if lo < hi {
                total += hi - lo;
            }
        }
        total
    }

    /// Union of `cells` chosen among the `grid` equal cells of `[0, 1)`.
    pub fn from_cells(grid: u64, cells: &[u64]) -> Result<Self> {
        let g = Rational::from_integer(grid.into());
        IntervalSet::new(cells.iter().map(|&c| {
            (
                Rational::from_integer(c.into()) / &g,
                Rational::from_integer((c + 1).into()) / &g,
            )
        }))
    }

    /// `count` distinct grid cells chosen uniformly.
    pub fn random(rng: &mut impl Rng, grid: u64, count: u64) -> Result<Self> {
        if count > grid {
            return Err(Error::InvalidArgument(format!("{count} cells out of {grid}")));
        }
        let cells = rand::seq::index::sample(rng, grid as usize, count as usize)
            .into_iter()
            .map(|c| c as u64)
            .collect::<Vec<_>>();
        IntervalSet::from_cells(grid, &cells)
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("∅");
        }
        let text: Vec<String> = self
            .parts
            .iter()
            .map(|(a, b)| format!("[{}, {})", format_rational(a), format_rational(b)))
            .collect();
        f.write_str(&text.join(" ∪ "))
    }
}

impl FromStr for IntervalSet {
    type Err = Error;

    /// `[p/q, r/s) ∪ [..)`; `U` also separates, `∅` or blank is empty.
    fn from_str(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        if trimmed.is_empty() || trimmed == "∅" {
            return Ok(IntervalSet::empty());
        }
        let bad = |position: usize, message: &str| Error::Syntax {
            position,
            message: message.to_string(),
        };
        let mut parts = Vec::new();
        let mut rest = trimmed;
        let mut offset = text.len() - text.trim_start().len();
        loop {
            let body = rest
                .strip_prefix('[')
                .ok_or_else(|| bad(offset, "expected '['"))?;
            let close = body.find(')').ok_or_else(|| bad(offset, "expected ')'"))?;
            let inner = &body[..close];
            let (a, b) = inner
                .split_once(',')
                .ok_or_else(|| bad(offset + 1, "expected 'a, b'"))?;
            let a = parse_rational(a.trim()).ok_or_else(|| bad(offset + 1, "bad left endpoint"))?;
            let b = parse_rational(b.trim()).ok_or_else(|| bad(offset + 1, "bad right endpoint"))?;
            parts.push((a, b));
            let consumed = 1 + close + 1;
            offset += consumed;
            let after = &rest[consumed..];
            let trimmed_after = after.trim_start();
            offset += after.len() - trimmed_after.len();
            if trimmed_after.is_empty() {
                break;
            }
            let sep = if let Some(r) = trimmed_after.strip_prefix('∪') {
                offset += '∪'.len_utf8();
                r
            } else if let Some(r) = trimmed_after.strip_prefix('U') {
                offset += 1;
                r
            } else {
                return Err(bad(offset, "expected '∪' between intervals"));
            };
            let next = sep.trim_start();
            offset += sep.len() - next.len();
            rest = next;
        }
        IntervalSet::new(parts)
    }
}

impl Serialize for IntervalSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
