//! Exact-rational submeasures and the catalogue of lower semicontinuous ones.

mod axioms;
mod mazur;

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ground::{decode_binseq, FiniteSet, Point, Space};
use crate::rational::{format_rational, int, parse_rational, ExtRational, Rational};

pub use axioms::{check_axioms, tail_profile, AxiomReport, TailProfile, TailVerdict, Violation};
pub use mazur::{mazur_partition_functions, mazur_phi, mazur_phi_masks, range_mask};

/// Weights `c_n` of a summable submeasure.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum WeightRule {
    /// `c_n = 1/(n+1)`
    Harmonic,
    /// Explicit initial weights followed by a tail rule.
    Explicit { weights: Vec<Rational>, tail: Tail },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Tail {
    Harmonic,
    Constant(Rational),
}

impl WeightRule {
    pub fn weight(&self, n: u64) -> Rational {
        match self {
            WeightRule::Harmonic => Rational::new(1.into(), (n + 1).into()),
            WeightRule::Explicit { weights, tail } => match weights.get(n as usize) {
                Some(w) => w.clone(),
                None => match tail {
                    Tail::Harmonic => Rational::new(1.into(), (n + 1).into()),
                    Tail::Constant(q) => q.clone(),
                },
            },
        }
    }

    /// Whether `Σ c_n = ∞`, i.e. whether the summable ideal is a proper ideal.
    pub fn diverges(&self) -> bool {
        match self {
            WeightRule::Harmonic => true,
            WeightRule::Explicit { tail, .. } => match tail {
                Tail::Harmonic => true,
                Tail::Constant(q) => !q.is_zero(),
            },
        }
    }

    /// Whether `c_n → 0`, which makes the summable ideal tall.
    pub fn vanishes(&self) -> bool {
        match self {
            WeightRule::Harmonic => true,
            WeightRule::Explicit { tail, .. } => match tail {
                Tail::Harmonic => true,
                Tail::Constant(q) => q.is_zero(),
            },
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = |m: &str| Error::Syntax {
            position: 0,
            message: format!("{m}: {text:?}"),
        };
        if text == "1/(n+1)" {
            return Ok(WeightRule::Harmonic);
        }
        let inner = text
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| bad("expected 1/(n+1) or [w, ...; tail]"))?;
        let (list, tail) = inner.split_once(';').ok_or_else(|| bad("missing tail rule"))?;
        let weights = list
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                parse_rational(t)
                    .filter(|q| *q >= Rational::zero())
                    .ok_or_else(|| bad("bad weight"))
            })
            .collect::<Result<Vec<_>>>()?;
        let tail = match tail.trim() {
            "1/(n+1)" => Tail::Harmonic,
            t => Tail::Constant(
                parse_rational(t)
                    .filter(|q| *q >= Rational::zero())
                    .ok_or_else(|| bad("bad tail"))?,
            ),
        };
        Ok(WeightRule::Explicit { weights, tail })
    }
}

impl fmt::Display for WeightRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightRule::Harmonic => write!(f, "1/(n+1)"),
            WeightRule::Explicit { weights, tail } => {
                let ws: Vec<String> = weights.iter().map(format_rational).collect();
                let tail = match tail {
                    Tail::Harmonic => "1/(n+1)".to_string(),
                    Tail::Constant(q) => format_rational(q),
                };
                write!(f, "[{}; {}]", ws.join(", "), tail)
            }
        }
    }
}

pub type Evaluator = Arc<dyn Fn(&[u64]) -> ExtRational + Send + Sync>;

#[derive(Clone)]
pub enum Kind {
    Counting,
    Summable(WeightRule),
    /// `sup_k |A ∩ [2^k − 1, 2^{k+1} − 1)| / 2^k`
    Density,
    /// Number of `⊆`-maximal elements, on `2^{<ω}`.
    Antichain,
    /// Largest vertical section, on `Δ`.
    EdFin,
    /// `sup_n φ_n(A ∩ (2n)^n)`, on the Mazur sum.
    Mazur,
    /// Least number of cells of `2^l` meeting every member, on `ClopenHalf(l)`.
    SoleckiCover(u32),
    Custom(Evaluator),
}

impl fmt::Debug for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Counting => write!(f, "Counting"),
            Kind::Summable(r) => write!(f, "Summable({r})"),
            Kind::Density => write!(f, "Density"),
            Kind::Antichain => write!(f, "Antichain"),
            Kind::EdFin => write!(f, "EdFin"),
            Kind::Mazur => write!(f, "Mazur"),
            Kind::SoleckiCover(l) => write!(f, "SoleckiCover({l})"),
            Kind::Custom(_) => write!(f, "Custom"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Submeasure {
    pub space: Space,
    pub label: String,
    pub kind: Kind,
}

impl Submeasure {
    pub fn counting(space: Space) -> Self {
        Submeasure {
            space,
            label: "counting".into(),
            kind: Kind::Counting,
        }
    }

    pub fn summable(rule: WeightRule) -> Self {
        Submeasure {
            space: Space::Omega,
            label: format!("summable:{rule}"),
            kind: Kind::Summable(rule),
        }
    }

    pub fn density() -> Self {
        Submeasure {
            space: Space::Omega,
            label: "density".into(),
            kind: Kind::Density,
        }
    }

    pub fn antichain() -> Self {
        Submeasure {
            space: Space::BinarySeq,
            label: "ib".into(),
            kind: Kind::Antichain,
        }
    }

    pub fn edfin() -> Self {
        Submeasure {
            space: Space::Delta,
            label: "edfin".into(),
            kind: Kind::EdFin,
        }
    }

    pub fn mazur() -> Self {
        Submeasure {
            space: Space::MazurSum,
            label: "mazur".into(),
            kind: Kind::Mazur,
        }
    }

    pub fn solecki_cover(l: u32) -> Result<Self> {
        let space = Space::ClopenHalf(l);
        space.validate()?;
        Ok(Submeasure {
            space,
            label: format!("solecki:{l}"),
            kind: Kind::SoleckiCover(l),
        })
    }

    pub fn custom(space: Space, label: impl Into<String>, f: Evaluator) -> Self {
        Submeasure {
            space,
            label: label.into(),
            kind: Kind::Custom(f),
        }
    }

    /// Look up a catalogue entry by identifier.
    pub fn catalogue(id: &str) -> Result<Self> {
        let id = id.trim();
        let (head, arg) = match id.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (id, None),
        };
        match (head, arg) {
            ("counting", None) => Ok(Submeasure::counting(Space::Omega)),
            ("summable", Some(rule)) => Ok(Submeasure::summable(WeightRule::parse(rule)?)),
            ("density", None) => Ok(Submeasure::density()),
            ("ib", None) => Ok(Submeasure::antichain()),
            ("edfin", None) => Ok(Submeasure::edfin()),
            ("mazur", None) => Ok(Submeasure::mazur()),
            ("solecki", Some(l)) => {
                let l: u32 = l
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad resolution {l:?}")))?;
                Submeasure::solecki_cover(l)
            }
            _ => Err(Error::InvalidArgument(format!("unknown submeasure {id:?}"))),
        }
    }

    /// Identifiers accepted by [`Submeasure::catalogue`].
    pub fn catalogue_ids() -> Vec<&'static str> {
        vec![
            "counting",
            "summable:1/(n+1)",
            "density",
            "ib",
            "edfin",
            "mazur",
            "solecki:3",
        ]
    }

    pub fn eval(&self, set: &FiniteSet) -> Result<ExtRational> {
        if set.space != self.space {
            return Err(Error::SpaceMismatch(format!(
                "submeasure {} lives on {}, set on {}",
                self.label, self.space, set.space
            )));
        }
        Ok(self.eval_codes(set.codes()))
    }

    /// Value on a strictly increasing list of valid codes.
    pub fn eval_codes(&self, codes: &[u64]) -> ExtRational {
        match &self.kind {
            Kind::Counting => ExtRational::from_int(codes.len() as i64),
            Kind::Summable(rule) => {
                let mut sum = Rational::zero();
                for &c in codes {
                    sum += rule.weight(c);
                }
                ExtRational::Finite(sum)
            }
            Kind::Density => ExtRational::Finite(density_value(codes)),
            Kind::Antichain => ExtRational::from_int(maximal_count(codes) as i64),
            Kind::EdFin => ExtRational::from_int(max_column(codes) as i64),
            Kind::Mazur => ExtRational::from_int(mazur::mazur_value(codes) as i64),
            Kind::SoleckiCover(l) => ExtRational::from_int(solecki_cover_value(*l, codes) as i64),
            Kind::Custom(f) => f(codes),
        }
    }

    /// `(B, φ(B))` pairs that dominate every constraint of the exhaustive family on `ground`.
    pub fn reduced_family(&self, ground: &FiniteSet) -> Result<Vec<(FiniteSet, ExtRational)>> {
        match &self.kind {
            Kind::Antichain => Ok(branch_chains(ground)
                .into_iter()
                .map(|chain| (chain, ExtRational::one()))
                .collect()),
            Kind::Mazur => mazur::cover_union_family(ground),
            Kind::Counting | Kind::Summable(_) => Ok(ground
                .codes()
                .iter()
                .map(|&c| {
                    let single = FiniteSet::new(ground.space.clone(), [c]).unwrap();
                    let v = self.eval_codes(&[c]);
                    (single, v)
                })
                .collect()),
            _ => Err(Error::NoReducedFamily(self.label.clone())),
        }
    }

    pub fn reduced_family_label(&self) -> Option<&'static str> {
        match self.kind {
            Kind::Antichain => Some("branch-chains"),
            Kind::Mazur => Some("cover-unions"),
            Kind::Counting | Kind::Summable(_) => Some("singletons"),
            _ => None,
        }
    }
}

fn density_value(codes: &[u64]) -> Rational {
    let mut best = Rational::zero();
    let mut i = 0;
    while i < codes.len() {
        let k = 63 - (codes[i] + 1).leading_zeros() as u64;
        let hi = (1u128 << (k + 1)) - 1;
        let mut count = 0u64;
        while i < codes.len() && (codes[i] as u128) < hi {
            count += 1;
            i += 1;
        }
        let v = Rational::new(count.into(), num_bigint::BigInt::one() << k);
        if v > best {
            best = v;
        }
    }
    best
}

fn is_prefix(a: &[u8], b: &[u8]) -> bool {
    a.len() <= b.len() && b[..a.len()] == *a
}

/// Number of words in the set that are not a proper prefix of another member.
pub fn maximal_count(codes: &[u64]) -> usize {
    let words: Vec<Vec<u8>> = codes.iter().map(|&c| decode_binseq(c)).collect();
    maximal_indices(&words).len()
}

fn maximal_indices(words: &[Vec<u8>]) -> Vec<usize> {
    (0..words.len())
        .filter(|&i| {
            !words
                .iter()
                .enumerate()
                .any(|(j, w)| j != i && w.len() > words[i].len() && is_prefix(&words[i], w))
        })
        .collect()
}

/// One chain per maximal element: its prefixes inside the ground set.
pub fn branch_chains(ground: &FiniteSet) -> Vec<FiniteSet> {
    let words: Vec<Vec<u8>> = ground.codes().iter().map(|&c| decode_binseq(c)).collect();
    maximal_indices(&words)
        .into_iter()
        .map(|m| {
            let codes = ground
                .codes()
                .iter()
                .zip(&words)
                .filter(|(_, w)| is_prefix(w, &words[m]))
                .map(|(&c, _)| c);
            FiniteSet::new(ground.space.clone(), codes).unwrap()
        })
        .collect()
}

fn max_column(codes: &[u64]) -> usize {
    let mut counts = std::collections::BTreeMap::new();
    for &c in codes {
        if let Ok(Point::Tri(i, _)) = Space::Delta.decode(c) {
            *counts.entry(i).or_insert(0usize) += 1;
        }
    }
    counts.values().copied().max().unwrap_or(0)
}

/// Cell mask of each member of `ClopenHalf(l)`.
pub fn clopen_masks(l: u32, codes: &[u64]) -> Vec<u64> {
    let space = Space::ClopenHalf(l);
    codes
        .iter()
        .map(|&c| match space.decode(c) {
            Ok(Point::Clopen(m)) => m,
            _ => 0,
        })
        .collect()
}

/// Least `k` such that some `k` cells meet every member.
pub fn solecki_cover_value(l: u32, codes: &[u64]) -> usize {
    let members = clopen_masks(l, codes);
    if members.is_empty() {
        return 0;
    }
    let cells = 1usize << l;
    for k in 1..=cells {
        let mut hit = false;
        for_each_combination(cells, k, &mut |chosen| {
            if members.iter().all(|&m| m & chosen != 0) {
                hit = true;
            }
            hit
        });
        if hit {
            return k;
        }
    }
    cells
}

/// Visit `k`-subsets of `0..n` as bitmasks in lexicographic order until `f` returns true.
pub fn for_each_combination(n: usize, k: usize, f: &mut impl FnMut(u64) -> bool) -> bool {
    fn go(start: usize, n: usize, left: usize, mask: u64, f: &mut impl FnMut(u64) -> bool) -> bool {
        if left == 0 {
            return f(mask);
        }
        for i in start..=n - left {
            if go(i + 1, n, left - 1, mask | 1 << i, f) {
                return true;
            }
        }
        false
    }
    if k > n {
        return false;
    }
    go(0, n, k, 0, f)
}

/// Integer value of a finite extended rational.
pub fn as_int(v: &ExtRational) -> Option<i64> {
    use num_traits::ToPrimitive;
    v.finite().filter(|q| q.is_integer()).and_then(|q| q.to_integer().to_i64())
}

pub fn rational_of(v: &ExtRational) -> Result<Rational> {
    v.finite().cloned().ok_or(Error::InfiniteBound)
}

pub fn int_value(n: usize) -> ExtRational {
    ExtRational::Finite(int(n as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::{encode_binseq, pair};
    use crate::rational::rat;

    fn set(space: Space, codes: &[u64]) -> FiniteSet {
        FiniteSet::new(space, codes.iter().copied()).unwrap()
    }

    #[test]
    fn counting_and_harmonic_values() {
        let c = Submeasure::counting(Space::Omega);
        assert_eq!(c.eval(&set(Space::Omega, &[4, 7, 9])).unwrap(), ExtRational::from_int(3));
        let h = Submeasure::summable(WeightRule::Harmonic);
        assert_eq!(
            h.eval(&set(Space::Omega, &[0, 1, 2])).unwrap(),
            ExtRational::Finite(rat(11, 6))
        );
    }

    #[test]
    fn edfin_values() {
        let d = Space::Delta;
        let code = |i, j| d.encode(&Point::Tri(i, j)).unwrap();
        let phi = Submeasure::edfin();
        let f = set(d.clone(), &[code(3, 0), code(3, 1), code(5, 2)]);
        assert_eq!(phi.eval(&f).unwrap(), ExtRational::from_int(2));
        for n in 1..6u64 {
            let codes: Vec<u64> = (0..n).flat_map(|i| (0..=i).map(move |j| (i, j))).map(|(i, j)| code(i, j)).collect();
            assert_eq!(phi.eval_codes(&set(d.clone(), &codes).codes().to_vec()), ExtRational::from_int(n as i64));
        }
    }

    #[test]
    fn antichain_values() {
        let phi = Submeasure::antichain();
        let s = |ws: &[&[u8]]| set(Space::BinarySeq, &ws.iter().map(|w| encode_binseq(w)).collect::<Vec<_>>());
        assert_eq!(phi.eval(&s(&[&[], &[0], &[0, 1]])).unwrap(), ExtRational::from_int(1));
        assert_eq!(phi.eval(&s(&[&[0], &[1]])).unwrap(), ExtRational::from_int(2));
        assert_eq!(phi.eval(&s(&[])).unwrap(), ExtRational::zero());
    }

    #[test]
    fn solecki_cover_values() {
        let phi = Submeasure::solecki_cover(2).unwrap();
        assert_eq!(phi.eval(&set(Space::ClopenHalf(2), &[3])).unwrap(), ExtRational::from_int(1));
        assert_eq!(
            phi.eval(&set(Space::ClopenHalf(2), &[0, 1, 2, 3, 4, 5])).unwrap(),
            ExtRational::from_int(3)
        );
        assert_eq!(phi.eval(&set(Space::ClopenHalf(2), &[])).unwrap(), ExtRational::zero());
    }

    #[test]
    fn density_on_full_prefix() {
        let phi = Submeasure::density();
        let codes: Vec<u64> = (0..63).collect();
        assert_eq!(phi.eval_codes(&codes), ExtRational::one());
        assert_eq!(phi.eval_codes(&[1]), ExtRational::Finite(rat(1, 2)));
    }

    #[test]
    fn space_mismatch_is_reported() {
        let phi = Submeasure::edfin();
        assert!(matches!(
            phi.eval(&set(Space::Omega, &[pair(1, 1)])),
            Err(Error::SpaceMismatch(_))
        ));
    }

    #[test]
    fn weight_rule_syntax() {
        let r = WeightRule::parse("[1, 1/2; 0]").unwrap();
        assert_eq!(r.weight(1), rat(1, 2));
        assert_eq!(r.weight(7), rat(0, 1));
        assert_eq!(WeightRule::parse(&r.to_string()).unwrap(), r);
        assert!(!r.diverges());
        assert!(WeightRule::Harmonic.diverges());
    }

    #[test]
    fn catalogue_lookup() {
        for id in Submeasure::catalogue_ids() {
            assert!(Submeasure::catalogue(id).is_ok(), "{id}");
        }
        assert!(Submeasure::catalogue("nope").is_err());
    }
}
