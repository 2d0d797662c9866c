use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Submeasure;
use crate::error::{Error, Result};
use crate::ground::{members_below, FiniteSet, SetDescription};
use crate::rational::ExtRational;

const EXHAUSTIVE_CODES: u64 = 10;
const KEPT_VIOLATIONS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: String,
    pub a: Vec<u64>,
    pub b: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub submeasure: String,
    pub exhaustive_codes: u64,
    pub exhaustive_pairs: u64,
    pub random_pairs: u64,
    pub seed: u64,
    pub violation_count: u64,
    pub violations: Vec<Violation>,
    pub passed: bool,
}

struct Collector {
    count: u64,
    kept: Vec<Violation>,
}

impl Collector {
    fn push(&mut self, axiom: &str, a: Vec<u64>, b: Vec<u64>) {
        self.count += 1;
        if self.kept.len() < KEPT_VIOLATIONS {
            self.kept.push(Violation {
                axiom: axiom.into(),
                a,
                b,
            });
        }
    }
}

fn mask_codes(mask: u64) -> Vec<u64> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// Values over a common denominator, when every value is finite and the scale fits.
fn scaled(values: &[ExtRational]) -> Option<Vec<i128>> {
    let mut den = BigInt::from(1);
    for v in values {
        den = den.lcm(v.finite()?.denom());
    }
    values
        .iter()
        .map(|v| {
            let q = v.finite()?;
            (q.numer() * (&den / q.denom())).to_i128()
        })
        .collect()
}

/// Normalization, finite singletons, monotonicity and subadditivity: exhaustively on the
/// subsets of the first ten codes, then on `trials` seeded random pairs inside the first `prefix` codes.
pub fn check_axioms(phi: &Submeasure, prefix: u64, trials: u64, seed: u64) -> AxiomReport {
    let prefix = phi.space.size().map_or(prefix, |s| s.min(prefix));
    let mut found = Collector {
        count: 0,
        kept: Vec::new(),
    };

    if !phi.eval_codes(&[]).is_zero() {
        found.push("normalization", vec![], vec![]);
    }
    for c in 0..prefix {
        if !phi.eval_codes(&[c]).is_finite() {
            found.push("finite singletons", vec![c], vec![]);
        }
    }

    let m = EXHAUSTIVE_CODES.min(prefix);
    let subsets = 1u64 << m;
    let table: Vec<ExtRational> = (0..subsets).map(|s| phi.eval_codes(&mask_codes(s))).collect();
    let mut pairs = 0u64;
    match scaled(&table) {
        Some(t) => {
            for a in 0..subsets as usize {
                for b in 0..subsets as usize {
                    let u = t[a | b];
                    if t[a] > u {
                        found.push("monotone", mask_codes(a as u64), mask_codes((a | b) as u64));
                    }
                    if u > t[a] + t[b] {
                        found.push("subadditive", mask_codes(a as u64), mask_codes(b as u64));
                    }
                }
            }
        }
        None => {
            for a in 0..subsets as usize {
                for b in 0..subsets as usize {
                    let u = &table[a | b];
                    if table[a] > *u {
                        found.push("monotone", mask_codes(a as u64), mask_codes((a | b) as u64));
                    }
                    if *u > &table[a] + &table[b] {
                        found.push("subadditive", mask_codes(a as u64), mask_codes(b as u64));
                    }
                }
            }
        }
    }
    pairs += subsets * subsets;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let pa: f64 = rng.gen_range(0.05..1.0);
        let pb: f64 = rng.gen_range(0.05..1.0);
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut u = Vec::new();
        for c in 0..prefix {
            let ia = rng.gen_bool(pa);
            let ib = rng.gen_bool(pb);
            if ia {
                a.push(c);
            }
            if ib {
                b.push(c);
            }
            if ia || ib {
                u.push(c);
            }
        }
        let (va, vb, vu) = (phi.eval_codes(&a), phi.eval_codes(&b), phi.eval_codes(&u));
        if va > vu || vb > vu {
            found.push("monotone", a.clone(), u.clone());
        }
        if vu > &va + &vb {
            found.push("subadditive", a, b);
        }
    }

    AxiomReport {
        submeasure: phi.label.clone(),
        exhaustive_codes: m,
        exhaustive_pairs: pairs,
        random_pairs: trials,
        seed,
        violation_count: found.count,
        passed: found.count == 0,
        violations: found.kept,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailVerdict {
    /// The tail beyond this cut is empty inside the prefix.
    VanishingUpTo(u64),
    /// Every sampled tail value is at least `bound`, within the first `prefix` codes.
    BoundedBelowBy { bound: ExtRational, prefix: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailProfile {
    /// `(n, φ((A ∖ n) ∩ prefix))`
    pub samples: Vec<(u64, ExtRational)>,
    pub verdict: TailVerdict,
}

/// Values of `φ` on the tails `A ∖ n` of a described set, truncated to the first `prefix` codes.
/// The verdict is a hint only.
pub fn tail_profile(
    phi: &Submeasure,
    d: &SetDescription,
    cuts: &[u64],
    prefix: u64,
) -> Result<TailProfile> {
    if cuts.is_empty() {
        return Err(Error::EmptySequence);
    }
    let members = members_below(&phi.space, d, prefix)?;
    let mut cuts = cuts.to_vec();
    cuts.sort_unstable();
    cuts.dedup();
    let mut samples = Vec::new();
    for &n in &cuts {
        let tail: Vec<u64> = members.iter().copied().filter(|&c| c >= n).collect();
        let set = FiniteSet::new(phi.space.clone(), tail)?;
        samples.push((n, phi.eval(&set)?));
    }
    let verdict = match samples.iter().find(|(_, v)| v.is_zero()) {
        Some((n, _)) => TailVerdict::VanishingUpTo(*n),
        None => TailVerdict::BoundedBelowBy {
            bound: samples
                .iter()
                .map(|(_, v)| v.clone())
                .min()
                .unwrap_or_else(ExtRational::zero),
            prefix,
        },
    };
    Ok(TailProfile { samples, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::Space;
    use crate::submeasures::WeightRule;
    use std::sync::Arc;

    #[test]
    fn counting_passes() {
        let r = check_axioms(&Submeasure::counting(Space::Omega), 64, 1000, 7);
        assert!(r.passed);
        assert_eq!(r.exhaustive_pairs, 1 << 20);
    }

    #[test]
    fn corrupted_evaluator_fails_with_witness() {
        let bad = Submeasure::custom(
            Space::Omega,
            "mod3",
            Arc::new(|codes: &[u64]| ExtRational::from_int((codes.len() % 3) as i64)),
        );
        let r = check_axioms(&bad, 64, 100, 1);
        assert!(!r.passed);
        assert!(r.violations.iter().any(|v| v.axiom == "monotone"));
    }

    #[test]
    fn density_profile_on_full() {
        let cuts: Vec<u64> = (0..=8).collect();
        let p = tail_profile(&Submeasure::density(), &SetDescription::Full, &cuts, 64).unwrap();
        assert!(p.samples.iter().all(|(_, v)| *v == ExtRational::one()));
        assert!(matches!(p.verdict, TailVerdict::BoundedBelowBy { .. }));
    }

    #[test]
    fn summable_profiles() {
        let phi = Submeasure::summable(WeightRule::Harmonic);
        let d = SetDescription::finite(0..10);
        let p = tail_profile(&phi, &d, &[10], 64).unwrap();
        assert_eq!(p.verdict, TailVerdict::VanishingUpTo(10));
        let p = tail_profile(&phi, &SetDescription::Full, &[0, 4, 16], 256).unwrap();
        assert!(matches!(p.verdict, TailVerdict::BoundedBelowBy { .. }));
        assert!(p.samples.windows(2).all(|w| w[0].1 >= w[1].1));
    }
}
