//! Non-pathological hull `φ̂(A) = sup{μ(A) : μ a measure, μ ≤ φ}` by exact linear programming.

pub mod simplex;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground::FiniteSet;
use crate::rational::{serde_rational, ExtRational, Rational};
use crate::submeasures::Submeasure;

pub const EXHAUSTIVE_LIMIT: usize = 16;
pub const VERIFY_LIMIT: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Exhaustive,
    Reduced,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyUsed {
    Exhaustive,
    Reduced(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessMass {
    pub point: u64,
    #[serde(with = "serde_rational")]
    pub mass: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HullReport {
    pub objective: Vec<u64>,
    pub phi_value: ExtRational,
    #[serde(with = "serde_rational")]
    pub hull_value: Rational,
    #[serde(with = "serde_rational")]
    pub gap: Rational,
    pub witness_measure: Vec<WitnessMass>,
    pub constraint_family: FamilyUsed,
    pub constraints: usize,
    /// Witness satisfies every constraint of the family it was solved with.
    pub feasible: bool,
    /// Witness checked against all subsets of the ground, when the ground is small enough.
    pub exhaustive_check: Option<bool>,
}

/// An LP over a fixed ground, reusable for many objectives.
pub struct HullProblem<'a> {
    phi: &'a Submeasure,
    ground: FiniteSet,
    family: FamilyUsed,
    constraints: Vec<(Vec<usize>, Rational)>,
    scale: BigInt,
}

fn subsets_of(ground: &FiniteSet) -> impl Iterator<Item = FiniteSet> + '_ {
    (1u64..1 << ground.len()).map(move |mask| ground.subset_by_mask(mask))
}

impl<'a> HullProblem<'a> {
    pub fn new(phi: &'a Submeasure, ground: &FiniteSet, family: Family) -> Result<Self> {
        if ground.space != phi.space {
            return Err(Error::SpaceMismatch(format!(
                "ground lives on {}, submeasure on {}",
                ground.space, phi.space
            )));
        }
        if !phi.eval(ground)?.is_finite() {
            return Err(Error::InfiniteBound);
        }
        let (raw, used) = match family {
            Family::Exhaustive => {
                if ground.len() > EXHAUSTIVE_LIMIT {
                    return Err(Error::GroundTooLarge {
                        size: ground.len(),
                        limit: EXHAUSTIVE_LIMIT,
                    });
                }
                let raw: Vec<(FiniteSet, ExtRational)> = subsets_of(ground)
                    .map(|b| {
                        let v = phi.eval_codes(b.codes());
                        (b, v)
                    })
                    .collect();
                (raw, FamilyUsed::Exhaustive)
            }
            Family::Reduced => {
                let label = phi
                    .reduced_family_label()
                    .ok_or_else(|| Error::NoReducedFamily(phi.label.clone()))?;
                (phi.reduced_family(ground)?, FamilyUsed::Reduced(label.into()))
            }
        };
        let index: BTreeMap<u64, usize> =
            ground.codes().iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut by_set: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
        for (b, v) in raw {
            let Some(q) = v.finite() else { continue };
            let vars: Vec<usize> = b
                .codes()
                .iter()
                .map(|c| index.get(c).copied().ok_or(Error::ObjectiveOutsideGround))
                .collect::<Result<_>>()?;
            if vars.is_empty() {
                continue;
            }
            by_set
                .entry(vars)
                .and_modify(|old| {
                    if q < old {
                        *old = q.clone();
                    }
                })
                .or_insert_with(|| q.clone());
        }
        let constraints: Vec<(Vec<usize>, Rational)> = by_set.into_iter().collect();
        let mut scale = BigInt::from(1);
        for (_, q) in &constraints {
            scale = scale.lcm(q.denom());
        }
        Ok(HullProblem {
            phi,
            ground: ground.clone(),
            family: used,
            constraints,
            scale,
        })
    }

    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    pub fn solve(&self, objective: &FiniteSet) -> Result<HullReport> {
        if objective.space != self.ground.space || !objective.is_subset(&self.ground) {
            return Err(Error::ObjectiveOutsideGround);
        }
        let n = self.ground.len();
        let rows: Vec<Vec<usize>> = self.constraints.iter().map(|(v, _)| v.clone()).collect();
        let rhs: Vec<i128> = self
            .constraints
            .iter()
            .map(|(_, q)| {
                (q.numer() * (&self.scale / q.denom()))
                    .to_i128()
                    .ok_or(Error::LpOverflow)
            })
            .collect::<Result<_>>()?;
        let c: Vec<i128> = self
            .ground
            .codes()
            .iter()
            .map(|&x| i128::from(objective.contains(x)))
            .collect();
        let sol = simplex::solve_01(n, &rows, &rhs, &c)?;
        let scale = Rational::from_integer(self.scale.clone());
        let frac = |(p, q): (i128, i128)| Rational::new(BigInt::from(p), BigInt::from(q)) / &scale;
        let masses: Vec<Rational> = sol.x.iter().map(|&pq| frac(pq)).collect();
        let hull_value = frac(sol.value);
        let phi_value = self.phi.eval(objective)?;
        let gap = match phi_value.finite() {
            Some(q) => q - &hull_value,
            None => return Err(Error::InfiniteBound),
        };
        let feasible = self.constraints.iter().all(|(vars, bound)| {
            let total: Rational = vars.iter().map(|&v| masses[v].clone()).sum();
            total <= *bound
        }) && masses.iter().all(|m| *m >= Rational::zero());
        let exhaustive_check = (n <= VERIFY_LIMIT).then(|| {
            subsets_of(&self.ground).all(|b| {
                let total: Rational = b
                    .codes()
                    .iter()
                    .map(|c| masses[self.ground.codes().binary_search(c).unwrap()].clone())
                    .sum();
                ExtRational::Finite(total) <= self.phi.eval_codes(b.codes())
            })
        });
        let witness_measure = self
            .ground
            .codes()
            .iter()
            .zip(&masses)
            .filter(|(_, m)| !m.is_zero())
            .map(|(&point, mass)| WitnessMass {
                point,
                mass: mass.clone(),
            })
            .collect();
        Ok(HullReport {
            objective: objective.codes().to_vec(),
            phi_value,
            hull_value,
            gap,
            witness_measure,
            constraint_family: self.family.clone(),
            constraints: self.constraints.len(),
            feasible,
            exhaustive_check,
        })
    }
}

pub fn hull(phi: &Submeasure, ground: &FiniteSet, a: &FiniteSet, family: Family) -> Result<HullReport> {
    HullProblem::new(phi, ground, family)?.solve(a)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanSummary {
    AllZeroGaps,
    MaxGapFound {
        #[serde(with = "serde_rational")]
        value: Rational,
        set: Vec<u64>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub seed: u64,
    pub reports: Vec<HullReport>,
    pub summary: ScanSummary,
}

/// Hulls of `samples` seeded random nonempty subsets of the ground.
pub fn pathology_scan(
    phi: &Submeasure,
    ground: &FiniteSet,
    samples: usize,
    seed: u64,
    family: Family,
) -> Result<ScanReport> {
    let problem = HullProblem::new(phi, ground, family)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::with_capacity(samples);
    for _ in 0..samples {
        let a = loop {
            let mask: u64 = rng.gen::<u64>() & ((1u64 << ground.len().min(63)) - 1);
            let candidate = ground.subset_by_mask(mask);
            if !candidate.is_empty() || ground.is_empty() {
                break candidate;
            }
        };
        reports.push(problem.solve(&a)?);
    }
    let worst = reports
        .iter()
        .filter(|r| r.gap > Rational::zero())
        .max_by(|a, b| a.gap.cmp(&b.gap));
    let summary = match worst {
        None => ScanSummary::AllZeroGaps,
        Some(r) => ScanSummary::MaxGapFound {
            value: r.gap.clone(),
            set: r.objective.clone(),
        },
    };
    Ok(ScanReport {
        seed,
        reports,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::Space;
    use crate::rational::int;

    #[test]
    fn counting_hull_is_exact() {
        let phi = Submeasure::counting(Space::Omega);
        let ground = FiniteSet::prefix(Space::Omega, 6).unwrap();
        let a = FiniteSet::new(Space::Omega, [0, 1, 2]).unwrap();
        let r = hull(&phi, &ground, &a, Family::Exhaustive).unwrap();
        assert_eq!(r.hull_value, int(3));
        assert!(r.gap.is_zero());
        assert!(r.feasible);
        assert_eq!(r.exhaustive_check, Some(true));
    }

    #[test]
    fn exhaustive_limit() {
        let phi = Submeasure::counting(Space::Omega);
        let ground = FiniteSet::prefix(Space::Omega, 17).unwrap();
        assert!(matches!(
            hull(&phi, &ground, &ground, Family::Exhaustive),
            Err(Error::GroundTooLarge { .. })
        ));
    }

    #[test]
    fn objective_outside_ground() {
        let phi = Submeasure::counting(Space::Omega);
        let ground = FiniteSet::prefix(Space::Omega, 3).unwrap();
        let a = FiniteSet::new(Space::Omega, [5]).unwrap();
        assert_eq!(
            hull(&phi, &ground, &a, Family::Exhaustive),
            Err(Error::ObjectiveOutsideGround)
        );
    }

    #[test]
    fn no_reduced_family_for_density() {
        let phi = Submeasure::density();
        let ground = FiniteSet::prefix(Space::Omega, 3).unwrap();
        assert!(matches!(
            hull(&phi, &ground, &ground, Family::Reduced),
            Err(Error::NoReducedFamily(_))
        ));
    }
}
