use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ground::{member, SetDescription as D, Space};
use crate::ideals::{Budget, IdealOracle, Tri, Verdict};

pub type Rule = Arc<dyn Fn(u64) -> Option<u64> + Send + Sync>;
pub type Preimage = Arc<dyn Fn(&D) -> Option<D> + Send + Sync>;

/// A map between grounds, given as a computable rule on codes.
#[derive(Clone)]
pub struct WitnessMap {
    pub name: String,
    pub source: Space,
    pub target: Space,
    /// Explicit domain when the map is only defined on part of the source.
    pub domain: Option<Vec<u64>>,
    pub finite_to_one: Tri,
    rule: Rule,
    preimage: Option<Preimage>,
}

impl fmt::Debug for WitnessMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WitnessMap")
            .field("name", &self.name)
            .field("source", &self.source)
            .field("target", &self.target)
            .field("finite_to_one", &self.finite_to_one)
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSample {
    pub rule: String,
    pub source: String,
    pub target: String,
    pub pairs: Vec<(u64, u64)>,
}

impl WitnessMap {
    pub fn new(
        name: impl Into<String>,
        source: Space,
        target: Space,
        rule: impl Fn(u64) -> Option<u64> + Send + Sync + 'static,
    ) -> Self {
        WitnessMap {
            name: name.into(),
            source,
            target,
            domain: None,
            finite_to_one: Tri::Unknown,
            rule: Arc::new(rule),
            preimage: None,
        }
    }

    pub fn with_domain(mut self, domain: Vec<u64>) -> Self {
        self.domain = Some(domain);
        self
    }

    pub fn with_preimage(mut self, p: impl Fn(&D) -> Option<D> + Send + Sync + 'static) -> Self {
        self.preimage = Some(Arc::new(p));
        self
    }

    pub fn with_finite_to_one(mut self, flag: Tri) -> Self {
        self.finite_to_one = flag;
        self
    }

    pub fn apply(&self, code: u64) -> Option<u64> {
        (self.rule)(code)
    }

    /// Source codes the map is evaluated on within a prefix budget.
    pub fn source_codes(&self, prefix: u64) -> Result<Vec<u64>> {
        match &self.domain {
            Some(d) => Ok(d.clone()),
            None => {
                let n = self.source.size().map_or(prefix, |s| s.min(prefix));
                self.source.enumerate(n)
            }
        }
    }

    /// Preimage in closed form, when the map carries one.
    pub fn closed_preimage(&self, a: &D) -> Option<D> {
        self.preimage.as_ref().and_then(|p| p(a))
    }

    /// Preimage of `a` among the source codes below `prefix`.
    pub fn materialize_preimage(&self, a: &D, prefix: u64) -> Result<Vec<u64>> {
        let mut out = Vec::new();
        for c in self.source_codes(prefix)? {
            if let Some(t) = self.apply(c) {
                if member(&self.target, a, t)? {
                    out.push(c);
                }
            }
        }
        Ok(out)
    }

    /// Largest fibre among the source codes below `prefix`.
    pub fn max_fibre(&self, prefix: u64) -> Result<usize> {
        let mut fibres: BTreeMap<u64, usize> = BTreeMap::new();
        for c in self.source_codes(prefix)? {
            if let Some(t) = self.apply(c) {
                *fibres.entry(t).or_default() += 1;
            }
        }
        Ok(fibres.values().copied().max().unwrap_or(0))
    }

    pub fn sample(&self, n: usize) -> Result<WitnessSample> {
        let pairs = self
            .source_codes(n as u64)?
            .into_iter()
            .filter_map(|c| self.apply(c).map(|t| (c, t)))
            .take(n)
            .collect();
        Ok(WitnessSample {
            rule: self.name.clone(),
            source: self.source.to_string(),
            target: self.target.to_string(),
            pairs,
        })
    }
}

/// `ω² → ω`, `(i, j) ↦ i`.
pub fn first_projection() -> WitnessMap {
    let sq = Space::omega_squared();
    WitnessMap::new("first-projection", sq, Space::Omega, |c| Some(crate::ground::unpair(c).0))
        .with_preimage(|a| Some(D::rectangle(a.clone(), D::Full)))
        .with_finite_to_one(Tri::No)
}

/// `ω² → ω`, `(i, j) ↦ j`.
pub fn second_projection() -> WitnessMap {
    let sq = Space::omega_squared();
    WitnessMap::new("second-projection", sq, Space::Omega, |c| Some(crate::ground::unpair(c).1))
        .with_preimage(|a| Some(D::rectangle(D::Full, a.clone())))
        .with_finite_to_one(Tri::No)
}

/// Constant map on ω, never a reduction between proper ideals containing Fin.
pub fn constant_map(value: u64) -> WitnessMap {
    WitnessMap::new(format!("constant-{value}"), Space::Omega, Space::Omega, move |_| Some(value))
        .with_preimage(move |a| {
            let hit = member(&Space::Omega, a, value).ok()?;
            Some(if hit { D::Full } else { D::Empty })
        })
        .with_finite_to_one(Tri::No)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RkCheck {
    pub test: String,
    pub target_verdict: Verdict,
    pub source_verdict: Verdict,
    /// The preimage was computed pointwise over a finite prefix.
    pub materialized: bool,
    pub flag: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub map: String,
    pub checks: Vec<RkCheck>,
    pub consistent: bool,
    pub failures: Vec<String>,
}

/// Compare `A ∈ I` with `f⁻¹[A] ∈ J` on each test set, where `I` lives on the target.
pub fn verify_rk(
    f: &WitnessMap,
    i: &IdealOracle,
    j: &IdealOracle,
    tests: &[D],
    budget: Budget,
) -> Result<ReductionReport> {
    let mut checks = Vec::with_capacity(tests.len());
    let mut failures = Vec::new();
    for a in tests {
        let target_verdict = i.decide(a, budget)?;
        let (source_verdict, materialized) = match f.closed_preimage(a) {
            Some(pre) => (j.decide(&pre, budget)?, false),
            None => {
                let codes = f.materialize_preimage(a, budget.prefix)?;
                (j.evidence(&codes, budget), true)
            }
        };
        let contradiction = (target_verdict.is_proved_in() && source_verdict.is_proved_out())
            || (target_verdict.is_proved_out() && source_verdict.is_proved_in());
        let flag = if contradiction {
            failures.push(format!(
                "{a}: target {} but preimage {}",
                target_verdict.name(),
                source_verdict.name()
            ));
            None
        } else {
            match (target_verdict.direction(), source_verdict.direction()) {
                (Some(x), Some(y)) if x != y => Some("empirical direction disagrees".to_string()),
                (None, _) | (_, None) => Some("no evidence on one side".to_string()),
                _ if !(target_verdict.is_proved() && source_verdict.is_proved()) => {
                    Some("empirical agreement".to_string())
                }
                _ => None,
            }
        };
        checks.push(RkCheck {
            test: a.to_string(),
            target_verdict,
            source_verdict,
            materialized,
            flag,
        });
    }
    Ok(ReductionReport {
        map: f.name.clone(),
        consistent: failures.is_empty(),
        checks,
        failures,
    })
}
