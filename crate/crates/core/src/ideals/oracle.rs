use std::fmt;

use serde::{Deserialize, Serialize};

use super::verdict::{Budget, Verdict};
use crate::error::{Error, Result};
use crate::ground::descr::check_description;
use crate::ground::shape::{
    delta_columns, product_sections, shape, sum_sections, sum_support, Shape,
};
use crate::ground::{members_below, SetDescription as D, Space, SpaceSeq};
use crate::rational::ExtRational;
use crate::submeasures::{Kind as SubKind, Submeasure, WeightRule};

/// Three-valued truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

impl Tri {
    pub fn and(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::No, _) | (_, Tri::No) => Tri::No,
            (Tri::Yes, Tri::Yes) => Tri::Yes,
            _ => Tri::Unknown,
        }
    }
}

impl fmt::Display for Tri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tri::Yes => "Yes",
            Tri::No => "No",
            Tri::Unknown => "Unknown",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attributes {
    pub analytic: Tri,
    pub tall: Tri,
    pub countably_generated: Tri,
    pub nonpath_fsigma: Tri,
}

impl Attributes {
    const fn new(analytic: Tri, tall: Tri, countably_generated: Tri, nonpath_fsigma: Tri) -> Self {
        Attributes {
            analytic,
            tall,
            countably_generated,
            nonpath_fsigma,
        }
    }

    fn combined(parts: &[&IdealOracle]) -> Self {
        let analytic = parts.iter().fold(Tri::Yes, |a, p| a.and(p.attributes.analytic));
        Attributes::new(analytic, Tri::Unknown, Tri::Unknown, Tri::Unknown)
    }
}

/// Summands of an indexed sum of ideals, constant from some index on.
#[derive(Debug, Clone)]
pub enum OracleSeq {
    EventuallyConstant {
        prefix: Vec<IdealOracle>,
        tail: Box<IdealOracle>,
    },
    /// The summand at `n` is `Fin^{n+1}`.
    FinPowers,
}

impl OracleSeq {
    pub fn at(&self, n: u64) -> IdealOracle {
        match self {
            OracleSeq::EventuallyConstant { prefix, tail } => prefix
                .get(n as usize)
                .cloned()
                .unwrap_or_else(|| (**tail).clone()),
            OracleSeq::FinPowers => IdealOracle::fin_pow(n as usize + 1),
        }
    }

    fn space(&self) -> Result<Space> {
        let seq = match self {
            OracleSeq::EventuallyConstant { prefix, tail } => SpaceSeq::EventuallyConstant {
                prefix: prefix.iter().map(|o| o.space.clone()).collect(),
                tail: Box::new(tail.space.clone()),
            },
            OracleSeq::FinPowers => SpaceSeq::FinPowers,
        };
        let space = Space::DisjointSum(seq);
        space.validate()?;
        Ok(space)
    }

    fn members(&self) -> Vec<&IdealOracle> {
        match self {
            OracleSeq::EventuallyConstant { prefix, tail } => {
                prefix.iter().chain(std::iter::once(tail.as_ref())).collect()
            }
            OracleSeq::FinPowers => Vec::new(),
        }
    }

    fn describe(&self) -> String {
        match self {
            OracleSeq::EventuallyConstant { prefix, tail } => {
                let mut parts: Vec<String> = prefix.iter().map(|o| o.provenance.clone()).collect();
                parts.push(format!("{}...", tail.provenance));
                parts.join(", ")
            }
            OracleSeq::FinPowers => "Fin^(n+1)...".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub enum OracleKind {
    FinOf(Submeasure),
    /// `{∅}`
    Trivial,
    /// `P(X)`, the improper ideal.
    PowerSet,
    Ib,
    EdFin,
    Mazur,
    Density,
    /// Finite stand-in on `ClopenHalf(l)`; infinite behaviour is only probed.
    Solecki(u32),
    Fubini(Box<IdealOracle>, Box<IdealOracle>),
    DirectSum(Box<IdealOracle>, Box<IdealOracle>),
    IndexedSum(OracleSeq),
    IndexedSumOver(Box<IdealOracle>, OracleSeq),
    Meet(Vec<IdealOracle>),
    Restrict(Box<IdealOracle>, D),
    /// `{M : {n : M_(n) ≠ ∅} ∖ A finite}` on a disjoint sum.
    SupportIdeal(D),
}

#[derive(Debug, Clone)]
pub struct IdealOracle {
    pub space: Space,
    pub kind: OracleKind,
    pub attributes: Attributes,
    pub provenance: String,
}

fn boxed(o: IdealOracle) -> Box<IdealOracle> {
    Box::new(o)
}

impl IdealOracle {
    fn atom(space: Space, kind: OracleKind, attributes: Attributes, provenance: &str) -> Self {
        IdealOracle {
            space,
            kind,
            attributes,
            provenance: provenance.into(),
        }
    }

    pub fn fin() -> Self {
        IdealOracle::fin_on(Space::Omega)
    }

    pub fn fin_on(space: Space) -> Self {
        let provenance = if space == Space::Omega {
            "Fin".to_string()
        } else {
            format!("Fin[{space}]")
        };
        IdealOracle {
            kind: OracleKind::FinOf(Submeasure::counting(space.clone())),
            space,
            attributes: Attributes::new(Tri::Yes, Tri::No, Tri::Yes, Tri::Yes),
            provenance,
        }
    }

    /// `Fin^k` on `ω^k`; `Fin^1 = Fin`.
    pub fn fin_pow(k: usize) -> Self {
        let mut o = IdealOracle::fin();
        for _ in 1..k.max(1) {
            o = IdealOracle::fubini(IdealOracle::fin(), o);
        }
        if k > 1 {
            o.provenance = format!("FinPow {k}");
        }
        o
    }

    pub fn fin_of(phi: Submeasure) -> Self {
        let attributes = match &phi.kind {
            SubKind::Counting => Attributes::new(Tri::Yes, Tri::No, Tri::Yes, Tri::Yes),
            SubKind::Summable(rule) => {
                let tall = if rule.vanishes() { Tri::Yes } else { Tri::No };
                Attributes::new(Tri::Yes, tall, Tri::Unknown, Tri::Yes)
            }
            _ => Attributes::new(Tri::Yes, Tri::Unknown, Tri::Unknown, Tri::Unknown),
        };
        let provenance = format!("Fin({})", phi.label);
        IdealOracle {
            space: phi.space.clone(),
            kind: OracleKind::FinOf(phi),
            attributes,
            provenance,
        }
    }

    pub fn summable(rule: WeightRule) -> Self {
        let mut o = IdealOracle::fin_of(Submeasure::summable(rule.clone()));
        o.provenance = format!("Summable {rule}");
        o
    }

    pub fn trivial(space: Space) -> Self {
        IdealOracle::atom(
            space,
            OracleKind::Trivial,
            Attributes::new(Tri::Yes, Tri::No, Tri::Yes, Tri::Yes),
            "{0}",
        )
    }

    pub fn power_set(space: Space) -> Self {
        IdealOracle::atom(
            space,
            OracleKind::PowerSet,
            Attributes::new(Tri::Yes, Tri::Unknown, Tri::Yes, Tri::Unknown),
            "P",
        )
    }

    pub fn ib() -> Self {
        IdealOracle::atom(
            Space::BinarySeq,
            OracleKind::Ib,
            Attributes::new(Tri::Yes, Tri::No, Tri::No, Tri::Yes),
            "Ib",
        )
    }

    pub fn edfin() -> Self {
        IdealOracle::atom(
            Space::Delta,
            OracleKind::EdFin,
            Attributes::new(Tri::Yes, Tri::Yes, Tri::No, Tri::Yes),
            "EDFin",
        )
    }

    pub fn mazur() -> Self {
        IdealOracle::atom(
            Space::MazurSum,
            OracleKind::Mazur,
            Attributes::new(Tri::Yes, Tri::Unknown, Tri::No, Tri::No),
            "Mazur",
        )
    }

    pub fn density() -> Self {
        IdealOracle::atom(
            Space::Omega,
            OracleKind::Density,
            Attributes::new(Tri::Yes, Tri::Yes, Tri::No, Tri::Unknown),
            "Density",
        )
    }

    pub fn solecki(l: u32) -> Result<Self> {
        let space = Space::ClopenHalf(l);
        space.validate()?;
        Ok(IdealOracle::atom(
            space,
            OracleKind::Solecki(l),
            Attributes::new(Tri::Yes, Tri::Unknown, Tri::No, Tri::Unknown),
            "Solecki",
        ))
    }

    /// `I ⊗ J = {M ⊆ S×T : {s : M_(s) ∉ J} ∈ I}`
    pub fn fubini(i: IdealOracle, j: IdealOracle) -> Self {
        let attributes = Attributes::combined(&[&i, &j]);
        let provenance = format!("({} (x) {})", i.provenance, j.provenance);
        IdealOracle {
            space: Space::product(i.space.clone(), j.space.clone()),
            kind: OracleKind::Fubini(boxed(i), boxed(j)),
            attributes,
            provenance,
        }
    }

    /// `I ⊗ {∅}`
    pub fn col_ext(i: IdealOracle) -> Self {
        let mut o = IdealOracle::fubini(i, IdealOracle::trivial(Space::Omega));
        if let OracleKind::Fubini(i, _) = &o.kind {
            o.attributes.countably_generated = i.attributes.countably_generated;
            o.provenance = format!("ColExt({})", i.provenance);
        }
        o
    }

    /// `{∅} ⊗ J`
    pub fn row_ext(j: IdealOracle) -> Self {
        let mut o = IdealOracle::fubini(IdealOracle::trivial(Space::Omega), j);
        if let OracleKind::Fubini(_, j) = &o.kind {
            o.provenance = format!("RowExt({})", j.provenance);
        }
        o
    }

    pub fn direct_sum(i: IdealOracle, j: IdealOracle) -> Result<Self> {
        let space = Space::two_part_sum(i.space.clone(), j.space.clone());
        space.validate()?;
        let mut attributes = Attributes::combined(&[&i, &j]);
        attributes.countably_generated = i
            .attributes
            .countably_generated
            .and(j.attributes.countably_generated);
        let provenance = format!("({} (+) {})", i.provenance, j.provenance);
        Ok(IdealOracle {
            space,
            kind: OracleKind::DirectSum(boxed(i), boxed(j)),
            attributes,
            provenance,
        })
    }

    /// `I ⊕ P(ω)`
    pub fn full_pad(i: IdealOracle) -> Result<Self> {
        let cg = i.attributes.countably_generated;
        let provenance = format!("FullPad({})", i.provenance);
        let mut o = IdealOracle::direct_sum(i, IdealOracle::power_set(Space::Omega))?;
        o.attributes.countably_generated = cg;
        o.provenance = provenance;
        Ok(o)
    }

    pub fn indexed_sum(parts: OracleSeq) -> Result<Self> {
        let space = parts.space()?;
        let attributes = Attributes::combined(&parts.members());
        let provenance = format!("Sum({})", parts.describe());
        Ok(IdealOracle {
            space,
            kind: OracleKind::IndexedSum(parts),
            attributes,
            provenance,
        })
    }

    pub fn indexed_sum_over(j: IdealOracle, parts: OracleSeq) -> Result<Self> {
        if j.space != Space::Omega {
            return Err(Error::SpaceMismatch(format!(
                "the index ideal must live on omega, not {}",
                j.space
            )));
        }
        let space = parts.space()?;
        let mut members = parts.members();
        members.push(&j);
        let attributes = Attributes::combined(&members);
        let provenance = format!("SumOver({}; {})", j.provenance, parts.describe());
        Ok(IdealOracle {
            space,
            kind: OracleKind::IndexedSumOver(boxed(j), parts),
            attributes,
            provenance,
        })
    }

    pub fn meet(list: Vec<IdealOracle>) -> Result<Self> {
        let first = list
            .first()
            .ok_or_else(|| Error::InvalidArgument("meet of an empty list".into()))?;
        let space = first.space.clone();
        if let Some(bad) = list.iter().find(|o| o.space != space) {
            return Err(Error::SpaceMismatch(format!(
                "meet of ideals on {space} and {}",
                bad.space
            )));
        }
        let attributes = Attributes::combined(&list.iter().collect::<Vec<_>>());
        let provenance = format!(
            "Meet({})",
            list.iter()
                .map(|o| o.provenance.clone())
                .collect::<Vec<_>>()
                .join(", ")
        );
        Ok(IdealOracle {
            space,
            kind: OracleKind::Meet(list),
            attributes,
            provenance,
        })
    }

    pub fn restrict(i: IdealOracle, a: D) -> Result<Self> {
        check_description(&i.space, &a)?;
        let attributes = Attributes::combined(&[&i]);
        let provenance = format!("Restrict({}, {a})", i.provenance);
        Ok(IdealOracle {
            space: i.space.clone(),
            kind: OracleKind::Restrict(boxed(i), a),
            attributes,
            provenance,
        })
    }

    /// `{M ⊆ Σ_n ω^{n+1} : {n : M_(n) ≠ ∅} ∖ A finite}`
    pub fn support_ideal(a: D) -> Result<Self> {
        check_description(&Space::Omega, &a)?;
        let provenance = format!("I_A[{a}]");
        Ok(IdealOracle {
            space: Space::DisjointSum(SpaceSeq::FinPowers),
            kind: OracleKind::SupportIdeal(a),
            attributes: Attributes::new(Tri::Yes, Tri::No, Tri::Yes, Tri::Unknown),
            provenance,
        })
    }

    /// `J_A = (Σ_n Fin^{n+1}) ∩ I_A`
    pub fn jfamily(a: D) -> Result<Self> {
        let provenance = format!("JFam {a}");
        let mut o = IdealOracle::meet(vec![
            IdealOracle::indexed_sum(OracleSeq::FinPowers)?,
            IdealOracle::support_ideal(a)?,
        ])?;
        o.provenance = provenance;
        Ok(o)
    }

    /// Whether every finite subset of an infinite ground is a member.
    pub fn contains_fin(&self) -> bool {
        match &self.kind {
            OracleKind::Trivial => false,
            OracleKind::Fubini(i, j) => i.contains_fin() || j.contains_fin(),
            OracleKind::DirectSum(i, j) => i.contains_fin() && j.contains_fin(),
            OracleKind::IndexedSum(OracleSeq::EventuallyConstant { prefix, tail }) => {
                prefix.iter().all(IdealOracle::contains_fin) && tail.contains_fin()
            }
            OracleKind::IndexedSumOver(j, seq) => {
                j.contains_fin()
                    || match seq {
                        OracleSeq::EventuallyConstant { prefix, tail } => {
                            prefix.iter().all(IdealOracle::contains_fin) && tail.contains_fin()
                        }
                        OracleSeq::FinPowers => true,
                    }
            }
            OracleKind::Meet(list) => list.iter().all(IdealOracle::contains_fin),
            OracleKind::Restrict(i, _) => i.contains_fin(),
            _ => true,
        }
    }

    /// Membership verdict for the set denoted by `d`.
    pub fn decide(&self, d: &D, budget: Budget) -> Result<Verdict> {
        check_description(&self.space, d)?;
        Ok(self.decide_checked(d, budget))
    }

    fn decide_checked(&self, d: &D, budget: Budget) -> Verdict {
        let shape_of = shape(&self.space, d).ok();
        if let Some(s) = shape_of {
            if s.empty {
                return Verdict::proved_in("empty", "the set is empty");
            }
            if s.finite && !self.space.is_finite() && self.contains_fin() {
                return Verdict::proved_in("finite", "finite sets belong to every ideal containing Fin");
            }
        }
        match self.decide_kind(d, shape_of, budget) {
            Ok(v) => v,
            Err(e) => Verdict::unknown(e.to_string()),
        }
    }

    fn decide_kind(&self, d: &D, shape_of: Option<Shape>, budget: Budget) -> Result<Verdict> {
        let need_shape = || shape_of.ok_or_else(|| Error::UndecidableFiniteness(d.to_string()));
        match &self.kind {
            OracleKind::PowerSet => Ok(Verdict::proved_in("power set", "every set belongs to P(X)")),
            OracleKind::Trivial => Ok(Verdict::proved_out("trivial", "a nonempty set is not in {0}")),
            OracleKind::FinOf(phi) => self.decide_fin_of(phi, d, need_shape()?, budget),
            OracleKind::Density => {
                if self.space != Space::Omega || need_shape()?.finite {
                    return self.empirical(&Submeasure::density(), d, budget);
                }
                Ok(Verdict::proved_out(
                    "density",
                    "an infinite eventually periodic set has positive upper density",
                ))
            }
            OracleKind::Ib => {
                let mut branches = Vec::new();
                d.visit_top(&mut |leaf| {
                    if let D::Branch(_) = leaf {
                        branches.push(leaf.clone());
                    }
                });
                let count = branches.len();
                let off = D::difference(d.clone(), D::union_all(branches));
                if shape(&self.space, &off)?.finite {
                    Ok(Verdict::proved_in(
                        "ib",
                        format!("covered by {count} branches and a finite set"),
                    ))
                } else {
                    Ok(Verdict::proved_out(
                        "ib",
                        "contains every long enough word off the named branches, hence infinite antichains",
                    ))
                }
            }
            OracleKind::EdFin => {
                let cols = delta_columns(d)?;
                let g = shape(&Space::Omega, &cols.generic)?;
                if g.finite {
                    Ok(Verdict::proved_in(
                        "edfin",
                        format!("columns beyond {} share a finite section", cols.bound),
                    ))
                } else {
                    Ok(Verdict::proved_out(
                        "edfin",
                        format!("columns beyond {} grow without bound", cols.bound),
                    ))
                }
            }
            OracleKind::Mazur => {
                let mut top = 0u64;
                d.visit_top(&mut |leaf| match leaf {
                    D::Section(n) => top = top.max(*n),
                    D::Finite(cs) => {
                        for &c in cs {
                            if let Ok(crate::ground::Point::Mazur { n, .. }) = Space::MazurSum.decode(c) {
                                top = top.max(n);
                            }
                        }
                    }
                    _ => {}
                });
                let generic = crate::ground::space::mazur_offset(top + 1)
                    .ok_or_else(|| Error::CodingOverflow("mazur sum".into()))?;
                if crate::ground::member(&Space::MazurSum, d, generic)? {
                    Ok(Verdict::proved_out(
                        "mazur",
                        format!("every section beyond {top} is full, and phi_n of a full section is n+1"),
                    ))
                } else {
                    Ok(Verdict::proved_in(
                        "mazur",
                        format!("only sections up to {top} are met, each with finite phi_n"),
                    ))
                }
            }
            OracleKind::Solecki(l) => {
                let unlisted = d.is_boolean_of_finite() && !d.eval_with(&mut |_| Ok(false))?;
                if unlisted {
                    return Ok(Verdict::proved_in("finite", "explicitly finite family of clopen sets"));
                }
                if let Ok(c) = shape(&self.space, &D::complement(d.clone())) {
                    if c.empty {
                        return Ok(Verdict::proved_out("whole space", "the ideal is proper"));
                    }
                }
                let phi = Submeasure::solecki_cover(*l)?;
                self.empirical(&phi, d, budget)
            }
            OracleKind::Fubini(i, j) => self.decide_fubini(i, j, d, budget),
            OracleKind::DirectSum(i, j) => {
                let next = budget.deeper().ok_or(Error::RecursionDepthExceeded)?;
                let sections = sum_sections(&self.space, d)?;
                let mut verdicts = Vec::new();
                for (n, _, s) in &sections.fixed {
                    let o = if *n == 0 { i } else { j };
                    verdicts.push(
                        o.decide_checked(s, next)
                            .with_step("direct sum", format!("section {n} decided by {}", o.provenance)),
                    );
                }
                Ok(Verdict::all(verdicts))
            }
            OracleKind::IndexedSum(seq) => {
                let next = budget.deeper().ok_or(Error::RecursionDepthExceeded)?;
                let sections = sum_sections(&self.space, d)?;
                let mut verdicts = Vec::new();
                for (n, _, s) in &sections.fixed {
                    let o = seq.at(*n);
                    verdicts.push(
                        o.decide_checked(s, next)
                            .with_step("indexed sum", format!("section {n} decided by {}", o.provenance)),
                    );
                }
                if let Some(rep) = generic_index(&sections) {
                    let o = seq.at(rep);
                    for g in &sections.generic {
                        verdicts.push(o.decide_checked(&g.section, next).with_step(
                            "indexed sum",
                            format!("sections at {} share one description", g.indices),
                        ));
                    }
                }
                Ok(Verdict::all(verdicts))
            }
            OracleKind::IndexedSumOver(jdx, seq) => {
                let next = budget.deeper().ok_or(Error::RecursionDepthExceeded)?;
                let sections = sum_sections(&self.space, d)?;
                let mut classified = Vec::new();
                for (n, _, s) in &sections.fixed {
                    classified.push((D::finite([*n]), seq.at(*n).decide_checked(s, next)));
                }
                if let Some(rep) = generic_index(&sections) {
                    let o = seq.at(rep);
                    for g in &sections.generic {
                        classified.push((g.indices.clone(), o.decide_checked(&g.section, next)));
                    }
                }
                Ok(decide_bad_set(jdx, classified, next, "indexed sum over"))
            }
            OracleKind::Meet(list) => Ok(Verdict::all(
                list.iter()
                    .map(|o| o.decide_checked(d, budget).with_step("meet", o.provenance.clone())),
            )),
            OracleKind::Restrict(i, a) => {
                let inner = D::intersection(d.clone(), a.clone());
                Ok(i
                    .decide_checked(&inner, budget)
                    .with_step("restrict", format!("decide the trace on {a}")))
            }
            OracleKind::SupportIdeal(a) => {
                let (fixed, generic) = sum_support(&self.space, d)?;
                let support = D::union_all(
                    std::iter::once(D::finite(fixed.iter().copied())).chain(generic),
                );
                let excess = D::difference(support, a.clone());
                if shape(&Space::Omega, &excess)?.finite {
                    Ok(Verdict::proved_in("support", format!("support minus {a} is finite")))
                } else {
                    Ok(Verdict::proved_out("support", format!("support minus {a} is infinite")))
                }
            }
        }
    }

    fn decide_fin_of(&self, phi: &Submeasure, d: &D, s: Shape, budget: Budget) -> Result<Verdict> {
        match &phi.kind {
            SubKind::Counting => {
                if s.finite {
                    Ok(Verdict::proved_in("counting", "finite set"))
                } else {
                    Ok(Verdict::proved_out("counting", "counting is infinite on an infinite set"))
                }
            }
            SubKind::Summable(WeightRule::Explicit { weights, tail }) => match tail {
                crate::submeasures::Tail::Constant(q) if *q == num_traits::Zero::zero() => {
                    Ok(Verdict::proved_in(
                        "summable",
                        format!("weights vanish beyond index {}", weights.len()),
                    ))
                }
                crate::submeasures::Tail::Constant(_) if !s.finite => Ok(Verdict::proved_out(
                    "summable",
                    "a constant positive tail weight diverges on an infinite set",
                )),
                _ => self.empirical(phi, d, budget),
            },
            _ => self.empirical(phi, d, budget),
        }
    }

    /// Growth of `φ` along prefixes of the set: the first prefix whose value exceeds the level.
    fn empirical(&self, phi: &Submeasure, d: &D, budget: Budget) -> Result<Verdict> {
        let members = members_below(&self.space, d, budget.prefix)?;
        let level = ExtRational::from_int(budget.level as i64);
        let value_below = |n: u64| {
            let cut = members.partition_point(|&c| c < n);
            phi.eval_codes(&members[..cut])
        };
        let total = phi.eval_codes(&members);
        if total <= level {
            return Ok(Verdict::BoundedUpTo {
                bound: total,
                prefix: budget.prefix,
            });
        }
        let (mut lo, mut hi) = (0u64, budget.prefix);
        while lo + 1 < hi {
            let mid = lo + (hi - lo) / 2;
            if value_below(mid) > level {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(Verdict::DivergentUpTo {
            level: budget.level,
            prefix: hi,
        })
    }

    fn decide_fubini(&self, i: &IdealOracle, j: &IdealOracle, d: &D, budget: Budget) -> Result<Verdict> {
        let next = budget.deeper().ok_or(Error::RecursionDepthExceeded)?;
        let sections = product_sections(&self.space, d)?;
        let mut classified = Vec::new();
        for (c, s) in &sections.fixed {
            classified.push((D::finite([*c]), j.decide_checked(s, next)));
        }
        for g in &sections.generic {
            classified.push((g.indices.clone(), j.decide_checked(&g.section, next)));
        }
        Ok(decide_bad_set(i, classified, next, "fubini"))
    }

    /// Number of summands met by `codes` whose index lies outside `A`, for support ideals.
    pub fn support_excess(&self, codes: &[u64]) -> Option<u64> {
        let OracleKind::SupportIdeal(a) = &self.kind else {
            return None;
        };
        let mut indices = std::collections::BTreeSet::new();
        for &c in codes {
            if let Ok(crate::ground::Point::Sum(n, _)) = self.space.decode(c) {
                indices.insert(n);
            }
        }
        let mut count = 0;
        for n in indices {
            if !crate::ground::member(&Space::Omega, a, n).ok()? {
                count += 1;
            }
        }
        Some(count)
    }

    /// Evidence from the oracle's submeasure on an explicit finite truncation.
    pub fn evidence(&self, codes: &[u64], budget: Budget) -> Verdict {
        let level = ExtRational::from_int(budget.level as i64);
        let graded = |v: ExtRational| {
            if v > level {
                Verdict::DivergentUpTo {
                    level: budget.level,
                    prefix: budget.prefix,
                }
            } else {
                Verdict::BoundedUpTo {
                    bound: v,
                    prefix: budget.prefix,
                }
            }
        };
        let phi = match &self.kind {
            OracleKind::SupportIdeal(_) => {
                return match self.support_excess(codes) {
                    Some(k) => graded(ExtRational::from_int(k as i64)),
                    None => Verdict::unknown("support outside the index set is not decidable"),
                }
            }
            OracleKind::Meet(list) => {
                let found: Vec<Verdict> = list
                    .iter()
                    .map(|o| o.evidence(codes, budget))
                    .filter(|v| !matches!(v, Verdict::Unknown { .. }))
                    .collect();
                if found.is_empty() {
                    return Verdict::unknown("no conjunct carries a submeasure");
                }
                return Verdict::all(found);
            }
            OracleKind::FinOf(phi) => phi.clone(),
            OracleKind::Ib => Submeasure::antichain(),
            OracleKind::EdFin => Submeasure::edfin(),
            OracleKind::Mazur => Submeasure::mazur(),
            OracleKind::Density => Submeasure::density(),
            OracleKind::Solecki(l) => match Submeasure::solecki_cover(*l) {
                Ok(phi) => phi,
                Err(e) => return Verdict::unknown(e.to_string()),
            },
            _ => return Verdict::unknown("no submeasure attached to this oracle"),
        };
        graded(phi.eval_codes(codes))
    }
}

fn generic_index(sections: &crate::ground::shape::SumSections) -> Option<u64> {
    sections.generic_part.as_ref()?;
    Some(sections.fixed.iter().map(|(n, _, _)| n + 1).max().unwrap_or(0))
}

/// Decide `{index : section ∉ J}` with the index ideal, given per-type section verdicts.
fn decide_bad_set(index_ideal: &IdealOracle, classified: Vec<(D, Verdict)>, budget: Budget, rule: &str) -> Verdict {
    let mut bad = Vec::new();
    let mut possible = Vec::new();
    let mut uncertain = false;
    for (indices, v) in classified {
        if v.is_proved_out() {
            bad.push(indices.clone());
            possible.push(indices);
        } else if !v.is_proved_in() {
            uncertain = true;
            possible.push(indices);
        }
    }
    let bad = D::union_all(bad);
    let possible = D::union_all(possible);
    let upper = index_ideal.decide_checked(&possible, budget);
    if upper.is_proved_in() {
        return upper.with_step(
            rule,
            format!("sections outside the index ideal lie within {possible}, which is small"),
        );
    }
    let lower = index_ideal.decide_checked(&bad, budget);
    if lower.is_proved_out() {
        return lower.with_step(
            rule,
            format!("sections at {bad} are outside the inner ideal, and that index set is large"),
        );
    }
    if !uncertain {
        return lower;
    }
    match lower {
        Verdict::ProvedIn { .. } => Verdict::unknown("some section verdicts are not proved"),
        other => other,
    }
}

impl fmt::Display for IdealOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.provenance)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> Budget {
        Budget::default()
    }

    fn fin2() -> IdealOracle {
        IdealOracle::fubini(IdealOracle::fin(), IdealOracle::fin())
    }

    #[test]
    fn counting() {
        let fin = IdealOracle::fin();
        assert!(fin.decide(&D::finite([1, 2, 3]), b()).unwrap().is_proved_in());
        assert!(fin.decide(&D::Full, b()).unwrap().is_proved_out());
        assert!(fin.decide(&D::evens(), b()).unwrap().is_proved_out());
    }

    #[test]
    fn harmonic_diverges_at_83() {
        let o = IdealOracle::summable(WeightRule::Harmonic);
        let v = o.decide(&D::Full, b()).unwrap();
        assert_eq!(v, Verdict::DivergentUpTo { level: 5, prefix: 83 });
    }

    #[test]
    fn fubini_examples() {
        let o = fin2();
        assert!(o.decide(&D::Column(0), b()).unwrap().is_proved_in());
        assert!(o.decide(&D::Full, b()).unwrap().is_proved_out());
        let rect = D::rectangle(D::finite(0..10), D::Full);
        assert!(o.decide(&rect, b()).unwrap().is_proved_in());
        assert!(o.decide(&D::Row(0), b()).unwrap().is_proved_in());
        let cols = D::rectangle(D::evens(), D::Full);
        assert!(o.decide(&cols, b()).unwrap().is_proved_out());
    }

    #[test]
    fn extensions() {
        let col = IdealOracle::col_ext(IdealOracle::fin());
        assert!(col.decide(&D::Column(3), b()).unwrap().is_proved_in());
        assert!(col.decide(&D::Row(0), b()).unwrap().is_proved_out());
        let row = IdealOracle::row_ext(IdealOracle::fin());
        assert!(row.decide(&D::Row(0), b()).unwrap().is_proved_in());
        assert!(row.decide(&D::Column(0), b()).unwrap().is_proved_out());
    }

    #[test]
    fn sums() {
        let s = IdealOracle::direct_sum(IdealOracle::fin(), IdealOracle::fin()).unwrap();
        let sec0 = D::intersection(D::Section(0), D::finite([0, 2, 4]));
        assert!(s.decide(&sec0, b()).unwrap().is_proved_in());
        assert!(s.decide(&D::Section(1), b()).unwrap().is_proved_out());
        let pad = IdealOracle::full_pad(IdealOracle::fin()).unwrap();
        assert!(pad.decide(&D::Section(1), b()).unwrap().is_proved_in());
        assert!(pad.decide(&D::Section(0), b()).unwrap().is_proved_out());
        assert!(pad.decide(&D::finite([0, 1]), b()).unwrap().is_proved_in());
    }

    #[test]
    fn meet_on_full() {
        let fin_sets = IdealOracle::fin_on(Space::omega_squared());
        let m = IdealOracle::meet(vec![
            IdealOracle::row_ext(fin2()),
            IdealOracle::fubini(IdealOracle::fin(), fin_sets),
        ])
        .unwrap();
        assert!(m.decide(&D::Full, b()).unwrap().is_proved_out());
        assert!(IdealOracle::meet(vec![IdealOracle::fin(), fin2()]).is_err());
    }

    #[test]
    fn jfamily() {
        let j = IdealOracle::jfamily(D::evens()).unwrap();
        let m = D::intersection(D::Section(0), D::finite([0, 2]));
        assert!(j.decide(&m, b()).unwrap().is_proved_in());
        assert!(j.decide(&D::Section(1), b()).unwrap().is_proved_out());
        let odd = D::diagonal(D::Residues(2, vec![1]));
        assert!(j.decide(&odd, b()).unwrap().is_proved_out());
        let even = D::diagonal(D::evens());
        assert!(j.decide(&even, b()).unwrap().is_proved_in());
    }

    #[test]
    fn jfamily_evidence_grows() {
        let j = IdealOracle::jfamily(D::evens()).unwrap();
        let space = &j.space;
        let codes: Vec<u64> = (0..20u64)
            .filter(|n| n % 2 == 1)
            .map(|n| space.encode(&space.decode(crate::ground::pair(n, 0)).unwrap()).unwrap())
            .collect();
        let OracleKind::Meet(parts) = &j.kind else { panic!() };
        assert_eq!(parts[1].support_excess(&codes), Some(10));
        let v = j.evidence(&codes, b());
        assert_eq!(v.direction(), Some(false));
    }

    #[test]
    fn catalogue_atoms() {
        let ib = IdealOracle::ib();
        let br = D::Branch(crate::ground::PeriodicWord::constant(0));
        assert!(ib.decide(&br, b()).unwrap().is_proved_in());
        assert!(ib.decide(&D::Full, b()).unwrap().is_proved_out());
        let ed = IdealOracle::edfin();
        assert!(ed.decide(&D::Column(2), b()).unwrap().is_proved_in());
        assert!(ed.decide(&D::Row(0), b()).unwrap().is_proved_in());
        assert!(ed.decide(&D::Full, b()).unwrap().is_proved_out());
        let mz = IdealOracle::mazur();
        assert!(mz.decide(&D::Section(3), b()).unwrap().is_proved_in());
        assert!(mz.decide(&D::Full, b()).unwrap().is_proved_out());
        let dn = IdealOracle::density();
        assert!(dn.decide(&D::evens(), b()).unwrap().is_proved_out());
        let tr = IdealOracle::trivial(Space::Omega);
        assert!(tr.decide(&D::finite([1]), b()).unwrap().is_proved_out());
        assert!(tr.decide(&D::Empty, b()).unwrap().is_proved_in());
    }

    #[test]
    fn fin_powers_fold() {
        let f3 = IdealOracle::fin_pow(3);
        assert_eq!(f3.space, Space::omega_power(3));
        assert!(f3.decide(&D::Column(0), b()).unwrap().is_proved_in());
        assert!(f3.decide(&D::Full, b()).unwrap().is_proved_out());
    }

    #[test]
    fn depth_cap_gives_unknown() {
        let f = IdealOracle::fin_pow(4);
        let shallow = Budget { depth: 1, ..b() };
        let v = f.decide(&D::Full, shallow).unwrap();
        assert_eq!(v.name(), "Unknown");
    }
}
