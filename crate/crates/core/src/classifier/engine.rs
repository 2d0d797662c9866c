//! Forward-chaining rule engine for the attributes of an ideal expression.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground::SetDescription as D;
use crate::ground::Space;
use crate::ideals::{Budget, Tri, Verdict};

use super::expr::IdealExpr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attr {
    Analytic,
    Tall,
    CountablyGenerated,
    NonpathFsigma,
    Egorov,
}

impl Attr {
    pub const ALL: [Attr; 5] = [
        Attr::Analytic,
        Attr::Tall,
        Attr::CountablyGenerated,
        Attr::NonpathFsigma,
        Attr::Egorov,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Attr::Analytic => "analytic",
            Attr::Tall => "tall",
            Attr::CountablyGenerated => "countably_generated",
            Attr::NonpathFsigma => "nonpath_fsigma",
            Attr::Egorov => "egorov",
        }
    }
}

impl FromStr for Attr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Attr::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown attribute {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    Catalogue,
    Unfold,
    ClosureAnalytic,
    ClosureGenerated,
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
    R10,
    R11,
    R12,
}

impl RuleId {
    pub const ALL: [RuleId; 16] = [
        RuleId::Catalogue,
        RuleId::Unfold,
        RuleId::ClosureAnalytic,
        RuleId::ClosureGenerated,
        RuleId::R1,
        RuleId::R2,
        RuleId::R3,
        RuleId::R4,
        RuleId::R5,
        RuleId::R6,
        RuleId::R7,
        RuleId::R8,
        RuleId::R9,
        RuleId::R10,
        RuleId::R11,
        RuleId::R12,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleId::Catalogue => "catalogue",
            RuleId::Unfold => "unfold",
            RuleId::ClosureAnalytic => "closure-analytic",
            RuleId::ClosureGenerated => "closure-generated",
            RuleId::R1 => "R1",
            RuleId::R2 => "R2",
            RuleId::R3 => "R3",
            RuleId::R4 => "R4",
            RuleId::R5 => "R5",
            RuleId::R6 => "R6",
            RuleId::R7 => "R7",
            RuleId::R8 => "R8",
            RuleId::R9 => "R9",
            RuleId::R10 => "R10",
            RuleId::R11 => "R11",
            RuleId::R12 => "R12",
        }
    }

    /// Citation for the rule; catalogue facts carry their own.
    pub fn cite(self) -> &'static str {
        match self {
            RuleId::Catalogue => "catalogue fact",
            RuleId::Unfold => "definition of the abbreviation",
            RuleId::ClosureAnalytic => "analytic ideals are closed under sums, products, meets and restrictions",
            RuleId::ClosureGenerated => "adding a countable family of generators keeps an ideal countably generated",
            RuleId::R1 => "every countably generated ideal is Egorov",
            RuleId::R2 => "a non-pathological F_sigma ideal is Egorov iff it is isomorphic to Fin, Fin ⊕ P(ω) or Fin ⊗ {∅}",
            RuleId::R3 => "no tall non-pathological F_sigma ideal is Egorov",
            RuleId::R4 => "I ⊕ J is Egorov if and only if both I and J are Egorov",
            RuleId::R5 => "I ⊕ P(ω) is Egorov if and only if I is Egorov",
            RuleId::R6 => "I ⊗ {∅} is an Egorov ideal if and only if I is Egorov",
            RuleId::R7 => "Σ_{n∈ω} I_n is an Egorov ideal if and only if every I_n is Egorov",
            RuleId::R8 => "if every I_n is Egorov, then ∩_{n∈ω} I_n is an Egorov ideal",
            RuleId::R9 => "if all I_n are analytic, Σ_J I_n is Egorov iff J is Egorov and {n∈ω: I_n is not Egorov} ∈ J",
            RuleId::R10 => "for analytic J, I ⊗ J is Egorov if and only if I and J are Egorov",
            RuleId::R11 => "if J is Egorov and I ≤_RK J, then I is Egorov",
            RuleId::R12 => "I is Egorov if and only if I↾A is Egorov",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RuleId::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown rule {s:?}")))
    }
}

/// RK edges `(I, J)` with `I ≤_RK J`.
pub const RK_EDGES: [(IdealExpr, IdealExpr); 3] = [
    (IdealExpr::Ib, IdealExpr::Solecki),
    (IdealExpr::EdFin, IdealExpr::Mazur),
    (IdealExpr::Ib, IdealExpr::EdFin),
];

#[derive(Debug, Clone, PartialEq, Eq)]
struct Candidate {
    subject: IdealExpr,
    attr: Attr,
    value: Tri,
    rule: RuleId,
    cite: String,
    premises: Vec<(IdealExpr, Attr)>,
}

type Lookup<'a> = dyn Fn(&IdealExpr, Attr) -> Option<Tri> + 'a;

fn catalogue(e: &IdealExpr) -> Vec<(Attr, Tri, &'static str)> {
    use Attr::*;
    use IdealExpr as E;
    use Tri::{No, Yes};
    match e {
        E::Fin | E::FinSets => vec![
            (Analytic, Yes, "Fin is F_sigma"),
            (Tall, No, "Fin contains no infinite set"),
            (CountablyGenerated, Yes, "Fin is generated by the singletons"),
            (NonpathFsigma, Yes, "Fin = Fin(counting measure)"),
        ],
        E::Trivial => vec![
            (Analytic, Yes, "{∅} is closed"),
            (Tall, No, "{∅} contains no infinite set"),
            (CountablyGenerated, Yes, "{∅} is generated by the empty family"),
        ],
        E::FinPow(_) | E::Bi | E::Cei => vec![(Analytic, Yes, "Fin^n is Borel")],
        E::Summable(rule) => {
            let mut out = vec![(Analytic, Yes, "summable ideals are F_sigma")];
            if rule.diverges() {
                out.push((NonpathFsigma, Yes, "a summable submeasure is a measure"));
                if rule.vanishes() {
                    out.push((Tall, Yes, "summable ideals with c_n → 0 are tall"));
                    out.push((
                        CountablyGenerated,
                        No,
                        "tall summable ideals are not countably generated",
                    ));
                } else {
                    out.push((Tall, No, "weights bounded below give Fin"));
                    out.push((
                        CountablyGenerated,
                        Yes,
                        "weights bounded below give Fin",
                    ));
                }
            }
            out
        }
        E::Density => vec![
            (Analytic, Yes, "I_d is F_sigma_delta"),
            (Tall, Yes, "I_d is tall"),
            (CountablyGenerated, No, "I_d is a tall P-ideal"),
            (Egorov, No, "I_d and summable ideals are not Egorov"),
        ],
        E::Ib => vec![
            (Analytic, Yes, "I_b is F_sigma"),
            (Tall, No, "an infinite antichain has no infinite subset in I_b"),
            (CountablyGenerated, No, "I_b has uncountably many pairwise almost disjoint branches"),
            (NonpathFsigma, Yes, "φ_{I_b} is non-pathological"),
        ],
        E::EdFin => vec![
            (Analytic, Yes, "ED_Fin is F_sigma"),
            (Tall, Yes, "ED_Fin is tall"),
            (CountablyGenerated, No, "ED_Fin is tall and F_sigma"),
            (NonpathFsigma, Yes, "φ_{ED_Fin} is non-pathological"),
        ],
        E::Mazur => vec![
            (Analytic, Yes, "M is F_sigma"),
            (CountablyGenerated, No, "M is not countably generated"),
            (NonpathFsigma, No, "M is a pathological F_sigma ideal"),
        ],
        E::Solecki => vec![
            (Analytic, Yes, "S is F_sigma"),
            (CountablyGenerated, No, "S is not countably generated"),
        ],
        E::JFam(_) => vec![
            (Analytic, Yes, "each J_A is Π⁰_ω"),
            (Egorov, Yes, "each J_A is Egorov"),
        ],
        _ => Vec::new(),
    }
}

fn fact(
    subject: &IdealExpr,
    attr: Attr,
    value: Tri,
    rule: RuleId,
    premises: Vec<(IdealExpr, Attr)>,
) -> Candidate {
    Candidate {
        subject: subject.clone(),
        attr,
        value,
        rule,
        cite: rule.cite().to_string(),
        premises,
    }
}

/// Every fact the enabled rules derive at `site` from the facts visible through `get`.
fn candidates(site: &IdealExpr, get: &Lookup, rules: &BTreeSet<RuleId>) -> Vec<Candidate> {
    use Attr::*;
    use IdealExpr as E;
    let on = |r: RuleId| rules.contains(&r);
    let mut out = Vec::new();
    let egorov = Egorov;

    if on(RuleId::Catalogue) {
        for (attr, value, cite) in catalogue(site) {
            out.push(Candidate {
                subject: site.clone(),
                attr,
                value,
                rule: RuleId::Catalogue,
                cite: cite.to_string(),
                premises: Vec::new(),
            });
        }
    }
    if on(RuleId::Unfold) {
        if let Some(body) = site.unfold() {
            for attr in Attr::ALL {
                if let Some(v) = get(&body, attr) {
                    out.push(fact(site, attr, v, RuleId::Unfold, vec![(body.clone(), attr)]));
                }
            }
        }
    }
    let children: Vec<&IdealExpr> = site.children();
    if on(RuleId::ClosureAnalytic) && !children.is_empty() {
        let mut parts: Vec<IdealExpr> = Vec::new();
        for c in &children {
            if !parts.contains(c) {
                parts.push((*c).clone());
            }
        }
        if parts.iter().all(|c| get(c, Analytic) == Some(Tri::Yes)) {
            let premises = parts.into_iter().map(|c| (c, Analytic)).collect();
            out.push(fact(site, Analytic, Tri::Yes, RuleId::ClosureAnalytic, premises));
        }
    }
    if on(RuleId::ClosureGenerated) {
        let parts: Option<Vec<&IdealExpr>> = match site {
            E::FullPad(a) | E::ColExt(a) => Some(vec![a]),
            E::DirectSum(a, b) => Some(vec![a, b]),
            _ => None,
        };
        if let Some(parts) = parts {
            if parts.iter().all(|c| get(c, CountablyGenerated) == Some(Tri::Yes)) {
                let premises = parts.into_iter().map(|c| (c.clone(), CountablyGenerated)).collect();
                out.push(fact(site, CountablyGenerated, Tri::Yes, RuleId::ClosureGenerated, premises));
            }
        }
    }
    let g = |e: &IdealExpr, a: Attr| get(e, a);
    if on(RuleId::R1) && g(site, CountablyGenerated) == Some(Tri::Yes) {
        out.push(fact(site, egorov, Tri::Yes, RuleId::R1, vec![(site.clone(), CountablyGenerated)]));
    }
    if on(RuleId::R2)
        && g(site, NonpathFsigma) == Some(Tri::Yes)
        && g(site, CountablyGenerated) == Some(Tri::No)
    {
        out.push(fact(
            site,
            egorov,
            Tri::No,
            RuleId::R2,
            vec![(site.clone(), NonpathFsigma), (site.clone(), CountablyGenerated)],
        ));
    }
    if on(RuleId::R3) && g(site, Tall) == Some(Tri::Yes) && g(site, NonpathFsigma) == Some(Tri::Yes) {
        out.push(fact(
            site,
            egorov,
            Tri::No,
            RuleId::R3,
            vec![(site.clone(), Tall), (site.clone(), NonpathFsigma)],
        ));
    }
    match site {
        E::DirectSum(a, b) if on(RuleId::R4) => both_or_either(site, a, b, RuleId::R4, get, &mut out),
        E::FullPad(a) | E::ColExt(a) => {
            let rule = if matches!(site, E::FullPad(_)) { RuleId::R5 } else { RuleId::R6 };
            if on(rule) {
                if let Some(v) = g(a, egorov) {
                    out.push(fact(site, egorov, v, rule, vec![((**a).clone(), egorov)]));
                }
            }
        }
        E::IndexedSum(seq) if on(RuleId::R7) => {
            let mut parts: Vec<&IdealExpr> = Vec::new();
            for m in seq.members() {
                if !parts.contains(&m) {
                    parts.push(m);
                }
            }
            if let Some(bad) = parts.iter().find(|p| g(p, egorov) == Some(Tri::No)) {
                out.push(fact(site, egorov, Tri::No, RuleId::R7, vec![((*bad).clone(), egorov)]));
            } else if parts.iter().all(|p| g(p, egorov) == Some(Tri::Yes)) {
                let premises = parts.iter().map(|p| ((*p).clone(), egorov)).collect();
                out.push(fact(site, egorov, Tri::Yes, RuleId::R7, premises));
            }
        }
        E::Meet(list) if on(RuleId::R8) => {
            let mut parts: Vec<&IdealExpr> = Vec::new();
            for m in list {
                if !parts.contains(&m) {
                    parts.push(m);
                }
            }
            if parts.iter().all(|p| g(p, egorov) == Some(Tri::Yes)) {
                let premises = parts.iter().map(|p| ((*p).clone(), egorov)).collect();
                out.push(fact(site, egorov, Tri::Yes, RuleId::R8, premises));
            }
        }
        E::IndexedSumOver(j, seq) if on(RuleId::R9) => sum_over(site, j, seq, get, &mut out),
        E::Fubini(a, b) if on(RuleId::R10) => {
            if g(b, Analytic) == Some(Tri::Yes) {
                fubini_rule(site, a, b, get, &mut out);
            }
        }
        E::RowExt(b) if on(RuleId::R10) => {
            if g(b, Analytic) == Some(Tri::Yes) {
                fubini_rule(site, &E::Trivial, b, get, &mut out);
            }
        }
        E::Restrict(a, _) if on(RuleId::R12) => {
            if g(a, egorov) == Some(Tri::Yes) {
                out.push(fact(site, egorov, Tri::Yes, RuleId::R12, vec![((**a).clone(), egorov)]));
            }
            if g(site, egorov) == Some(Tri::No) {
                out.push(fact(a, egorov, Tri::No, RuleId::R12, vec![(site.clone(), egorov)]));
            }
        }
        _ => {}
    }
    if on(RuleId::R11) {
        for (src, tgt) in RK_EDGES.iter() {
            if site == src && g(tgt, egorov) == Some(Tri::Yes) {
                out.push(fact(site, egorov, Tri::Yes, RuleId::R11, vec![(tgt.clone(), egorov)]));
            }
            if site == tgt && g(src, egorov) == Some(Tri::No) {
                out.push(fact(site, egorov, Tri::No, RuleId::R11, vec![(src.clone(), egorov)]));
            }
        }
    }
    out
}

fn both_or_either(
    site: &IdealExpr,
    a: &IdealExpr,
    b: &IdealExpr,
    rule: RuleId,
    get: &Lookup,
    out: &mut Vec<Candidate>,
) {
    let (x, y) = (get(a, Attr::Egorov), get(b, Attr::Egorov));
    if x == Some(Tri::Yes) && y == Some(Tri::Yes) {
        out.push(fact(
            site,
            Attr::Egorov,
            Tri::Yes,
            rule,
            vec![(a.clone(), Attr::Egorov), (b.clone(), Attr::Egorov)],
        ));
    }
    for (part, v) in [(a, x), (b, y)] {
        if v == Some(Tri::No) {
            out.push(fact(site, Attr::Egorov, Tri::No, rule, vec![(part.clone(), Attr::Egorov)]));
        }
    }
}

fn fubini_rule(site: &IdealExpr, a: &IdealExpr, b: &IdealExpr, get: &Lookup, out: &mut Vec<Candidate>) {
    let mut local = Vec::new();
    both_or_either(site, a, b, RuleId::R10, get, &mut local);
    for mut c in local {
        c.premises.push((b.clone(), Attr::Analytic));
        out.push(c);
    }
}

fn sum_over(
    site: &IdealExpr,
    j: &IdealExpr,
    seq: &super::expr::ExprSeq,
    get: &Lookup,
    out: &mut Vec<Candidate>,
) {
    let mut parts: Vec<&IdealExpr> = Vec::new();
    for m in seq.members() {
        if !parts.contains(&m) {
            parts.push(m);
        }
    }
    if !parts.iter().all(|p| get(p, Attr::Analytic) == Some(Tri::Yes)) {
        return;
    }
    let analytic: Vec<(IdealExpr, Attr)> = parts.iter().map(|p| ((*p).clone(), Attr::Analytic)).collect();
    let jv = get(j, Attr::Egorov);
    if jv == Some(Tri::No) {
        let mut premises = vec![(j.clone(), Attr::Egorov)];
        premises.extend(analytic.iter().cloned());
        out.push(fact(site, Attr::Egorov, Tri::No, RuleId::R9, premises));
        return;
    }
    let values: Option<Vec<Tri>> = seq.members().map(|m| get(m, Attr::Egorov)).collect();
    let (Some(values), Some(Tri::Yes)) = (values, jv) else {
        return;
    };
    let Ok(verdict) = bad_set_verdict(j, seq.prefix.len(), &values) else {
        return;
    };
    let value = match verdict {
        Verdict::ProvedIn { .. } => Tri::Yes,
        Verdict::ProvedOut { .. } => Tri::No,
        _ => return,
    };
    let mut premises = vec![(j.clone(), Attr::Egorov)];
    for p in &parts {
        premises.push(((*p).clone(), Attr::Egorov));
    }
    premises.extend(analytic);
    out.push(fact(site, Attr::Egorov, value, RuleId::R9, premises));
}

/// `{n : I_n is not Egorov}` for a sequence whose last value is the tail.
pub fn bad_index_set(prefix_len: usize, values: &[Tri]) -> D {
    let finite: Vec<u64> = values[..prefix_len]
        .iter()
        .enumerate()
        .filter(|(_, v)| **v == Tri::No)
        .map(|(i, _)| i as u64)
        .collect();
    let head = D::finite(finite);
    if values[prefix_len] == Tri::No {
        D::union(head, D::Threshold(prefix_len as u64))
    } else {
        head
    }
}

fn bad_set_verdict(j: &IdealExpr, prefix_len: usize, values: &[Tri]) -> Result<Verdict> {
    let oracle = j.oracle()?;
    if oracle.space != Space::Omega {
        return Err(Error::SpaceMismatch(format!("{j} does not live on ω")));
    }
    oracle.decide(&bad_index_set(prefix_len, values), Budget::default())
}

/// Enabled rules; all of them by default.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSet(pub BTreeSet<RuleId>);

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet(RuleId::ALL.into_iter().collect())
    }
}

impl RuleSet {
    pub fn without(mut self, rule: RuleId) -> Self {
        self.0.remove(&rule);
        self
    }

    pub fn only(rules: impl IntoIterator<Item = RuleId>) -> Self {
        RuleSet(rules.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeValue {
    pub value: Tri,
    /// Rule id, or `catalogue: <fact>`.
    pub provenance: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeRecord {
    pub analytic: AttributeValue,
    pub tall: AttributeValue,
    pub countably_generated: AttributeValue,
    pub nonpath_fsigma: AttributeValue,
    pub egorov: AttributeValue,
}

impl AttributeRecord {
    pub fn get(&self, attr: Attr) -> &AttributeValue {
        match attr {
            Attr::Analytic => &self.analytic,
            Attr::Tall => &self.tall,
            Attr::CountablyGenerated => &self.countably_generated,
            Attr::NonpathFsigma => &self.nonpath_fsigma,
            Attr::Egorov => &self.egorov,
        }
    }
}

/// Proof tree. Serializes as `{conclusion, rule, cite, premises}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    pub conclusion: String,
    pub rule: String,
    pub cite: String,
    pub premises: Vec<Derivation>,
}

pub const NO_RULE: &str = "none";

impl Derivation {
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    /// Rule ids used anywhere in the tree.
    pub fn rules(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |d| {
            out.insert(d.rule.clone());
        });
        out
    }

    fn visit(&self, f: &mut impl FnMut(&Derivation)) {
        f(self);
        for p in &self.premises {
            p.visit(f);
        }
    }
}

pub fn conclusion_text(subject: &IdealExpr, attr: Attr, value: Tri) -> String {
    format!("{}({subject}) = {value}", attr.name())
}

/// Inverse of [`conclusion_text`].
pub fn parse_conclusion(text: &str) -> Result<(IdealExpr, Attr, Tri)> {
    let bad = || Error::InvalidArgument(format!("malformed conclusion {text:?}"));
    let (head, value) = text.rsplit_once(" = ").ok_or_else(bad)?;
    let value = match value {
        "Yes" => Tri::Yes,
        "No" => Tri::No,
        "Unknown" => Tri::Unknown,
        _ => return Err(bad()),
    };
    let (attr, rest) = head.split_once('(').ok_or_else(bad)?;
    let subject = rest.strip_suffix(')').ok_or_else(bad)?;
    Ok((IdealExpr::parse(subject)?, attr.parse()?, value))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub expr: IdealExpr,
    pub attributes: AttributeRecord,
    pub derivation: Derivation,
    /// Passes over the subject list until nothing new was derived.
    pub iterations: usize,
    pub facts: usize,
    /// Derivations rejected because the opposite value was already established.
    pub conflicts: Vec<String>,
}

struct Fact {
    value: Tri,
    rule: RuleId,
    cite: String,
    premises: Vec<(IdealExpr, Attr)>,
}

/// Subexpressions in post-order, with unfoldings and the auxiliary subjects the rules consult.
fn subjects(root: &IdealExpr) -> Vec<IdealExpr> {
    fn walk(e: &IdealExpr, seen: &mut HashSet<IdealExpr>, out: &mut Vec<IdealExpr>) {
        if !seen.insert(e.clone()) {
            return;
        }
        for c in e.children() {
            walk(c, seen, out);
        }
        if let Some(body) = e.unfold() {
            walk(&body, seen, out);
        }
        if matches!(e, IdealExpr::RowExt(_)) {
            walk(&IdealExpr::Trivial, seen, out);
        }
        if RK_EDGES.iter().any(|(s, t)| s == e || t == e) {
            for (s, t) in RK_EDGES.iter() {
                walk(s, seen, out);
                walk(t, seen, out);
            }
        }
        out.push(e.clone());
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    walk(root, &mut seen, &mut out);
    out
}

pub fn classify(e: &IdealExpr) -> Classification {
    classify_with(e, &RuleSet::default())
}

pub fn classify_with(e: &IdealExpr, rules: &RuleSet) -> Classification {
    let subjects = subjects(e);
    let mut facts: HashMap<(IdealExpr, Attr), Fact> = HashMap::new();
    let mut conflicts = Vec::new();
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mut changed = false;
        for site in &subjects {
            let found = {
                let get = |s: &IdealExpr, a: Attr| facts.get(&(s.clone(), a)).map(|f| f.value);
                candidates(site, &get, &rules.0)
            };
            for c in found {
                let key = (c.subject.clone(), c.attr);
                match facts.get(&key) {
                    None => {
                        facts.insert(
                            key,
                            Fact {
                                value: c.value,
                                rule: c.rule,
                                cite: c.cite,
                                premises: c.premises,
                            },
                        );
                        changed = true;
                    }
                    Some(f) if f.value != c.value => {
                        let text = format!(
                            "{} by {} contradicts {} by {}",
                            conclusion_text(&c.subject, c.attr, c.value),
                            c.rule,
                            f.value,
                            f.rule
                        );
                        if !conflicts.contains(&text) {
                            conflicts.push(text);
                        }
                    }
                    Some(_) => {}
                }
            }
        }
        if !changed {
            break;
        }
    }
    let value = |attr: Attr| match facts.get(&(e.clone(), attr)) {
        Some(f) => AttributeValue {
            value: f.value,
            provenance: Some(if f.rule == RuleId::Catalogue {
                format!("catalogue: {}", f.cite)
            } else {
                f.rule.name().to_string()
            }),
        },
        None => AttributeValue {
            value: Tri::Unknown,
            provenance: None,
        },
    };
    let attributes = AttributeRecord {
        analytic: value(Attr::Analytic),
        tall: value(Attr::Tall),
        countably_generated: value(Attr::CountablyGenerated),
        nonpath_fsigma: value(Attr::NonpathFsigma),
        egorov: value(Attr::Egorov),
    };
    let derivation = build(&facts, e, Attr::Egorov);
    Classification {
        expr: e.clone(),
        attributes,
        derivation,
        iterations,
        facts: facts.len(),
        conflicts,
    }
}

fn build(facts: &HashMap<(IdealExpr, Attr), Fact>, subject: &IdealExpr, attr: Attr) -> Derivation {
    match facts.get(&(subject.clone(), attr)) {
        Some(f) => Derivation {
            conclusion: conclusion_text(subject, attr, f.value),
            rule: f.rule.name().to_string(),
            cite: f.cite.clone(),
            premises: f.premises.iter().map(|(s, a)| build(facts, s, *a)).collect(),
        },
        None => Derivation {
            conclusion: conclusion_text(subject, attr, Tri::Unknown),
            rule: NO_RULE.to_string(),
            cite: "no rule applies".to_string(),
            premises: Vec::new(),
        },
    }
}

/// Re-derive every node from its premises alone.
pub fn replay(d: &Derivation) -> Result<()> {
    let (subject, attr, value) = parse_conclusion(&d.conclusion)?;
    let fail = |why: &str| Err(Error::InvalidArgument(format!("{}: {why}", d.conclusion)));
    if d.rule == NO_RULE {
        if value != Tri::Unknown || !d.premises.is_empty() {
            return fail("an unsupported node must be an Unknown leaf");
        }
        return Ok(());
    }
    let rule: RuleId = d.rule.parse()?;
    let mut given: Vec<(IdealExpr, Attr, Tri)> = Vec::with_capacity(d.premises.len());
    for p in &d.premises {
        replay(p)?;
        given.push(parse_conclusion(&p.conclusion)?);
    }
    let get = |s: &IdealExpr, a: Attr| {
        given
            .iter()
            .find(|(gs, ga, _)| gs == s && *ga == a)
            .map(|(_, _, v)| *v)
            .filter(|v| *v != Tri::Unknown)
    };
    let mut sites = vec![subject.clone()];
    for (s, _, _) in &given {
        if !sites.contains(s) {
            sites.push(s.clone());
        }
    }
    let only = RuleSet::only([rule]);
    let wanted: BTreeSet<(String, Attr)> = given.iter().map(|(s, a, _)| (s.to_string(), *a)).collect();
    for site in &sites {
        for c in candidates(site, &get, &only.0) {
            let used: BTreeSet<(String, Attr)> =
                c.premises.iter().map(|(s, a)| (s.to_string(), *a)).collect();
            if c.subject == subject && c.attr == attr && c.value == value && used == wanted && c.cite == d.cite {
                return Ok(());
            }
        }
    }
    fail(&format!("rule {rule} does not yield the conclusion from the premises"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn egorov(text: &str) -> Tri {
        let c = classify(&IdealExpr::parse(text).unwrap());
        assert!(c.conflicts.is_empty(), "{:?}", c.conflicts);
        replay(&c.derivation).unwrap();
        c.attributes.egorov.value
    }

    #[test]
    fn examples() {
        assert_eq!(egorov("FinPow 3"), Tri::Yes);
        assert_eq!(egorov("Summable 1/(n+1)"), Tri::No);
        assert_eq!(egorov("Mazur"), Tri::No);
        assert_eq!(egorov("Solecki"), Tri::No);
    }

    #[test]
    fn constructors() {
        assert_eq!(egorov("Fin (+) Ib"), Tri::No);
        assert_eq!(egorov("Fin (+) FinPow 2"), Tri::Yes);
        assert_eq!(egorov("Sum(Fin, Density; Fin…)"), Tri::No);
        assert_eq!(egorov("Sum(FinPow 2…)"), Tri::Yes);
        assert_eq!(egorov("Meet(Ib, Fin)"), Tri::Unknown);
        assert_eq!(egorov("Restrict(FinPow 2, (column 0))"), Tri::Yes);
        assert_eq!(egorov("Ib (x) Fin"), Tri::No);
        assert_eq!(egorov("Fin (x) Mazur"), Tri::No);
        assert_eq!(egorov("Summable [1; 1]"), Tri::Yes);
    }

    #[test]
    fn sum_over_decides_the_bad_set() {
        assert_eq!(egorov("SumOver(Fin; Ib, Density; Fin…)"), Tri::Yes);
        assert_eq!(egorov("SumOver(Fin; Fin; Ib…)"), Tri::No);
        assert_eq!(egorov("SumOver(Ib; Fin…)"), Tri::No);
        let c = classify(&IdealExpr::parse("SumOver(Fin; Ib, Density; Fin…)").unwrap());
        assert_eq!(c.derivation.rule, "R9");
    }

    #[test]
    fn downward_restriction() {
        let site = IdealExpr::Restrict(Box::new(IdealExpr::Solecki), D::Full);
        let get = |s: &IdealExpr, a: Attr| (*s == site && a == Attr::Egorov).then_some(Tri::No);
        let found = candidates(&site, &get, &RuleSet::only([RuleId::R12]).0);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].subject, IdealExpr::Solecki);
        assert_eq!(found[0].value, Tri::No);
        let back = classify(&IdealExpr::Mazur);
        assert_eq!(back.derivation.rule, "R11");
    }

    #[test]
    fn replay_rejects_tampering() {
        let c = classify(&IdealExpr::parse("FinPow 2").unwrap());
        let mut d = c.derivation.clone();
        replay(&d).unwrap();
        d.conclusion = d.conclusion.replace("Yes", "No");
        assert!(replay(&d).is_err());
        let mut e = c.derivation.clone();
        e.premises.clear();
        assert!(replay(&e).is_err());
        let json = serde_json::to_value(&c.derivation).unwrap();
        for key in ["conclusion", "rule", "cite", "premises"] {
            assert!(json.get(key).is_some());
        }
    }

    #[test]
    fn unknown_without_rules() {
        let c = classify_with(&IdealExpr::Fin, &RuleSet::only([RuleId::Catalogue]));
        assert_eq!(c.attributes.egorov.value, Tri::Unknown);
        assert_eq!(c.derivation.rule, NO_RULE);
        replay(&c.derivation).unwrap();
    }
}
