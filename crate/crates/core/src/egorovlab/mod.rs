//! Tree witnesses for non-Egorov `F_σ` ideals and the interval machine built from them.
//!
//! A witness is a finitely branching tree `T_c` up to some depth with a submeasure on its nodes
//! and, on the children `G_t` of each level-`n` node, a measure `μ_t` of total mass `n+1`
//! dominated by the submeasure. Intervals `I_t ⊆ [0, 1)` are nested along the tree with
//! `λ(I_{t⌢j}) = λ(I_t)·μ_t({j})/(n+1)`, so each level tiles `[0, 1)`.

pub mod interval;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use interval::IntervalSet;

use crate::error::{Error, Result};
use crate::ground::{encode_binseq, FiniteSet, GrowthVector, Point, Space};
use crate::rational::{format_rational, int, serde_rational, ExtRational, Rational};
use crate::submeasures::{maximal_count, Submeasure};

pub const EXHAUSTIVE_CHILDREN: usize = 12;
const DOMINATION_SAMPLES: usize = 4096;

#[derive(Clone)]
pub struct TreeWitness {
    pub name: String,
    pub growth: GrowthVector,
    pub depth: u32,
    pub submeasure: Submeasure,
    /// Atoms of `μ_t` on the children of each internal node, keyed by the node's word.
    pub atoms: BTreeMap<Vec<u64>, Vec<Rational>>,
}

impl fmt::Debug for TreeWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TreeWitness")
            .field("name", &self.name)
            .field("growth", &self.growth)
            .field("depth", &self.depth)
            .field("submeasure", &self.submeasure.label)
            .finish()
    }
}

/// Word in `2^{<ω}` of a node of `T_c` with `c(n) = n+2`: child `j` of level `n` appends
/// `0^j⌢1` for `j < n+1` and `0^{n+1}` for the last child.
pub fn ib_word(tree_word: &[u64]) -> Vec<u8> {
    let mut out = Vec::new();
    for (n, &j) in tree_word.iter().enumerate() {
        let last = n as u64 + 1;
        out.extend(std::iter::repeat(0u8).take(j.min(last) as usize));
        if j < last {
            out.push(1);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessAudit {
    /// `φ(G_t) > n+1` at every internal node.
    pub phi_exceeds: bool,
    pub dominated: bool,
    /// Domination was checked on every subset of every `G_t`.
    pub exhaustive: bool,
    pub nodes_checked: usize,
}

impl WitnessAudit {
    pub fn passed(&self) -> bool {
        self.phi_exceeds && self.dominated
    }
}

impl TreeWitness {
    /// Check the atoms, then the submeasure and domination conditions.
    pub fn new(
        name: impl Into<String>,
        growth: GrowthVector,
        depth: u32,
        submeasure: Submeasure,
        atoms: BTreeMap<Vec<u64>, Vec<Rational>>,
    ) -> Result<Self> {
        let space = Space::TreeSeq(growth.clone());
        if submeasure.space != space {
            return Err(Error::SpaceMismatch(format!(
                "submeasure lives on {}, witness on {space}",
                submeasure.space
            )));
        }
        let w = TreeWitness {
            name: name.into(),
            growth,
            depth,
            submeasure,
            atoms,
        };
        for t in w.nodes_up_to(depth.saturating_sub(1)) {
            let a = w
                .atoms
                .get(&t)
                .ok_or_else(|| Error::InvalidArgument(format!("no measure at node {t:?}")))?;
            if a.len() as u64 != w.growth.at(t.len()) {
                return Err(Error::InvalidArgument(format!(
                    "node {t:?} has {} atoms for {} children",
                    a.len(),
                    w.growth.at(t.len())
                )));
            }
            if a.iter().any(|q| *q < Rational::zero()) {
                return Err(Error::InvalidArgument(format!("negative atom at node {t:?}")));
            }
        }
        Ok(w)
    }

    pub fn space(&self) -> Space {
        Space::TreeSeq(self.growth.clone())
    }

    pub fn code(&self, word: &[u64]) -> Result<u64> {
        self.space().encode(&Point::TreeWord(word.to_vec()))
    }

    pub fn children(&self, t: &[u64]) -> Vec<Vec<u64>> {
        (0..self.growth.at(t.len()))
            .map(|j| {
                let mut w = t.to_vec();
                w.push(j);
                w
            })
            .collect()
    }

    /// Nodes at exactly `level`, in lexicographic order.
    pub fn level_nodes(&self, level: u32) -> Vec<Vec<u64>> {
        let mut current = vec![Vec::new()];
        for _ in 0..level {
            current = current.iter().flat_map(|t| self.children(t)).collect();
        }
        current
    }

    pub fn nodes_up_to(&self, level: u32) -> Vec<Vec<u64>> {
        (0..=level).flat_map(|k| self.level_nodes(k)).collect()
    }

    pub fn phi_of_words(&self, words: &[Vec<u64>]) -> Result<ExtRational> {
        let codes = words.iter().map(|w| self.code(w)).collect::<Result<Vec<_>>>()?;
        Ok(self.submeasure.eval_codes(&codes))
    }

    pub fn audit(&self) -> Result<WitnessAudit> {
        let mut report = WitnessAudit {
            phi_exceeds: true,
            dominated: true,
            exhaustive: true,
            nodes_checked: 0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for t in self.nodes_up_to(self.depth.saturating_sub(1)) {
            let n = t.len() as i64;
            let kids = self.children(&t);
            let atoms = &self.atoms[&t];
            let total: Rational = atoms.iter().sum();
            if total != int(n + 1) {
                return Err(Error::MeasureMismatch {
                    expected: format_rational(&int(n + 1)),
                    found: format_rational(&total),
                });
            }
            if self.phi_of_words(&kids)? <= ExtRational::from_int(n + 1) {
                report.phi_exceeds = false;
            }
            let check = |mask: u64| -> Result<bool> {
                let chosen: Vec<Vec<u64>> = (0..kids.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| kids[i].clone())
                    .collect();
                let mass: Rational = (0..kids.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| atoms[i].clone())
                    .sum();
                Ok(ExtRational::Finite(mass) <= self.phi_of_words(&chosen)?)
            };
            if kids.len() <= EXHAUSTIVE_CHILDREN {
                for mask in 1..1u64 << kids.len() {
                    if !check(mask)? {
                        report.dominated = false;
                    }
                }
            } else {
                report.exhaustive = false;
                let width = kids.len().min(63);
                for _ in 0..DOMINATION_SAMPLES {
                    let mask = rng.gen::<u64>() & ((1u64 << width) - 1);
                    if !check(mask)? {
                        report.dominated = false;
                    }
                }
            }
            report.nodes_checked += 1;
        }
        Ok(report)
    }

    /// Every root-to-leaf chain has submeasure at most 1.
    pub fn branch_chain_audit(&self) -> Result<bool> {
        for leaf in self.level_nodes(self.depth) {
            let chain: Vec<Vec<u64>> = (0..=leaf.len()).map(|k| leaf[..k].to_vec()).collect();
            if self.phi_of_words(&chain)? > ExtRational::one() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The `I_b` witness: `c(n) = n+2`, children sent to incomparable extensions, uniform `μ_t`.
pub fn ib_tree_witness(depth: u32) -> Result<TreeWitness> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    if depth > 6 {
        return Err(Error::InvalidArgument(format!("depth {depth} is too large; at most 6")));
    }
    let growth = GrowthVector::shifted_identity();
    let space = Space::TreeSeq(growth.clone());
    let decode_space = space.clone();
    let eval = move |codes: &[u64]| {
        let words: Vec<u64> = codes
            .iter()
            .filter_map(|&c| match decode_space.decode(c) {
                Ok(Point::TreeWord(w)) => Some(encode_binseq(&ib_word(&w))),
                _ => None,
            })
            .collect();
        ExtRational::from_int(maximal_count(&words) as i64)
    };
    let phi = Submeasure::custom(space, "ib-tree", Arc::new(eval));
    let mut atoms = BTreeMap::new();
    let probe = TreeWitness {
        name: "ib".into(),
        growth: growth.clone(),
        depth,
        submeasure: phi.clone(),
        atoms: BTreeMap::new(),
    };
    for t in probe.nodes_up_to(depth - 1) {
        let n = t.len() as i64;
        atoms.insert(t, vec![Rational::new((n + 1).into(), (n + 2).into()); n as usize + 2]);
    }
    TreeWitness::new("ib", growth, depth, phi, atoms)
}

pub fn witness_by_name(name: &str, depth: u32) -> Result<TreeWitness> {
    match name {
        "ib" => ib_tree_witness(depth),
        other => Err(Error::InvalidArgument(format!("unknown witness {other}; expected ib"))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalTree {
    pub depth: u32,
    pub intervals: BTreeMap<Vec<u64>, (Rational, Rational)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeAudit {
    pub level_sums: bool,
    pub length_formula: bool,
    pub nested_disjoint: bool,
}

impl TreeAudit {
    pub fn passed(&self) -> bool {
        self.level_sums && self.length_formula && self.nested_disjoint
    }
}

pub fn build_intervals(w: &TreeWitness) -> Result<IntervalTree> {
    let mut intervals = BTreeMap::new();
    intervals.insert(Vec::new(), (Rational::zero(), Rational::one()));
    for t in w.nodes_up_to(w.depth.saturating_sub(1)) {
        let n = t.len() as i64;
        let atoms = &w.atoms[&t];
        let total: Rational = atoms.iter().sum();
        if total != int(n + 1) {
            return Err(Error::MeasureMismatch {
                expected: format_rational(&int(n + 1)),
                found: format_rational(&total),
            });
        }
        let (start, end) = intervals[&t].clone();
        let len = &end - &start;
        let mut left = start;
        for (child, atom) in w.children(&t).into_iter().zip(atoms) {
            let right = &left + &len * atom / int(n + 1);
            intervals.insert(child, (left.clone(), right.clone()));
            left = right;
        }
    }
    Ok(IntervalTree {
        depth: w.depth,
        intervals,
    })
}

impl IntervalTree {
    pub fn length(&self, t: &[u64]) -> Rational {
        let (a, b) = &self.intervals[t];
        b - a
    }

    pub fn level(&self, k: u32) -> impl Iterator<Item = (&Vec<u64>, &(Rational, Rational))> {
        self.intervals.iter().filter(move |(t, _)| t.len() == k as usize)
    }

    pub fn audit(&self, w: &TreeWitness) -> TreeAudit {
        let level_sums = (0..=self.depth).all(|k| {
            self.level(k).map(|(_, (a, b))| b - a).sum::<Rational>() == Rational::one()
        });
        let mut length_formula = true;
        let mut nested_disjoint = true;
        for t in w.nodes_up_to(self.depth.saturating_sub(1)) {
            let n = t.len() as i64;
            let (pa, pb) = &self.intervals[&t];
            let mut prev_end: Option<Rational> = None;
            for (j, child) in w.children(&t).iter().enumerate() {
                let (a, b) = &self.intervals[child];
                if b - a != self.length(&t) * &w.atoms[&t][j] / int(n + 1) {
                    length_formula = false;
                }
                if a < pa || b > pb || prev_end.as_ref().is_some_and(|e| a < e) {
                    nested_disjoint = false;
                }
                prev_end = Some(b.clone());
            }
        }
        TreeAudit {
            level_sums,
            length_formula,
            nested_disjoint,
        }
    }

    /// Level-`k` nodes whose interval meets `M` in positive measure.
    pub fn hits_at_level(&self, m: &IntervalSet, k: u32) -> Vec<Vec<u64>> {
        self.level(k)
            .filter(|(_, (a, b))| m.overlap(a, b) > Rational::zero())
            .map(|(t, _)| t.clone())
            .collect()
    }
}

/// Codes of all nodes of level at most `k` whose interval meets `M` in positive measure.
pub fn hit_set(tree: &IntervalTree, w: &TreeWitness, m: &IntervalSet, k: u32) -> Result<FiniteSet> {
    if k > tree.depth {
        return Err(Error::LevelOutOfRange {
            level: k as usize,
            depth: tree.depth as usize,
        });
    }
    let mut codes = Vec::new();
    for level in 0..=k {
        for t in tree.hits_at_level(m, level) {
            codes.push(w.code(&t)?);
        }
    }
    FiniteSet::new(w.space(), codes)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationReport {
    #[serde(with = "serde_rational")]
    pub alpha: Rational,
    pub level: u32,
    pub best_node: Vec<u64>,
    #[serde(with = "serde_rational")]
    pub best_ratio: Rational,
    /// `(k+1)·λ(M ∩ I_{t*})/λ(I_{t*})`
    #[serde(with = "serde_rational")]
    pub lower_bound: Rational,
    pub hit_children: Vec<Vec<u64>>,
    #[serde(with = "serde_rational")]
    pub mu_sum: Rational,
    pub phi_of_hits: ExtRational,
    pub pigeonhole: bool,
    pub measure_bound: bool,
    pub submeasure_bound: bool,
}

impl ViolationReport {
    pub fn passed(&self) -> bool {
        self.pigeonhole && self.measure_bound && self.submeasure_bound
    }
}

/// Certify `φ(children of t* meeting M) ≥ (k+1)·ratio ≥ (k+1)·λ(M)` at the best level-`k` node.
///
/// Needs `k < depth`, since the bound is read off the children of a level-`k` node.
pub fn violation_check(tree: &IntervalTree, w: &TreeWitness, m: &IntervalSet, k: u32) -> Result<ViolationReport> {
    let alpha = m.measure();
    if alpha.is_zero() {
        return Err(Error::ZeroMeasureM);
    }
    if k >= tree.depth {
        return Err(Error::LevelOutOfRange {
            level: k as usize,
            depth: tree.depth as usize,
        });
    }
    let mut best: Option<(Vec<u64>, Rational)> = None;
    for (t, (a, b)) in tree.level(k) {
        let ratio = m.overlap(a, b) / (b - a);
        if best.as_ref().map_or(true, |(_, r)| ratio > *r) {
            best = Some((t.clone(), ratio));
        }
    }
    let (best_node, best_ratio) = best.expect("every level is nonempty");
    let lower_bound = int(k as i64 + 1) * &best_ratio;
    let kids = w.children(&best_node);
    let mut hit_children = Vec::new();
    let mut mu_sum = Rational::zero();
    for (j, child) in kids.iter().enumerate() {
        let (a, b) = &tree.intervals[child];
        if m.overlap(a, b) > Rational::zero() {
            hit_children.push(child.clone());
            mu_sum += &w.atoms[&best_node][j];
        }
    }
    let phi_of_hits = w.phi_of_words(&hit_children)?;
    Ok(ViolationReport {
        pigeonhole: best_ratio >= alpha,
        measure_bound: mu_sum >= lower_bound,
        submeasure_bound: phi_of_hits >= ExtRational::Finite(mu_sum.clone()),
        alpha,
        level: k,
        best_node,
        best_ratio,
        lower_bound,
        hit_children,
        mu_sum,
        phi_of_hits,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub word: Vec<u64>,
    pub code: u64,
    pub interval: IntervalSet,
}

/// JSON form of a built tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDocument {
    pub witness: String,
    pub depth: u32,
    pub witness_audit: WitnessAudit,
    pub tree_audit: TreeAudit,
    pub nodes: Vec<NodeRecord>,
}

pub fn construct(name: &str, depth: u32) -> Result<(TreeWitness, IntervalTree, TreeDocument)> {
    let w = witness_by_name(name, depth)?;
    let tree = build_intervals(&w)?;
    let nodes = tree
        .intervals
        .iter()
        .map(|(t, (a, b))| {
            Ok(NodeRecord {
                word: t.clone(),
                code: w.code(t)?,
                interval: IntervalSet::interval(a.clone(), b.clone())?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let doc = TreeDocument {
        witness: name.to_string(),
        depth,
        witness_audit: w.audit()?,
        tree_audit: tree.audit(&w),
        nodes,
    };
    Ok((w, tree, doc))
}

/// Rebuild the witness named in a document and check that the stored intervals match.
pub fn load(doc: &TreeDocument) -> Result<(TreeWitness, IntervalTree)> {
    let w = witness_by_name(&doc.witness, doc.depth)?;
    let tree = build_intervals(&w)?;
    for node in &doc.nodes {
        let (a, b) = tree.intervals.get(&node.word).ok_or_else(|| {
            Error::InvalidArgument(format!("node {:?} is not in the tree", node.word))
        })?;
        let expected = IntervalSet::interval(a.clone(), b.clone())?;
        if expected != node.interval {
            return Err(Error::InvalidArgument(format!(
                "stored interval {} of node {:?} differs from {expected}",
                node.interval, node.word
            )));
        }
    }
    Ok((w, tree))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn depth_one() {
        let w = ib_tree_witness(1).unwrap();
        assert_eq!(w.atoms[&vec![]], vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(w.phi_of_words(&w.children(&[])).unwrap(), ExtRational::from_int(2));
        let tree = build_intervals(&w).unwrap();
        assert_eq!(tree.intervals[&vec![0]], (rat(0, 1), rat(1, 2)));
        assert_eq!(tree.intervals[&vec![1]], (rat(1, 2), rat(1, 1)));
    }

    #[test]
    fn depth_two_lengths() {
        let w = ib_tree_witness(2).unwrap();
        assert_eq!(w.atoms[&vec![0]], vec![rat(2, 3); 3]);
        let tree = build_intervals(&w).unwrap();
        for t in w.level_nodes(2) {
            assert_eq!(tree.length(&t), rat(1, 6));
        }
        assert!(tree.audit(&w).passed());
        assert!(w.audit().unwrap().passed());
        assert!(w.branch_chain_audit().unwrap());
    }

    #[test]
    fn incomparable_children() {
        let w = ib_tree_witness(3).unwrap();
        for t in w.nodes_up_to(2) {
            let words: Vec<u64> = w.children(&t).iter().map(|c| encode_binseq(&ib_word(c))).collect();
            assert_eq!(maximal_count(&words), words.len());
        }
    }

    #[test]
    fn frozen_violation() {
        let w = ib_tree_witness(2).unwrap();
        let tree = build_intervals(&w).unwrap();
        let m: IntervalSet = "[0, 1/4)".parse().unwrap();
        let r = violation_check(&tree, &w, &m, 1).unwrap();
        assert_eq!(r.alpha, rat(1, 4));
        assert_eq!(r.best_node, vec![0]);
        assert_eq!(r.best_ratio, rat(1, 2));
        assert_eq!(r.lower_bound, rat(1, 1));
        assert_eq!(r.hit_children.len(), 2);
        assert_eq!(r.mu_sum, rat(4, 3));
        assert_eq!(r.phi_of_hits, ExtRational::from_int(2));
        assert!(r.passed());
    }

    #[test]
    fn hit_sets() {
        let w = ib_tree_witness(2).unwrap();
        let tree = build_intervals(&w).unwrap();
        assert_eq!(hit_set(&tree, &w, &IntervalSet::unit(), 2).unwrap().len(), 1 + 2 + 6);
        assert!(hit_set(&tree, &w, &IntervalSet::empty(), 2).unwrap().is_empty());
        let m: IntervalSet = "[0, 1/6)".parse().unwrap();
        assert_eq!(tree.hits_at_level(&m, 2), vec![vec![0, 0]]);
    }

    #[test]
    fn zero_measure_rejected() {
        let w = ib_tree_witness(2).unwrap();
        let tree = build_intervals(&w).unwrap();
        assert_eq!(
            violation_check(&tree, &w, &IntervalSet::empty(), 0),
            Err(Error::ZeroMeasureM)
        );
    }
}
