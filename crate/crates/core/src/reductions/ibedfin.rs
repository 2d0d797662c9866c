//! Finite analogue of the sets `A_n` carrying `I_b` into `ED_fin`.
//!
//! "Infinite" in the three conditions is replaced by "at least `q` points". Points below the
//! family size `N` are never used, so `A_n ∖ n = A_n` and `(x, n)` always lies in Δ.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground::{decode_binseq, encode_binseq, Point, Space};
use crate::ideals::Tri;

use super::witness::WitnessMap;

pub const DEFAULT_SLACK: usize = 2;
const UNIVERSE_LIMIT: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IbEdfinAudit {
    pub leftover_splits: bool,
    pub chains_disjoint: bool,
    pub cells_split: bool,
    /// Every point lies in sets indexed by an antichain, so a branch meets each Δ-column at most once.
    pub columns_single: bool,
    /// Smallest side of any required split.
    pub min_split: usize,
    pub cells_checked: usize,
}

impl IbEdfinAudit {
    pub fn passed(&self) -> bool {
        self.leftover_splits && self.chains_disjoint && self.cells_split && self.columns_single
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IbEdfinFamily {
    pub slack: usize,
    pub universe: u64,
    pub words: Vec<Vec<u8>>,
    pub sets: Vec<Vec<u64>>,
    pub audit: IbEdfinAudit,
}

/// `k < n` with `s_k ⊆ s_n`, as a bitmask.
fn prefixes_before(words: &[Vec<u8>], n: usize) -> u64 {
    (0..n)
        .filter(|&k| words[n].starts_with(&words[k]))
        .fold(0, |m, k| m | 1 << k)
}

struct Planner {
    count: usize,
    slack: usize,
    pre: Vec<u64>,
    memo: HashMap<(u64, usize), usize>,
}

impl Planner {
    fn splits(&self, t: u64, n: usize) -> bool {
        t & self.pre[n] == 0
    }

    /// Least size of a cell of type `t` at stage `n` that survives all later splits.
    fn need(&mut self, t: u64, n: usize) -> usize {
        if n == self.count {
            return 0;
        }
        if let Some(&v) = self.memo.get(&(t, n)) {
            return v;
        }
        let v = if self.splits(t, n) {
            let inside = self.need(t | 1 << n, n + 1).max(self.slack);
            let outside = self.need(t, n + 1).max(self.slack);
            inside + outside
        } else {
            self.need(t, n + 1)
        };
        self.memo.insert((t, n), v);
        v
    }
}

fn allocate(planner: &mut Planner, universe: u64) -> Result<Vec<Vec<u64>>> {
    let n_sets = planner.count;
    let mut cells: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    cells.insert(0, (n_sets as u64..universe).collect());
    let mut sets = Vec::with_capacity(n_sets);
    for n in 0..n_sets {
        let mut a_n = Vec::new();
        let mut next: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for (t, pts) in cells {
            if !planner.splits(t, n) {
                next.entry(t).or_default().extend(pts);
                continue;
            }
            let inside = planner.need(t | 1 << n, n + 1).max(planner.slack);
            let outside = planner.need(t, n + 1).max(planner.slack);
            if pts.len() < inside + outside {
                return Err(Error::UniverseExhausted(universe));
            }
            let take = inside + (pts.len() - inside - outside) / 2;
            a_n.extend_from_slice(&pts[..take]);
            next.entry(t | 1 << n).or_default().extend_from_slice(&pts[..take]);
            next.entry(t).or_default().extend_from_slice(&pts[take..]);
        }
        a_n.sort_unstable();
        sets.push(a_n);
        cells = next;
    }
    Ok(sets)
}

fn audit(words: &[Vec<u8>], sets: &[Vec<u64>], universe: u64, q: usize) -> IbEdfinAudit {
    let n_sets = sets.len();
    let pre: Vec<u64> = (0..n_sets).map(|n| prefixes_before(words, n)).collect();
    let lookup: Vec<std::collections::BTreeSet<u64>> =
        sets.iter().map(|s| s.iter().copied().collect()).collect();
    let points: Vec<u64> = (n_sets as u64..universe).collect();
    let type_at = |x: u64, n: usize| (0..n).filter(|&k| lookup[k].contains(&x)).fold(0u64, |m, k| m | 1 << k);
    let is_antichain = |t: u64| {
        (0..n_sets).all(|a| t >> a & 1 == 0 || (0..n_sets).all(|b| a == b || t >> b & 1 == 0 || pre[b] >> a & 1 == 0))
    };
    let mut report = IbEdfinAudit {
        leftover_splits: true,
        chains_disjoint: true,
        cells_split: true,
        columns_single: true,
        min_split: usize::MAX,
        cells_checked: 0,
    };
    for n in 0..n_sets {
        let mut groups: BTreeMap<u64, (usize, usize)> = BTreeMap::new();
        for &x in &points {
            let e = groups.entry(type_at(x, n)).or_default();
            if lookup[n].contains(&x) {
                e.0 += 1;
            } else {
                e.1 += 1;
            }
        }
        for (t, (inside, outside)) in groups {
            if t & pre[n] != 0 {
                if inside > 0 {
                    report.chains_disjoint = false;
                }
                continue;
            }
            if !is_antichain(t) {
                continue;
            }
            report.cells_checked += 1;
            report.min_split = report.min_split.min(inside.min(outside));
            if inside < q || outside < q {
                if t == 0 {
                    report.leftover_splits = false;
                } else {
                    report.cells_split = false;
                }
            }
        }
    }
    report.columns_single = points.iter().all(|&x| is_antichain(type_at(x, n_sets)));
    if report.min_split == usize::MAX {
        report.min_split = 0;
    }
    report
}

/// Build `A_0, …, A_{N-1}` inside `[N, M)`, doubling `M` until the plan fits.
pub fn ib_to_edfin_family(count: usize, universe: u64, slack: usize) -> Result<IbEdfinFamily> {
    if count == 0 || count > 63 {
        return Err(Error::InvalidArgument(format!("family size {count} outside 1..=63")));
    }
    if slack == 0 {
        return Err(Error::InvalidArgument("slack must be positive".into()));
    }
    let words: Vec<Vec<u8>> = (0..count as u64).map(decode_binseq).collect();
    let mut planner = Planner {
        count,
        slack,
        pre: (0..count).map(|n| prefixes_before(&words, n)).collect(),
        memo: HashMap::new(),
    };
    let mut m = universe.max(count as u64 + 1);
    let sets = loop {
        match allocate(&mut planner, m) {
            Ok(sets) => break sets,
            Err(Error::UniverseExhausted(_)) if m < UNIVERSE_LIMIT => m = (m * 2).min(UNIVERSE_LIMIT),
            Err(e) => return Err(e),
        }
    };
    let audit = audit(&words, &sets, m, slack);
    Ok(IbEdfinFamily {
        slack,
        universe: m,
        words,
        sets,
        audit,
    })
}

impl IbEdfinFamily {
    /// Δ-codes of `(x, n)` for `x ∈ A_n`, sorted.
    pub fn domain(&self) -> Vec<u64> {
        let mut out: Vec<u64> = self
            .sets
            .iter()
            .enumerate()
            .flat_map(|(n, a)| {
                a.iter()
                    .map(move |&x| Space::Delta.encode(&Point::Tri(x, n as u64)).expect("x ≥ n"))
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// `f[(A_n ∖ n) × {n}] = {s_n}`.
    pub fn witness(&self) -> WitnessMap {
        let words: Vec<u64> = self.words.iter().map(|w| encode_binseq(w)).collect();
        WitnessMap::new("ib-to-edfin", Space::Delta, Space::BinarySeq, move |c| {
            match Space::Delta.decode(c).ok()? {
                Point::Tri(_, n) => words.get(n as usize).copied(),
                _ => None,
            }
        })
        .with_domain(self.domain())
        .with_finite_to_one(Tri::No)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_sets_are_disjoint() {
        let fam = ib_to_edfin_family(2, 8, 2).unwrap();
        assert!(fam.sets[0].iter().all(|x| !fam.sets[1].contains(x)));
        assert!(fam.audit.passed());
    }

    #[test]
    fn four_sets_audit() {
        let fam = ib_to_edfin_family(4, 8, 2).unwrap();
        assert!(fam.audit.passed(), "{:?}", fam.audit);
        assert!(fam.audit.min_split >= 2);
    }

    #[test]
    fn universe_grows() {
        let fam = ib_to_edfin_family(7, 8, 2).unwrap();
        assert!(fam.universe > 8);
        assert!(fam.audit.passed());
    }
}
