//! Curated test suites for the three constructions and the folklore projections.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground::space::mazur_offset;
use crate::ground::{PeriodicWord, SetDescription as D, Space};
use crate::ideals::{Budget, IdealOracle};

use super::ibedfin::{ib_to_edfin_family, DEFAULT_SLACK};
use super::mazur::mazur_to_delta;
use super::solecki::solecki_to_ib;
use super::witness::{
    constant_map, first_projection, second_projection, verify_rk, ReductionReport, WitnessMap,
    WitnessSample,
};

pub const CONSTRUCTIONS: [&str; 6] = [
    "solecki-ib",
    "mazur-edfin",
    "ib-edfin",
    "first-projection",
    "second-projection",
    "constant",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub construction: String,
    pub level: u32,
    pub budget: Budget,
    pub witness: WitnessSample,
    pub report: ReductionReport,
}

fn branch(prefix: &[u8], period: &[u8]) -> D {
    D::Branch(PeriodicWord::new(prefix.to_vec(), period.to_vec()).expect("valid word"))
}

fn branch_tests() -> Vec<D> {
    vec![
        branch(&[], &[0]),
        branch(&[], &[1]),
        branch(&[], &[0, 1]),
        branch(&[1], &[0]),
        D::union(branch(&[], &[0]), branch(&[], &[1])),
    ]
}

/// Default level of each construction.
pub fn default_level(construction: &str) -> u32 {
    match construction {
        "mazur-edfin" => 4,
        _ => 3,
    }
}

/// The witness, both oracles, tests and budget of a named construction.
pub fn construction(name: &str, level: u32) -> Result<(WitnessMap, IdealOracle, IdealOracle, Vec<D>, Budget)> {
    let base = Budget::default();
    Ok(match name {
        "solecki-ib" => {
            let space = Space::ClopenHalf(level);
            space.validate()?;
            let size = space.size().expect("finite");
            let f = WitnessMap::new("solecki-to-ib", space, Space::BinarySeq, move |c| {
                solecki_to_ib(level, c).ok()
            });
            let mut tests = branch_tests();
            tests.extend([D::finite([0, 1, 2]), D::Section(1), D::Full]);
            let budget = Budget {
                prefix: size,
                level: 4,
                ..base
            };
            (f, IdealOracle::ib(), IdealOracle::solecki(level)?, tests, budget)
        }
        "mazur-edfin" => {
            if !(3..=5).contains(&level) {
                return Err(Error::InvalidArgument(format!(
                    "mazur-edfin uses 3 to 5 sections, not {level}"
                )));
            }
            let prefix = mazur_offset(level as u64 + 1).expect("small offset");
            let tests = vec![
                D::Column(1),
                D::Column(2),
                D::Row(0),
                D::union(D::Row(0), D::Row(1)),
                D::finite([0, 4, 7]),
                D::Full,
                D::complement(D::Row(0)),
            ];
            let budget = Budget {
                prefix,
                level: level as u64 - 1,
                ..base
            };
            (mazur_to_delta(), IdealOracle::edfin(), IdealOracle::mazur(), tests, budget)
        }
        "ib-edfin" => {
            if !(1..=4).contains(&level) {
                return Err(Error::InvalidArgument(format!(
                    "ib-edfin uses words up to length 1 to 4, not {level}"
                )));
            }
            let count = (1usize << (level + 1)) - 1;
            let fam = ib_to_edfin_family(count, 64, DEFAULT_SLACK)?;
            let mut tests = branch_tests();
            tests.extend([D::Section(level as u64 - 1), D::Full]);
            let budget = Budget {
                level: (1u64 << level) - 1,
                ..base
            };
            (fam.witness(), IdealOracle::ib(), IdealOracle::edfin(), tests, budget)
        }
        "first-projection" => {
            let tests = vec![D::finite([0, 3]), D::Threshold(4), D::evens(), D::Full];
            let j = IdealOracle::col_ext(IdealOracle::fin());
            (first_projection(), IdealOracle::fin(), j, tests, base)
        }
        "second-projection" => {
            let tests = vec![D::finite([0]), D::finite([1, 2]), D::evens(), D::Full];
            let j = IdealOracle::fubini(IdealOracle::fin(), IdealOracle::fin());
            (second_projection(), IdealOracle::fin(), j, tests, base)
        }
        "constant" => {
            let tests = vec![D::finite([0]), D::complement(D::finite([0])), D::Full];
            (constant_map(0), IdealOracle::fin(), IdealOracle::fin(), tests, base)
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown construction {other}; expected one of {}",
                CONSTRUCTIONS.join(", ")
            )))
        }
    })
}

pub fn run_construction(name: &str, level: u32) -> Result<RunReport> {
    let (f, i, j, tests, budget) = construction(name, level)?;
    let report = verify_rk(&f, &i, &j, &tests, budget)?;
    Ok(RunReport {
        construction: name.to_string(),
        level,
        budget,
        witness: f.sample(16)?,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructions_are_consistent() {
        for name in CONSTRUCTIONS {
            let r = run_construction(name, default_level(name)).unwrap();
            let disagree = r
                .report
                .checks
                .iter()
                .filter(|c| c.flag.as_deref() == Some("empirical direction disagrees"))
                .count();
            assert_eq!(disagree, 0, "{name}: {:?}", r.report.checks);
            assert_eq!(r.report.consistent, name != "constant", "{name}");
        }
    }
}
