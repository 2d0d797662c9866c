//! Ideals on countable grounds, with membership oracles and ideal combinators.

pub mod oracle;
pub mod verdict;

pub use oracle::{Attributes, IdealOracle, OracleKind, OracleSeq, Tri};
pub use verdict::{Budget, Certificate, Step, Verdict};
