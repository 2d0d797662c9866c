//! Rudin-Keisler and Rudin-Blass witnesses between ideals, with finite verification.

pub mod ibedfin;
pub mod mazur;
pub mod solecki;
pub mod suites;
pub mod summable;
pub mod witness;

pub use ibedfin::{ib_to_edfin_family, IbEdfinAudit, IbEdfinFamily};
pub use mazur::{mazur_partition, mazur_to_delta};
pub use solecki::{solecki_counterexample, solecki_to_ib, Counterexample};
pub use suites::{run_construction, RunReport};
pub use summable::{summable_diagonalize, Diagonalization, Selection};
pub use witness::{verify_rk, ReductionReport, RkCheck, WitnessMap, WitnessSample};
