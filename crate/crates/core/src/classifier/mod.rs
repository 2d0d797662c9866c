pub mod canon;
pub mod engine;
pub mod expr;
pub mod golden;

pub use canon::{canonicalize_countably_generated, Canonical, Cell, CgCase, GeneratorTail};
pub use engine::{
    classify, classify_with, parse_conclusion, replay, Attr, AttributeRecord, AttributeValue,
    Classification, Derivation, RuleId, RuleSet,
};
pub use expr::{ExprSeq, IdealExpr};
pub use golden::{example_verdicts, GoldenRow, GOLDEN};
