//! Fixed list of ideals with known Egorov status.

use serde::{Deserialize, Serialize};

use crate::ideals::Tri;

use super::engine::{classify, replay, Derivation};
use super::expr::IdealExpr;

/// `(name, expression, expected)`
pub const GOLDEN: [(&str, &str, Tri); 15] = [
    ("Fin", "Fin", Tri::Yes),
    ("Fin ⊕ P(ω)", "FullPad(Fin)", Tri::Yes),
    ("Fin ⊗ {∅}", "ColExt(Fin)", Tri::Yes),
    ("{∅} ⊗ Fin", "RowExt(Fin)", Tri::Yes),
    ("Fin²", "FinPow 2", Tri::Yes),
    ("Fin³", "FinPow 3", Tri::Yes),
    ("Fin⁴", "FinPow 4", Tri::Yes),
    ("BI", "BI", Tri::Yes),
    ("CEI", "CEI", Tri::Yes),
    ("summable 1/(n+1)", "Summable 1/(n+1)", Tri::No),
    ("I_d", "Density", Tri::No),
    ("I_b", "Ib", Tri::No),
    ("ED_Fin", "EDFin", Tri::No),
    ("M", "Mazur", Tri::No),
    ("S", "Solecki", Tri::No),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenRow {
    pub name: String,
    pub expr: String,
    pub expected: Tri,
    pub derived: Tri,
    pub rule: String,
    pub replayed: bool,
    pub derivation: Derivation,
}

impl GoldenRow {
    pub fn passed(&self) -> bool {
        self.expected == self.derived && self.replayed
    }
}

pub fn example_verdicts() -> Vec<GoldenRow> {
    GOLDEN
        .iter()
        .map(|(name, text, expected)| {
            let e = IdealExpr::parse(text).expect("golden expressions parse");
            let c = classify(&e);
            GoldenRow {
                name: name.to_string(),
                expr: e.to_string(),
                expected: *expected,
                derived: c.attributes.egorov.value,
                rule: c.derivation.rule.clone(),
                replayed: replay(&c.derivation).is_ok() && c.conflicts.is_empty(),
                derivation: c.derivation,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_table() {
        let rows = example_verdicts();
        for r in &rows {
            assert!(r.passed(), "{} derived {} by {}", r.name, r.derived, r.rule);
        }
        let by = |n: &str| rows.iter().find(|r| r.name == n).unwrap();
        assert_eq!(by("BI").rule, "unfold");
        assert_eq!(by("BI").derivation.premises[0].rule, "R8");
        assert!(by("CEI").derivation.rules().contains("R6"));
        assert!(by("CEI").derivation.rules().contains("R10"));
        let s = by("S").derivation.clone();
        assert_eq!(s.rule, "R11");
        assert_eq!(s.premises[0].rule, "R2");
    }
}
