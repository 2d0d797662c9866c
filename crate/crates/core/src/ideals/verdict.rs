use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rational::ExtRational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub rule: String,
    pub detail: String,
}

impl Step {
    pub fn new(rule: impl Into<String>, detail: impl Into<String>) -> Self {
        Step {
            rule: rule.into(),
            detail: detail.into(),
        }
    }
}

/// Structural derivation behind a proved verdict.
pub type Certificate = Vec<Step>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    ProvedIn { certificate: Certificate },
    ProvedOut { certificate: Certificate },
    /// The submeasure stays at most `bound` on the first `prefix` codes.
    BoundedUpTo { bound: ExtRational, prefix: u64 },
    /// The submeasure exceeds `level` already on the first `prefix` codes.
    DivergentUpTo { level: u64, prefix: u64 },
    Unknown { reason: String },
}

impl Verdict {
    pub fn proved_in(rule: &str, detail: impl Into<String>) -> Self {
        Verdict::ProvedIn {
            certificate: vec![Step::new(rule, detail)],
        }
    }

    pub fn proved_out(rule: &str, detail: impl Into<String>) -> Self {
        Verdict::ProvedOut {
            certificate: vec![Step::new(rule, detail)],
        }
    }

    pub fn unknown(reason: impl Into<String>) -> Self {
        Verdict::Unknown {
            reason: reason.into(),
        }
    }

    pub fn is_proved_in(&self) -> bool {
        matches!(self, Verdict::ProvedIn { .. })
    }

    pub fn is_proved_out(&self) -> bool {
        matches!(self, Verdict::ProvedOut { .. })
    }

    pub fn is_proved(&self) -> bool {
        self.is_proved_in() || self.is_proved_out()
    }

    /// In-evidence (`Some(true)`), Out-evidence (`Some(false)`) or neither.
    pub fn direction(&self) -> Option<bool> {
        match self {
            Verdict::ProvedIn { .. } | Verdict::BoundedUpTo { .. } => Some(true),
            Verdict::ProvedOut { .. } | Verdict::DivergentUpTo { .. } => Some(false),
            Verdict::Unknown { .. } => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::ProvedIn { .. } => "ProvedIn",
            Verdict::ProvedOut { .. } => "ProvedOut",
            Verdict::BoundedUpTo { .. } => "BoundedUpTo",
            Verdict::DivergentUpTo { .. } => "DivergentUpTo",
            Verdict::Unknown { .. } => "Unknown",
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Verdict::ProvedIn { .. } => 0,
            Verdict::BoundedUpTo { .. } => 1,
            Verdict::Unknown { .. } => 2,
            Verdict::DivergentUpTo { .. } => 3,
            Verdict::ProvedOut { .. } => 4,
        }
    }

    /// Verdict for "both sets are in": the worse of the two, certificates merged on ties.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::ProvedIn { certificate: mut a }, Verdict::ProvedIn { certificate: b }) => {
                a.extend(b);
                Verdict::ProvedIn { certificate: a }
            }
            (Verdict::ProvedOut { certificate: a }, Verdict::ProvedOut { .. }) => {
                Verdict::ProvedOut { certificate: a }
            }
            (
                Verdict::BoundedUpTo { bound: a, prefix: p },
                Verdict::BoundedUpTo { bound: b, prefix: q },
            ) => Verdict::BoundedUpTo {
                bound: a.max(b),
                prefix: p.min(q),
            },
            (a, b) => {
                if b.rank() > a.rank() {
                    b
                } else {
                    a
                }
            }
        }
    }

    pub fn all(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        verdicts
            .into_iter()
            .fold(Verdict::ProvedIn { certificate: vec![] }, Verdict::and)
    }

    /// Prepend a step to a proved verdict's certificate.
    pub fn with_step(self, rule: &str, detail: impl Into<String>) -> Verdict {
        match self {
            Verdict::ProvedIn { mut certificate } => {
                certificate.insert(0, Step::new(rule, detail));
                Verdict::ProvedIn { certificate }
            }
            Verdict::ProvedOut { mut certificate } => {
                certificate.insert(0, Step::new(rule, detail));
                Verdict::ProvedOut { certificate }
            }
            other => other,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::ProvedIn { .. } | Verdict::ProvedOut { .. } => f.write_str(self.name()),
            Verdict::BoundedUpTo { bound, prefix } => write!(f, "BoundedUpTo({bound}, {prefix})"),
            Verdict::DivergentUpTo { level, prefix } => {
                write!(f, "DivergentUpTo({level}, {prefix})")
            }
            Verdict::Unknown { reason } => write!(f, "Unknown({reason})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub prefix: u64,
    pub level: u64,
    pub depth: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            prefix: 1024,
            level: 5,
            depth: 8,
        }
    }
}

impl Budget {
    pub fn deeper(self) -> Option<Budget> {
        (self.depth > 0).then(|| Budget {
            depth: self.depth - 1,
            ..self
        })
    }
}
