//! Ideal expressions: syntax tree, parser and printer.
//!
//! ```text
//! expr := atom | expr "(+)" expr | expr "(x)" expr | "FullPad(" expr ")" | "ColExt(" expr ")"
//!       | "RowExt(" expr ")" | "Sum(" seq ")" | "SumOver(" expr ";" seq ")"
//!       | "Meet(" expr {"," expr} ")" | "Restrict(" expr "," descr ")" | "(" expr ")"
//! atom := Fin | FinPow n | FinSets | Trivial | Summable rule | Density | Ib | EDFin | Mazur | Solecki
//!       | BI | CEI | JFam descr
//! seq  := expr "…" | expr {"," expr} ";" expr "…"
//! ```
//!
//! `(x)` binds tighter than `(+)`; both associate to the left. `...` may replace `…`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground::{SetDescription as D, Space};
use crate::ideals::{IdealOracle, OracleSeq};
use crate::submeasures::WeightRule;

/// Eventually-constant sequence of expressions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExprSeq {
    pub prefix: Vec<IdealExpr>,
    pub tail: Box<IdealExpr>,
}

impl ExprSeq {
    pub fn constant(tail: IdealExpr) -> Self {
        ExprSeq {
            prefix: Vec::new(),
            tail: Box::new(tail),
        }
    }

    pub fn at(&self, n: usize) -> &IdealExpr {
        self.prefix.get(n).unwrap_or(&self.tail)
    }

    /// Prefix entries followed by the tail.
    pub fn members(&self) -> impl Iterator<Item = &IdealExpr> {
        self.prefix.iter().chain(std::iter::once(self.tail.as_ref()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IdealExpr {
    Fin,
    FinPow(u32),
    /// `[ω²]^{<ω}`, Fin on the plane.
    FinSets,
    Summable(WeightRule),
    Density,
    Ib,
    EdFin,
    Mazur,
    Solecki,
    Bi,
    Cei,
    JFam(D),
    /// `{∅}` on ω, the left factor of a row extension.
    Trivial,
    DirectSum(Box<IdealExpr>, Box<IdealExpr>),
    FullPad(Box<IdealExpr>),
    Fubini(Box<IdealExpr>, Box<IdealExpr>),
    ColExt(Box<IdealExpr>),
    RowExt(Box<IdealExpr>),
    IndexedSum(ExprSeq),
    IndexedSumOver(Box<IdealExpr>, ExprSeq),
    Meet(Vec<IdealExpr>),
    Restrict(Box<IdealExpr>, D),
}

fn bx(e: IdealExpr) -> Box<IdealExpr> {
    Box::new(e)
}

impl IdealExpr {
    pub fn fubini(a: IdealExpr, b: IdealExpr) -> Self {
        IdealExpr::Fubini(bx(a), bx(b))
    }

    pub fn direct_sum(a: IdealExpr, b: IdealExpr) -> Self {
        IdealExpr::DirectSum(bx(a), bx(b))
    }

    pub fn full_pad(e: IdealExpr) -> Self {
        IdealExpr::FullPad(bx(e))
    }

    pub fn col_ext(e: IdealExpr) -> Self {
        IdealExpr::ColExt(bx(e))
    }

    pub fn row_ext(e: IdealExpr) -> Self {
        IdealExpr::RowExt(bx(e))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Parser { text, pos: 0 };
        p.skip_ws();
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.error("trailing input"));
        }
        Ok(e)
    }

    pub fn is_atom(&self) -> bool {
        self.children().is_empty()
    }

    /// Direct subexpressions.
    pub fn children(&self) -> Vec<&IdealExpr> {
        use IdealExpr::*;
        match self {
            DirectSum(a, b) | Fubini(a, b) => vec![a, b],
            FullPad(a) | ColExt(a) | RowExt(a) | Restrict(a, _) => vec![a],
            IndexedSum(s) => s.members().collect(),
            IndexedSumOver(j, s) => std::iter::once(j.as_ref()).chain(s.members()).collect(),
            Meet(list) => list.iter().collect(),
            _ => Vec::new(),
        }
    }

    /// Definitional unfolding of the abbreviations `FinPow`, `BI` and `CEI`.
    pub fn unfold(&self) -> Option<IdealExpr> {
        use IdealExpr::*;
        match self {
            FinPow(1) => Some(Fin),
            FinPow(n) if *n > 1 => Some(IdealExpr::fubini(Fin, FinPow(n - 1))),
            Bi => Some(Meet(vec![
                IdealExpr::row_ext(FinPow(2)),
                IdealExpr::fubini(Fin, FinSets),
            ])),
            Cei => Some(Meet(vec![
                IdealExpr::row_ext(FinPow(3)),
                IdealExpr::col_ext(FinPow(3)),
            ])),
            _ => None,
        }
    }

    /// Nesting depth; atoms have depth 1.
    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Membership oracle of the expression.
    pub fn oracle(&self) -> Result<IdealOracle> {
        use IdealExpr::*;
        Ok(match self {
            Fin => IdealOracle::fin(),
            FinPow(0) => return Err(Error::InvalidArgument("FinPow needs n ≥ 1".into())),
            FinPow(n) => IdealOracle::fin_pow(*n as usize),
            FinSets => IdealOracle::fin_on(Space::omega_squared()),
            Summable(rule) => IdealOracle::summable(rule.clone()),
            Density => IdealOracle::density(),
            Ib => IdealOracle::ib(),
            EdFin => IdealOracle::edfin(),
            Mazur => IdealOracle::mazur(),
            Solecki => IdealOracle::solecki(SOLECKI_RESOLUTION)?,
            Bi => IdealOracle::meet(vec![
                IdealOracle::row_ext(IdealOracle::fin_pow(2)),
                IdealOracle::fubini(IdealOracle::fin(), IdealOracle::fin_on(Space::omega_squared())),
            ])?,
            Cei => {
                return Err(Error::InvalidArgument(
                    "CEI meets ideals on ω×ω³ and ω³×ω; no oracle identifies the two grounds".into(),
                ))
            }
            JFam(a) => IdealOracle::jfamily(a.clone())?,
            Trivial => IdealOracle::trivial(Space::Omega),
            DirectSum(a, b) => IdealOracle::direct_sum(a.oracle()?, b.oracle()?)?,
            FullPad(a) => IdealOracle::full_pad(a.oracle()?)?,
            Fubini(a, b) => IdealOracle::fubini(a.oracle()?, b.oracle()?),
            ColExt(a) => IdealOracle::col_ext(a.oracle()?),
            RowExt(a) => IdealOracle::row_ext(a.oracle()?),
            IndexedSum(s) => IdealOracle::indexed_sum(seq_oracle(s)?)?,
            IndexedSumOver(j, s) => IdealOracle::indexed_sum_over(j.oracle()?, seq_oracle(s)?)?,
            Meet(list) => IdealOracle::meet(list.iter().map(|e| e.oracle()).collect::<Result<_>>()?)?,
            Restrict(a, d) => IdealOracle::restrict(a.oracle()?, d.clone())?,
        })
    }
}

/// Resolution of the clopen stand-in used for `Solecki`.
pub const SOLECKI_RESOLUTION: u32 = 3;

fn seq_oracle(s: &ExprSeq) -> Result<OracleSeq> {
    Ok(OracleSeq::EventuallyConstant {
        prefix: s.prefix.iter().map(|e| e.oracle()).collect::<Result<_>>()?,
        tail: Box::new(s.tail.oracle()?),
    })
}

fn operand(e: &IdealExpr) -> String {
    match e {
        IdealExpr::DirectSum(..) | IdealExpr::Fubini(..) => format!("({e})"),
        _ => e.to_string(),
    }
}

fn seq_text(s: &ExprSeq) -> String {
    if s.prefix.is_empty() {
        format!("{}…", s.tail)
    } else {
        let list: Vec<String> = s.prefix.iter().map(|e| e.to_string()).collect();
        format!("{}; {}…", list.join(", "), s.tail)
    }
}

impl fmt::Display for IdealExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use IdealExpr::*;
        match self {
            Fin => f.write_str("Fin"),
            FinPow(n) => write!(f, "FinPow {n}"),
            FinSets => f.write_str("FinSets"),
            Summable(rule) => write!(f, "Summable {rule}"),
            Density => f.write_str("Density"),
            Ib => f.write_str("Ib"),
            EdFin => f.write_str("EDFin"),
            Mazur => f.write_str("Mazur"),
            Solecki => f.write_str("Solecki"),
            Bi => f.write_str("BI"),
            Cei => f.write_str("CEI"),
            JFam(a) => write!(f, "JFam {a}"),
            Trivial => f.write_str("Trivial"),
            DirectSum(a, b) => write!(f, "{} (+) {}", operand(a), operand(b)),
            Fubini(a, b) => write!(f, "{} (x) {}", operand(a), operand(b)),
            FullPad(a) => write!(f, "FullPad({a})"),
            ColExt(a) => write!(f, "ColExt({a})"),
            RowExt(a) => write!(f, "RowExt({a})"),
            IndexedSum(s) => write!(f, "Sum({})", seq_text(s)),
            IndexedSumOver(j, s) => write!(f, "SumOver({j}; {})", seq_text(s)),
            Meet(list) => {
                let parts: Vec<String> = list.iter().map(|e| e.to_string()).collect();
                write!(f, "Meet({})", parts.join(", "))
            }
            Restrict(a, d) => write!(f, "Restrict({a}, {d})"),
        }
    }
}

impl FromStr for IdealExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IdealExpr::parse(s)
    }
}

impl Serialize for IdealExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for IdealExpr {
    fn deserialize<De: serde::Deserializer<'de>>(d: De) -> std::result::Result<Self, De::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = self.rest();
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(&format!("expected {token:?}")))
        }
    }

    fn ellipsis(&mut self) -> bool {
        self.eat("…") || self.eat("...")
    }

    fn expr(&mut self) -> Result<IdealExpr> {
        let mut left = self.term()?;
        while self.eat("(+)") {
            let right = self.term()?;
            left = IdealExpr::direct_sum(left, right);
        }
        Ok(left)
    }

    fn term(&mut self) -> Result<IdealExpr> {
        let mut left = self.primary()?;
        while self.eat("(x)") {
            let right = self.primary()?;
            left = IdealExpr::fubini(left, right);
        }
        Ok(left)
    }

    fn word(&mut self) -> &'a str {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .find(|c: char| !c.is_ascii_alphanumeric())
            .unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    /// A balanced chunk ending before whitespace, `,`, `;`, an ellipsis or an unmatched `)`.
    fn chunk(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let mut depth = 0i32;
        let mut end = rest.len();
        for (i, c) in rest.char_indices() {
            match c {
                '(' | '[' => depth += 1,
                ')' | ']' if depth == 0 => {
                    end = i;
                    break;
                }
                ')' | ']' => depth -= 1,
                ',' | ';' | '.' | '…' if depth == 0 => {
                    end = i;
                    break;
                }
                c if c.is_whitespace() && depth == 0 => {
                    end = i;
                    break;
                }
                _ => {}
            }
        }
        if depth != 0 {
            return Err(self.error("unbalanced brackets"));
        }
        if end == 0 {
            return Err(self.error("expected an argument"));
        }
        self.pos += end;
        Ok(&rest[..end])
    }

    fn descr(&mut self) -> Result<D> {
        self.skip_ws();
        let start = self.pos;
        let rest = self.rest();
        let len = if rest.starts_with('(') {
            let mut depth = 0i32;
            let mut end = None;
            for (i, c) in rest.char_indices() {
                match c {
                    '(' => depth += 1,
                    ')' => {
                        depth -= 1;
                        if depth == 0 {
                            end = Some(i + 1);
                            break;
                        }
                    }
                    _ => {}
                }
            }
            end.ok_or_else(|| self.error("unbalanced description"))?
        } else {
            rest.find(|c: char| !c.is_ascii_alphanumeric())
                .unwrap_or(rest.len())
        };
        self.pos += len;
        rest[..len].parse::<D>().map_err(|e| match e {
            Error::Syntax { position, message } => Error::Syntax {
                position: start + position,
                message,
            },
            other => other,
        })
    }

    fn wrapped(&mut self) -> Result<IdealExpr> {
        self.expect("(")?;
        let e = self.expr()?;
        self.expect(")")?;
        Ok(e)
    }

    fn seq(&mut self) -> Result<ExprSeq> {
        let first = self.expr()?;
        if self.ellipsis() {
            return Ok(ExprSeq::constant(first));
        }
        let mut prefix = vec![first];
        while self.eat(",") {
            prefix.push(self.expr()?);
        }
        self.expect(";")?;
        let tail = self.expr()?;
        if !self.ellipsis() {
            return Err(self.error("expected \"…\" after the tail"));
        }
        Ok(ExprSeq {
            prefix,
            tail: bx(tail),
        })
    }

    fn primary(&mut self) -> Result<IdealExpr> {
        self.skip_ws();
        if self.rest().starts_with('(') {
            return self.wrapped();
        }
        let start = self.pos;
        let name = self.word();
        let e = match name {
            "Fin" => IdealExpr::Fin,
            "FinSets" => IdealExpr::FinSets,
            "Density" => IdealExpr::Density,
            "Ib" => IdealExpr::Ib,
            "EDFin" => IdealExpr::EdFin,
            "Mazur" => IdealExpr::Mazur,
            "Solecki" => IdealExpr::Solecki,
            "Trivial" => IdealExpr::Trivial,
            "BI" => IdealExpr::Bi,
            "CEI" => IdealExpr::Cei,
            "FinPow" => {
                let digits = self.word();
                let n: u32 = digits
                    .parse()
                    .ok()
                    .filter(|n| *n >= 1)
                    .ok_or_else(|| self.error("FinPow needs an integer n ≥ 1"))?;
                IdealExpr::FinPow(n)
            }
            "Summable" => {
                let at = self.pos;
                let text = self.chunk()?;
                let rule = WeightRule::parse(text).map_err(|_| Error::Syntax {
                    position: at,
                    message: format!("bad weight rule {text:?}"),
                })?;
                IdealExpr::Summable(rule)
            }
            "JFam" => IdealExpr::JFam(self.descr()?),
            "FullPad" => IdealExpr::full_pad(self.wrapped()?),
            "ColExt" => IdealExpr::col_ext(self.wrapped()?),
            "RowExt" => IdealExpr::row_ext(self.wrapped()?),
            "Sum" => {
                self.expect("(")?;
                let s = self.seq()?;
                self.expect(")")?;
                IdealExpr::IndexedSum(s)
            }
            "SumOver" => {
                self.expect("(")?;
                let j = self.expr()?;
                self.expect(";")?;
                let s = self.seq()?;
                self.expect(")")?;
                IdealExpr::IndexedSumOver(bx(j), s)
            }
            "Meet" => {
                self.expect("(")?;
                let mut list = vec![self.expr()?];
                while self.eat(",") {
                    list.push(self.expr()?);
                }
                self.expect(")")?;
                IdealExpr::Meet(list)
            }
            "Restrict" => {
                self.expect("(")?;
                let e = self.expr()?;
                self.expect(",")?;
                let d = self.descr()?;
                self.expect(")")?;
                IdealExpr::Restrict(bx(e), d)
            }
            "" => return Err(self.error("expected an ideal expression")),
            other => {
                return Err(Error::Syntax {
                    position: start,
                    message: format!("unknown ideal {other:?}"),
                })
            }
        };
        Ok(e)
    }
}
