//! Textual syntax for set descriptions.
//!
//! ```text
//! empty | full | (finite c ...) | (complement d) | (union d d ...) | (intersection d d ...)
//! (column i) | (row j) | (section n) | (branch PREFIX PERIOD) | (threshold k)
//! (rectangle d d) | (residues m r ...) | (lift n d) | (diagonal d)
//! ```
//!
//! Words in `branch` are written as strings of `0` and `1`; `-` is the empty prefix.

use super::descr::{PeriodicWord, SetDescription as D};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Open(usize),
    Close(usize),
    Atom(usize, String),
}

impl Token {
    fn position(&self) -> usize {
        match self {
            Token::Open(p) | Token::Close(p) | Token::Atom(p, _) => *p,
        }
    }
}

fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut current: Option<(usize, String)> = None;
    for (i, ch) in text.char_indices() {
        if ch == '(' || ch == ')' || ch.is_whitespace() {
            if let Some((p, atom)) = current.take() {
                tokens.push(Token::Atom(p, atom));
            }
            if ch == '(' {
                tokens.push(Token::Open(i));
            } else if ch == ')' {
                tokens.push(Token::Close(i));
            }
        } else {
            current.get_or_insert_with(|| (i, String::new())).1.push(ch);
        }
    }
    if let Some((p, atom)) = current {
        tokens.push(Token::Atom(p, atom));
    }
    tokens
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
}

fn syntax(position: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        position,
        message: message.into(),
    }
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, Token::position)
    }

    fn next(&mut self) -> Result<Token> {
        let t = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| syntax(self.end, "unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn number(&mut self) -> Result<u64> {
        match self.next()? {
            Token::Atom(p, a) => a
                .parse()
                .map_err(|_| syntax(p, format!("expected a natural number, found {a:?}"))),
            t => Err(syntax(t.position(), "expected a natural number")),
        }
    }

    fn word(&mut self, allow_empty: bool) -> Result<Vec<u8>> {
        match self.next()? {
            Token::Atom(_, a) if allow_empty && a == "-" => Ok(Vec::new()),
            Token::Atom(p, a) => a
                .chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(syntax(p, format!("expected a 0-1 word, found {a:?}"))),
                })
                .collect(),
            t => Err(syntax(t.position(), "expected a 0-1 word")),
        }
    }

    fn close(&mut self) -> Result<()> {
        match self.next()? {
            Token::Close(_) => Ok(()),
            t => Err(syntax(t.position(), "expected ')'")),
        }
    }

    fn at_close(&self) -> bool {
        matches!(self.peek(), Some(Token::Close(_)))
    }

    fn numbers_until_close(&mut self) -> Result<Vec<u64>> {
        let mut out = Vec::new();
        while !self.at_close() {
            out.push(self.number()?);
        }
        self.close()?;
        Ok(out)
    }

    fn description(&mut self) -> Result<D> {
        match self.next()? {
            Token::Atom(p, a) => match a.as_str() {
                "empty" => Ok(D::Empty),
                "full" => Ok(D::Full),
                _ => Err(syntax(p, format!("unknown atom {a:?}"))),
            },
            Token::Close(p) => Err(syntax(p, "unexpected ')'")),
            Token::Open(_) => {
                let (p, head) = match self.next()? {
                    Token::Atom(p, a) => (p, a),
                    t => return Err(syntax(t.position(), "expected a constructor name")),
                };
                let d = match head.as_str() {
                    "finite" => D::finite(self.numbers_until_close()?),
                    "complement" => {
                        let d = D::complement(self.description()?);
                        self.close()?;
                        d
                    }
                    "union" | "intersection" => {
                        let first = self.description()?;
                        let mut acc = first;
                        let mut count = 1;
                        while !self.at_close() {
                            let next = self.description()?;
                            acc = if head == "union" {
                                D::union(acc, next)
                            } else {
                                D::intersection(acc, next)
                            };
                            count += 1;
                        }
                        if count < 2 {
                            return Err(syntax(p, format!("{head} needs at least two operands")));
                        }
                        self.close()?;
                        acc
                    }
                    "column" | "row" | "section" | "threshold" => {
                        let n = self.number()?;
                        self.close()?;
                        match head.as_str() {
                            "column" => D::Column(n),
                            "row" => D::Row(n),
                            "section" => D::Section(n),
                            _ => D::Threshold(n),
                        }
                    }
                    "branch" => {
                        let prefix = self.word(true)?;
                        let here = self.here();
                        let period = self.word(false)?;
                        self.close()?;
                        D::Branch(
                            PeriodicWord::new(prefix, period)
                                .map_err(|e| syntax(here, e.to_string()))?,
                        )
                    }
                    "rectangle" => {
                        let a = self.description()?;
                        let b = self.description()?;
                        self.close()?;
                        D::rectangle(a, b)
                    }
                    "residues" => {
                        let here = self.here();
                        let m = self.number()?;
                        if m == 0 {
                            return Err(syntax(here, "modulus must be positive"));
                        }
                        let rs = self.numbers_until_close()?;
                        D::Residues(m, rs)
                    }
                    "lift" => {
                        let n = self.number()?;
                        let d = self.description()?;
                        self.close()?;
                        D::lift(n, d)
                    }
                    "diagonal" => {
                        let d = self.description()?;
                        self.close()?;
                        D::diagonal(d)
                    }
                    _ => return Err(syntax(p, format!("unknown constructor {head:?}"))),
                };
                Ok(d)
            }
        }
    }
}

pub fn parse(text: &str) -> Result<D> {
    let mut parser = Parser {
        tokens: tokenize(text),
        pos: 0,
        end: text.len(),
    };
    let d = parser.description()?;
    if parser.pos != parser.tokens.len() {
        return Err(syntax(parser.here(), "trailing input"));
    }
    Ok(d)
}

fn word_text(w: &[u8]) -> String {
    w.iter().map(|b| if *b == 0 { '0' } else { '1' }).collect()
}

fn join(nums: &[u64]) -> String {
    nums.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}

pub fn print(d: &D) -> String {
    match d {
        D::Empty => "empty".into(),
        D::Full => "full".into(),
        D::Finite(cs) if cs.is_empty() => "(finite)".into(),
        D::Finite(cs) => format!("(finite {})", join(cs)),
        D::Complement(a) => format!("(complement {})", print(a)),
        D::Union(a, b) => format!("(union {} {})", print(a), print(b)),
        D::Intersection(a, b) => format!("(intersection {} {})", print(a), print(b)),
        D::Column(i) => format!("(column {i})"),
        D::Row(j) => format!("(row {j})"),
        D::Section(n) => format!("(section {n})"),
        D::Branch(x) => {
            let prefix = if x.prefix.is_empty() {
                "-".to_string()
            } else {
                word_text(&x.prefix)
            };
            format!("(branch {prefix} {})", word_text(&x.period))
        }
        D::Threshold(k) => format!("(threshold {k})"),
        D::Rectangle(a, b) => format!("(rectangle {} {})", print(a), print(b)),
        D::Residues(m, rs) if rs.is_empty() => format!("(residues {m})"),
        D::Residues(m, rs) => format!("(residues {m} {})", join(rs)),
        D::Lift(n, a) => format!("(lift {n} {})", print(a)),
        D::Diagonal(a) => format!("(diagonal {})", print(a)),
    }
}

impl std::fmt::Display for D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&print(self))
    }
}

impl std::str::FromStr for D {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}
