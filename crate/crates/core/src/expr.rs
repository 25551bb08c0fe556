//! Symbolic subsets of N and their text grammar.
//!
//! ```text
//! expr := "N" | "P" | "empty" | "factorials"
//!       | "{" nat ("," nat)* "}"
//!       | "mult(" nat ")" | "level(" nat ")" | "primesIdx(" nat "," nat ")"
//!       | "pow(" expr "," nat ")" | "prodset(" expr ("," expr)* ")"
//!       | "comp(" expr ")" | "union(" expr "," expr ")" | "inter(" expr "," expr ")"
//!       | "up(" expr ")" | "down(" expr ")" | "quot(" expr "," nat ")" | "scale(" expr "," nat ")"
//! ```
//!
//! Whitespace between tokens is ignored. [`SetExpr`]'s `Display` emits the
//! canonical form (no whitespace, literal sets sorted), which parses back to
//! an identical tree.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SetExpr {
    /// All of N.
    N,
    Empty,
    /// The primes.
    P,
    Lit(BTreeSet<u64>),
    /// nN, the multiples of n.
    Mult(u64),
    /// Numbers with exactly n prime factors counted with multiplicity.
    Level(u32),
    /// `{i-th prime : i ≡ r (mod m)}`, 1-based, `1 <= r <= m`.
    PrimesIdx {
        r: u64,
        m: u64,
    },
    /// `{n! : n ∈ N}`.
    Factorials,
    /// `{x^n : x ∈ E}`.
    Pow(Box<SetExpr>, u32),
    /// `{x_1 ⋯ x_k : x_i ∈ E_i, pairwise distinct}`.
    ProdSet(Vec<SetExpr>),
    Comp(Box<SetExpr>),
    Union(Box<SetExpr>, Box<SetExpr>),
    Inter(Box<SetExpr>, Box<SetExpr>),
    /// Upward closure under divisibility.
    Up(Box<SetExpr>),
    /// Downward closure under divisibility.
    Down(Box<SetExpr>),
    /// `E/n = {m : mn ∈ E}`.
    Quot(Box<SetExpr>, u64),
    /// `nE = {ne : e ∈ E}`.
    Scale(Box<SetExpr>, u64),
}

impl SetExpr {
    pub fn lit<I: IntoIterator<Item = u64>>(items: I) -> Self {
        SetExpr::Lit(items.into_iter().collect())
    }

    pub fn primes_idx(r: u64, m: u64) -> Self {
        SetExpr::PrimesIdx { r, m }
    }

    pub fn pow(e: SetExpr, n: u32) -> Self {
        SetExpr::Pow(Box::new(e), n)
    }

    pub fn comp(e: SetExpr) -> Self {
        SetExpr::Comp(Box::new(e))
    }

    pub fn union(a: SetExpr, b: SetExpr) -> Self {
        SetExpr::Union(Box::new(a), Box::new(b))
    }

    pub fn inter(a: SetExpr, b: SetExpr) -> Self {
        SetExpr::Inter(Box::new(a), Box::new(b))
    }

    pub fn up(e: SetExpr) -> Self {
        SetExpr::Up(Box::new(e))
    }

    pub fn down(e: SetExpr) -> Self {
        SetExpr::Down(Box::new(e))
    }

    pub fn quot(e: SetExpr, n: u64) -> Self {
        SetExpr::Quot(Box::new(e), n)
    }

    pub fn scale(e: SetExpr, n: u64) -> Self {
        SetExpr::Scale(Box::new(e), n)
    }

    /// Left fold of `Inter` over a non-empty list.
    pub fn inter_all(items: &[SetExpr]) -> Option<SetExpr> {
        let (first, rest) = items.split_first()?;
        Some(
            rest.iter()
                .fold(first.clone(), |acc, e| SetExpr::inter(acc, e.clone())),
        )
    }

    /// Children in syntactic order.
    pub fn children(&self) -> Vec<&SetExpr> {
        use SetExpr::*;
        match self {
            N | Empty | P | Lit(_) | Mult(_) | Level(_) | PrimesIdx { .. } | Factorials => vec![],
            Pow(e, _) | Comp(e) | Up(e) | Down(e) | Quot(e, _) | Scale(e, _) => vec![e],
            ProdSet(args) => args.iter().collect(),
            Union(a, b) | Inter(a, b) => vec![a, b],
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self
            .children()
            .iter()
            .map(|c| c.node_count())
            .sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    pub fn contains_down(&self) -> bool {
        matches!(self, SetExpr::Down(_)) || self.children().iter().any(|c| c.contains_down())
    }

    /// Checks every node's parameters.
    pub fn validate(&self) -> Result<()> {
        use SetExpr::*;
        match self {
            Lit(s) if s.contains(&0) => {
                return Err(Error::ParamOutOfRange(
                    "literal sets hold naturals >= 1".into(),
                ))
            }
            Mult(0) => return Err(Error::ParamOutOfRange("mult(n) needs n >= 1".into())),
            Level(0) => return Err(Error::ParamOutOfRange("level(n) needs n >= 1".into())),
            PrimesIdx { r, m } if *m == 0 || *r == 0 || r > m => {
                return Err(Error::ParamOutOfRange(format!(
                    "primesIdx({r},{m}) needs 1 <= r <= m"
                )))
            }
            Pow(_, 0) => return Err(Error::ParamOutOfRange("pow(E,n) needs n >= 1".into())),
            ProdSet(args) if args.is_empty() => {
                return Err(Error::ParamOutOfRange(
                    "prodset needs at least one argument".into(),
                ))
            }
            Quot(_, 0) => return Err(Error::ParamOutOfRange("quot(E,n) needs n >= 1".into())),
            Scale(_, 0) => return Err(Error::ParamOutOfRange("scale(E,n) needs n >= 1".into())),
            _ => {}
        }
        self.children().into_iter().try_for_each(SetExpr::validate)
    }

    pub fn parse(text: &str) -> Result<SetExpr> {
        let mut p = Parser { src: text, pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.error("trailing input"));
        }
        Ok(e)
    }
}

impl FromStr for SetExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SetExpr::parse(s)
    }
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use SetExpr::*;
        match self {
            N => write!(f, "N"),
            Empty => write!(f, "empty"),
            P => write!(f, "P"),
            Factorials => write!(f, "factorials"),
            Lit(s) => {
                write!(f, "{{")?;
                for (i, x) in s.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "}}")
            }
            Mult(n) => write!(f, "mult({n})"),
            Level(n) => write!(f, "level({n})"),
            PrimesIdx { r, m } => write!(f, "primesIdx({r},{m})"),
            Pow(e, n) => write!(f, "pow({e},{n})"),
            ProdSet(args) => {
                write!(f, "prodset(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            Comp(e) => write!(f, "comp({e})"),
            Union(a, b) => write!(f, "union({a},{b})"),
            Inter(a, b) => write!(f, "inter({a},{b})"),
            Up(e) => write!(f, "up({e})"),
            Down(e) => write!(f, "down({e})"),
            Quot(e, n) => write!(f, "quot({e},{n})"),
            Scale(e, n) => write!(f, "scale({e},{n})"),
        }
    }
}

impl Serialize for SetExpr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some(d) if d == c => {
                self.pos += 1;
                Ok(())
            }
            Some(d) => Err(self.error(&format!("expected '{c}', found '{d}'"))),
            None => Err(self.error(&format!("expected '{c}', found end of input"))),
        }
    }

    fn word(&mut self) -> &str {
        self.skip_ws();
        let start = self.pos;
        let len = self.src[start..]
            .find(|c: char| !c.is_ascii_alphabetic())
            .unwrap_or(self.src.len() - start);
        self.pos += len;
        &self.src[start..start + len]
    }

    fn nat(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        let len = self.src[start..]
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(self.src.len() - start);
        if len == 0 {
            return Err(self.error("expected a natural number"));
        }
        let value = self.src[start..start + len]
            .parse::<u64>()
            .map_err(|_| self.error("number too large"))?;
        if value == 0 {
            return Err(Error::ParamOutOfRange(format!(
                "0 at offset {start} (N starts at 1)"
            )));
        }
        self.pos += len;
        Ok(value)
    }

    fn expr(&mut self) -> Result<SetExpr> {
        match self.peek() {
            None => return Err(self.error("expected an expression, found end of input")),
            Some('{') => return self.literal(),
            _ => {}
        }
        let start = self.pos;
        let name = self.word().to_string();
        let e = match name.as_str() {
            "N" => SetExpr::N,
            "P" => SetExpr::P,
            "empty" => SetExpr::Empty,
            "factorials" => SetExpr::Factorials,
            "mult" => SetExpr::Mult(self.args_nat()?),
            "level" => {
                let n = self.args_nat()?;
                SetExpr::Level(
                    u32::try_from(n)
                        .map_err(|_| Error::ParamOutOfRange(format!("level({n}) is too large")))?,
                )
            }
            "primesIdx" => {
                self.expect('(')?;
                let r = self.nat()?;
                self.expect(',')?;
                let m = self.nat()?;
                self.expect(')')?;
                SetExpr::PrimesIdx { r, m }
            }
            "pow" => {
                let (e, n) = self.args_expr_nat()?;
                let n = u32::try_from(n).map_err(|_| {
                    Error::ParamOutOfRange(format!("pow exponent {n} is too large"))
                })?;
                SetExpr::pow(e, n)
            }
            "prodset" => {
                self.expect('(')?;
                let mut args = vec![self.expr()?];
                while self.peek() == Some(',') {
                    self.pos += 1;
                    args.push(self.expr()?);
                }
                self.expect(')')?;
                SetExpr::ProdSet(args)
            }
            "comp" => SetExpr::comp(self.args_expr()?),
            "up" => SetExpr::up(self.args_expr()?),
            "down" => SetExpr::down(self.args_expr()?),
            "union" => {
                let (a, b) = self.args_two()?;
                SetExpr::union(a, b)
            }
            "inter" => {
                let (a, b) = self.args_two()?;
                SetExpr::inter(a, b)
            }
            "quot" => {
                let (e, n) = self.args_expr_nat()?;
                SetExpr::quot(e, n)
            }
            "scale" => {
                let (e, n) = self.args_expr_nat()?;
                SetExpr::scale(e, n)
            }
            "" => {
                return Err(self.error("expected an expression"));
            }
            other => {
                self.pos = start;
                return Err(self.error(&format!("unknown constructor '{other}'")));
            }
        };
        e.validate()?;
        Ok(e)
    }

    fn literal(&mut self) -> Result<SetExpr> {
        self.expect('{')?;
        let mut items = BTreeSet::new();
        if self.peek() == Some('}') {
            self.pos += 1;
            return Ok(SetExpr::Lit(items));
        }
        items.insert(self.nat()?);
        while self.peek() == Some(',') {
            self.pos += 1;
            items.insert(self.nat()?);
        }
        self.expect('}')?;
        Ok(SetExpr::Lit(items))
    }

    fn args_nat(&mut self) -> Result<u64> {
        self.expect('(')?;
        let n = self.nat()?;
        self.expect(')')?;
        Ok(n)
    }

    fn args_expr(&mut self) -> Result<SetExpr> {
        self.expect('(')?;
        let e = self.expr()?;
        self.expect(')')?;
        Ok(e)
    }

    fn args_two(&mut self) -> Result<(SetExpr, SetExpr)> {
        self.expect('(')?;
        let a = self.expr()?;
        self.expect(',')?;
        let b = self.expr()?;
        self.expect(')')?;
        Ok((a, b))
    }

    fn args_expr_nat(&mut self) -> Result<(SetExpr, u64)> {
        self.expect('(')?;
        let e = self.expr()?;
        self.expect(',')?;
        let n = self.nat()?;
        self.expect(')')?;
        Ok((e, n))
    }
}
