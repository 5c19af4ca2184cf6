//! Boolean expressions and multi-output classical functions.
//!
//! Text syntax: variables `x0`, `x1`, ...; constants `0`, `1`, `true`,
//! `false`; operators `!` (not), `&` (and), `^` (xor), `|` (or) in
//! decreasing order of precedence; parentheses.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoolExpr {
    Var(usize),
    Const(bool),
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
    Xor(Box<BoolExpr>, Box<BoolExpr>),
}

impl BoolExpr {
    pub fn var(i: usize) -> Self {
        BoolExpr::Var(i)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: BoolExpr) -> Self {
        BoolExpr::Not(Box::new(e))
    }

    pub fn and(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::Or(Box::new(a), Box::new(b))
    }

    pub fn xor(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::Xor(Box::new(a), Box::new(b))
    }

    /// Panics if a variable index is out of range.
    pub fn eval(&self, inputs: &[bool]) -> bool {
        match self {
            BoolExpr::Var(i) => inputs[*i],
            BoolExpr::Const(b) => *b,
            BoolExpr::Not(e) => !e.eval(inputs),
            BoolExpr::And(a, b) => a.eval(inputs) && b.eval(inputs),
            BoolExpr::Or(a, b) => a.eval(inputs) || b.eval(inputs),
            BoolExpr::Xor(a, b) => a.eval(inputs) ^ b.eval(inputs),
        }
    }

    /// Largest variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            BoolExpr::Var(i) => Some(*i),
            BoolExpr::Const(_) => None,
            BoolExpr::Not(e) => e.max_var(),
            BoolExpr::And(a, b) | BoolExpr::Or(a, b) | BoolExpr::Xor(a, b) => a.max_var().max(b.max_var()),
        }
    }

    pub fn parse(s: &str) -> Result<BoolExpr, ExprParseError> {
        let tokens = tokenize(s)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.or()?;
        match p.tokens.get(p.pos) {
            None => Ok(e),
            Some((col, _)) => Err(ExprParseError { column: *col, message: "unexpected trailing input".into() }),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            BoolExpr::Or(..) => 1,
            BoolExpr::Xor(..) => 2,
            BoolExpr::And(..) => 3,
            BoolExpr::Not(_) => 4,
            BoolExpr::Var(_) | BoolExpr::Const(_) => 5,
        }
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |f: &mut fmt::Formatter<'_>, e: &BoolExpr, min: u8| {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            BoolExpr::Var(i) => write!(f, "x{i}"),
            BoolExpr::Const(b) => f.write_str(if *b { "1" } else { "0" }),
            BoolExpr::Not(e) => {
                f.write_str("!")?;
                sub(f, e, 4)
            }
            BoolExpr::And(a, b) | BoolExpr::Or(a, b) | BoolExpr::Xor(a, b) => {
                let p = self.precedence();
                let op = match self {
                    BoolExpr::And(..) => " & ",
                    BoolExpr::Or(..) => " | ",
                    _ => " ^ ",
                };
                // Left-associative: the right operand needs strictly higher
                // precedence to go without parentheses.
                sub(f, a, p)?;
                f.write_str(op)?;
                sub(f, b, p + 1)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("bad expression at column {column}: {message}")]
pub struct ExprParseError {
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Var(usize),
    Const(bool),
    Not,
    And,
    Or,
    Xor,
    Open,
    Close,
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>, ExprParseError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let col = i + 1;
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '!' => Some(Tok::Not),
            '&' => Some(Tok::And),
            '|' => Some(Tok::Or),
            '^' => Some(Tok::Xor),
            '(' => Some(Tok::Open),
            ')' => Some(Tok::Close),
            '0' => Some(Tok::Const(false)),
            '1' => Some(Tok::Const(true)),
            _ => None,
        };
        if let Some(t) = single {
            out.push((col, t));
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            let tok = match word.as_str() {
                "true" => Tok::Const(true),
                "false" => Tok::Const(false),
                w => match w.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                    Some(n) => Tok::Var(n),
                    None => {
                        return Err(ExprParseError { column: col, message: format!("unknown name {w:?}") })
                    }
                },
            };
            out.push((col, tok));
            continue;
        }
        return Err(ExprParseError { column: col, message: format!("unexpected character {c:?}") });
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn eat(&mut self, t: &Tok) -> bool {
        if self.tokens.get(self.pos).map(|(_, x)| x) == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, message: &str) -> ExprParseError {
        let column = self.tokens.get(self.pos).map_or(usize::MAX, |(c, _)| *c);
        ExprParseError { column, message: message.to_string() }
    }

    fn or(&mut self) -> Result<BoolExpr, ExprParseError> {
        let mut e = self.xor()?;
        while self.eat(&Tok::Or) {
            e = BoolExpr::or(e, self.xor()?);
        }
        Ok(e)
    }

    fn xor(&mut self) -> Result<BoolExpr, ExprParseError> {
        let mut e = self.and()?;
        while self.eat(&Tok::Xor) {
            e = BoolExpr::xor(e, self.and()?);
        }
        Ok(e)
    }

    fn and(&mut self) -> Result<BoolExpr, ExprParseError> {
        let mut e = self.unary()?;
        while self.eat(&Tok::And) {
            e = BoolExpr::and(e, self.unary()?);
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<BoolExpr, ExprParseError> {
        if self.eat(&Tok::Not) {
            return Ok(BoolExpr::not(self.unary()?));
        }
        match self.tokens.get(self.pos).map(|(_, t)| t.clone()) {
            Some(Tok::Var(i)) => {
                self.pos += 1;
                Ok(BoolExpr::Var(i))
            }
            Some(Tok::Const(b)) => {
                self.pos += 1;
                Ok(BoolExpr::Const(b))
            }
            Some(Tok::Open) => {
                self.pos += 1;
                let e = self.or()?;
                if !self.eat(&Tok::Close) {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            _ => Err(self.err("expected a variable, constant, '!' or '('")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("variable x{var} is out of range for arity {arity}")]
pub struct ArityError {
    pub var: usize,
    pub arity: usize,
}

/// A function from `arity` booleans to one boolean per output expression.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalFunction {
    arity: usize,
    outputs: Vec<BoolExpr>,
}

impl ClassicalFunction {
    pub fn new(arity: usize, outputs: Vec<BoolExpr>) -> Result<Self, ArityError> {
        for e in &outputs {
            if let Some(v) = e.max_var().filter(|v| *v >= arity) {
                return Err(ArityError { var: v, arity });
            }
        }
        Ok(ClassicalFunction { arity, outputs })
    }

    /// Parses one expression per output; the arity is the given one or, if
    /// `None`, one more than the largest variable used.
    pub fn parse(exprs: &[&str], arity: Option<usize>) -> Result<Self, ParseFunctionError> {
        let outputs = exprs
            .iter()
            .map(|s| BoolExpr::parse(s))
            .collect::<Result<Vec<_>, _>>()?;
        let arity = arity.unwrap_or_else(|| {
            outputs.iter().filter_map(BoolExpr::max_var).max().map_or(0, |m| m + 1)
        });
        Ok(ClassicalFunction::new(arity, outputs)?)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn outputs(&self) -> &[BoolExpr] {
        &self.outputs
    }

    /// Panics unless `inputs.len() == self.arity()`.
    pub fn eval(&self, inputs: &[bool]) -> Vec<bool> {
        assert_eq!(inputs.len(), self.arity, "classical function arity");
        self.outputs.iter().map(|e| e.eval(inputs)).collect()
    }

    /// The one-bit full adder: `(a, b, carry_in) -> (sum, carry_out)`.
    pub fn adder() -> Self {
        let (a, b, c) = (BoolExpr::var(0), BoolExpr::var(1), BoolExpr::var(2));
        let sum = BoolExpr::xor(BoolExpr::xor(a.clone(), b.clone()), c.clone());
        let carry = BoolExpr::or(
            BoolExpr::or(BoolExpr::and(a.clone(), b.clone()), BoolExpr::and(a, c.clone())),
            BoolExpr::and(b, c),
        );
        ClassicalFunction { arity: 3, outputs: vec![sum, carry] }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseFunctionError {
    #[error(transparent)]
    Syntax(#[from] ExprParseError),
    #[error(transparent)]
    Arity(#[from] ArityError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn precedence() {
        let e = BoolExpr::parse("x0 ^ x1 & !x2 | (x0 & x1)").unwrap();
        let want = BoolExpr::or(
            BoolExpr::xor(BoolExpr::var(0), BoolExpr::and(BoolExpr::var(1), BoolExpr::not(BoolExpr::var(2)))),
            BoolExpr::and(BoolExpr::var(0), BoolExpr::var(1)),
        );
        assert_eq!(e, want);
    }

    #[test]
    fn constants_and_errors() {
        assert_eq!(BoolExpr::parse("true").unwrap(), BoolExpr::Const(true));
        assert_eq!(BoolExpr::parse("!0").unwrap(), BoolExpr::not(BoolExpr::Const(false)));
        assert!(BoolExpr::parse("x0 &").is_err());
        assert!(BoolExpr::parse("y1").is_err());
        assert!(BoolExpr::parse("(x0").is_err());
        assert!(BoolExpr::parse("x0 x1").is_err());
    }

    #[test]
    fn adder_truth_table() {
        let f = ClassicalFunction::adder();
        for i in 0..8u32 {
            let bits: Vec<bool> = (0..3).map(|k| i >> (2 - k) & 1 == 1).collect();
            let n = bits.iter().filter(|b| **b).count();
            assert_eq!(f.eval(&bits), vec![n % 2 == 1, n >= 2]);
        }
    }

    #[test]
    fn arity_is_checked() {
        assert!(ClassicalFunction::new(1, vec![BoolExpr::var(1)]).is_err());
        let f = ClassicalFunction::parse(&["x0 ^ x3"], None).unwrap();
        assert_eq!(f.arity(), 4);
    }

    fn expr() -> impl Strategy<Value = BoolExpr> {
        let leaf = prop_oneof![(0usize..4).prop_map(BoolExpr::Var), any::<bool>().prop_map(BoolExpr::Const)];
        leaf.prop_recursive(5, 40, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(BoolExpr::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| BoolExpr::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| BoolExpr::or(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| BoolExpr::xor(a, b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn display_parse_round_trip(e in expr()) {
            prop_assert_eq!(BoolExpr::parse(&e.to_string()).unwrap(), e);
        }
    }
}
