//! Scalar arithmetic expressions in the time variable `t`.
//!
//! Grammar, lowest to highest precedence:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?          -- right-associative
//! atom    := number | 'pi' | 't' | func '(' sum ')' | '(' sum ')'
//! func    := 'sin' | 'cos' | 'exp'
//! ```
//!
//! A leading minus applies to the whole power, so `-2^2 == -(2^2) == -4`,
//! while `2^-3` and `2^3^2 == 2^(3^2)` parse as expected.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {expected}")]
    Syntax { offset: usize, expected: &'static str },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } => *offset,
            ParseError::UnknownIdentifier { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero at t = {t}")]
    DivisionByZero { t: f64 },
    #[error("zero raised to a negative power at t = {t}")]
    ZeroToNegativePower { t: f64 },
    #[error("expression value is not finite at t = {t}")]
    NonFinite { t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Func {
    Sin,
    Cos,
    Exp,
}

#[derive(Debug, Clone, PartialEq)]
enum Ast {
    Number(f64),
    Pi,
    Time,
    Neg(Box<Ast>),
    Binary(BinOp, Box<Ast>, Box<Ast>),
    Call(Func, Box<Ast>),
}

/// A parsed, immutable expression. Printing with `{}` yields text that
/// re-parses to an expression with identical values.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Ast,
}

impl Expression {
    pub fn parse(source: &str) -> Result<Self, ParseError> {
        let tokens = lex(source)?;
        let mut parser = Parser { tokens, pos: 0 };
        let root = parser.sum()?;
        parser.expect_eof()?;
        Ok(Expression { root })
    }

    pub fn eval(&self, t: f64) -> Result<f64, EvalError> {
        eval_node(&self.root, t)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(&self.root, f)
    }
}

impl Serialize for Expression {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Expression {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Expression::parse(&text).map_err(serde::de::Error::custom)
    }
}

fn eval_node(node: &Ast, t: f64) -> Result<f64, EvalError> {
    let value = match node {
        Ast::Number(v) => *v,
        Ast::Pi => std::f64::consts::PI,
        Ast::Time => t,
        Ast::Neg(inner) => -eval_node(inner, t)?,
        Ast::Binary(op, lhs, rhs) => {
            let a = eval_node(lhs, t)?;
            let b = eval_node(rhs, t)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == 0.0 {
                        return Err(EvalError::DivisionByZero { t });
                    }
                    a / b
                }
                BinOp::Pow => {
                    if a == 0.0 && b < 0.0 {
                        return Err(EvalError::ZeroToNegativePower { t });
                    }
                    // Integral exponents go through powi so that e.g. t^2
                    // is exact; powf handles the rest.
                    if b.fract() == 0.0 && b.abs() <= i32::MAX as f64 {
                        a.powi(b as i32)
                    } else {
                        a.powf(b)
                    }
                }
            }
        }
        Ast::Call(func, arg) => {
            let x = eval_node(arg, t)?;
            match func {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Exp => x.exp(),
            }
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(EvalError::NonFinite { t })
    }
}

fn write_node(node: &Ast, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match node {
        Ast::Number(v) => write!(f, "{v}"),
        Ast::Pi => write!(f, "pi"),
        Ast::Time => write!(f, "t"),
        Ast::Neg(inner) => {
            write!(f, "(-")?;
            write_node(inner, f)?;
            write!(f, ")")
        }
        Ast::Binary(op, lhs, rhs) => {
            let sym = match op {
                BinOp::Add => "+",
                BinOp::Sub => "-",
                BinOp::Mul => "*",
                BinOp::Div => "/",
                BinOp::Pow => "^",
            };
            write!(f, "(")?;
            write_node(lhs, f)?;
            write!(f, " {sym} ")?;
            write_node(rhs, f)?;
            write!(f, ")")
        }
        Ast::Call(func, arg) => {
            let name = match func {
                Func::Sin => "sin",
                Func::Cos => "cos",
                Func::Exp => "exp",
            };
            write!(f, "{name}(")?;
            write_node(arg, f)?;
            write!(f, ")")
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokKind {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone, PartialEq)]
struct Token {
    kind: TokKind,
    offset: usize,
}

fn lex(source: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let offset = i;
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
            }
            b'+' => {
                tokens.push(Token { kind: TokKind::Plus, offset });
                i += 1;
            }
            b'-' => {
                tokens.push(Token { kind: TokKind::Minus, offset });
                i += 1;
            }
            b'*' => {
                tokens.push(Token { kind: TokKind::Star, offset });
                i += 1;
            }
            b'/' => {
                tokens.push(Token { kind: TokKind::Slash, offset });
                i += 1;
            }
            b'^' => {
                tokens.push(Token { kind: TokKind::Caret, offset });
                i += 1;
            }
            b'(' => {
                tokens.push(Token { kind: TokKind::LParen, offset });
                i += 1;
            }
            b')' => {
                tokens.push(Token { kind: TokKind::RParen, offset });
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &source[start..i];
                let value: f64 = text.parse().map_err(|_| ParseError::Syntax {
                    offset: start,
                    expected: "a number",
                })?;
                tokens.push(Token { kind: TokKind::Num(value), offset: start });
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                tokens.push(Token {
                    kind: TokKind::Ident(source[start..i].to_string()),
                    offset: start,
                });
            }
            _ => {
                return Err(ParseError::Syntax { offset, expected: "a token" });
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&TokKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|t| t.offset)
            .unwrap_or_else(|| self.tokens.last().map(|t| t.offset + 1).unwrap_or(0))
    }

    fn bump(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.pos).cloned();
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    fn eat(&mut self, kind: &TokKind) -> bool {
        if self.peek() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if self.pos == self.tokens.len() {
            Ok(())
        } else {
            Err(ParseError::Syntax { offset: self.offset(), expected: "end of input" })
        }
    }

    fn sum(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.product()?;
        loop {
            if self.eat(&TokKind::Plus) {
                let rhs = self.product()?;
                lhs = Ast::Binary(BinOp::Add, Box::new(lhs), Box::new(rhs));
            } else if self.eat(&TokKind::Minus) {
                let rhs = self.product()?;
                lhs = Ast::Binary(BinOp::Sub, Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(&TokKind::Star) {
                let rhs = self.unary()?;
                lhs = Ast::Binary(BinOp::Mul, Box::new(lhs), Box::new(rhs));
            } else if self.eat(&TokKind::Slash) {
                let rhs = self.unary()?;
                lhs = Ast::Binary(BinOp::Div, Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Ast, ParseError> {
        if self.eat(&TokKind::Minus) {
            Ok(Ast::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Ast, ParseError> {
        let base = self.atom()?;
        if self.eat(&TokKind::Caret) {
            // Right-associative, and the exponent may carry a sign: 2^-3.
            let exponent = self.unary()?;
            Ok(Ast::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Ast, ParseError> {
        let offset = self.offset();
        match self.bump() {
            Some(Token { kind: TokKind::Num(v), .. }) => Ok(Ast::Number(v)),
            Some(Token { kind: TokKind::LParen, .. }) => {
                let inner = self.sum()?;
                if self.eat(&TokKind::RParen) {
                    Ok(inner)
                } else {
                    Err(ParseError::Syntax { offset: self.offset(), expected: "`)`" })
                }
            }
            Some(Token { kind: TokKind::Ident(name), offset }) => match name.as_str() {
                "pi" => Ok(Ast::Pi),
                "t" => Ok(Ast::Time),
                "sin" | "cos" | "exp" => {
                    let func = match name.as_str() {
                        "sin" => Func::Sin,
                        "cos" => Func::Cos,
                        _ => Func::Exp,
                    };
                    if !self.eat(&TokKind::LParen) {
                        return Err(ParseError::Syntax {
                            offset: self.offset(),
                            expected: "`(` after function name",
                        });
                    }
                    let arg = self.sum()?;
                    if !self.eat(&TokKind::RParen) {
                        return Err(ParseError::Syntax {
                            offset: self.offset(),
                            expected: "`)`",
                        });
                    }
                    Ok(Ast::Call(func, Box::new(arg)))
                }
                _ => Err(ParseError::UnknownIdentifier { offset, name }),
            },
            _ => Err(ParseError::Syntax { offset, expected: "an expression" }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(src: &str, t: f64) -> f64 {
        Expression::parse(src).unwrap().eval(t).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("2+3*4", 0.0), 14.0);
        assert_eq!(eval("(2+3)*4", 0.0), 20.0);
        assert_eq!(eval("2^3^2", 0.0), 512.0);
        assert_eq!(eval("-2^2", 0.0), -4.0);
        assert_eq!(eval("2^-3", 0.0), 0.125);
        assert_eq!(eval("6/3/2", 0.0), 1.0);
        assert_eq!(eval("1-2-3", 0.0), -4.0);
    }

    #[test]
    fn constants_and_functions() {
        assert!((eval("sin(pi/2)", 0.0) - 1.0).abs() < 1e-15);
        assert!((eval("cos(0)", 0.0) - 1.0).abs() < 1e-15);
        assert!((eval("exp(1)", 0.0) - std::f64::consts::E).abs() < 1e-15);
        assert_eq!(eval("t^2", 3.0), 9.0);
    }

    #[test]
    fn forcing_expressions_evaluate() {
        // 6*sin(2*pi*t/1.2) peaks at t = 0.3.
        assert!((eval("6*sin(2*pi*t/1.2)", 0.3) - 6.0).abs() < 1e-12);
        assert!(eval("6*sin(2*pi*t/1.2)", 0.0).abs() < 1e-12);
        // 2 + cos(2*pi*t/0.8)^3 at t = 0 is 3.
        assert!((eval("2+cos(2*pi*t/0.8)^3", 0.0) - 3.0).abs() < 1e-12);
        assert!((eval("8*cos(2*pi*t)", 0.5) + 8.0).abs() < 1e-12);
    }

    #[test]
    fn scientific_notation_numbers() {
        assert_eq!(eval("1e-3", 0.0), 1e-3);
        assert_eq!(eval("2.5E2", 0.0), 250.0);
        assert_eq!(eval("1.5e+1", 0.0), 15.0);
        assert_eq!(eval(".5", 0.0), 0.5);
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match Expression::parse("sin(") {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("expected syntax error, got {other:?}"),
        }
        // The second `*` (byte offset 2) is where parsing fails.
        match Expression::parse("2**3") {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("expected syntax error, got {other:?}"),
        }
        match Expression::parse("") {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 0),
            other => panic!("expected syntax error, got {other:?}"),
        }
        match Expression::parse("(1+2") {
            Err(ParseError::Syntax { expected, .. }) => assert_eq!(expected, "`)`"),
            other => panic!("expected syntax error, got {other:?}"),
        }
        match Expression::parse("1 + $") {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier_is_reported() {
        match Expression::parse("2*x") {
            Err(ParseError::UnknownIdentifier { offset, name }) => {
                assert_eq!(offset, 2);
                assert_eq!(name, "x");
            }
            other => panic!("expected unknown identifier, got {other:?}"),
        }
        // Function names without a call are malformed, not variables.
        assert!(Expression::parse("sin + 1").is_err());
    }

    #[test]
    fn evaluation_errors() {
        let div = Expression::parse("1/(t-1)").unwrap();
        assert!(matches!(div.eval(1.0), Err(EvalError::DivisionByZero { .. })));
        assert!(div.eval(2.0).is_ok());

        let pow = Expression::parse("t^-1").unwrap();
        assert!(matches!(pow.eval(0.0), Err(EvalError::ZeroToNegativePower { .. })));

        let huge = Expression::parse("exp(1000)").unwrap();
        assert!(matches!(huge.eval(0.0), Err(EvalError::NonFinite { .. })));
    }

    #[test]
    fn display_round_trips() {
        let corpus = [
            "6*sin(2*pi*t/1.2)",
            "2+cos(2*pi*t/0.8)^3",
            "8*cos(2*pi*t)",
            "-2^2",
            "2^3^2",
            "1-2-3",
            "t^2 - 3*t + 0.5",
            "exp(-t)*sin(t)+pi/4",
            "2^-3",
            "-(t+1)*(t-1)",
        ];
        for src in corpus {
            let first = Expression::parse(src).unwrap();
            let printed = first.to_string();
            let second = Expression::parse(&printed)
                .unwrap_or_else(|e| panic!("reprint of `{src}` -> `{printed}` failed: {e}"));
            for i in 0..=100 {
                let t = -5.0 + 0.1 * i as f64;
                match (first.eval(t), second.eval(t)) {
                    (Ok(a), Ok(b)) => assert!(
                        (a - b).abs() <= 1e-12_f64.max(1e-12 * a.abs()),
                        "mismatch for `{src}` at t = {t}: {a} vs {b}"
                    ),
                    (Err(_), Err(_)) => {}
                    (a, b) => panic!("divergent eval for `{src}` at t = {t}: {a:?} vs {b:?}"),
                }
            }
        }
    }
}
