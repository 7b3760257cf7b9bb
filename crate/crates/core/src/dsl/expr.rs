//! Expression AST, parser and printer for chart coordinate formulas.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' int ('^' int)*)?      // right associative
//! primary := number | ident | ident '(' sum ')' | '(' sum ')'
//! int     := '-'? digits
//! ```
//!
//! Exponents must be integer literals so the jet ring never meets a branch cut.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::jet::{ElemFn, Variable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => " + ",
            BinOp::Sub => " - ",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Variable),
    /// A declared chart constant, carrying its value inline.
    Const { name: String, value: f64 },
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(ElemFn, Box<Expr>),
}

impl Expr {
    pub fn binary(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn call(f: ElemFn, a: Expr) -> Expr {
        Expr::Call(f, Box::new(a))
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, ..) => op.precedence(),
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }

    /// Replaces `u` and `v` by `a·u` and `a·v`.
    pub fn rescale_variables(&self, a: f64) -> Expr {
        match self {
            Expr::Var(_) => Expr::binary(BinOp::Mul, Expr::Num(a), self.clone()),
            Expr::Num(_) | Expr::Const { .. } => self.clone(),
            Expr::Neg(x) => Expr::Neg(Box::new(x.rescale_variables(a))),
            Expr::Binary(op, x, y) => Expr::binary(*op, x.rescale_variables(a), y.rescale_variables(a)),
            Expr::Pow(x, k) => Expr::Pow(Box::new(x.rescale_variables(a)), *k),
            Expr::Call(f, x) => Expr::call(*f, x.rescale_variables(a)),
        }
    }
}

fn fmt_num(x: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{x}")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(x) => fmt_num(*x, f),
            Expr::Var(Variable::U) => f.write_str("u"),
            Expr::Var(Variable::V) => f.write_str("v"),
            Expr::Const { name, .. } => f.write_str(name),
            Expr::Neg(x) => {
                if x.precedence() < 3 {
                    write!(f, "-({x})")
                } else {
                    write!(f, "-{x}")
                }
            }
            Expr::Binary(op, a, b) => {
                let p = op.precedence();
                if a.precedence() < p {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                f.write_str(op.symbol())?;
                if b.precedence() <= p {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            Expr::Pow(a, k) => {
                if a.precedence() < 5 {
                    write!(f, "({a})^{k}")
                } else {
                    write!(f, "{a}^{k}")
                }
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprErrorKind {
    #[error("unexpected character '{0}'")]
    UnexpectedChar(char),
    #[error("unexpected {found}, expected {expected}")]
    UnexpectedToken { found: String, expected: &'static str },
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unknown identifier {0}")]
    UnknownIdentifier(String),
    #[error("{func} takes 1 argument, got {got}")]
    WrongArity { func: String, got: usize },
    #[error("exponent must be an integer literal")]
    NonIntegerExponent,
    #[error("malformed number '{0}'")]
    BadNumber(String),
}

/// Parse failure with a 1-based character position.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} at position {position}")]
pub struct ExprError {
    pub kind: ExprErrorKind,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64, String),
    Ident(String),
    Op(char),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(_, s) => format!("number {s}"),
            Tok::Ident(s) => format!("identifier {s}"),
            Tok::Op(c) => format!("'{c}'"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let save = i;
                i += 1;
                if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                    i += 1;
                }
                if i < chars.len() && chars[i].is_ascii_digit() {
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                } else {
                    i = save;
                }
            }
            let s: String = chars[start..i].iter().collect();
            let x: f64 = s.parse().map_err(|_| ExprError {
                kind: ExprErrorKind::BadNumber(s.clone()),
                position: pos,
            })?;
            out.push((Tok::Num(x, s), pos));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
        } else if "+-*/^(),".contains(c) {
            out.push((Tok::Op(c), pos));
            i += 1;
        } else {
            return Err(ExprError {
                kind: ExprErrorKind::UnexpectedChar(c),
                position: pos,
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end_pos: usize,
    constants: &'a BTreeMap<String, f64>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end_pos, |(_, p)| *p)
    }

    fn err<T>(&self, kind: ExprErrorKind) -> Result<T, ExprError> {
        Err(ExprError {
            kind,
            position: self.pos(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char, expected: &'static str) -> Result<(), ExprError> {
        match self.peek() {
            Some(Tok::Op(x)) if *x == c => {
                self.at += 1;
                Ok(())
            }
            Some(t) => self.err(ExprErrorKind::UnexpectedToken {
                found: t.describe(),
                expected,
            }),
            None => self.err(ExprErrorKind::UnexpectedEnd),
        }
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.product()?;
        loop {
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Expr::binary(op, lhs, self.product()?);
        }
    }

    fn product(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                BinOp::Mul
            } else if self.eat('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            lhs = Expr::binary(op, lhs, self.unary()?);
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let mut exps = vec![self.int_literal()?];
        while self.eat('^') {
            exps.push(self.int_literal()?);
        }
        let pos = self.pos();
        let k = exps
            .into_iter()
            .rev()
            .try_fold(None::<i32>, |acc, e| match acc {
                None => Some(Some(e)),
                Some(r) => u32::try_from(r).ok().and_then(|r| e.checked_pow(r)).map(Some),
            })
            .flatten()
            .ok_or(ExprError {
                kind: ExprErrorKind::NonIntegerExponent,
                position: pos,
            })?;
        Ok(Expr::Pow(Box::new(base), k))
    }

    fn int_literal(&mut self) -> Result<i32, ExprError> {
        let neg = self.eat('-');
        match self.peek() {
            Some(Tok::Num(x, _)) if x.fract() == 0.0 && x.abs() <= i32::MAX as f64 => {
                let k = *x as i32;
                self.at += 1;
                Ok(if neg { -k } else { k })
            }
            Some(_) => self.err(ExprErrorKind::NonIntegerExponent),
            None => self.err(ExprErrorKind::UnexpectedEnd),
        }
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let pos = self.pos();
        let Some(tok) = self.peek().cloned() else {
            return self.err(ExprErrorKind::UnexpectedEnd);
        };
        match tok {
            Tok::Num(x, _) => {
                self.at += 1;
                Ok(Expr::Num(x))
            }
            Tok::Op('(') => {
                self.at += 1;
                let e = self.sum()?;
                self.expect(')', "')'")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.at += 1;
                if self.peek() == Some(&Tok::Op('(')) {
                    let Some(f) = ElemFn::from_name(&name) else {
                        return Err(ExprError {
                            kind: ExprErrorKind::UnknownIdentifier(name),
                            position: pos,
                        });
                    };
                    self.at += 1;
                    let mut args = Vec::new();
                    if !self.eat(')') {
                        loop {
                            args.push(self.sum()?);
                            if self.eat(',') {
                                continue;
                            }
                            self.expect(')', "')' or ','")?;
                            break;
                        }
                    }
                    if args.len() != 1 {
                        return Err(ExprError {
                            kind: ExprErrorKind::WrongArity {
                                func: name,
                                got: args.len(),
                            },
                            position: pos,
                        });
                    }
                    return Ok(Expr::call(f, args.pop().expect("one argument")));
                }
                match name.as_str() {
                    "u" => Ok(Expr::Var(Variable::U)),
                    "v" => Ok(Expr::Var(Variable::V)),
                    _ => {
                        if let Some(&value) = self.constants.get(&name) {
                            Ok(Expr::Const { name, value })
                        } else if ElemFn::from_name(&name).is_some() {
                            Err(ExprError {
                                kind: ExprErrorKind::WrongArity { func: name, got: 0 },
                                position: pos,
                            })
                        } else {
                            Err(ExprError {
                                kind: ExprErrorKind::UnknownIdentifier(name),
                                position: pos,
                            })
                        }
                    }
                }
            }
            Tok::Op(_) => self.err(ExprErrorKind::UnexpectedToken {
                found: tok.describe(),
                expected: "an operand",
            }),
        }
    }
}

/// Parses an expression over `u`, `v` and the elementary functions.
pub fn parse_expression(text: &str) -> Result<Expr, ExprError> {
    parse_expression_with(text, &BTreeMap::new())
}

/// Parses an expression that may also reference the given named constants.
pub fn parse_expression_with(text: &str, constants: &BTreeMap<String, f64>) -> Result<Expr, ExprError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        end_pos: text.chars().count() + 1,
        constants,
    };
    let e = p.sum()?;
    if let Some(t) = p.peek().cloned() {
        return p.err(ExprErrorKind::UnexpectedToken {
            found: t.describe(),
            expected: "an operator or end of input",
        });
    }
    Ok(e)
}
