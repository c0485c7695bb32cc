//! Angle expressions over data symbols `x[i]` and trainable symbols `t[j]`.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// A free symbol of a parameterized circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    /// Index into the circuit's data-symbol list.
    Data(usize),
    /// Index into the circuit's trainable-symbol list.
    Theta(usize),
}

/// Expression tree for a gate angle.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamExpr {
    Const(f64),
    Sym(Symbol),
    Neg(Box<ParamExpr>),
    Add(Box<ParamExpr>, Box<ParamExpr>),
    Sub(Box<ParamExpr>, Box<ParamExpr>),
    Mul(Box<ParamExpr>, Box<ParamExpr>),
}

impl ParamExpr {
    pub fn data(i: usize) -> Self {
        ParamExpr::Sym(Symbol::Data(i))
    }

    pub fn theta(j: usize) -> Self {
        ParamExpr::Sym(Symbol::Theta(j))
    }

    /// `π − x_i`
    pub fn pi_minus_data(i: usize) -> Self {
        ParamExpr::Const(PI) - ParamExpr::data(i)
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            ParamExpr::Const(v) => Some(*v),
            _ => None,
        }
    }

    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            ParamExpr::Const(_) => {}
            ParamExpr::Sym(s) => {
                out.insert(*s);
            }
            ParamExpr::Neg(a) => a.collect_symbols(out),
            ParamExpr::Add(a, b) | ParamExpr::Sub(a, b) | ParamExpr::Mul(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
        }
    }

    /// Evaluates with every symbol bound.
    pub fn eval(&self, data: &[f64], theta: &[f64]) -> Result<f64> {
        let v = match self {
            ParamExpr::Const(v) => *v,
            ParamExpr::Sym(Symbol::Data(i)) => *data
                .get(*i)
                .ok_or_else(|| Error::binding(format!("data symbol x[{i}] is unbound")))?,
            ParamExpr::Sym(Symbol::Theta(j)) => *theta
                .get(*j)
                .ok_or_else(|| Error::binding(format!("trainable symbol t[{j}] is unbound")))?,
            ParamExpr::Neg(a) => -a.eval(data, theta)?,
            ParamExpr::Add(a, b) => a.eval(data, theta)? + b.eval(data, theta)?,
            ParamExpr::Sub(a, b) => a.eval(data, theta)? - b.eval(data, theta)?,
            ParamExpr::Mul(a, b) => a.eval(data, theta)? * b.eval(data, theta)?,
        };
        Ok(v)
    }

    /// Renames symbol indices, used when composing circuits.
    pub(crate) fn shift_symbols(&self, data_offset: usize, theta_offset: usize) -> Self {
        match self {
            ParamExpr::Const(v) => ParamExpr::Const(*v),
            ParamExpr::Sym(Symbol::Data(i)) => ParamExpr::data(i + data_offset),
            ParamExpr::Sym(Symbol::Theta(j)) => ParamExpr::theta(j + theta_offset),
            ParamExpr::Neg(a) => ParamExpr::Neg(Box::new(a.shift_symbols(data_offset, theta_offset))),
            ParamExpr::Add(a, b) => ParamExpr::Add(
                Box::new(a.shift_symbols(data_offset, theta_offset)),
                Box::new(b.shift_symbols(data_offset, theta_offset)),
            ),
            ParamExpr::Sub(a, b) => ParamExpr::Sub(
                Box::new(a.shift_symbols(data_offset, theta_offset)),
                Box::new(b.shift_symbols(data_offset, theta_offset)),
            ),
            ParamExpr::Mul(a, b) => ParamExpr::Mul(
                Box::new(a.shift_symbols(data_offset, theta_offset)),
                Box::new(b.shift_symbols(data_offset, theta_offset)),
            ),
        }
    }

    /// Arithmetic negation, folding constants and double negations.
    pub fn negated(&self) -> Self {
        match self {
            ParamExpr::Const(v) => ParamExpr::Const(-v),
            ParamExpr::Neg(a) => (**a).clone(),
            other => ParamExpr::Neg(Box::new(other.clone())),
        }
    }

    /// Parses the textual form written by `Display`.
    pub fn parse(src: &str) -> Result<Self> {
        let tokens = lex(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::validation(format!("trailing input in angle expression {src:?}")));
        }
        Ok(e)
    }
}

impl std::ops::Add for ParamExpr {
    type Output = ParamExpr;
    fn add(self, rhs: ParamExpr) -> ParamExpr {
        ParamExpr::Add(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Sub for ParamExpr {
    type Output = ParamExpr;
    fn sub(self, rhs: ParamExpr) -> ParamExpr {
        ParamExpr::Sub(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Mul for ParamExpr {
    type Output = ParamExpr;
    fn mul(self, rhs: ParamExpr) -> ParamExpr {
        ParamExpr::Mul(Box::new(self), Box::new(rhs))
    }
}

// Binary nodes are always parenthesized and negation is written `-(e)`, so
// printing then parsing reproduces the tree exactly. Constants use Rust's
// shortest round-trip float formatting.
impl fmt::Display for ParamExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamExpr::Const(v) if *v == PI => write!(f, "pi"),
            ParamExpr::Const(v) => write!(f, "{v:?}"),
            ParamExpr::Sym(Symbol::Data(i)) => write!(f, "x[{i}]"),
            ParamExpr::Sym(Symbol::Theta(j)) => write!(f, "t[{j}]"),
            ParamExpr::Neg(a) => write!(f, "-({a})"),
            ParamExpr::Add(a, b) => write!(f, "({a} + {b})"),
            ParamExpr::Sub(a, b) => write!(f, "({a} - {b})"),
            ParamExpr::Mul(a, b) => write!(f, "({a} * {b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Sym(Symbol),
    Pi,
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let bad = |msg: &str| Error::validation(format!("{msg} in angle expression {src:?}"));
    while i < bytes.len() {
        let c = bytes[i];
        let prev_is_operand = matches!(
            out.last(),
            Some(Token::Num(_) | Token::Sym(_) | Token::Pi | Token::RParen)
        );
        match c {
            b' ' | b'\t' => i += 1,
            b'+' => {
                out.push(Token::Plus);
                i += 1;
            }
            b'*' => {
                out.push(Token::Star);
                i += 1;
            }
            b'(' => {
                out.push(Token::LParen);
                i += 1;
            }
            b')' => {
                out.push(Token::RParen);
                i += 1;
            }
            b'-' if !prev_is_operand && bytes.get(i + 1).is_some_and(|d| d.is_ascii_digit() || *d == b'.') => {
                let (v, len) = lex_number(&src[i..]).ok_or_else(|| bad("bad number"))?;
                out.push(Token::Num(v));
                i += len;
            }
            b'-' => {
                out.push(Token::Minus);
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let (v, len) = lex_number(&src[i..]).ok_or_else(|| bad("bad number"))?;
                out.push(Token::Num(v));
                i += len;
            }
            b'x' | b't' if bytes.get(i + 1) == Some(&b'[') => {
                let close = src[i..].find(']').ok_or_else(|| bad("unclosed symbol"))? + i;
                let idx: usize = src[i + 2..close].trim().parse().map_err(|_| bad("bad symbol index"))?;
                out.push(Token::Sym(if c == b'x' {
                    Symbol::Data(idx)
                } else {
                    Symbol::Theta(idx)
                }));
                i = close + 1;
            }
            b'p' if src[i..].starts_with("pi") => {
                out.push(Token::Pi);
                i += 2;
            }
            _ => return Err(bad(&format!("unexpected character {:?}", c as char))),
        }
    }
    Ok(out)
}

fn lex_number(s: &str) -> Option<(f64, usize)> {
    let b = s.as_bytes();
    let mut end = usize::from(b.first() == Some(&b'-'));
    while end < b.len() {
        let c = b[end];
        let exp_sign = (c == b'-' || c == b'+') && matches!(b[end - 1], b'e' | b'E');
        if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
            end += 1;
        } else {
            break;
        }
    }
    s[..end].parse().ok().map(|v| (v, end))
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<ParamExpr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    lhs = lhs + self.term()?;
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    lhs = lhs - self.term()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<ParamExpr> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Token::Star) {
            self.pos += 1;
            lhs = lhs * self.unary()?;
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<ParamExpr> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            return Ok(ParamExpr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<ParamExpr> {
        match self.next() {
            Some(Token::Num(v)) => Ok(ParamExpr::Const(v)),
            Some(Token::Pi) => Ok(ParamExpr::Const(PI)),
            Some(Token::Sym(s)) => Ok(ParamExpr::Sym(s)),
            Some(Token::LParen) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Token::RParen) => Ok(e),
                    _ => Err(Error::validation("missing ')' in angle expression")),
                }
            }
            other => Err(Error::validation(format!(
                "unexpected token {other:?} in angle expression"
            ))),
        }
    }
}
