//! Expression parsing shared by scalars, Lie/UEA elements and Weyl elements.
//!
//! The grammar is ordinary infix arithmetic with `+ - * / ^`, parentheses and
//! implicit multiplication by juxtaposition (`t1^2 d1`, `2 h1`). What an
//! identifier means is decided by an [`ExprContext`].

use std::collections::BTreeSet;
use std::fmt;

use num::{BigInt, ToPrimitive};

use crate::error::ParseError;
use crate::scalar::{Scalar, Q};

/// Names accepted as free symbols in scalar positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolSet {
    names: BTreeSet<String>,
}

impl SymbolSet {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut names: BTreeSet<String> = names.into_iter().map(Into::into).collect();
        names.insert("s".to_string());
        SymbolSet { names }
    }

    /// `s`, `a1..an`, `b`, `b1..bn`, `l1..ln`.
    pub fn standard(n: usize) -> Self {
        let mut names = vec!["s".to_string(), "b".to_string()];
        for i in 1..=n {
            names.push(format!("a{i}"));
            names.push(format!("b{i}"));
            names.push(format!("l{i}"));
        }
        SymbolSet::new(names)
    }

    pub fn with(mut self, name: &str) -> Self {
        self.names.insert(name.to_string());
        self
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.contains(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    text: String,
    col: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        let col = k + 1;
        if c.is_whitespace() {
            k += 1;
        } else if c.is_ascii_digit() {
            let start = k;
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            let s: String = chars[start..k].iter().collect();
            out.push(Token {
                tok: Tok::Num(s.parse().expect("digits")),
                text: s,
                col,
            });
        } else if c == 'X' && chars.get(k + 1) == Some(&'[') {
            let start = k;
            while k < chars.len() && chars[k] != ']' {
                k += 1;
            }
            if k == chars.len() {
                let s: String = chars[start..].iter().collect();
                return Err(ParseError::new("unterminated root vector", s, col));
            }
            k += 1;
            let s: String = chars[start..k].iter().collect();
            out.push(Token {
                tok: Tok::Ident(s.clone()),
                text: s,
                col,
            });
        } else if is_ident_start(c) {
            let start = k;
            while k < chars.len() && (chars[k].is_ascii_alphanumeric() || chars[k] == '_') {
                k += 1;
            }
            let s: String = chars[start..k].iter().collect();
            out.push(Token {
                tok: Tok::Ident(s.clone()),
                text: s,
                col,
            });
        } else if "+-*/^()".contains(c) {
            out.push(Token {
                tok: Tok::Op(c),
                text: c.to_string(),
                col,
            });
            k += 1;
        } else {
            return Err(ParseError::new("unexpected character", c.to_string(), col));
        }
    }
    Ok(out)
}

/// Semantics for identifiers and the ring operations of a parsed expression.
pub trait ExprContext {
    type Value: Clone;

    fn scalar(&self, c: Scalar) -> Self::Value;
    /// Resolve an identifier; `col` is its 1-based column for error reporting.
    fn ident(&self, name: &str, col: usize) -> Result<Self::Value, ParseError>;
    fn add(&self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn neg(&self, a: Self::Value) -> Self::Value;
    fn mul(&self, a: Self::Value, b: Self::Value, col: usize) -> Result<Self::Value, ParseError>;
    /// The value as a plain scalar, if it is one; needed for division and
    /// negative powers.
    fn as_scalar(&self, a: &Self::Value) -> Option<Scalar>;
}

struct Parser<'a, C: ExprContext> {
    toks: Vec<Token>,
    pos: usize,
    ctx: &'a C,
    end_col: usize,
}

impl<'a, C: ExprContext> Parser<'a, C> {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn peek_op(&self) -> Option<char> {
        match self.peek() {
            Some(Token { tok: Tok::Op(c), .. }) => Some(*c),
            _ => None,
        }
    }

    fn error_here(&self, msg: &str) -> ParseError {
        match self.peek() {
            Some(t) => ParseError::new(msg, t.text.clone(), t.col),
            None => ParseError::new(msg, "<end of input>", self.end_col),
        }
    }

    fn expr(&mut self) -> Result<C::Value, ParseError> {
        let mut acc: Option<C::Value> = None;
        loop {
            let sign = match self.peek_op() {
                Some('+') => {
                    self.pos += 1;
                    false
                }
                Some('-') => {
                    self.pos += 1;
                    true
                }
                _ if acc.is_none() => false,
                _ => break,
            };
            let t = self.term()?;
            let t = if sign { self.ctx.neg(t) } else { t };
            acc = Some(match acc {
                None => t,
                Some(a) => self.ctx.add(a, t),
            });
        }
        Ok(acc.expect("at least one term"))
    }

    fn starts_factor(&self) -> bool {
        matches!(
            self.peek(),
            Some(Token {
                tok: Tok::Num(_) | Tok::Ident(_) | Tok::Op('('),
                ..
            })
        )
    }

    fn term(&mut self) -> Result<C::Value, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek_op() {
                Some('*') => {
                    let col = self.peek().map(|t| t.col).unwrap_or(0);
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = self.ctx.mul(acc, f, col)?;
                }
                Some('/') => {
                    let op = self.peek().cloned().expect("peeked");
                    self.pos += 1;
                    let f = self.factor()?;
                    let d = self
                        .ctx
                        .as_scalar(&f)
                        .ok_or_else(|| ParseError::new("can only divide by a scalar", op.text.clone(), op.col))?;
                    let inv = d
                        .recip()
                        .map_err(|_| ParseError::new("division by zero", op.text.clone(), op.col))?;
                    acc = self.ctx.mul(acc, self.ctx.scalar(inv), op.col)?;
                }
                _ if self.starts_factor() => {
                    let col = self.peek().map(|t| t.col).unwrap_or(0);
                    let f = self.factor()?;
                    acc = self.ctx.mul(acc, f, col)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<C::Value, ParseError> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            let f = self.factor()?;
            return Ok(self.ctx.neg(f));
        }
        let base = self.primary()?;
        if self.peek_op() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        let negative = if self.peek_op() == Some('-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let exp = match self.peek() {
            Some(Token { tok: Tok::Num(k), .. }) => k
                .to_u32()
                .filter(|&e| e <= 10_000)
                .ok_or_else(|| self.error_here("exponent too large"))?,
            _ => return Err(self.error_here("expected integer exponent")),
        };
        let exp_tok = self.peek().cloned().expect("peeked");
        self.pos += 1;
        if negative {
            let s = self
                .ctx
                .as_scalar(&base)
                .ok_or_else(|| ParseError::new("negative power of a non-scalar", exp_tok.text.clone(), exp_tok.col))?;
            let inv = s
                .recip()
                .map_err(|_| ParseError::new("division by zero", exp_tok.text.clone(), exp_tok.col))?;
            return Ok(self.ctx.scalar(inv.pow(exp)));
        }
        let mut acc = self.ctx.scalar(Scalar::one());
        for _ in 0..exp {
            acc = self.ctx.mul(acc, base.clone(), exp_tok.col)?;
        }
        Ok(acc)
    }

    fn primary(&mut self) -> Result<C::Value, ParseError> {
        let t = match self.peek() {
            Some(t) => t.clone(),
            None => return Err(self.error_here("unexpected end of input")),
        };
        match &t.tok {
            Tok::Num(k) => {
                self.pos += 1;
                Ok(self.ctx.scalar(Scalar::from_rational(Q::from_integer(k.clone()))))
            }
            Tok::Ident(name) => {
                self.pos += 1;
                self.ctx.ident(name, t.col)
            }
            Tok::Op('(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err(self.error_here("expected `)`"));
                }
                self.pos += 1;
                Ok(v)
            }
            Tok::Op(_) => Err(self.error_here("unexpected operator")),
        }
    }
}

/// Parse `text` as an expression interpreted by `ctx`.
pub fn parse_expr<C: ExprContext>(text: &str, ctx: &C) -> Result<C::Value, ParseError> {
    let toks = tokenize(text)?;
    let end_col = text.chars().count() + 1;
    if toks.is_empty() {
        return Err(ParseError::new("empty expression", "", 1));
    }
    let mut p = Parser {
        toks,
        pos: 0,
        ctx,
        end_col,
    };
    let v = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(p.error_here("unexpected token"));
    }
    Ok(v)
}

/// Scalars: identifiers are symbols, restricted to `symbols` when given.
pub struct ScalarContext<'a> {
    pub symbols: Option<&'a SymbolSet>,
}

impl ScalarContext<'_> {
    pub fn symbol(&self, name: &str, col: usize) -> Result<Scalar, ParseError> {
        let known = match self.symbols {
            Some(set) => set.contains(name),
            None => name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'),
        };
        if known {
            Ok(Scalar::symbol(name))
        } else {
            Err(ParseError::new("unknown symbol", name, col))
        }
    }
}

impl ExprContext for ScalarContext<'_> {
    type Value = Scalar;

    fn scalar(&self, c: Scalar) -> Scalar {
        c
    }

    fn ident(&self, name: &str, col: usize) -> Result<Scalar, ParseError> {
        self.symbol(name, col)
    }

    fn add(&self, a: Scalar, b: Scalar) -> Scalar {
        &a + &b
    }

    fn neg(&self, a: Scalar) -> Scalar {
        -a
    }

    fn mul(&self, a: Scalar, b: Scalar, _col: usize) -> Result<Scalar, ParseError> {
        Ok(&a * &b)
    }

    fn as_scalar(&self, a: &Scalar) -> Option<Scalar> {
        Some(a.clone())
    }
}

pub fn parse_scalar(text: &str, symbols: Option<&SymbolSet>) -> Result<Scalar, ParseError> {
    parse_expr(text, &ScalarContext { symbols })
}

/// Comma-separated scalars, e.g. a weight `1/2,a1`.
pub fn parse_scalar_list(text: &str, symbols: Option<&SymbolSet>) -> Result<Vec<Scalar>, ParseError> {
    let mut out = Vec::new();
    let mut col = 1;
    for piece in text.split(',') {
        let v = parse_scalar(piece, symbols).map_err(|mut e| {
            e.position += col - 1;
            e
        })?;
        out.push(v);
        col += piece.chars().count() + 1;
    }
    Ok(out)
}

/// Comma-separated integers, e.g. an offset `-1,2`.
pub fn parse_int_list(text: &str) -> Result<Vec<i64>, ParseError> {
    let mut out = Vec::new();
    let mut col = 1;
    for piece in text.split(',') {
        let trimmed = piece.trim();
        let v: i64 = trimmed
            .parse()
            .map_err(|_| ParseError::new("expected integer", trimmed, col))?;
        out.push(v);
        col += piece.chars().count() + 1;
    }
    Ok(out)
}

/// Writes `Σ c·name` as `name - 2*other + (s^2-1)/2*third`; an empty name
/// denotes the unit and prints the bare coefficient.
pub fn write_linear_combination(f: &mut fmt::Formatter<'_>, items: &[(String, Scalar)]) -> fmt::Result {
    if items.is_empty() {
        return f.write_str("0");
    }
    for (k, (name, c)) in items.iter().enumerate() {
        let negative = c.is_negative_leading();
        let mag = if negative { -c } else { c.clone() };
        if k == 0 {
            if negative {
                f.write_str("-")?;
            }
        } else {
            f.write_str(if negative { " - " } else { " + " })?;
        }
        if name.is_empty() {
            if mag.denominator().is_one() && mag.needs_parens() && (negative || k > 0) {
                write!(f, "({mag})")?;
            } else {
                write!(f, "{mag}")?;
            }
        } else if mag.is_one() {
            f.write_str(name)?;
        } else if mag.denominator().is_one() && mag.needs_parens() {
            write!(f, "({mag})*{name}")?;
        } else {
            write!(f, "{mag}*{name}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_precedence() {
        assert_eq!(parse_scalar("1+2*3", None).unwrap(), Scalar::from_int(7));
        assert_eq!(parse_scalar("-2^2", None).unwrap(), Scalar::from_int(-4));
        assert_eq!(parse_scalar("2^-1", None).unwrap(), Scalar::ratio(1, 2));
        assert_eq!(parse_scalar("(1+1)(1+2)", None).unwrap(), Scalar::from_int(6));
        assert_eq!(parse_scalar("1/2/2", None).unwrap(), Scalar::ratio(1, 4));
        assert_eq!(parse_scalar("2 s", None).unwrap(), &Scalar::from_int(2) * &Scalar::s());
    }

    #[test]
    fn errors_carry_token_and_column() {
        let e = parse_scalar("1 + $", None).unwrap_err();
        assert_eq!((e.token.as_str(), e.position), ("$", 5));
        let set = SymbolSet::standard(1);
        let e = parse_scalar("a1 + q", Some(&set)).unwrap_err();
        assert_eq!((e.token.as_str(), e.position), ("q", 6));
        let e = parse_scalar("(1+2", None).unwrap_err();
        assert_eq!(e.position, 5);
        let e = parse_scalar("1/0", None).unwrap_err();
        assert_eq!(e.message, "division by zero");
        let e = parse_scalar_list("1,2,x", Some(&set)).unwrap_err();
        assert_eq!((e.token.as_str(), e.position), ("x", 5));
    }

    #[test]
    fn standard_symbols() {
        let set = SymbolSet::standard(2);
        for name in ["s", "a1", "a2", "b", "b2", "l1"] {
            assert!(set.contains(name));
        }
        assert!(!set.contains("a3"));
    }

    #[test]
    fn lists() {
        assert_eq!(parse_int_list("-1, 2,0").unwrap(), vec![-1, 2, 0]);
        assert_eq!(
            parse_scalar_list("1/2,-3", None).unwrap(),
            vec![Scalar::ratio(1, 2), Scalar::from_int(-3)]
        );
    }
}
