//! Textual expression format.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := "-" factor | "(" expr ")" | leaf
//! leaf   := "exact" "(" rat "," ident ")"
//!         | "meas" "(" ident "," "[" rat "," rat "]" "," ident ")"
//! rat    := ["-"] digits ["/" nonzero-digits]
//! ident  := letter (letter | digit | "_")*
//! ```
//!
//! Whitespace is insignificant and `#` starts a comment running to end of line.
//! The printer emits the canonical form: binary operators surrounded by single
//! spaces, leaves without spaces, and only the parentheses needed to reproduce
//! the tree.

use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::expr::{Dim, Expr, Token};
use crate::interval::Interval;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("interval at byte {pos} has lower bound {lo} above upper bound {hi}")]
    IntervalOrder {
        pos: usize,
        lo: Rational,
        hi: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Lexeme {
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Digits(String),
    Ident(String),
    End,
}

impl fmt::Display for Lexeme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lexeme::LParen => f.write_str("`(`"),
            Lexeme::RParen => f.write_str("`)`"),
            Lexeme::LBrack => f.write_str("`[`"),
            Lexeme::RBrack => f.write_str("`]`"),
            Lexeme::Comma => f.write_str("`,`"),
            Lexeme::Plus => f.write_str("`+`"),
            Lexeme::Minus => f.write_str("`-`"),
            Lexeme::Star => f.write_str("`*`"),
            Lexeme::Slash => f.write_str("`/`"),
            Lexeme::Digits(d) => write!(f, "number `{d}`"),
            Lexeme::Ident(s) => write!(f, "identifier `{s}`"),
            Lexeme::End => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Lexeme)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b'(' => Some(Lexeme::LParen),
            b')' => Some(Lexeme::RParen),
            b'[' => Some(Lexeme::LBrack),
            b']' => Some(Lexeme::RBrack),
            b',' => Some(Lexeme::Comma),
            b'+' => Some(Lexeme::Plus),
            b'-' => Some(Lexeme::Minus),
            b'*' => Some(Lexeme::Star),
            b'/' => Some(Lexeme::Slash),
            _ => None,
        };
        if let Some(l) = single {
            out.push((start, l));
            i += 1;
        } else if c == b'#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((start, Lexeme::Digits(text[start..i].to_string())));
        } else if c.is_ascii_alphabetic() {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Lexeme::Ident(text[start..i].to_string())));
        } else {
            let ch = text[start..].chars().next().unwrap_or('?');
            return Err(ParseError::Syntax {
                pos: start,
                message: format!("unexpected character `{ch}`"),
            });
        }
    }
    out.push((text.len(), Lexeme::End));
    Ok(out)
}

struct Parser {
    lexemes: Vec<(usize, Lexeme)>,
    cursor: usize,
}

impl Parser {
    fn peek(&self) -> &Lexeme {
        &self.lexemes[self.cursor].1
    }

    fn pos(&self) -> usize {
        self.lexemes[self.cursor].0
    }

    fn bump(&mut self) -> Lexeme {
        let l = self.lexemes[self.cursor].1.clone();
        if l != Lexeme::End {
            self.cursor += 1;
        }
        l
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn expect(&mut self, want: Lexeme) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {want}, found {}", self.peek()))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Lexeme::Plus => {
                    self.bump();
                    lhs = Expr::add(lhs, self.term()?);
                }
                Lexeme::Minus => {
                    self.bump();
                    lhs = Expr::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Lexeme::Star => {
                    self.bump();
                    lhs = Expr::mul(lhs, self.factor()?);
                }
                Lexeme::Slash => {
                    self.bump();
                    lhs = Expr::div(lhs, self.factor()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Lexeme::Minus => {
                self.bump();
                Ok(Expr::neg(self.factor()?))
            }
            Lexeme::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Lexeme::RParen)?;
                Ok(inner)
            }
            Lexeme::Ident(kw) if kw == "exact" => {
                self.bump();
                self.expect(Lexeme::LParen)?;
                let q = self.rational()?;
                self.expect(Lexeme::Comma)?;
                let d = Dim::new(self.ident()?);
                self.expect(Lexeme::RParen)?;
                Ok(Expr::Exact(q, d))
            }
            Lexeme::Ident(kw) if kw == "meas" => {
                self.bump();
                self.expect(Lexeme::LParen)?;
                let t = Token::new(self.ident()?);
                self.expect(Lexeme::Comma)?;
                let at = self.pos();
                self.expect(Lexeme::LBrack)?;
                let lo = self.rational()?;
                self.expect(Lexeme::Comma)?;
                let hi = self.rational()?;
                self.expect(Lexeme::RBrack)?;
                let interval = Interval::new(lo, hi)
                    .map_err(|e| ParseError::IntervalOrder { pos: at, lo: e.lo, hi: e.hi })?;
                self.expect(Lexeme::Comma)?;
                let d = Dim::new(self.ident()?);
                self.expect(Lexeme::RParen)?;
                Ok(Expr::Meas(t, interval, d))
            }
            other => self.error(format!("expected `exact`, `meas`, `(` or `-`, found {other}")),
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Lexeme::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => self.error(format!("expected identifier, found {other}")),
        }
    }

    fn digits(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Lexeme::Digits(s) => {
                self.bump();
                Ok(s)
            }
            other => self.error(format!("expected digits, found {other}")),
        }
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        let neg = if *self.peek() == Lexeme::Minus {
            self.bump();
            true
        } else {
            false
        };
        let mut literal = self.digits()?;
        if *self.peek() == Lexeme::Slash {
            self.bump();
            let at = self.pos();
            let den = self.digits()?;
            if den.parse::<num_bigint::BigUint>().map_or(true, |d| d.is_zero()) {
                return Err(ParseError::Syntax {
                    pos: at,
                    message: "zero denominator".into(),
                });
            }
            literal = format!("{literal}/{den}");
        }
        if neg {
            literal.insert(0, '-');
        }
        Ok(literal.parse().expect("lexed rational literal"))
    }
}

/// Parses one expression; trailing input is an error.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        lexemes: lex(text)?,
        cursor: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Lexeme::End {
        return p.error(format!("unexpected {} after expression", p.peek()));
    }
    Ok(e)
}

/// Canonical text of `e`.
pub fn print(e: &Expr) -> String {
    e.to_string()
}

const PREC_SUM: u8 = 1;
const PREC_PRODUCT: u8 = 2;
const PREC_FACTOR: u8 = 3;

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => PREC_SUM,
        Expr::Mul(..) | Expr::Div(..) => PREC_PRODUCT,
        _ => PREC_FACTOR,
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (op, a, b) = match self {
            Expr::Exact(q, d) => return write!(f, "exact({q},{d})"),
            Expr::Meas(t, i, d) => return write!(f, "meas({t},[{},{}],{d})", i.lo(), i.hi()),
            Expr::Neg(a) => {
                f.write_str("-")?;
                return write_operand(f, a, precedence(a) < PREC_FACTOR);
            }
            Expr::Add(a, b) => ("+", a, b),
            Expr::Sub(a, b) => ("-", a, b),
            Expr::Mul(a, b) => ("*", a, b),
            Expr::Div(a, b) => ("/", a, b),
        };
        let own = precedence(self);
        // Left-associative: the right operand needs parentheses at equal precedence.
        write_operand(f, a, precedence(a) < own)?;
        write!(f, " {op} ")?;
        write_operand(f, b, precedence(b) <= own)
    }
}
