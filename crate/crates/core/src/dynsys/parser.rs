//! Recursive-descent parser for vector field components.
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := primary ("^" unary)?
//! primary := number | var | func "(" expr ")" | "(" expr ")"
//! var     := "x" digit+
//! func    := sin | cos | tan | exp | ln | sqrt | abs
//! ```
//!
//! `^` binds tighter than unary minus and is right-associative, so
//! `-2^2 = -4` and `2^3^2 = 512`.

use std::fmt;

use thiserror::Error;

use super::expr::{BinOp, Expr, Func};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedEnd,
    Expected(&'static str),
    InvalidNumber,
    UnknownIdentifier(String),
    VariableOutOfRange { index: usize, dimension: usize },
    DegreeTooHigh { degree: u32, max: u32 },
    ConstantTerm,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character `{c}`"),
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input"),
            ParseErrorKind::Expected(what) => write!(f, "expected {what}"),
            ParseErrorKind::InvalidNumber => write!(f, "invalid number literal"),
            ParseErrorKind::UnknownIdentifier(name) => write!(f, "unknown identifier `{name}`"),
            ParseErrorKind::VariableOutOfRange { index, dimension } => {
                write!(
                    f,
                    "variable x{index} out of range for dimension {dimension}"
                )
            }
            ParseErrorKind::DegreeTooHigh { degree, max } => {
                write!(
                    f,
                    "monomial of degree {degree} exceeds maximal degree {max}"
                )
            }
            ParseErrorKind::ConstantTerm => write!(f, "constant terms are not allowed"),
        }
    }
}

/// Syntax error with the byte offset into the source text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at byte {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn new(offset: usize, kind: ParseErrorKind) -> Self {
        ParseError { offset, kind }
    }
}

/// Length in bytes of the decimal literal at the start of `s` (0 if none).
pub(crate) fn scan_number(s: &str) -> usize {
    let b = s.as_bytes();
    let digits = |from: usize| b[from..].iter().take_while(|c| c.is_ascii_digit()).count();
    let mut i = digits(0);
    let mut mantissa = i;
    if b.get(i) == Some(&b'.') {
        let frac = digits(i + 1);
        mantissa += frac;
        i += 1 + frac;
    }
    if mantissa == 0 {
        return 0;
    }
    if matches!(b.get(i), Some(b'e' | b'E')) {
        let mut j = i + 1;
        if matches!(b.get(j), Some(b'+' | b'-')) {
            j += 1;
        }
        let exp = digits(j);
        if exp > 0 {
            i = j + exp;
        }
    }
    i
}

/// Parses `text` as an expression over `x1..x{dimension}`.
pub fn parse_expr(text: &str, dimension: usize) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: text,
        pos: 0,
        dimension,
    };
    p.skip_ws();
    if p.at_end() {
        return Err(p.err(ParseErrorKind::UnexpectedEnd));
    }
    let e = p.expr()?;
    p.skip_ws();
    match p.peek() {
        None => Ok(e),
        Some(c) => Err(p.err(ParseErrorKind::UnexpectedChar(c))),
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    dimension: usize,
}

impl Parser<'_> {
    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError::new(self.pos, kind)
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Expr::binary(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
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

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(Expr::neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.eat('^') {
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let c = match self.peek() {
            None => return Err(self.err(ParseErrorKind::UnexpectedEnd)),
            Some(c) => c,
        };
        if c == '(' {
            self.pos += 1;
            let e = self.expr()?;
            if !self.eat(')') {
                return Err(self.missing(")"));
            }
            return Ok(e);
        }
        if c.is_ascii_digit() || c == '.' {
            let len = scan_number(&self.src[start..]);
            if len == 0 {
                return Err(self.err(ParseErrorKind::InvalidNumber));
            }
            self.pos += len;
            return self.src[start..self.pos]
                .parse()
                .map(Expr::Num)
                .map_err(|_| ParseError::new(start, ParseErrorKind::InvalidNumber));
        }
        if c.is_ascii_alphabetic() {
            let len = self.src[start..]
                .bytes()
                .take_while(u8::is_ascii_alphanumeric)
                .count();
            let ident = &self.src[start..start + len];
            self.pos += len;
            return self.identifier(ident, start);
        }
        Err(self.err(ParseErrorKind::UnexpectedChar(c)))
    }

    fn identifier(&mut self, ident: &str, start: usize) -> Result<Expr, ParseError> {
        if let Some(digits) = ident.strip_prefix('x') {
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                let index: usize = digits.parse().unwrap_or(usize::MAX);
                if index == 0 || index > self.dimension {
                    return Err(ParseError::new(
                        start,
                        ParseErrorKind::VariableOutOfRange {
                            index,
                            dimension: self.dimension,
                        },
                    ));
                }
                return Ok(Expr::Var(index - 1));
            }
        }
        let func = Func::from_name(ident).ok_or_else(|| {
            ParseError::new(start, ParseErrorKind::UnknownIdentifier(ident.to_string()))
        })?;
        if !self.eat('(') {
            return Err(self.missing("`(` after function name"));
        }
        let arg = self.expr()?;
        if !self.eat(')') {
            return Err(self.missing(")"));
        }
        Ok(Expr::call(func, arg))
    }

    fn missing(&self, what: &'static str) -> ParseError {
        match self.peek() {
            None => self.err(ParseErrorKind::UnexpectedEnd),
            Some(_) => self.err(ParseErrorKind::Expected(what)),
        }
    }
}
