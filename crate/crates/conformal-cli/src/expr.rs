//! Recursive-descent parser for polynomial expressions.
//!
//! Grammar:
//!
//! ```text
//! expr     := term (("+" | "-") term)*
//! term     := factor ("*" factor)*
//! factor   := "-" factor | atom ("^" uint)?
//! atom     := rational | var | "(" expr ")" | "sqrt" "(" uint ")"
//! rational := uint ("/" uint)?
//! ```
//!
//! Unary minus negates the whole power, so `-d^2` is `-(d^2)`; this makes
//! parsing the inverse of the canonical rendering, where a leading minus
//! sign belongs to the term's coefficient.  The variables are `d`, `l`,
//! `m` plus any declared parameter names.  The `sqrt` atom is only
//! enabled when reading engine *output* back (result mode); input spec
//! files are rational.

use conformal_core::field::{FieldElem, Rat};
use conformal_core::MultiPoly;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the source where the problem was detected.
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at byte {}: {}", self.offset, self.message)
    }
}

impl std::error::Error for ParseError {}

/// Parses an input-mode expression over `d`, `l`, `m` and the declared
/// parameter names.
pub fn parse_poly_expr(src: &str, params: &[String]) -> Result<MultiPoly, ParseError> {
    parse_with(src, &base_vars(params)?, false)
}

/// Parses a result-mode expression, which may additionally contain
/// `sqrt(<squarefree integer>)` scalars.
pub fn parse_result_expr(src: &str, params: &[String]) -> Result<MultiPoly, ParseError> {
    parse_with(src, &base_vars(params)?, true)
}

/// Parses a rational scalar (any variable-free input-mode expression).
pub fn parse_rational(src: &str) -> Result<Rat, ParseError> {
    let p = parse_with(src, &[], false)?;
    let c = p.as_constant().expect("no variables were in scope");
    match c.as_rational() {
        Some(r) => Ok(r.clone()),
        None => Err(ParseError { offset: 0, message: "expected a rational value".into() }),
    }
}

/// Parses a result-mode scalar, rational or quadratic-irrational.
pub fn parse_field_value(src: &str) -> Result<FieldElem, ParseError> {
    let p = parse_with(src, &[], true)?;
    Ok(p.as_constant().expect("no variables were in scope"))
}

fn base_vars(params: &[String]) -> Result<Vec<String>, ParseError> {
    let mut vars: Vec<String> = ["d", "l", "m"].iter().map(|s| s.to_string()).collect();
    for p in params {
        if vars.contains(p) {
            return Err(ParseError {
                offset: 0,
                message: format!("parameter name `{p}` collides with another variable"),
            });
        }
        vars.push(p.clone());
    }
    Ok(vars)
}

fn parse_with(src: &str, vars: &[String], allow_sqrt: bool) -> Result<MultiPoly, ParseError> {
    let mut p = Parser { src, pos: 0, vars, allow_sqrt };
    p.skip_ws();
    if p.at_end() {
        return Err(p.err("expected an expression"));
    }
    let value = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(value)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    vars: &'a [String],
    allow_sqrt: bool,
}

impl<'a> Parser<'a> {
    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError { offset: self.pos, message: message.into() }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<MultiPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly, ParseError> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            if self.eat(b'*') {
                acc = &acc * &self.factor()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<MultiPoly, ParseError> {
        self.skip_ws();
        if self.eat(b'-') {
            return Ok(-&self.factor()?);
        }
        let base = self.atom()?;
        self.skip_ws();
        if self.eat(b'^') {
            self.skip_ws();
            if self.peek() == Some(b'-') {
                return Err(self.err("negative exponents are not allowed"));
            }
            let e = self.uint()?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.skip_ws();
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => self.rational(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                let name = self.ident();
                if name == "sqrt" {
                    if !self.allow_sqrt {
                        self.pos = start;
                        return Err(self.err(
                            "sqrt(...) is only accepted when reading result files",
                        ));
                    }
                    self.skip_ws();
                    self.expect(b'(')?;
                    self.skip_ws();
                    let n = self.uint_big()?;
                    self.skip_ws();
                    self.expect(b')')?;
                    let d: u64 = n.parse().map_err(|_| {
                        self.err("sqrt argument is too large")
                    })?;
                    let value = FieldElem::sqrt_of(d).map_err(|e| ParseError {
                        offset: start,
                        message: e.to_string(),
                    })?;
                    return Ok(MultiPoly::constant(value));
                }
                if self.vars.iter().any(|v| v == &name) {
                    Ok(MultiPoly::var(&name))
                } else {
                    self.pos = start;
                    Err(self.err(format!("unknown variable `{name}`")))
                }
            }
            _ => Err(self.err("expected a number, variable, or parenthesized expression")),
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
            self.pos += 1;
        }
        self.src[start..self.pos].to_string()
    }

    /// Digit run as text (arbitrary size).
    fn digits(&mut self) -> Result<&'a str, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected digits"));
        }
        Ok(&self.src[start..self.pos])
    }

    fn uint_big(&mut self) -> Result<String, ParseError> {
        Ok(self.digits()?.to_string())
    }

    fn uint(&mut self) -> Result<u32, ParseError> {
        let start = self.pos;
        let text = self.digits()?;
        text.parse().map_err(|_| ParseError {
            offset: start,
            message: "exponent is too large".into(),
        })
    }

    fn rational(&mut self) -> Result<MultiPoly, ParseError> {
        let numer = self.digits()?.to_string();
        let save = self.pos;
        if self.eat(b'/') {
            let dstart = self.pos;
            match self.digits() {
                Ok(denom) => {
                    if denom.bytes().all(|b| b == b'0') {
                        return Err(ParseError {
                            offset: dstart,
                            message: "zero denominator".into(),
                        });
                    }
                    let r: Rat = format!("{numer}/{denom}")
                        .parse()
                        .expect("digit strings always parse");
                    Ok(MultiPoly::from_rat(r))
                }
                Err(_) => {
                    // `/` did not start a fraction; leave it for the caller.
                    self.pos = save;
                    let r: Rat = numer.parse().expect("digit strings always parse");
                    Ok(MultiPoly::from_rat(r))
                }
            }
        } else {
            let r: Rat = numer.parse().expect("digit strings always parse");
            Ok(MultiPoly::from_rat(r))
        }
    }
}
