//! Recursive-descent parser for polynomial text with integer coefficients.
//!
//! Grammar: `expr := [+|-] term {(+|-) term}`, `term := factor {[*] factor}`,
//! `factor := atom [^ int]`, `atom := int | variable | ( expr )`. Variables are
//! matched greedily against the declared names, so `2x24` and `x12x34` parse.

use thiserror::Error;

use super::{MultiPoly, Vars};
use crate::ring::Ring;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

struct Parser<'a, R: Ring> {
    ring: R,
    vars: Vars,
    src: &'a [u8],
    pos: usize,
}

pub(super) fn parse<R: Ring>(ring: R, vars: Vars, text: &str) -> Result<MultiPoly<R>, ParseError> {
    let mut p = Parser { ring, vars, src: text.as_bytes(), pos: 0 };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

impl<R: Ring> Parser<'_, R> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<MultiPoly<R>, ParseError> {
        let mut negate = false;
        match self.peek() {
            Some(b'+') => self.pos += 1,
            Some(b'-') => {
                self.pos += 1;
                negate = true;
            }
            _ => {}
        }
        let first = self.term()?;
        let mut acc = if negate { first.neg() } else { first };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly<R>, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?);
                }
                Some(c) if c.is_ascii_alphanumeric() || c == b'(' => {
                    acc = acc.mul(&self.factor()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<MultiPoly<R>, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.integer()?;
            let e = u32::try_from(e).map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| ParseError { pos: start, msg: "integer out of range".into() })
    }

    fn atom(&mut self) -> Result<MultiPoly<R>, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                let c = self.ring.from_i64(n);
                Ok(MultiPoly::constant(self.ring.clone(), self.vars.clone(), c))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let rest = &self.src[self.pos..];
                let best = self
                    .vars
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| rest.starts_with(v.as_bytes()))
                    .max_by_key(|(_, v)| v.len());
                match best {
                    Some((i, v)) => {
                        self.pos += v.len();
                        Ok(MultiPoly::var(self.ring.clone(), self.vars.clone(), i))
                    }
                    None => Err(self.err("unknown variable")),
                }
            }
            _ => Err(self.err("expected a number, variable or `(`")),
        }
    }
}
