//! Text form of differential polynomials.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! poly   := ["-"] term (("+" | "-") term)*
//! term   := coeff ("*" factor)* | factor ("*" factor)*
//! factor := "u" INT ("^" INT)?
//! coeff  := INT ("/" INT)?
//! ```
//!
//! Examples: `3*u0^2 + u2`, `1/2`, `-u1`, `1/2*u0`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use super::{DiffPoly, Monomial, Rational};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected character {found:?} at byte {at}")]
    Unexpected { found: char, at: usize },
    #[error("unexpected end of input")]
    Eof,
    #[error("zero denominator at byte {at}")]
    ZeroDenominator { at: usize },
    #[error("empty input")]
    Empty,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
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

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn expect_digit_run(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return match self.src.get(self.pos) {
                Some(&c) => Err(ParseError::Unexpected {
                    found: c as char,
                    at: self.pos,
                }),
                None => Err(ParseError::Eof),
            };
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(text.parse().expect("digit run parses as integer"))
    }
}

pub fn parse(text: &str) -> Result<DiffPoly, ParseError> {
    let mut lex = Lexer::new(text);
    if lex.peek().is_none() {
        return Err(ParseError::Empty);
    }
    let mut poly = DiffPoly::zero();
    let mut sign = match lex.peek() {
        Some(b'-') => {
            lex.bump();
            -1
        }
        Some(b'+') => {
            lex.bump();
            1
        }
        _ => 1,
    };
    loop {
        let term = parse_term(&mut lex)?;
        poly = if sign < 0 { &poly - &term } else { &poly + &term };
        match lex.peek() {
            None => return Ok(poly),
            Some(b'+') => {
                lex.bump();
                sign = 1;
            }
            Some(b'-') => {
                lex.bump();
                sign = -1;
            }
            Some(c) => {
                return Err(ParseError::Unexpected {
                    found: c as char,
                    at: lex.pos,
                })
            }
        }
    }
}

fn parse_term(lex: &mut Lexer) -> Result<DiffPoly, ParseError> {
    let mut coeff = Rational::one();
    let mut mono = Monomial::one();
    loop {
        match lex.peek() {
            Some(c) if c.is_ascii_digit() => {
                let num = lex.expect_digit_run()?;
                let den = if lex.peek() == Some(b'/') {
                    lex.bump();
                    let at = lex.pos;
                    let d = lex.expect_digit_run()?;
                    if d.is_zero() {
                        return Err(ParseError::ZeroDenominator { at });
                    }
                    d
                } else {
                    BigInt::one()
                };
                coeff *= Rational::new(num, den);
            }
            Some(b'u') => {
                lex.bump();
                let j = lex.expect_digit_run()?;
                let j: usize = j.try_into().map_err(|_| ParseError::Unexpected {
                    found: 'u',
                    at: lex.pos,
                })?;
                let e = if lex.peek() == Some(b'^') {
                    lex.bump();
                    let e = lex.expect_digit_run()?;
                    e.try_into().map_err(|_| ParseError::Unexpected {
                        found: '^',
                        at: lex.pos,
                    })?
                } else {
                    1u32
                };
                mono = mono.with(j, e);
            }
            Some(c) => {
                return Err(ParseError::Unexpected {
                    found: c as char,
                    at: lex.pos,
                })
            }
            None => return Err(ParseError::Eof),
        }
        if lex.peek() == Some(b'*') {
            lex.bump();
            continue;
        }
        break;
    }
    Ok(DiffPoly::term(coeff, mono))
}
