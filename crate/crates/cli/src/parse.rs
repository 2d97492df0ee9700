//! The operator expression language.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := coeff? gen* ; at least one of the two
//! gen   := 'T' index | 'T*' index
//! coeff := rational ('*' phase)? | phase
//! phase := 'w' order '^' '-'? exp
//! ```
//!
//! Indices are 1-based. A leading sign is allowed on the first term.

use std::fmt;
use std::sync::Arc;

use colorweyl::weyl::{Generator, WeylElement, WordExpr};
use colorweyl::{CommutationFactor, PhaseScalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    dim: usize,
}

impl Parser {
    fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        let (mut line, mut column) = (1, 1);
        for &ch in &self.chars[..pos.min(self.chars.len())] {
            if ch == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        ParseError { line, column, message: message.into() }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, ch: char) -> bool {
        if self.peek() == Some(ch) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, ch: char, what: &str) -> Result<(), ParseError> {
        if self.eat(ch) {
            Ok(())
        } else {
            Err(self.error_at(self.pos, format!("expected {what}")))
        }
    }

    fn digits(&mut self, what: &str) -> Result<(usize, String), ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error_at(start, format!("expected {what}")));
        }
        Ok((start, self.chars[start..self.pos].iter().collect()))
    }

    fn small<T: std::str::FromStr>(&mut self, what: &str) -> Result<(usize, T), ParseError> {
        let (start, text) = self.digits(what)?;
        let v = text.parse().map_err(|_| self.error_at(start, format!("{what} {text} is too large")))?;
        Ok((start, v))
    }

    fn expr(&mut self) -> Result<WordExpr, ParseError> {
        self.skip_ws();
        if self.peek().is_none() {
            return Err(self.error_at(self.pos, "empty expression"));
        }
        let mut negative = self.eat('-');
        let mut out = WordExpr::zero();
        loop {
            self.skip_ws();
            let start = self.pos;
            let mut term = self.term()?;
            if negative {
                term = term.scale(&PhaseScalar::from_integer(-1)).map_err(|e| self.error_at(start, e.to_string()))?;
            }
            out = out.add(&term).map_err(|e| self.error_at(start, e.to_string()))?;
            self.skip_ws();
            match self.peek() {
                None => return Ok(out),
                Some('+') => negative = false,
                Some('-') => negative = true,
                Some(c) => {
                    return Err(self.error_at(self.pos, format!("unexpected '{c}', expected '+', '-' or end of input")))
                }
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<WordExpr, ParseError> {
        let start = self.pos;
        let coef = match self.peek() {
            Some(c) if c.is_ascii_digit() => Some(self.coefficient()?),
            Some('w') => {
                let pos = self.pos;
                let (order, exp) = self.phase()?;
                Some(
                    PhaseScalar::term(BigRational::from_integer(1.into()), order, exp)
                        .map_err(|e| self.error_at(pos, e.to_string()))?,
                )
            }
            _ => None,
        };
        let mut word = Vec::new();
        loop {
            self.skip_ws();
            if self.peek() == Some('T') {
                word.push(self.generator()?);
            } else {
                break;
            }
        }
        if coef.is_none() && word.is_empty() {
            return Err(match self.peek() {
                Some(c) => self.error_at(self.pos, format!("unexpected '{c}', expected a coefficient or generator")),
                None => self.error_at(start, "expected a term"),
            });
        }
        Ok(WordExpr::word(word, coef.unwrap_or_else(PhaseScalar::one)))
    }

    fn coefficient(&mut self) -> Result<PhaseScalar, ParseError> {
        let start = self.pos;
        let (_, num) = self.digits("a number")?;
        let mut den = String::from("1");
        if self.eat('/') {
            den = self.digits("a denominator")?.1;
        }
        let num: BigInt = num.parse().expect("digits");
        let den: BigInt = den.parse().expect("digits");
        if den == BigInt::from(0) {
            return Err(self.error_at(start, "zero denominator"));
        }
        let r = BigRational::new(num, den);
        if self.eat('*') {
            let pos = self.pos;
            let (order, exp) = self.phase()?;
            return PhaseScalar::term(r, order, exp).map_err(|e| self.error_at(pos, e.to_string()));
        }
        Ok(PhaseScalar::from_rational(r))
    }

    fn phase(&mut self) -> Result<(u32, i64), ParseError> {
        self.expect('w', "'w'")?;
        let (pos, order) = self.small::<u32>("an order")?;
        if order == 0 {
            return Err(self.error_at(pos, "root order must be positive"));
        }
        self.expect('^', "'^'")?;
        let negative = self.eat('-');
        let (_, exp) = self.small::<i64>("an exponent")?;
        Ok((order, if negative { -exp } else { exp }))
    }

    fn generator(&mut self) -> Result<Generator, ParseError> {
        self.expect('T', "'T'")?;
        let star = self.eat('*');
        let (pos, index) = self.small::<usize>("a mode index")?;
        if index == 0 || index > self.dim {
            return Err(self.error_at(pos, format!("mode index {index} is out of range 1..={}", self.dim)));
        }
        Ok(if star { Generator::Annihilate(index - 1) } else { Generator::Create(index - 1) })
    }
}

/// Parses an expression into the free algebra over `N = dim` modes.
pub fn parse_words(text: &str, dim: usize) -> Result<WordExpr, ParseError> {
    Parser { chars: text.chars().collect(), pos: 0, dim }.expr()
}

/// Parses and normal-orders an expression.
pub fn parse_expression(text: &str, c: &Arc<CommutationFactor>) -> Result<WeylElement, ParseError> {
    let words = parse_words(text, c.dim())?;
    words.normal_form(c).map_err(|e| ParseError { line: 1, column: 1, message: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use colorweyl::statistics::{make_factor, FactorPreset, PresetKind};
    use Generator::{Annihilate as A, Create as C};

    fn factor(kind: PresetKind, n: usize) -> Arc<CommutationFactor> {
        Arc::new(make_factor(&FactorPreset::new(kind, n)).unwrap())
    }

    #[test]
    fn parses_the_grammar() {
        let x = parse_words("T*1 T1 - 1/2*w4^1 T2 T*2", 2).unwrap();
        let i_half = PhaseScalar::term(BigRational::new(1.into(), 2.into()), 4, 1).unwrap();
        let expected = WordExpr::word(vec![A(0), C(0)], PhaseScalar::one())
            .add(&WordExpr::word(vec![C(1), A(1)], -i_half))
            .unwrap();
        assert_eq!(x, expected);
        assert_eq!(parse_words("-2", 1).unwrap(), WordExpr::word(vec![], PhaseScalar::from_integer(-2)));
        assert_eq!(
            parse_words("w4^-1 T1", 1).unwrap(),
            WordExpr::word(vec![C(0)], PhaseScalar::root_of_unity(4, 3).unwrap())
        );
    }

    #[test]
    fn examples_through_the_parser() {
        let cf = factor(PresetKind::Example3Cf, 2);
        assert_eq!(parse_expression("T*1 T1", &cf).unwrap().to_string(), "1 + T1 T*1");
        let cb = factor(PresetKind::Example4Cb, 2);
        assert!(parse_expression("T1 T1", &cb).unwrap().is_zero());
        assert_eq!(parse_expression("T*1 T1", &cb).unwrap().to_string(), "1 - T1 T*1");
        let x = parse_expression("1/2*w4^1 T2", &cf).unwrap();
        assert_eq!(x.to_string(), "1/2*w4^1 T2");
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_words("T1 T3", 2).unwrap_err();
        assert_eq!((e.line, e.column), (1, 5));
        assert!(e.message.contains("out of range"));
        let e = parse_words("T1 +\n  T", 2).unwrap_err();
        assert_eq!((e.line, e.column), (2, 4));
        let e = parse_words("T1 ? T2", 2).unwrap_err();
        assert_eq!((e.line, e.column), (1, 4));
        let e = parse_words("1/0 T1", 2).unwrap_err();
        assert_eq!(e.message, "zero denominator");
        let e = parse_words("1*w720^1", 2).unwrap_err();
        assert!(e.message.contains("exceeds"), "{e}");
        assert!(parse_words("", 2).is_err());
        assert!(parse_words("T1 -", 2).is_err());
        assert!(parse_words("T0", 2).is_err());
    }
}
