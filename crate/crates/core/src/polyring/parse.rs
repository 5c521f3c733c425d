//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := ('+'|'-') factor | atom ['^' uint]
//! atom   := uint ['/' uint] | ident | '(' expr ')'
//! ```
//!
//! Whitespace is ignored; U+2212 MINUS SIGN is accepted as `-`. Offsets in
//! errors count characters from the start of the input.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{PolyError, Polynomial, MAX_VARS};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, PolyError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '/' => Tok::Slash,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            d if d.is_ascii_digit() => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push((Tok::Num(s.parse().expect("digits")), start));
                continue;
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), start));
                continue;
            }
            other => {
                return Err(PolyError::Syntax {
                    offset: start,
                    message: format!("unexpected character '{other}'"),
                })
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, chars.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn at(&self) -> &(Tok, usize) {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn peek(&self) -> &Tok {
        &self.at().0
    }

    fn offset(&self) -> usize {
        self.at().1
    }

    fn bump(&mut self) -> Tok {
        let t = self.at().0.clone();
        self.pos += 1;
        t
    }

    fn error(&self, message: impl Into<String>) -> PolyError {
        PolyError::Syntax {
            offset: self.offset(),
            message: message.into(),
        }
    }

    fn expr(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = match self.peek() {
            Tok::Plus => {
                self.bump();
                self.term()?
            }
            Tok::Minus => {
                self.bump();
                -self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial, PolyError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                return Ok(-self.factor()?);
            }
            Tok::Plus => {
                self.bump();
                return self.factor();
            }
            _ => {}
        }
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            match self.bump() {
                Tok::Num(k) => {
                    let k: u32 = k
                        .try_into()
                        .map_err(|_| self.error("exponent too large"))?;
                    return Ok(base.pow(k));
                }
                _ => {
                    self.pos -= 1;
                    return Err(self.error("expected unsigned integer exponent"));
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial, PolyError> {
        let n = self.vars.len();
        match self.bump() {
            Tok::Num(a) => {
                let mut value = BigRational::from_integer(a);
                if *self.peek() == Tok::Slash {
                    self.bump();
                    match self.bump() {
                        Tok::Num(b) if !b.is_zero() => {
                            value /= BigRational::from_integer(b);
                        }
                        Tok::Num(_) => {
                            self.pos -= 1;
                            return Err(self.error("zero denominator"));
                        }
                        _ => {
                            self.pos -= 1;
                            return Err(self.error("expected denominator"));
                        }
                    }
                }
                Ok(Polynomial::constant(n, value))
            }
            Tok::Ident(name) => match self.vars.iter().position(|v| *v == name) {
                Some(i) => Ok(Polynomial::var(n, i)),
                None => {
                    self.pos -= 1;
                    Err(PolyError::UndeclaredVariable {
                        name,
                        offset: self.offset(),
                    })
                }
            },
            Tok::LParen => {
                let inner = self.expr()?;
                if self.bump() != Tok::RParen {
                    self.pos -= 1;
                    return Err(self.error("expected ')'"));
                }
                Ok(inner)
            }
            _ => {
                self.pos -= 1;
                Err(self.error("expected number, variable or '('"))
            }
        }
    }
}

/// Parses `text` into an expanded polynomial over `vars` (in that order).
pub fn parse_polynomial(text: &str, vars: &[&str]) -> Result<Polynomial, PolyError> {
    if vars.len() > MAX_VARS {
        return Err(PolyError::TooManyVariables(vars.len()));
    }
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, vars };
    let poly = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(poly)
}

/// Parses a rational literal such as `3/10`, `-2` or a decimal like `0.125`.
pub fn parse_rational(text: &str) -> Result<BigRational, PolyError> {
    let s = text.trim();
    let bad = || PolyError::Syntax {
        offset: 0,
        message: format!("not a rational number: '{s}'"),
    };
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest.trim_start()),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let value = if let Some((a, b)) = body.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        BigRational::new(a, b)
    } else if let Some((ip, fp)) = body.split_once('.') {
        if fp.is_empty() && ip.is_empty() {
            return Err(bad());
        }
        let digits = format!("{ip}{fp}");
        if !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let num: BigInt = digits.parse().map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), fp.len());
        BigRational::new(num, den)
    } else {
        let (mant, exp) = match body.split_once(['e', 'E']) {
            Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
            None => (body, 0),
        };
        let m: BigInt = mant.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigRational::from_integer(BigInt::from(10)), exp.unsigned_abs() as usize);
        let base = BigRational::from_integer(m);
        if exp >= 0 {
            base * scale
        } else {
            base / scale
        }
    };
    Ok(if neg { -value } else { value })
}
