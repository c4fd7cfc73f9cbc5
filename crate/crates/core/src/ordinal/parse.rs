//! Ordinal expressions: `w`, natural literals, `+`, `*`, `^` and
//! parentheses, with the usual precedence (`^` binds tightest and is right
//! associative). `w^2*3+w*5` is ω²·3 + ω·5.

use std::str::FromStr;

use super::cnf::{coefficient, Cnf, Coefficient};
use crate::error::{Error, Result};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

fn err<T>(position: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse { position, message: message.into() })
}

impl<C: Coefficient> FromStr for Cnf<C> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_ordinal(s)
    }
}

pub fn parse_ordinal<C: Coefficient>(s: &str) -> Result<Cnf<C>> {
    let mut p = Parser { src: s.as_bytes(), pos: 0 };
    let value = p.sum()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return err(p.pos, format!("unexpected `{}`", p.src[p.pos] as char));
    }
    Ok(value)
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum<C: Coefficient>(&mut self) -> Result<Cnf<C>> {
        let mut v = self.product()?;
        while self.eat(b'+') {
            v = v.add(&self.product()?);
        }
        Ok(v)
    }

    fn product<C: Coefficient>(&mut self) -> Result<Cnf<C>> {
        let mut v = self.power()?;
        while self.eat(b'*') {
            v = v.mul(&self.power()?);
        }
        Ok(v)
    }

    fn power<C: Coefficient>(&mut self) -> Result<Cnf<C>> {
        self.skip_ws();
        let start = self.pos;
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let exp_pos = self.pos;
        let exp = self.power()?;
        if base == Cnf::omega() {
            return Ok(Cnf::omega_pow(exp));
        }
        match (base.as_finite(), exp.as_finite()) {
            (Some(b), Some(e)) => {
                let mut out = C::one();
                let mut i = C::zero();
                while i < e {
                    out = out * b.clone();
                    i = i + C::one();
                }
                Ok(Cnf::nat(out))
            }
            (Some(_), None) => err(exp_pos, "only w may be raised to an infinite power"),
            _ => err(start, "only w and naturals may be used as a base"),
        }
    }

    fn atom<C: Coefficient>(&mut self) -> Result<Cnf<C>> {
        self.skip_ws();
        let start = self.pos;
        match self.src.get(self.pos) {
            Some(b'w') | Some(b'W') => {
                self.pos += 1;
                Ok(Cnf::omega())
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.sum()?;
                if !self.eat(b')') {
                    return err(self.pos, "expected `)`");
                }
                Ok(v)
            }
            Some(d) if d.is_ascii_digit() => {
                while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
                let n: u64 = match text.parse() {
                    Ok(n) => n,
                    Err(_) => return err(start, "integer literal too large"),
                };
                Ok(Cnf::nat(coefficient(n)))
            }
            Some(&c) => err(start, format!("unexpected `{}`", c as char)),
            None => err(start, "unexpected end of input"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::Ordinal;

    fn p(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn round_trips() {
        for s in ["0", "7", "w", "w+5", "w*2", "w^2*3+w*5", "w^w", "w^(w+1)*2+w^3+4"] {
            assert_eq!(p(s).to_string(), s);
        }
    }

    #[test]
    fn arithmetic_in_expressions() {
        assert_eq!(p("5+w").to_string(), "w");
        assert_eq!(p("w*w").to_string(), "w^2");
        assert_eq!(p("2^3").to_string(), "8");
        assert_eq!(p("(w+1)*2").to_string(), "w*2+1");
        assert_eq!(p(" w ^ 2 * 3 ").to_string(), "w^2*3");
    }

    #[test]
    fn error_positions() {
        let pos = |s: &str| match s.parse::<Ordinal>() {
            Err(Error::Parse { position, .. }) => position,
            other => panic!("{other:?}"),
        };
        assert_eq!(pos("w+"), 2);
        assert_eq!(pos("w*x"), 2);
        assert_eq!(pos("(w"), 2);
        assert_eq!(pos("2^w"), 2);
        assert_eq!(pos("w 3"), 2);
    }
}
