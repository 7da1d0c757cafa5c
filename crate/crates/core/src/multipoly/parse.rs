//! Recursive-descent parser for the textual polynomial format.
//!
//! Accepts everything the printer emits (`2*t1*t2 - 1/2*t3^2 + 1`) plus
//! parentheses, so `(t1 + t2)*(t3 + t4)^2` is also valid input.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{MultiPoly, PolyError, Vars};
use crate::scalar::Ring;

struct Parser<'a, 'v> {
    src: &'a [u8],
    pos: usize,
    vars: Option<&'v Arc<Vars>>,
}

pub(super) fn parse<C: Ring>(src: &str, vars: Option<&Arc<Vars>>) -> Result<MultiPoly<C>, PolyError> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        vars,
    };
    let out = p.sum::<C>()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    match vars {
        Some(v) => out.with_vars(v),
        None => Ok(out),
    }
}

impl<'a, 'v> Parser<'a, 'v> {
    fn error(&self, msg: &str) -> PolyError {
        PolyError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
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

    fn empty_vars(&self) -> Arc<Vars> {
        self.vars.cloned().unwrap_or_else(|| Vars::new::<&str>([]))
    }

    fn constant<C: Ring>(&self, q: &BigRational) -> Result<MultiPoly<C>, PolyError> {
        let c = C::from_rational(q).ok_or_else(|| self.error("coefficient not representable"))?;
        Ok(MultiPoly::constant(self.empty_vars(), c))
    }

    fn sum<C: Ring>(&mut self) -> Result<MultiPoly<C>, PolyError> {
        let mut negate = false;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            negate = true;
        } else if self.peek() == Some(b'+') {
            self.pos += 1;
        }
        let first = self.product::<C>()?;
        let mut acc = if negate { -&first } else { first };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.product::<C>()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.product::<C>()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product<C: Ring>(&mut self) -> Result<MultiPoly<C>, PolyError> {
        let mut acc = self.power::<C>()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.power::<C>()?;
        }
        Ok(acc)
    }

    fn power<C: Ring>(&mut self) -> Result<MultiPoly<C>, PolyError> {
        let base = self.atom::<C>()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.integer()?;
            let e: u32 = e
                .try_into()
                .map_err(|_| self.error("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom<C: Ring>(&mut self) -> Result<MultiPoly<C>, PolyError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.sum::<C>()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                let mut q = BigRational::from_integer(num);
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    let den = self.integer()?;
                    if den.is_zero() {
                        return Err(self.error("zero denominator"));
                    }
                    q /= BigRational::from_integer(den);
                }
                self.constant(&q)
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                match self.vars {
                    Some(v) => MultiPoly::named_var(v.clone(), name),
                    None => Ok(MultiPoly::var(Vars::new([name]), 0)),
                }
            }
            _ => Err(self.error("expected a number, variable or `(`")),
        }
    }

    fn integer(&mut self) -> Result<BigInt, PolyError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        Ok(s.parse().expect("digits"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn parenthesised_input() {
        let a: MultiPoly<Rational> = MultiPoly::parse("(t1 + t2)*(t3 + t4)").unwrap();
        let b = MultiPoly::parse("t1*t3 + t1*t4 + t2*t3 + t2*t4").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fixed_variable_set() {
        let vars = Vars::new(["t1", "t2", "t3"]);
        let f: MultiPoly<Rational> = MultiPoly::parse_in(&vars, "t3 + t1").unwrap();
        assert_eq!(f.to_string(), "t1 + t3");
        assert!(matches!(
            MultiPoly::<Rational>::parse_in(&vars, "t4"),
            Err(PolyError::UnknownVariable(_))
        ));
    }

    #[test]
    fn malformed_input() {
        for bad in ["", "t1 +", "2*", "(t1", "t1 t2", "1/0"] {
            assert!(MultiPoly::<Rational>::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn integer_ring_rejects_fractions() {
        assert!(MultiPoly::<BigInt>::parse("1/2*t1").is_err());
        assert!(MultiPoly::<BigInt>::parse("4/2*t1").is_ok());
    }
}
