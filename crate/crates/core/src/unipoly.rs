//! Dense univariate polynomials in `t`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::multipoly::{MultiPoly, PolyError, Vars};
use crate::scalar::Ring;

/// Polynomial `c[0] + c[1] t + ...` with trailing zeros stripped.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniPoly<C: Ring> {
    coeffs: Vec<C>,
}

impl<C: Ring> UniPoly<C> {
    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(C::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    /// From ascending integer coefficients.
    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C::from_i64(c)).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn constant(c: C) -> Self {
        Self::new(vec![c])
    }

    /// The variable `t`.
    pub fn t() -> Self {
        Self::new(vec![C::zero(), C::one()])
    }

    /// `t + c` for an integer `c`.
    pub fn t_plus(c: i64) -> Self {
        Self::new(vec![C::from_i64(c), C::one()])
    }

    /// `t^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![C::zero(); k + 1];
        coeffs[k] = C::one();
        UniPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> C {
        self.coeffs.get(i).cloned().unwrap_or_else(C::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scalar_mul(&self, c: &C) -> Self {
        Self::new(self.coeffs.iter().map(|x| x.clone() * c.clone()).collect())
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, x: &C) -> C {
        self.coeffs
            .iter()
            .rev()
            .fold(C::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * C::from_i64(i as i64))
                .collect(),
        )
    }

    /// Value of the derivative at zero, i.e. the coefficient of `t`.
    pub fn derivative_at_zero(&self) -> C {
        self.coeff(1)
    }

    /// Parse the textual form, e.g. `t^5 + 2*t^4 - t`; the only variable
    /// allowed is `t`.
    pub fn parse(src: &str) -> Result<Self, PolyError> {
        let vars = Vars::new(["t"]);
        let p: MultiPoly<C> = MultiPoly::parse_in(&vars, src)?;
        let mut coeffs = vec![C::zero(); p.total_degree().map_or(0, |d| d + 1)];
        for (m, c) in p.terms() {
            coeffs[m.exponents()[0] as usize] = c.clone();
        }
        Ok(Self::new(coeffs))
    }
}

impl<C: Ring> fmt::Display for UniPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = if neg { -c.clone() } else { c.clone() };
            match (first, neg) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            let power = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            };
            match (abs.is_one(), i) {
                (_, 0) => write!(f, "{abs}")?,
                (true, _) => f.write_str(&power)?,
                (false, _) => write!(f, "{abs}*{power}")?,
            }
        }
        Ok(())
    }
}

impl<'a, C: Ring> Add<&'a UniPoly<C>> for &'a UniPoly<C> {
    type Output = UniPoly<C>;
    fn add(self, rhs: &'a UniPoly<C>) -> UniPoly<C> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<'a, C: Ring> Sub<&'a UniPoly<C>> for &'a UniPoly<C> {
    type Output = UniPoly<C>;
    fn sub(self, rhs: &'a UniPoly<C>) -> UniPoly<C> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<'a, C: Ring> Mul<&'a UniPoly<C>> for &'a UniPoly<C> {
    type Output = UniPoly<C>;
    fn mul(self, rhs: &'a UniPoly<C>) -> UniPoly<C> {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![C::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        UniPoly::new(out)
    }
}

impl<C: Ring> Neg for &UniPoly<C> {
    type Output = UniPoly<C>;
    fn neg(self) -> UniPoly<C> {
        UniPoly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl<C: Ring> $tr for UniPoly<C> {
            type Output = UniPoly<C>;
            fn $f(self, rhs: UniPoly<C>) -> UniPoly<C> {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    type F = UniPoly<BigInt>;

    #[test]
    fn arithmetic_and_degree() {
        let a = F::t_plus(1);
        assert_eq!(a.pow(3), F::from_i64s(&[1, 3, 3, 1]));
        assert_eq!(F::zero().degree(), None);
        assert_eq!(F::from_i64s(&[1, 2, 0, 0]).degree(), Some(1));
        assert_eq!(&a - &a, F::zero());
    }

    #[test]
    fn derivative_at_zero() {
        assert_eq!(F::parse("t^5 + 2*t^4 + 4*t^3 + 2*t^2").unwrap().derivative_at_zero(), BigInt::from(0));
        assert_eq!((F::t() * F::t_plus(1)).derivative_at_zero(), BigInt::from(1));
        assert_eq!(F::constant(BigInt::from(9)).derivative_at_zero(), BigInt::from(0));
    }

    #[test]
    fn text_round_trip() {
        let f = F::from_i64s(&[0, -1, 1, 2, 7, 2, 1]);
        assert_eq!(f.to_string(), "t^6 + 2*t^5 + 7*t^4 + 2*t^3 + t^2 - t");
        assert_eq!(F::parse(&f.to_string()).unwrap(), f);
        assert_eq!(F::parse("4*t^3 + t*(t-1)^3").unwrap(), F::from_i64s(&[0, -1, 3, 1, 1]));
        assert_eq!(F::from_i64s(&[-5]).to_string(), "-5");
        assert!(F::parse("x + 1").is_err());
    }
}
