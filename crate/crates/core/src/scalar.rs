//! Exact coefficient domains.
//!
//! Everything in this crate is generic over a [`Ring`] (and a [`Field`] where
//! division is needed). The concrete instances are arbitrary-precision
//! integers, rationals, and prime fields `Fp<P>`. There is deliberately no
//! floating-point instance.

use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A commutative ring with exact arithmetic.
pub trait Ring:
    Clone
    + Debug
    + Display
    + PartialEq
    + Eq
    + Hash
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Whether the printed form of this element starts with a minus sign.
    fn is_negative(&self) -> bool {
        false
    }

    /// Image of an integer under the canonical map `Z -> R`.
    fn from_i64(n: i64) -> Self;

    /// Image of a rational number, when it exists in this ring.
    fn from_rational(q: &BigRational) -> Option<Self>;

    /// Residue modulo `p`, when this element has one.
    fn reduce_mod(&self, p: u64) -> Option<u64>;
}

/// A [`Ring`] in which every nonzero element is invertible.
pub trait Field: Ring + Div<Output = Self> {
    fn inv(&self) -> Self;
}

impl Ring for BigInt {
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }

    fn from_i64(n: i64) -> Self {
        BigInt::from(n)
    }

    fn from_rational(q: &BigRational) -> Option<Self> {
        q.is_integer().then(|| q.numer().clone())
    }

    fn reduce_mod(&self, p: u64) -> Option<u64> {
        self.mod_floor(&BigInt::from(p)).to_u64()
    }
}

impl Ring for BigRational {
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }

    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_rational(q: &BigRational) -> Option<Self> {
        Some(q.clone())
    }

    fn reduce_mod(&self, p: u64) -> Option<u64> {
        let num = self.numer().reduce_mod(p)?;
        let den = self.denom().reduce_mod(p)?;
        let inv = inverse_mod(den, p)?;
        Some(mul_mod(num, inv, p))
    }
}

impl Field for BigRational {
    fn inv(&self) -> Self {
        self.recip()
    }
}

/// Element of the prime field with `P` elements.
///
/// `P` must be prime and below 2^32 so that products fit in a `u64`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fp<const P: u64>(u64);

impl<const P: u64> Fp<P> {
    pub const MODULUS: u64 = P;

    pub fn new(v: u64) -> Self {
        Fp(v % P)
    }

    pub fn value(self) -> u64 {
        self.0
    }
}

impl<const P: u64> Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {P})", self.0)
    }
}

impl<const P: u64> Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Zero for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u64> One for Fp<P> {
    fn one() -> Self {
        Fp(1 % P)
    }
}

impl<const P: u64> Add for Fp<P> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Fp((self.0 + rhs.0) % P)
    }
}

impl<const P: u64> Sub for Fp<P> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Fp((self.0 + P - rhs.0) % P)
    }
}

impl<const P: u64> Mul for Fp<P> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Fp(mul_mod(self.0, rhs.0, P))
    }
}

impl<const P: u64> Neg for Fp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Fp((P - self.0) % P)
    }
}

impl<const P: u64> Div for Fp<P> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.inv()
    }
}

impl<const P: u64> Ring for Fp<P> {
    fn from_i64(n: i64) -> Self {
        Fp(n.rem_euclid(P as i64) as u64)
    }

    fn from_rational(q: &BigRational) -> Option<Self> {
        q.reduce_mod(P).map(Fp)
    }

    fn reduce_mod(&self, p: u64) -> Option<u64> {
        (p == P).then_some(self.0)
    }
}

impl<const P: u64> Field for Fp<P> {
    fn inv(&self) -> Self {
        Fp(inverse_mod(self.0, P).expect("division by zero in prime field"))
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `p` via the extended Euclidean algorithm.
pub(crate) fn inverse_mod(a: u64, p: u64) -> Option<u64> {
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(p as i128) as u64)
}

/// Deterministic primality test by trial division; moduli here are small.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        type F7 = Fp<7>;
        assert_eq!(F7::new(3) * F7::new(5), F7::new(1));
        assert_eq!(F7::new(3).inv(), F7::new(5));
        assert_eq!(-F7::new(0), F7::new(0));
        assert_eq!(F7::from_i64(-1), F7::new(6));
    }

    #[test]
    fn rational_residues() {
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        assert_eq!(half.reduce_mod(7), Some(4));
        assert_eq!(half.reduce_mod(2), None);
        assert_eq!(BigInt::from(-3).reduce_mod(5), Some(2));
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(pow_mod(3, 4, 7), 4);
        assert_eq!(inverse_mod(4, 8), None);
    }
}
