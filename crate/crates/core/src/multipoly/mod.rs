//! Sparse multivariate polynomials with exact coefficients.
//!
//! A polynomial lives over an ordered variable set ([`Vars`]); terms are kept
//! in a `BTreeMap` under the degree-reverse-lexicographic order induced by
//! that variable order, so the representation is canonical. Binary
//! operations on polynomials over different variable sets first move both
//! operands to the union of the two sets.

mod parse;

use std::collections::{BTreeMap, HashMap};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

use crate::scalar::{is_prime, mul_mod, pow_mod, Field, Ring};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("no value assigned to variable `{0}`")]
    MissingVariable(String),
    #[error("modulus {0} is not prime")]
    CompositeModulus(u64),
    #[error("coefficient {0} has no residue modulo {1}")]
    NonReducible(String, u64),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Ordered set of variable names; index 0 is the largest variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vars(Vec<String>);

impl Vars {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Arc<Self> {
        Arc::new(Vars(names.into_iter().map(Into::into).collect()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }
}

/// Dense exponent vector over a [`Vars`] set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Box<[u16]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars].into_boxed_slice())
    }

    pub fn from_exponents(exps: Vec<u16>) -> Self {
        Monomial(exps.into_boxed_slice())
    }

    /// Product of the variables with the given indices.
    pub fn from_support(nvars: usize, support: impl IntoIterator<Item = usize>) -> Self {
        let mut m = vec![0u16; nvars];
        for i in support {
            m[i] += 1;
        }
        Monomial(m.into_boxed_slice())
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Self) -> Self {
        Monomial(other.0.iter().zip(self.0.iter()).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Self) -> Self {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Self) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| *a == 0 || *b == 0)
    }

    fn remap(&self, nvars: usize, map: &[usize]) -> Self {
        let mut out = vec![0u16; nvars];
        for (i, &e) in self.0.iter().enumerate() {
            out[map[i]] += e;
        }
        Monomial(out.into_boxed_slice())
    }
}

impl Ord for Monomial {
    /// Degree reverse lexicographic order.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for (a, b) in self.0.iter().zip(other.0.iter()).rev() {
                if a != b {
                    return b.cmp(a);
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Homogeneity of a polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Homogeneity {
    Degree(usize),
    /// The zero polynomial, homogeneous of every degree.
    Zero,
}

#[derive(Clone, Debug)]
pub struct MultiPoly<C: Ring> {
    vars: Arc<Vars>,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Ring> MultiPoly<C> {
    pub fn zero(vars: Arc<Vars>) -> Self {
        MultiPoly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: Arc<Vars>, c: C) -> Self {
        let mut p = Self::zero(vars);
        let n = p.vars.len();
        p.add_term(Monomial::one(n), c);
        p
    }

    pub fn one(vars: Arc<Vars>) -> Self {
        Self::constant(vars, C::one())
    }

    /// The variable with index `i`.
    pub fn var(vars: Arc<Vars>, i: usize) -> Self {
        let n = vars.len();
        let mut p = Self::zero(vars);
        p.add_term(Monomial::from_support(n, [i]), C::one());
        p
    }

    /// The variable called `name`, which must belong to `vars`.
    pub fn named_var(vars: Arc<Vars>, name: &str) -> Result<Self, PolyError> {
        let i = vars
            .index_of(name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))?;
        Ok(Self::var(vars, i))
    }

    pub fn from_terms(vars: Arc<Vars>, terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Self::zero(vars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn vars(&self) -> &Arc<Vars> {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms from the largest monomial down.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> {
        self.terms.iter().rev()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> Option<usize> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn homogeneity(&self) -> Option<Homogeneity> {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => Some(Homogeneity::Zero),
            Some(d) => degs.all(|x| x == d).then_some(Homogeneity::Degree(d)),
        }
    }

    pub fn is_multilinear(&self) -> bool {
        self.terms.keys().all(|m| m.0.iter().all(|&e| e <= 1))
    }

    /// Names of the variables that actually occur.
    pub fn support(&self) -> Vec<&str> {
        (0..self.vars.len())
            .filter(|&i| self.terms.keys().any(|m| m.0[i] > 0))
            .map(|i| self.vars.0[i].as_str())
            .collect()
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// `self -= c * m * g`, in place; `g` must share this variable set.
    pub(crate) fn sub_scaled(&mut self, m: &Monomial, c: &C, g: &Self) {
        for (gm, gc) in &g.terms {
            self.add_term(gm.mul(m), -(gc.clone() * c.clone()));
        }
    }

    pub(crate) fn pop_leading(&mut self) -> Option<(Monomial, C)> {
        self.terms.pop_last()
    }

    /// Same polynomial over a superset `target` of its variables.
    pub fn with_vars(&self, target: &Arc<Vars>) -> Result<Self, PolyError> {
        if Arc::ptr_eq(&self.vars, target) || *self.vars == **target {
            return Ok(MultiPoly {
                vars: target.clone(),
                terms: self.terms.clone(),
            });
        }
        let mut map = Vec::with_capacity(self.vars.len());
        for (i, name) in self.vars.0.iter().enumerate() {
            match target.index_of(name) {
                Some(j) => map.push(j),
                None if self.terms.keys().all(|m| m.0[i] == 0) => map.push(usize::MAX),
                None => return Err(PolyError::UnknownVariable(name.clone())),
            }
        }
        let n = target.len();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut out = vec![0u16; n];
                for (i, &e) in m.0.iter().enumerate() {
                    if e > 0 {
                        out[map[i]] += e;
                    }
                }
                (Monomial(out.into_boxed_slice()), c.clone())
            })
            .collect();
        Ok(MultiPoly {
            vars: target.clone(),
            terms,
        })
    }

    /// Rename variable `i` to `target[map[i]]`.
    pub fn relabel(&self, target: Arc<Vars>, map: &[usize]) -> Self {
        let n = target.len();
        let mut p = Self::zero(target);
        for (m, c) in &self.terms {
            p.add_term(m.remap(n, map), c.clone());
        }
        p
    }

    fn aligned(a: &Self, b: &Self) -> (Self, Self) {
        if Arc::ptr_eq(&a.vars, &b.vars) || a.vars == b.vars {
            return (a.clone(), b.with_vars(&a.vars).expect("equal variable sets"));
        }
        let mut names = a.vars.0.clone();
        for n in &b.vars.0 {
            if !names.contains(n) {
                names.push(n.clone());
            }
        }
        let vars = Arc::new(Vars(names));
        (
            a.with_vars(&vars).expect("superset"),
            b.with_vars(&vars).expect("superset"),
        )
    }

    pub fn scalar_mul(&self, c: &C) -> Self {
        let mut p = Self::zero(self.vars.clone());
        if c.is_zero() {
            return p;
        }
        for (m, x) in &self.terms {
            p.add_term(m.clone(), x.clone() * c.clone());
        }
        p
    }

    pub fn mul_term(&self, m: &Monomial, c: &C) -> Self {
        let mut p = Self::zero(self.vars.clone());
        for (k, x) in &self.terms {
            p.add_term(k.mul(m), x.clone() * c.clone());
        }
        p
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.vars.clone());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative with respect to the variable `name`. A
    /// variable outside the polynomial's set yields zero.
    pub fn partial(&self, name: &str) -> Self {
        match self.vars.index_of(name) {
            Some(i) => self.partial_index(i),
            None => Self::zero(self.vars.clone()),
        }
    }

    pub fn partial_index(&self, i: usize) -> Self {
        let mut p = Self::zero(self.vars.clone());
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e > 0 {
                let mut d = m.0.clone();
                d[i] -= 1;
                p.add_term(Monomial(d), c.clone() * C::from_i64(e as i64));
            }
        }
        p
    }

    /// Split `self = x_i * a + b` for a polynomial of degree at most one in
    /// `x_i`; returns `None` if some exponent of `x_i` exceeds one.
    pub fn split_linear(&self, i: usize) -> Option<(Self, Self)> {
        let mut a = Self::zero(self.vars.clone());
        let mut b = Self::zero(self.vars.clone());
        for (m, c) in &self.terms {
            match m.0[i] {
                0 => b.add_term(m.clone(), c.clone()),
                1 => {
                    let mut d = m.0.clone();
                    d[i] = 0;
                    a.add_term(Monomial(d), c.clone());
                }
                _ => return None,
            }
        }
        Some((a, b))
    }

    pub fn map_coeffs<D: Ring>(&self, f: impl Fn(&C) -> D) -> MultiPoly<D> {
        let mut p = MultiPoly::zero(self.vars.clone());
        for (m, c) in &self.terms {
            p.add_term(m.clone(), f(c));
        }
        p
    }

    /// Value at a point over F_p, with the point given by variable name.
    pub fn evaluate_mod_p(&self, assignment: &HashMap<String, u64>, p: u64) -> Result<u64, PolyError> {
        if !is_prime(p) {
            return Err(PolyError::CompositeModulus(p));
        }
        let mut point = vec![0u64; self.vars.len()];
        for name in self.support() {
            let v = assignment
                .get(name)
                .ok_or_else(|| PolyError::MissingVariable(name.to_string()))?;
            point[self.vars.index_of(name).expect("support")] = v % p;
        }
        Ok(self.to_modular(p)?.eval(&point))
    }

    /// Compile into a form that evaluates quickly at many points mod `p`.
    pub fn to_modular(&self, p: u64) -> Result<ModularPoly, PolyError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let r = c
                .reduce_mod(p)
                .ok_or_else(|| PolyError::NonReducible(c.to_string(), p))?;
            if r == 0 {
                continue;
            }
            let factors = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| (i, e as u64))
                .collect();
            terms.push((r, factors));
        }
        Ok(ModularPoly { p, terms })
    }

    /// Sort-order independent listing of `(named monomial, coefficient)`.
    fn named_terms(&self) -> BTreeMap<Vec<(&str, u16)>, &C> {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut key: Vec<(&str, u16)> = m
                    .0
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (self.vars.0[i].as_str(), e))
                    .collect();
                key.sort_unstable();
                (key, c)
            })
            .collect()
    }

    pub fn parse(src: &str) -> Result<Self, PolyError> {
        parse::parse(src, None)
    }

    /// Parse over a fixed variable set; unknown names are an error.
    pub fn parse_in(vars: &Arc<Vars>, src: &str) -> Result<Self, PolyError> {
        parse::parse(src, Some(vars))
    }
}

impl<C: Field> MultiPoly<C> {
    /// Scale so the leading coefficient is one.
    pub fn monic(&self) -> Self {
        match self.leading_term() {
            None => self.clone(),
            Some((_, c)) => self.scalar_mul(&c.inv()),
        }
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (mut r, d) = Self::aligned(self, d);
        let (dm, dc) = d.leading_term()?;
        let (dm, dinv) = (dm.clone(), dc.inv());
        let mut q = Self::zero(r.vars.clone());
        while let Some((m, c)) = r.leading_term() {
            if !dm.divides(m) {
                return None;
            }
            let qm = dm.quotient_of(m);
            let qc = c.clone() * dinv.clone();
            r = &r - &d.mul_term(&qm, &qc);
            q.add_term(qm, qc);
        }
        Some(q)
    }
}

/// A polynomial compiled for evaluation modulo a fixed prime.
#[derive(Clone, Debug)]
pub struct ModularPoly {
    p: u64,
    terms: Vec<(u64, Vec<(usize, u64)>)>,
}

impl ModularPoly {
    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Value at `point`, indexed like the source polynomial's variables.
    pub fn eval(&self, point: &[u64]) -> u64 {
        let p = self.p;
        let mut acc = 0u64;
        for (c, factors) in &self.terms {
            let mut t = *c;
            for &(i, e) in factors {
                let x = point[i];
                t = mul_mod(t, if e == 1 { x } else { pow_mod(x, e, p) }, p);
                if t == 0 {
                    break;
                }
            }
            acc += t;
            if acc >= p {
                acc -= p;
            }
        }
        acc
    }
}

impl<C: Ring> PartialEq for MultiPoly<C> {
    fn eq(&self, other: &Self) -> bool {
        if self.vars == other.vars {
            self.terms == other.terms
        } else {
            self.named_terms() == other.named_terms()
        }
    }
}

impl<C: Ring> Eq for MultiPoly<C> {}

impl<'a, C: Ring> Add<&'a MultiPoly<C>> for &'a MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn add(self, rhs: &'a MultiPoly<C>) -> MultiPoly<C> {
        let (mut a, b) = MultiPoly::aligned(self, rhs);
        for (m, c) in b.terms {
            a.add_term(m, c);
        }
        a
    }
}

impl<'a, C: Ring> Sub<&'a MultiPoly<C>> for &'a MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn sub(self, rhs: &'a MultiPoly<C>) -> MultiPoly<C> {
        let (mut a, b) = MultiPoly::aligned(self, rhs);
        for (m, c) in b.terms {
            a.add_term(m, -c);
        }
        a
    }
}

impl<'a, C: Ring> Mul<&'a MultiPoly<C>> for &'a MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn mul(self, rhs: &'a MultiPoly<C>) -> MultiPoly<C> {
        let (a, b) = MultiPoly::aligned(self, rhs);
        let mut p = MultiPoly::zero(a.vars.clone());
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                p.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        p
    }
}

impl<C: Ring> Neg for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn neg(self) -> MultiPoly<C> {
        self.map_coeffs(|c| -c.clone())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl<C: Ring> $tr for MultiPoly<C> {
            type Output = MultiPoly<C>;
            fn $f(self, rhs: MultiPoly<C>) -> MultiPoly<C> {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<C: Ring> fmt::Display for MultiPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { -c.clone() } else { c.clone() };
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mut factors: Vec<String> = Vec::new();
            if m.is_one() || !abs.is_one() {
                factors.push(abs.to_string());
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.vars.0[i].clone()),
                    _ => factors.push(format!("{}^{e}", self.vars.0[i])),
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_traits::One;

    type P = MultiPoly<Rational>;

    fn p(s: &str) -> P {
        P::parse(s).unwrap()
    }

    #[test]
    fn ring_examples() {
        assert_eq!(p("t1 + t2") * p("t3 + t4"), p("t1*t3 + t1*t4 + t2*t3 + t2*t4"));
        assert_eq!(&p("t1 + t2") + &P::zero(Vars::new(["t9"])), p("t1 + t2"));
        assert_eq!(p("t1 + t2").pow(2), p("t1^2 + 2*t1*t2 + t2^2"));
        assert_eq!(p("t1 - t1"), P::zero(Vars::new::<&str>([])));
    }

    #[test]
    fn partial_derivatives() {
        let a = p("t2*t3 + 5");
        let b = p("t2^2 - t3");
        let f = &(&p("te") * &a) + &b;
        assert_eq!(f.partial("te"), a);
        assert_eq!(((p("t1 + t2")) * p("t3 + t4")).partial("t1"), p("t3 + t4"));
        assert!(p("7").partial("t1").is_zero());
    }

    #[test]
    fn modular_evaluation() {
        let at = |pairs: &[(&str, u64)]| -> HashMap<String, u64> {
            pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
        };
        assert_eq!(p("t1 + t2").evaluate_mod_p(&at(&[("t1", 1), ("t2", 4)]), 5), Ok(0));
        assert_eq!(p("t1*t2").evaluate_mod_p(&at(&[("t1", 2), ("t2", 3)]), 7), Ok(6));
        assert_eq!(p("t1*t2 + 9").evaluate_mod_p(&at(&[("t1", 0), ("t2", 0)]), 7), Ok(2));
        assert_eq!(
            p("t1 + t2").evaluate_mod_p(&at(&[("t1", 1)]), 5),
            Err(PolyError::MissingVariable("t2".into()))
        );
        assert_eq!(
            p("t1").evaluate_mod_p(&at(&[("t1", 1)]), 6),
            Err(PolyError::CompositeModulus(6))
        );
        assert_eq!(p("1/2*t1").evaluate_mod_p(&at(&[("t1", 1)]), 7), Ok(4));
    }

    #[test]
    fn homogeneity() {
        assert_eq!(p("t1*t2 + t3*t4").homogeneity(), Some(Homogeneity::Degree(2)));
        assert_eq!(p("t1 + t2*t3").homogeneity(), None);
        assert_eq!(p("0").homogeneity(), Some(Homogeneity::Zero));
    }

    #[test]
    fn degrevlex_order() {
        // t1 > t2 > t3; degrevlex puts t1*t3 above t2^2
        let f = p("t3^2 + t2^2 + t1*t3 + t1 + t2 + t3 + 1 + t1*t2");
        let vars = Vars::new(["t1", "t2", "t3"]);
        let f = f.with_vars(&vars).unwrap();
        assert_eq!(f.to_string(), "t1*t2 + t2^2 + t1*t3 + t3^2 + t1 + t2 + t3 + 1");
    }

    #[test]
    fn display_signs_and_fractions() {
        let f = p("-t1 + 1/2*t2 - 3");
        assert_eq!(f.to_string(), "-t1 + 1/2*t2 - 3");
        assert_eq!(p("0").to_string(), "0");
        assert_eq!(p("1").to_string(), "1");
    }

    #[test]
    fn exact_division() {
        let f = p("t1^2 - t2^2");
        assert_eq!(f.div_exact(&p("t1 + t2")), Some(p("t1 - t2")));
        assert_eq!(p("t1 + 1").div_exact(&p("t2")), None);
    }

    #[test]
    fn equality_ignores_variable_order() {
        let a = p("t1 + t2");
        let b = p("t2 + t1");
        assert_eq!(a, b);
        assert_eq!(a.leading_term().unwrap().1, &Rational::one());
    }
}
