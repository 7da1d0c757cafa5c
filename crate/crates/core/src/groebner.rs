//! Reduced Gröbner bases by Buchberger's algorithm, for ideal membership.
//!
//! Order is degrevlex with variables in the order of the ideal's variable set
//! (for graph polynomials: edge insertion order). Pairs are selected by the
//! normal strategy (smallest lcm first) and pruned with Buchberger's coprime
//! and chain criteria. Each new basis element is made monic, which keeps
//! rational coefficients in lowest terms.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Instant;

use thiserror::Error;

use crate::guards::Limits;
use crate::multipoly::{Monomial, MultiPoly, Vars};
use crate::scalar::Field;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroebnerError {
    #[error("ideal uses {got} variables, limit is {max} (override with GRAPHCSM_GROEBNER_MAX_VARS)")]
    TooManyVariables { max: usize, got: usize },
    #[error("generator of degree {got} exceeds limit {max} (override with GRAPHCSM_GROEBNER_MAX_DEGREE)")]
    DegreeTooHigh { max: usize, got: usize },
    #[error("basis grew past {max} elements (override with GRAPHCSM_GROEBNER_MAX_BASIS)")]
    BasisTooLarge { max: usize },
    #[error("no basis after {elapsed_ms} ms (override with GRAPHCSM_GROEBNER_TIMEOUT_MS)")]
    Timeout { elapsed_ms: u128 },
}

/// Name of the monomial order used throughout.
pub const ORDER: &str = "degrevlex";

#[derive(Clone, Debug, PartialEq)]
pub struct Ideal<C: Field> {
    vars: Arc<Vars>,
    generators: Vec<MultiPoly<C>>,
}

impl<C: Field> Ideal<C> {
    /// Zero generators are dropped; all generators are moved onto one
    /// common variable set.
    pub fn new(vars: Arc<Vars>, generators: impl IntoIterator<Item = MultiPoly<C>>) -> Self {
        let mut out = Vec::new();
        let mut vars = vars;
        for g in generators {
            if g.is_zero() {
                continue;
            }
            if g.with_vars(&vars).is_err() {
                vars = union_vars(g.vars(), &vars);
            }
            out.push(g);
        }
        let generators = out.iter().map(|g| g.with_vars(&vars).expect("superset")).collect();
        Ideal { vars, generators }
    }

    pub fn vars(&self) -> &Arc<Vars> {
        &self.vars
    }

    pub fn generators(&self) -> &[MultiPoly<C>] {
        &self.generators
    }

    /// Generators with repeats (up to a scalar) removed, first occurrence kept.
    pub fn dedup(&self) -> Self {
        let mut seen: Vec<MultiPoly<C>> = Vec::new();
        let mut generators = Vec::new();
        for g in &self.generators {
            let m = g.monic();
            if !seen.contains(&m) {
                seen.push(m);
                generators.push(g.clone());
            }
        }
        Ideal {
            vars: self.vars.clone(),
            generators,
        }
    }

    /// Number of variables that occur in some generator.
    pub fn active_variables(&self) -> usize {
        (0..self.vars.len())
            .filter(|&i| {
                self.generators
                    .iter()
                    .any(|g| g.terms().any(|(m, _)| m.exponents()[i] > 0))
            })
            .count()
    }
}

/// All first partial derivatives of `f` that are nonzero, in variable order.
pub fn jacobian_generators<C: Field>(f: &MultiPoly<C>) -> Ideal<C> {
    let vars = f.vars().clone();
    Ideal::new(vars.clone(), (0..vars.len()).map(|i| f.partial_index(i)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroebnerBasis<C: Field> {
    vars: Arc<Vars>,
    /// Monic, sorted by leading monomial ascending.
    basis: Vec<MultiPoly<C>>,
}

impl<C: Field> GroebnerBasis<C> {
    pub fn elements(&self) -> &[MultiPoly<C>] {
        &self.basis
    }

    pub fn vars(&self) -> &Arc<Vars> {
        &self.vars
    }

    pub fn order(&self) -> &'static str {
        ORDER
    }

    /// Whether the ideal is the whole ring.
    pub fn is_unit_ideal(&self) -> bool {
        self.basis.iter().any(|g| !g.is_zero() && g.is_constant())
    }
}

/// Remainder of `f` under complete division by `basis`.
fn reduce<C: Field>(f: &MultiPoly<C>, basis: &[MultiPoly<C>]) -> MultiPoly<C> {
    let vars = f.vars().clone();
    let mut p = f.clone();
    let mut rem = MultiPoly::zero(vars);
    let leads: Vec<(Monomial, C)> = basis
        .iter()
        .map(|g| {
            let (m, c) = g.leading_term().expect("nonzero basis element");
            (m.clone(), c.inv())
        })
        .collect();
    while let Some((m, c)) = p.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
        match leads.iter().position(|(lm, _)| lm.divides(&m)) {
            Some(k) => {
                let q = leads[k].0.quotient_of(&m);
                p.sub_scaled(&q, &(c * leads[k].1.clone()), &basis[k]);
            }
            None => {
                let (m, c) = p.pop_leading().expect("nonempty");
                rem.add_term(m, c);
            }
        }
    }
    rem
}

fn s_polynomial<C: Field>(f: &MultiPoly<C>, g: &MultiPoly<C>) -> MultiPoly<C> {
    let (fm, fc) = f.leading_term().expect("nonzero");
    let (gm, gc) = g.leading_term().expect("nonzero");
    let l = fm.lcm(gm);
    let mut s = f.mul_term(&fm.quotient_of(&l), &fc.inv());
    s.sub_scaled(&gm.quotient_of(&l), &gc.inv(), g);
    s
}

/// Reduced Gröbner basis of `ideal`, under [`Limits`] taken from the
/// environment.
pub fn buchberger<C: Field>(ideal: &Ideal<C>) -> Result<GroebnerBasis<C>, GroebnerError> {
    buchberger_with(ideal, &Limits::from_env().unwrap_or_default())
}

pub fn buchberger_with<C: Field>(ideal: &Ideal<C>, limits: &Limits) -> Result<GroebnerBasis<C>, GroebnerError> {
    let active = ideal.active_variables();
    if active > limits.groebner_max_vars {
        return Err(GroebnerError::TooManyVariables {
            max: limits.groebner_max_vars,
            got: active,
        });
    }
    if let Some(d) = ideal.generators.iter().filter_map(|g| g.total_degree()).max() {
        if d > limits.groebner_max_degree {
            return Err(GroebnerError::DegreeTooHigh {
                max: limits.groebner_max_degree,
                got: d,
            });
        }
    }
    let start = Instant::now();
    let leading = |g: &MultiPoly<C>| g.leading_term().expect("nonzero").0.clone();

    let mut g: Vec<MultiPoly<C>> = Vec::new();
    for f in &ideal.generators {
        let r = reduce(f, &g);
        if !r.is_zero() {
            g.push(r.monic());
        }
    }
    // pending pairs (i, j) with i < j
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for j in 0..g.len() {
        for i in 0..j {
            pairs.insert((i, j));
        }
    }

    while !pairs.is_empty() {
        if start.elapsed() > limits.groebner_timeout {
            return Err(GroebnerError::Timeout {
                elapsed_ms: start.elapsed().as_millis(),
            });
        }
        // normal strategy: smallest lcm in the order, ties by index
        let &(i, j) = pairs
            .iter()
            .min_by(|&&(a, b), &&(c, d)| {
                let l1 = leading(&g[a]).lcm(&leading(&g[b]));
                let l2 = leading(&g[c]).lcm(&leading(&g[d]));
                l1.cmp(&l2).then((a, b).cmp(&(c, d)))
            })
            .expect("nonempty");
        pairs.remove(&(i, j));
        let (li, lj) = (leading(&g[i]), leading(&g[j]));
        if li.is_coprime(&lj) {
            continue;
        }
        let l = li.lcm(&lj);
        let key = |a: usize, b: usize| (a.min(b), a.max(b));
        let chain = (0..g.len()).any(|k| {
            k != i
                && k != j
                && leading(&g[k]).divides(&l)
                && !pairs.contains(&key(i, k))
                && !pairs.contains(&key(j, k))
        });
        if chain {
            continue;
        }
        let r = reduce(&s_polynomial(&g[i], &g[j]), &g);
        if r.is_zero() {
            continue;
        }
        if g.len() >= limits.groebner_max_basis {
            return Err(GroebnerError::BasisTooLarge {
                max: limits.groebner_max_basis,
            });
        }
        let n = g.len();
        g.push(r.monic());
        for k in 0..n {
            pairs.insert((k, n));
        }
    }

    Ok(GroebnerBasis {
        vars: ideal.vars.clone(),
        basis: interreduce(g),
    })
}

/// Minimal basis, then every element reduced by the others.
fn interreduce<C: Field>(g: Vec<MultiPoly<C>>) -> Vec<MultiPoly<C>> {
    let mut minimal: Vec<MultiPoly<C>> = Vec::new();
    for (k, f) in g.iter().enumerate() {
        let lf = lead_of(f);
        let redundant = g.iter().enumerate().any(|(k2, h)| {
            let lh = lead_of(h);
            k2 != k && lh.divides(lf) && (lh != lf || k2 < k)
        });
        if !redundant {
            minimal.push(f.clone());
        }
    }
    let mut out: Vec<MultiPoly<C>> = (0..minimal.len())
        .map(|k| {
            let others: Vec<MultiPoly<C>> = minimal
                .iter()
                .enumerate()
                .filter(|&(k2, _)| k2 != k)
                .map(|(_, h)| h.clone())
                .collect();
            reduce(&minimal[k], &others).monic()
        })
        .collect();
    out.sort_by(|a, b| lead_of(a).cmp(lead_of(b)));
    out
}

fn lead_of<C: Field>(f: &MultiPoly<C>) -> &Monomial {
    f.leading_term().expect("nonzero").0
}

/// Remainder of `f` on division by the basis; zero iff `f` is in the ideal.
pub fn normal_form<C: Field>(f: &MultiPoly<C>, gb: &GroebnerBasis<C>) -> MultiPoly<C> {
    let vars = union_vars(f.vars(), &gb.vars);
    let basis: Vec<MultiPoly<C>> = gb
        .basis
        .iter()
        .map(|g| g.with_vars(&vars).expect("superset"))
        .collect();
    reduce(&f.with_vars(&vars).expect("superset"), &basis)
}

fn union_vars(a: &Arc<Vars>, b: &Arc<Vars>) -> Arc<Vars> {
    if a == b {
        return a.clone();
    }
    let mut names = b.names().to_vec();
    names.extend(a.names().iter().filter(|n| !b.names().contains(n)).cloned());
    Vars::new(names)
}

pub fn ideal_membership<C: Field>(f: &MultiPoly<C>, ideal: &Ideal<C>) -> Result<bool, GroebnerError> {
    ideal_membership_with(f, ideal, &Limits::from_env().unwrap_or_default())
}

pub fn ideal_membership_with<C: Field>(
    f: &MultiPoly<C>,
    ideal: &Ideal<C>,
    limits: &Limits,
) -> Result<bool, GroebnerError> {
    let gb = buchberger_with(ideal, limits)?;
    Ok(normal_form(f, &gb).is_zero())
}
