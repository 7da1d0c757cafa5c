//! Chern-class Feynman-rule polynomials C_Γ(t) and the identities relating
//! them under deletion, contraction and edge multiplication.
//!
//! Throughout, a class living in P^{N-1} is encoded by
//! C(t) = (1+t)^N - 1 - Σ_i a_i t^{i+1}, where a_i is the coefficient of
//! [P^i] in its CSM class. For a graph with n edges N = n; deletion and
//! intersection classes use N = n - 1.

mod compute;
mod registry;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::unipoly::UniPoly;

pub use compute::{compute_c, compute_c_with, Derivation, Rule};
pub use registry::{
    banana_c, FixtureEntry, Intersection, Registry, RegistryError, SHIPPED_FIXTURES,
};

/// C_Γ(t) with integer coefficients.
pub type FeynmanPoly = UniPoly<BigInt>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FeynmanError {
    #[error("multiplicity must be at least 1 (the zero-multiple graph is not supported)")]
    ZeroMultiplicity,
    #[error("polynomial of degree {degree} cannot encode a class in P^{} (needs degree {ambient_n}, monic, zero constant term)", ambient_n - 1)]
    InconsistentDegree { degree: usize, ambient_n: usize },
    #[error("C(t) = (t+1)^{0} encodes the empty hypersurface of a forest; there is no CSM class to recover")]
    EmptyHypersurface(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Provenance {
    /// A value taken from the literature; entries carry a citation.
    Published,
    /// Computed here from other values.
    Derived,
    UserInput,
}

/// CSM class of a projective hypersurface (or intersection) in P^{n-1}:
/// `coeffs[i]` is the coefficient of [P^i]. Trailing zeros are omitted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsmRecord {
    pub ambient_n: usize,
    #[serde(with = "serde_ints")]
    pub coeffs: Vec<BigInt>,
    pub provenance: Provenance,
}

impl CsmRecord {
    pub fn new(ambient_n: usize, coeffs: &[i64], provenance: Provenance) -> Self {
        let mut coeffs: Vec<BigInt> = coeffs.iter().map(|&c| BigInt::from(c)).collect();
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        CsmRecord {
            ambient_n,
            coeffs,
            provenance,
        }
    }
}

/// (t+1)^n, the value for any forest with n edges.
pub fn c_forest(n: usize) -> FeynmanPoly {
    FeynmanPoly::t_plus(1).pow(n)
}

/// Bridge: C_Γ = (t+1) C_{Γ∖e}.
pub fn c_bridge_rule(c_del: &FeynmanPoly) -> FeynmanPoly {
    &FeynmanPoly::t_plus(1) * c_del
}

/// Loop: C_Γ = t C_{Γ∖e}.
pub fn c_loop_rule(c_del: &FeynmanPoly) -> FeynmanPoly {
    &FeynmanPoly::t() * c_del
}

/// Deletion-contraction: C_Γ = C_{X(Γ∖e) ∩ X(Γ/e)} + (t-1) C_{Γ∖e}.
pub fn delcon(c_intersection: &FeynmanPoly, c_deletion: &FeynmanPoly) -> FeynmanPoly {
    c_intersection + &(&FeynmanPoly::t_plus(-1) * c_deletion)
}

/// Value for the graph with `e` doubled: (2t-1) C_Γ - t(t-1) C_{Γ∖e} + C_{Γ/e}.
pub fn doubling(c_g: &FeynmanPoly, c_del: &FeynmanPoly, c_con: &FeynmanPoly) -> FeynmanPoly {
    let two_t_minus_1 = FeynmanPoly::from_i64s(&[-1, 2]);
    let t_t_minus_1 = FeynmanPoly::from_i64s(&[0, -1, 1]);
    &(&(&two_t_minus_1 * c_g) - &(&t_t_minus_1 * c_del)) + c_con
}

/// C_{Γ_me} from C_Γ, C_{Γ_2e} and C_{Γ/e}:
/// (c2e - t cG - t cCon)(t^{m-1} - (t-1)^{m-1}) + (cG + (m-1) cCon) t^{m-1}.
pub fn multi_edge_closed(
    c_g: &FeynmanPoly,
    c_2e: &FeynmanPoly,
    c_con: &FeynmanPoly,
    m: usize,
) -> Result<FeynmanPoly, FeynmanError> {
    if m == 0 {
        return Err(FeynmanError::ZeroMultiplicity);
    }
    let t = FeynmanPoly::t();
    let tm = FeynmanPoly::monomial(m - 1);
    let diff = &tm - &FeynmanPoly::t_plus(-1).pow(m - 1);
    let first = &(&(c_2e - &(&t * c_g)) - &(&t * c_con)) * &diff;
    let k = BigInt::from(m - 1);
    let second = &(c_g + &c_con.scalar_mul(&k)) * &tm;
    Ok(&first + &second)
}

/// Next term of the three-term recursion satisfied by C_{Γ_me}:
/// from C_m, C_{m+1}, C_{m+2} returns
/// (3t-1) C_{m+2} - (3t^2-2t) C_{m+1} + (t^3-t^2) C_m.
pub fn multi_edge_recursion(c_m: &FeynmanPoly, c_m1: &FeynmanPoly, c_m2: &FeynmanPoly) -> FeynmanPoly {
    let a = FeynmanPoly::from_i64s(&[-1, 3]);
    let b = FeynmanPoly::from_i64s(&[0, -2, 3]);
    let c = FeynmanPoly::from_i64s(&[0, 0, -1, 1]);
    &(&(&a * c_m2) - &(&b * c_m1)) + &(&c * c_m)
}

/// C_{Γ_(m+1)e} from C_Γ, C_{Γ_2e}, C_{Γ_3e}, as the coefficient of
/// s^m/m! in e^{ts}(K cG - K' c2e + K''/2 c3e), K = t^2 e^{-s} + (t-1)(ts-t-1):
///
/// (t^2 cG - 2t c2e + c3e)(t-1)^m - ((t^2-1) cG - 2t c2e + c3e) t^m
/// + ((t^2-t) cG - (2t-1) c2e + c3e) m t^{m-1}.
pub fn goodform_closed(
    c_g: &FeynmanPoly,
    c_2e: &FeynmanPoly,
    c_3e: &FeynmanPoly,
    m: usize,
) -> Result<FeynmanPoly, FeynmanError> {
    if m == 0 {
        return Err(FeynmanError::ZeroMultiplicity);
    }
    let p = |coeffs: &[i64]| FeynmanPoly::from_i64s(coeffs);
    let two_t = p(&[0, 2]);
    let a = &(&(&p(&[0, 0, 1]) * c_g) - &(&two_t * c_2e)) + c_3e;
    let b = &(&(&p(&[-1, 0, 1]) * c_g) - &(&two_t * c_2e)) + c_3e;
    let c = &(&(&p(&[0, -1, 1]) * c_g) - &(&p(&[-1, 2]) * c_2e)) + c_3e;
    let first = &a * &FeynmanPoly::t_plus(-1).pow(m);
    let second = &b * &FeynmanPoly::monomial(m);
    let third = &c.scalar_mul(&BigInt::from(m)) * &FeynmanPoly::monomial(m - 1);
    Ok(&(&first - &second) + &third)
}

/// (1+t)^n - 1 - Σ a_i t^{i+1}.
pub fn csm_to_c(rec: &CsmRecord) -> FeynmanPoly {
    let shift: Vec<BigInt> = std::iter::once(BigInt::zero())
        .chain(rec.coeffs.iter().cloned())
        .collect();
    &(&c_forest(rec.ambient_n) - &FeynmanPoly::one()) - &FeynmanPoly::new(shift)
}

/// Inverse of [`csm_to_c`] for a class in P^{n-1}.
pub fn c_to_csm(c: &FeynmanPoly, ambient_n: usize, provenance: Provenance) -> Result<CsmRecord, FeynmanError> {
    if *c == c_forest(ambient_n) {
        return Err(FeynmanError::EmptyHypersurface(ambient_n));
    }
    let r = &(&c_forest(ambient_n) - &FeynmanPoly::one()) - c;
    let consistent = c.degree() == Some(ambient_n)
        && c.coeff(ambient_n).is_one()
        && c.coeff(0).is_zero()
        && ambient_n >= 1;
    if !consistent {
        return Err(FeynmanError::InconsistentDegree {
            degree: c.degree().unwrap_or(0),
            ambient_n,
        });
    }
    let mut coeffs: Vec<BigInt> = (1..ambient_n).map(|i| r.coeff(i)).collect();
    while coeffs.last().is_some_and(Zero::is_zero) {
        coeffs.pop();
    }
    Ok(CsmRecord {
        ambient_n,
        coeffs,
        provenance,
    })
}

/// χ of the hypersurface encoded by `c` in P^{n-1}: n - C'(0).
pub fn chi_hypersurface(c: &FeynmanPoly, ambient_n: usize) -> BigInt {
    BigInt::from(ambient_n) - c.derivative_at_zero()
}

/// χ(X_Γ) = n + χ(X(Γ∖e) ∩ X(Γ/e)) - χ(X(Γ∖e)), for a graph with n edges.
pub fn chi_identity_check(c_g: &FeynmanPoly, c_del: &FeynmanPoly, c_int: &FeynmanPoly, n: usize) -> bool {
    if n == 0 {
        return false;
    }
    chi_hypersurface(c_g, n) == BigInt::from(n) + chi_hypersurface(c_int, n - 1) - chi_hypersurface(c_del, n - 1)
}

/// JSON encoding of integer sequences: numbers when they fit in 64 bits,
/// decimal strings otherwise.
pub(crate) mod serde_ints {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Int {
        Small(i64),
        Big(String),
    }

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|x| match x.to_i64() {
                Some(i) => Int::Small(i),
                None => Int::Big(x.to_string()),
            })
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<Int>::deserialize(d)?
            .into_iter()
            .map(|x| match x {
                Int::Small(i) => Ok(BigInt::from(i)),
                Int::Big(s) => s.parse().map_err(D::Error::custom),
            })
            .collect()
    }
}

/// [`FeynmanPoly`] as its ascending coefficient list. Reading also accepts
/// an expression string such as `"t^2*(t+1)"`.
pub(crate) mod serde_poly {
    use super::FeynmanPoly;
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Coeffs(#[serde(with = "super::serde_ints")] Vec<num_bigint::BigInt>),
        Expr(String),
    }

    pub fn serialize<S: Serializer>(p: &FeynmanPoly, s: S) -> Result<S::Ok, S::Error> {
        super::serde_ints::serialize(p.coeffs(), s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<FeynmanPoly, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Coeffs(c) => Ok(FeynmanPoly::new(c)),
            Repr::Expr(s) => FeynmanPoly::parse(&s).map_err(D::Error::custom),
        }
    }
}

pub(crate) mod serde_opt_poly {
    use super::FeynmanPoly;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(transparent)]
    struct Wrapped(#[serde(with = "super::serde_poly")] FeynmanPoly);

    pub fn serialize<S: Serializer>(p: &Option<FeynmanPoly>, s: S) -> Result<S::Ok, S::Error> {
        p.clone().map(Wrapped).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<FeynmanPoly>, D::Error> {
        Ok(Option::<Wrapped>::deserialize(d)?.map(|w| w.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> FeynmanPoly {
        FeynmanPoly::parse(s).unwrap()
    }

    #[test]
    fn special_rules() {
        assert_eq!(c_forest(0), f("1"));
        assert_eq!(c_forest(1), f("t + 1"));
        assert_eq!(c_forest(3), f("t^3 + 3*t^2 + 3*t + 1"));
        assert_eq!(c_bridge_rule(&f("1")), f("t + 1"));
        assert_eq!(c_bridge_rule(&f("t*(t+1)")), f("t*(t+1)^2"));
        let mut c = f("1");
        for _ in 0..4 {
            c = c_bridge_rule(&c);
        }
        assert_eq!(c, c_forest(4));
        assert_eq!(c_loop_rule(&f("1")), f("t"));
        assert_eq!(c_loop_rule(&c_loop_rule(&f("1"))), f("t^2"));
    }

    #[test]
    fn delcon_cases() {
        assert_eq!(
            delcon(&f("t^4 + 4*t^3 + 3*t^2 + t"), &f("t^4 + 2*t^3 + 2*t^2 + t")),
            f("t^5 + 2*t^4 + 4*t^3 + 2*t^2")
        );
        let c = f("t^2 + 3*t");
        assert_eq!(delcon(&c, &c), c_loop_rule(&c));
        assert_eq!(delcon(&c_forest(3), &c_forest(3)), &f("t") * &c_forest(3));
    }

    #[test]
    fn doubling_cases() {
        assert_eq!(
            doubling(&f("t^3 + t^2 + t"), &f("t^2 + t"), &f("t^2")),
            f("t^4 + t^3 + 3*t^2 - t")
        );
        assert_eq!(
            doubling(&f("t^5 + 2*t^4 + 4*t^3 + 2*t^2"), &f("(t+1)^2*t^2"), &f("4*t^3 + t*(t-1)^3")),
            f("t^6 + 2*t^5 + 8*t^4 + 2*t^3 + t^2 - t")
        );
        assert!(doubling(&f("0"), &f("0"), &f("0")).is_zero());
    }

    #[test]
    fn multi_edge_forms() {
        let (g, g2, con) = (f("t + 1"), f("t*(t+1)"), f("1"));
        for m in 1..=8 {
            assert_eq!(multi_edge_closed(&g, &g2, &con, m).unwrap(), banana_c(m));
        }
        assert_eq!(multi_edge_closed(&g, &g2, &con, 0), Err(FeynmanError::ZeroMultiplicity));
        let c3 = banana_c(3);
        assert_eq!(goodform_closed(&g, &g2, &c3, 1).unwrap(), f("t*(t+1)"));
        assert_eq!(goodform_closed(&g, &g2, &c3, 3).unwrap(), f("t^4 + t^3 + 3*t^2 - t"));
        assert_eq!(goodform_closed(&g, &g2, &c3, 0), Err(FeynmanError::ZeroMultiplicity));
        assert_eq!(
            multi_edge_recursion(&banana_c(1), &banana_c(2), &banana_c(3)),
            f("t^4 + t^3 + 3*t^2 - t")
        );
        assert!(multi_edge_recursion(&f("0"), &f("0"), &f("0")).is_zero());
    }

    #[test]
    fn csm_conversions() {
        let rec = CsmRecord::new(7, &[7, 21, 29, 26, 12, 4], Provenance::Published);
        let c = csm_to_c(&rec);
        assert_eq!(c, f("t^7 + 3*t^6 + 9*t^5 + 9*t^4 + 6*t^3"));
        assert_eq!(c_to_csm(&c, 7, Provenance::Published).unwrap(), rec);
        assert_eq!(
            csm_to_c(&CsmRecord::new(6, &[7, 14, 18, 8, 4], Provenance::Published)),
            f("t^6 + 2*t^5 + 7*t^4 + 2*t^3 + t^2 - t")
        );
        assert_eq!(csm_to_c(&CsmRecord::new(2, &[], Provenance::Derived)), f("t^2 + 2*t"));
        let back = c_to_csm(&f("t^5 + 2*t^4 + 4*t^3 + 2*t^2"), 5, Provenance::Derived).unwrap();
        assert_eq!(back.coeffs, [5, 8, 6, 3].map(BigInt::from));
        assert_eq!(c_to_csm(&c_forest(4), 4, Provenance::Derived), Err(FeynmanError::EmptyHypersurface(4)));
        assert!(c_to_csm(&f("t^3"), 5, Provenance::Derived).is_err());
        assert!(c_to_csm(&f("t^5 + 1"), 5, Provenance::Derived).is_err());
    }

    #[test]
    fn euler_characteristics() {
        assert_eq!(chi_hypersurface(&f("t^7 + 3*t^6 + 9*t^5 + 9*t^4 + 6*t^3"), 7), BigInt::from(7));
        assert_eq!(chi_hypersurface(&f("t^5 + 2*t^4 + 4*t^3 + 2*t^2"), 5), BigInt::from(5));
        assert_eq!(chi_hypersurface(&f("t*(t+1)"), 2), BigInt::from(1));
        let g = f("t^5 + 2*t^4 + 4*t^3 + 2*t^2");
        assert!(chi_identity_check(&g, &f("t^2*(t+1)^2"), &f("t^4 + 4*t^3 + 3*t^2"), 5));
        assert!(chi_identity_check(&g, &f("t^4 + 2*t^3 + 2*t^2 + t"), &f("t^4 + 4*t^3 + 3*t^2 + t"), 5));
        assert!(!chi_identity_check(&g, &f("t^4 + 2*t^3 + 2*t^2 + t"), &f("t^4 + 4*t^3 + 3*t^2"), 5));
    }

    #[test]
    fn big_coefficients_serialize_as_strings() {
        let rec = CsmRecord {
            ambient_n: 3,
            coeffs: vec![BigInt::from(1), BigInt::from(10).pow(30)],
            provenance: Provenance::Derived,
        };
        let json = serde_json::to_string(&rec).unwrap();
        assert!(json.contains("[1,\"1000000000000000000000000000000\"]"));
        assert_eq!(serde_json::from_str::<CsmRecord>(&json).unwrap(), rec);
    }
}
