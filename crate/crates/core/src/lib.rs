pub mod catalog;
pub mod conditions;
pub mod feynman;
pub mod graphpoly;
pub mod groebner;
pub mod guards;
pub mod multigraph;
pub mod multipoly;
pub mod pointcount;
pub mod scalar;
pub mod unipoly;

pub type Rational = num_rational::BigRational;
pub type Integer = num_bigint::BigInt;

/// Polynomials in the edge variables with rational coefficients.
pub type QPoly = multipoly::MultiPoly<Rational>;
