//! Exhaustive F_p point counts of affine graph hypersurfaces Ψ_Γ = 0, and
//! the counting identities that Grothendieck-class relations imply.
//!
//! A relation between classes U(Γ) = [A^n - X̂_Γ] in the Grothendieck ring
//! implies the same relation between complement counts over every F_p, with
//! the class T of A^1 ∖ A^0 realized as p - 1. Only that consequence is
//! checked.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphpoly::{graph_vars, psi};
use crate::guards::Limits;
use crate::multigraph::{EdgeClass, EdgeId, GraphError, Multigraph};
use crate::multipoly::ModularPoly;
use crate::scalar::is_prime;

pub const DEFAULT_PRIMES: [u64; 4] = [2, 3, 5, 7];

/// Assignments handled per parallel work item.
const BLOCK: u64 = 1 << 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountError {
    #[error("{0} is not prime")]
    CompositeModulus(u64),
    #[error("counting needs {points} evaluations, limit is {limit} (override with GRAPHCSM_COUNT_MAX_POINTS)")]
    GuardExceeded { points: String, limit: u64 },
    #[error("edge `{edge}` is a {class}; {requirement}")]
    WrongEdgeClass {
        edge: String,
        class: EdgeClass,
        requirement: &'static str,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CountMethod {
    /// Ψ = t_e A + B: each assignment of the other variables contributes
    /// 1 zero if A ≠ 0, p zeros if A = B = 0, none otherwise.
    MultilinearPivot { edge: String },
    FullEnumeration,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountResult {
    pub p: u64,
    pub n: usize,
    /// F_p-points of Ψ_Γ = 0 in A^n.
    pub zeros: u64,
    /// p^n - zeros.
    pub complement: u64,
    pub method: CountMethod,
}

/// `p^k`, or `None` on overflow.
fn checked_power(p: u64, k: usize) -> Option<u64> {
    p.checked_pow(u32::try_from(k).ok()?)
}

fn guard(p: u64, k: usize, limits: &Limits) -> Result<u64, CountError> {
    match checked_power(p, k) {
        Some(points) if points <= limits.count_max_points => Ok(points),
        Some(points) => Err(CountError::GuardExceeded {
            points: points.to_string(),
            limit: limits.count_max_points,
        }),
        None => Err(CountError::GuardExceeded {
            points: format!("{p}^{k}"),
            limit: limits.count_max_points,
        }),
    }
}

/// Sums `f(point)` over every point of F_p^k, where the point is written into
/// the slots `free` of an n-vector whose other entries stay zero.
fn sum_over_points(p: u64, free: &[usize], n: usize, total: u64, f: impl Fn(&[u64]) -> u64 + Sync) -> u64 {
    let blocks = total.div_ceil(BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * BLOCK;
            let end = (start + BLOCK).min(total);
            let mut point = vec![0u64; n];
            let mut rest = start;
            for &slot in free {
                point[slot] = rest % p;
                rest /= p;
            }
            let mut acc = 0u64;
            for _ in start..end {
                acc += f(&point);
                for &slot in free {
                    point[slot] += 1;
                    if point[slot] < p {
                        break;
                    }
                    point[slot] = 0;
                }
            }
            acc
        })
        .sum()
}

fn compile(g: &Multigraph, p: u64) -> ModularPoly {
    psi(g).to_modular(p).expect("integer coefficients")
}

/// Default pivot: the first edge that is neither a loop nor a bridge.
fn default_pivot(g: &Multigraph) -> Option<EdgeId> {
    g.edge_ids()
        .find(|e| {
            matches!(
                g.classify_edge(e),
                Ok(EdgeClass::Regular | EdgeClass::NonRegularForestDeletion)
            )
        })
        .cloned()
}

pub fn count_affine(g: &Multigraph, p: u64) -> Result<CountResult, CountError> {
    count_affine_with(g, p, None, &Limits::from_env().unwrap_or_default())
}

/// Point count pivoting on `pivot` (default: first non-loop, non-bridge
/// edge), falling back to full enumeration when the graph has no such edge.
pub fn count_affine_with(
    g: &Multigraph,
    p: u64,
    pivot: Option<&EdgeId>,
    limits: &Limits,
) -> Result<CountResult, CountError> {
    if !is_prime(p) {
        return Err(CountError::CompositeModulus(p));
    }
    let pivot = match pivot {
        Some(e) => match g.classify_edge(e)? {
            EdgeClass::Loop | EdgeClass::Bridge => {
                return Err(CountError::WrongEdgeClass {
                    edge: e.to_string(),
                    class: g.classify_edge(e)?,
                    requirement: "the counting pivot must be neither a loop nor a bridge",
                })
            }
            _ => Some(e.clone()),
        },
        None => default_pivot(g),
    };
    let Some(e) = pivot else {
        return count_full_enumeration_with(g, p, limits);
    };
    let n = g.edge_count();
    let total = guard(p, n - 1, limits)?;
    let vars = graph_vars(g);
    let i = vars
        .index_of(&g.edge(&e)?.id.default_variable())
        .expect("graph variable");
    let (a, b) = psi(g).split_linear(i).expect("graph polynomials are multilinear");
    let (a, b) = (
        a.to_modular(p).expect("integer coefficients"),
        b.to_modular(p).expect("integer coefficients"),
    );
    let free: Vec<usize> = (0..n).filter(|&k| k != i).collect();
    let zeros = sum_over_points(p, &free, n, total, |pt| {
        if a.eval(pt) != 0 {
            1
        } else if b.eval(pt) == 0 {
            p
        } else {
            0
        }
    });
    let all = total * p;
    Ok(CountResult {
        p,
        n,
        zeros,
        complement: all - zeros,
        method: CountMethod::MultilinearPivot { edge: e.to_string() },
    })
}

/// Point count by evaluating Ψ at all p^n points.
pub fn count_full_enumeration(g: &Multigraph, p: u64) -> Result<CountResult, CountError> {
    count_full_enumeration_with(g, p, &Limits::from_env().unwrap_or_default())
}

pub fn count_full_enumeration_with(g: &Multigraph, p: u64, limits: &Limits) -> Result<CountResult, CountError> {
    if !is_prime(p) {
        return Err(CountError::CompositeModulus(p));
    }
    let n = g.edge_count();
    let total = guard(p, n, limits)?;
    let f = compile(g, p);
    let free: Vec<usize> = (0..n).collect();
    let zeros = sum_over_points(p, &free, n, total, |pt| u64::from(f.eval(pt) == 0));
    Ok(CountResult {
        p,
        n,
        zeros,
        complement: total - zeros,
        method: CountMethod::FullEnumeration,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarCheck {
    pub p: u64,
    pub edge: String,
    /// Complement counts of Γ_2e, Γ, Γ∖e, Γ/e.
    pub doubled: u64,
    pub graph: u64,
    pub deletion: u64,
    pub contraction: u64,
    /// (p-2) U(Γ) + (p-1) U(Γ∖e) + p U(Γ/e).
    pub predicted: i128,
    pub holds: bool,
}

pub fn verify_doubling_star(g: &Multigraph, e: &EdgeId, p: u64) -> Result<StarCheck, CountError> {
    verify_doubling_star_with(g, e, p, &Limits::from_env().unwrap_or_default())
}

/// U(Γ_2e) = (T-1) U(Γ) + T U(Γ∖e) + (T+1) U(Γ/e) at T = p - 1.
pub fn verify_doubling_star_with(g: &Multigraph, e: &EdgeId, p: u64, limits: &Limits) -> Result<StarCheck, CountError> {
    let class = g.classify_edge(e)?;
    if matches!(class, EdgeClass::Loop | EdgeClass::Bridge) {
        return Err(CountError::WrongEdgeClass {
            edge: e.to_string(),
            class,
            requirement: "the doubling identity needs an edge that is neither a loop nor a bridge",
        });
    }
    let count = |h: &Multigraph| count_affine_with(h, p, None, limits).map(|r| r.complement);
    let doubled = count(&g.multiply_edge(e, 2)?)?;
    let graph = count(g)?;
    let deletion = count(&g.delete_edge(e)?)?;
    let contraction = count(&g.contract_edge(e)?)?;
    let pi = i128::from(p);
    let predicted =
        (pi - 2) * i128::from(graph) + (pi - 1) * i128::from(deletion) + pi * i128::from(contraction);
    Ok(StarCheck {
        p,
        edge: e.to_string(),
        doubled,
        graph,
        deletion,
        contraction,
        predicted,
        holds: predicted == i128::from(doubled),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleCheck {
    pub p: u64,
    pub edge: String,
    pub m: usize,
    /// Complement counts of Γ_me, ..., Γ_(m+3)e.
    pub counts: [u64; 4],
    /// (2T-1) U_{m+2} - T(T-2) U_{m+1} - T^2 U_m at T = p - 1.
    pub predicted: i128,
    pub holds: bool,
}

pub fn verify_triple_recursion(g: &Multigraph, e: &EdgeId, p: u64, m: usize) -> Result<TripleCheck, CountError> {
    verify_triple_recursion_with(g, e, p, m, &Limits::from_env().unwrap_or_default())
}

pub fn verify_triple_recursion_with(
    g: &Multigraph,
    e: &EdgeId,
    p: u64,
    m: usize,
    limits: &Limits,
) -> Result<TripleCheck, CountError> {
    let class = g.classify_edge(e)?;
    if class != EdgeClass::Regular {
        return Err(CountError::WrongEdgeClass {
            edge: e.to_string(),
            class,
            requirement: "the multiple-edge recursion needs a regular edge",
        });
    }
    if m == 0 {
        return Err(GraphError::ZeroMultiplicity.into());
    }
    let mut counts = [0u64; 4];
    for (k, slot) in counts.iter_mut().enumerate() {
        let h = g.multiply_edge(e, m + k)?;
        *slot = count_affine_with(&h, p, None, limits)?.complement;
    }
    let t = i128::from(p) - 1;
    let u = counts.map(i128::from);
    let predicted = (2 * t - 1) * u[2] - t * (t - 2) * u[1] - t * t * u[0];
    Ok(TripleCheck {
        p,
        edge: e.to_string(),
        m,
        counts,
        predicted,
        holds: predicted == u[3],
    })
}
