//! Tiered verdicts on whether deletion-contraction of C polynomials may be
//! applied to an edge.
//!
//! Condition I (Ψ_{Γ/e} lies in the Jacobian ideal of Ψ_{Γ∖e}) is decided by
//! Gröbner-basis membership unless the edge has a parallel partner, in which
//! case both conditions are known to hold. Condition II is never decided
//! algebraically: it is either guaranteed by a parallel edge, flagged as
//! likely failing when the deletion is disjoinable, or left unknown.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphpoly::{graph_vars, psi};
use crate::groebner::{ideal_membership_with, jacobian_generators, GroebnerError, ORDER};
use crate::guards::Limits;
use crate::multigraph::{EdgeClass, EdgeId, GraphError, Multigraph};

/// Attached to every verdict that relies on the disjoinable-deletion flag.
pub const CODIM1_CAVEAT: &str = "heuristic: this flag assumes the graph hypersurface X_G is nonsingular \
in codimension 1, which is not verified here";

const PARALLEL_NOTE: &str = "edge has a parallel partner, which guarantees conditions I and II";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConditionError {
    #[error("edge `{edge}` is a {class}, not a regular edge; conditions I and II only concern regular edges")]
    NotRegular { edge: String, class: EdgeClass },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConditionI {
    GuaranteedByParallelEdge,
    HoldsByMembership,
    FailsByMembership,
    Unknown,
}

impl ConditionI {
    pub fn holds(self) -> bool {
        matches!(self, ConditionI::GuaranteedByParallelEdge | ConditionI::HoldsByMembership)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConditionII {
    GuaranteedByParallelEdge,
    LikelyFailsDisjoinable,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    pub edge: String,
    pub condition_i: ConditionI,
    pub condition_ii: ConditionII,
    pub notes: Vec<String>,
    /// Time spent in the Gröbner computation, if one ran.
    pub groebner_ms: Option<u128>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Applicability {
    Applicable,
    NotApplicable,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApplicabilityVerdict {
    pub edge: String,
    pub class: EdgeClass,
    pub applicability: Applicability,
    /// Present for regular edges.
    pub conditions: Option<ConditionVerdict>,
    pub notes: Vec<String>,
}

fn require_regular(g: &Multigraph, e: &EdgeId) -> Result<(), ConditionError> {
    match g.classify_edge(e)? {
        EdgeClass::Regular => Ok(()),
        class => Err(ConditionError::NotRegular {
            edge: e.to_string(),
            class,
        }),
    }
}

/// Membership Ψ_{Γ/e} ∈ (∂Ψ_{Γ∖e}) by Gröbner basis, ignoring any
/// parallel-edge shortcut.
pub fn condition_i_membership(g: &Multigraph, e: &EdgeId, limits: &Limits) -> Result<bool, MembershipError> {
    let del = g.delete_edge(e)?;
    let vars = graph_vars(&del);
    let psi_del = psi(&del);
    let psi_con = psi(&g.contract_edge(e)?).with_vars(&vars).expect("same edge set");
    Ok(ideal_membership_with(&psi_con, &jacobian_generators(&psi_del), limits)?)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MembershipError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
}

pub fn check_conditions(g: &Multigraph, e: &EdgeId) -> Result<ConditionVerdict, ConditionError> {
    check_conditions_with(g, e, &Limits::from_env().unwrap_or_default())
}

/// Both condition verdicts for a regular edge, sharing one Gröbner run.
pub fn check_conditions_with(g: &Multigraph, e: &EdgeId, limits: &Limits) -> Result<ConditionVerdict, ConditionError> {
    require_regular(g, e)?;
    let mut notes = Vec::new();
    if g.has_parallel(e)? {
        notes.push(PARALLEL_NOTE.to_string());
        return Ok(ConditionVerdict {
            edge: e.to_string(),
            condition_i: ConditionI::GuaranteedByParallelEdge,
            condition_ii: ConditionII::GuaranteedByParallelEdge,
            notes,
            groebner_ms: None,
        });
    }

    let del = g.delete_edge(e)?;
    let order: Vec<String> = graph_vars(&del).names().to_vec();
    let start = Instant::now();
    let membership = condition_i_membership(g, e, limits);
    let elapsed = start.elapsed().as_millis();
    let condition_i = match membership {
        Ok(true) => {
            notes.push(format!(
                "condition I: Psi(G/e) reduces to 0 modulo a {ORDER} Groebner basis of the partials of Psi(G\\e), variable order {}",
                order.join(" > ")
            ));
            ConditionI::HoldsByMembership
        }
        Ok(false) => {
            notes.push(format!(
                "condition I: Psi(G/e) has a nonzero normal form modulo a {ORDER} Groebner basis of the partials of Psi(G\\e), variable order {}",
                order.join(" > ")
            ));
            ConditionI::FailsByMembership
        }
        Err(MembershipError::Groebner(err)) => {
            notes.push(format!("condition I undecided: {err}"));
            ConditionI::Unknown
        }
        Err(MembershipError::Graph(err)) => return Err(err.into()),
    };

    let condition_ii = if condition_i.holds() && del.disjoinable() {
        notes.push(format!(
            "condition II likely fails: the deletion G\\e is disjoinable; {CODIM1_CAVEAT}"
        ));
        ConditionII::LikelyFailsDisjoinable
    } else {
        notes.push("condition II not decided: no parallel edge and no disjoinable deletion flag".to_string());
        ConditionII::Unknown
    };

    Ok(ConditionVerdict {
        edge: e.to_string(),
        condition_i,
        condition_ii,
        notes,
        groebner_ms: Some(elapsed),
    })
}

pub fn check_condition_i(g: &Multigraph, e: &EdgeId) -> Result<ConditionI, ConditionError> {
    Ok(check_conditions(g, e)?.condition_i)
}

pub fn check_condition_ii(g: &Multigraph, e: &EdgeId) -> Result<ConditionII, ConditionError> {
    Ok(check_conditions(g, e)?.condition_ii)
}

pub fn applicability(g: &Multigraph, e: &EdgeId) -> Result<ApplicabilityVerdict, GraphError> {
    applicability_with(g, e, &Limits::from_env().unwrap_or_default())
}

/// Whether the deletion-contraction formula for C polynomials applies to `e`.
pub fn applicability_with(g: &Multigraph, e: &EdgeId, limits: &Limits) -> Result<ApplicabilityVerdict, GraphError> {
    let class = g.classify_edge(e)?;
    let special = |note: &str| ApplicabilityVerdict {
        edge: e.to_string(),
        class,
        applicability: Applicability::Applicable,
        conditions: None,
        notes: vec![note.to_string()],
    };
    match class {
        EdgeClass::Bridge => return Ok(special("bridge rule: C(G) = (t+1) C(G\\e)")),
        EdgeClass::Loop => return Ok(special("loop rule: C(G) = t C(G\\e)")),
        EdgeClass::NonRegularForestDeletion => {
            return Ok(special(
                "forest deletion: both deletion-contraction inputs are taken to be (t+1)^(n-1)",
            ))
        }
        EdgeClass::Regular => {}
    }
    let verdict = match check_conditions_with(g, e, limits) {
        Ok(v) => v,
        Err(ConditionError::Graph(err)) => return Err(err),
        Err(ConditionError::NotRegular { .. }) => unreachable!("edge classified as regular"),
    };
    let mut notes = Vec::new();
    let applicability = match (verdict.condition_i, verdict.condition_ii) {
        (ConditionI::GuaranteedByParallelEdge, ConditionII::GuaranteedByParallelEdge) => {
            notes.push(PARALLEL_NOTE.to_string());
            Applicability::Applicable
        }
        (ConditionI::FailsByMembership, _) => {
            notes.push("condition I fails".to_string());
            Applicability::NotApplicable
        }
        (_, ConditionII::LikelyFailsDisjoinable) => {
            notes.push(format!("condition II likely fails; {CODIM1_CAVEAT}"));
            Applicability::NotApplicable
        }
        _ => {
            notes.push("condition II could not be decided".to_string());
            Applicability::Unknown
        }
    };
    Ok(ApplicabilityVerdict {
        edge: e.to_string(),
        class,
        applicability,
        conditions: Some(verdict),
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn id(s: &str) -> EdgeId {
        EdgeId::new(s).unwrap()
    }

    #[test]
    fn two_doubled_triangle_chord() {
        let v = check_conditions(&catalog::triangle_two_doubled(), &id("e5")).unwrap();
        assert_eq!(v.condition_i, ConditionI::HoldsByMembership);
        assert_eq!(v.condition_ii, ConditionII::LikelyFailsDisjoinable);
        assert!(v.notes.iter().any(|n| n.contains(CODIM1_CAVEAT)));
        let a = applicability(&catalog::triangle_two_doubled(), &id("e5")).unwrap();
        assert_eq!(a.applicability, Applicability::NotApplicable);
    }

    #[test]
    fn k4_doubled_opposite_edge_fails() {
        let v = check_conditions(&catalog::k4_one_doubled(), &id("e7")).unwrap();
        assert_eq!(v.condition_i, ConditionI::FailsByMembership);
        assert_eq!(v.condition_ii, ConditionII::Unknown);
    }

    #[test]
    fn parallel_edges_are_guaranteed() {
        for e in ["e1", "e2", "e3"] {
            let v = check_conditions(&Multigraph::banana(3), &id(e)).unwrap();
            assert_eq!(v.condition_i, ConditionI::GuaranteedByParallelEdge);
            assert_eq!(v.condition_ii, ConditionII::GuaranteedByParallelEdge);
            assert!(condition_i_membership(&Multigraph::banana(3), &id(e), &Limits::default()).unwrap());
        }
        for e in ["e1", "e2", "e3", "e4"] {
            let a = applicability(&Multigraph::banana(4), &id(e)).unwrap();
            assert_eq!(a.applicability, Applicability::Applicable);
        }
    }

    #[test]
    fn k4_is_unknown() {
        let g = Multigraph::complete(4);
        for e in g.edge_ids() {
            let v = check_conditions(&g, e).unwrap();
            assert_eq!(v.condition_ii, ConditionII::Unknown);
        }
    }

    #[test]
    fn special_edges() {
        let tri = Multigraph::polygon(3);
        let a = applicability(&tri, &id("e1")).unwrap();
        assert_eq!(a.applicability, Applicability::Applicable);
        assert_eq!(a.class, EdgeClass::NonRegularForestDeletion);
        assert!(matches!(
            check_conditions(&tri, &id("e1")),
            Err(ConditionError::NotRegular { class: EdgeClass::NonRegularForestDeletion, .. })
        ));
    }
}
