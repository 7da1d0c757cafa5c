//! Best-effort exact evaluation of C_Γ with a derivation tree.

use serde::Serialize;

use super::registry::Registry;
use super::{c_bridge_rule, c_forest, c_loop_rule, delcon, multi_edge_closed, FeynmanPoly, Provenance};
use crate::conditions::{applicability, Applicability};
use crate::multigraph::{EdgeClass, EdgeId, Multigraph};

/// The step used to obtain (or fail to obtain) a value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    /// (t+1)^n.
    Forest,
    /// t C(Γ∖e).
    Loop { edge: String },
    /// (t+1) C(Γ∖e).
    Bridge { edge: String },
    /// Γ∖e is a forest: t (t+1)^{n-1}.
    ForestDeletion { edge: String },
    /// Closed form from C of the graph with the class reduced to one and two
    /// edges, and of the contraction of the single edge.
    MultiEdge { edge: String, multiplicity: usize },
    Registry {
        name: String,
        provenance: Provenance,
        citation: Option<String>,
    },
    /// C_int + (t-1) C(Γ∖e) with the intersection class from the registry.
    DeletionContraction { edge: String },
    Blocked { missing: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Derivation {
    /// Canonical key, or a size summary for graphs too large to key.
    pub graph: String,
    pub edges: usize,
    #[serde(flatten)]
    pub rule: Rule,
    /// C in text form, absent when blocked.
    pub result: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<Derivation>,
}

impl Derivation {
    /// The first blocked step in depth-first order.
    pub fn first_blocker(&self) -> Option<&Derivation> {
        if matches!(self.rule, Rule::Blocked { .. }) {
            return Some(self);
        }
        self.children.iter().find_map(Derivation::first_blocker)
    }
}

/// C_Γ with the shipped fixtures, or `None` with a trace naming the blocker.
pub fn compute_c(g: &Multigraph) -> (Option<FeynmanPoly>, Derivation) {
    compute_c_with(g, &Registry::shipped())
}

pub fn compute_c_with(g: &Multigraph, registry: &Registry) -> (Option<FeynmanPoly>, Derivation) {
    let key = g.canonical_key().ok();
    let graph = key
        .as_ref()
        .map(|k| k.to_string())
        .unwrap_or_else(|| format!("({} vertices, {} edges)", g.vertex_count(), g.edge_count()));
    let n = g.edge_count();
    let node = |rule: Rule, value: Option<FeynmanPoly>, children: Vec<Derivation>| {
        let result = value.as_ref().map(|c| c.to_string());
        (
            value,
            Derivation {
                graph: graph.clone(),
                edges: n,
                rule,
                result,
                children,
            },
        )
    };
    let edge_name = |e: &EdgeId| e.to_string();

    if g.is_forest() {
        return node(Rule::Forest, Some(c_forest(n)), vec![]);
    }
    let first_of = |class: EdgeClass| {
        g.edges()
            .iter()
            .map(|e| e.id.clone())
            .find(|e| g.classify_edge(e).ok() == Some(class))
    };
    if let Some(e) = first_of(EdgeClass::Loop) {
        let (c, d) = compute_c_with(&g.delete_edge(&e).expect("edge of g"), registry);
        return node(Rule::Loop { edge: edge_name(&e) }, c.map(|c| c_loop_rule(&c)), vec![d]);
    }
    if let Some(e) = first_of(EdgeClass::Bridge) {
        let (c, d) = compute_c_with(&g.delete_edge(&e).expect("edge of g"), registry);
        return node(Rule::Bridge { edge: edge_name(&e) }, c.map(|c| c_bridge_rule(&c)), vec![d]);
    }
    if let Some(e) = first_of(EdgeClass::NonRegularForestDeletion) {
        let forest = c_forest(n - 1);
        return node(
            Rule::ForestDeletion { edge: edge_name(&e) },
            Some(delcon(&forest, &forest)),
            vec![],
        );
    }

    // all remaining edges are regular
    let class_of = |e: &EdgeId| {
        let mut class = vec![e.clone()];
        class.extend(g.parallel_class(e).expect("edge of g"));
        class
    };
    if let Some(class) = g.edge_ids().map(class_of).find(|c| c.len() >= 3) {
        let m = class.len();
        let e = class[0].clone();
        let mut single = g.clone();
        for extra in &class[2..] {
            single = single.delete_edge(extra).expect("edge of g");
        }
        let double = single.clone();
        single = single.delete_edge(&class[1]).expect("edge of g");
        let con = single.contract_edge(&e).expect("edge of g");
        let (c1, d1) = compute_c_with(&single, registry);
        let (c2, d2) = compute_c_with(&double, registry);
        let (c3, d3) = compute_c_with(&con, registry);
        let value = match (c1, c2, c3) {
            (Some(c1), Some(c2), Some(c3)) => Some(multi_edge_closed(&c1, &c2, &c3, m).expect("m >= 3")),
            _ => None,
        };
        return node(
            Rule::MultiEdge {
                edge: edge_name(&e),
                multiplicity: m,
            },
            value,
            vec![d1, d2, d3],
        );
    }

    if let Some(entry) = key.as_ref().and_then(|k| registry.lookup(k)) {
        if let Some(c) = entry.c {
            return node(
                Rule::Registry {
                    name: entry.name,
                    provenance: entry.provenance,
                    citation: entry.citation,
                },
                Some(c),
                vec![],
            );
        }
    }

    // deletion-contraction is guaranteed applicable only along parallel edges
    let parallel: Vec<EdgeId> = g
        .edge_ids()
        .filter(|e| g.has_parallel(e).unwrap_or(false))
        .filter(|e| applicability(g, e).map(|a| a.applicability) == Ok(Applicability::Applicable))
        .cloned()
        .collect();
    for e in &parallel {
        if let Ok(Some(int)) = registry.intersection(g, e) {
            let (c_del, d) = compute_c_with(&g.delete_edge(e).expect("edge of g"), registry);
            let value = c_del.map(|c_del| delcon(&int.c, &c_del));
            return node(Rule::DeletionContraction { edge: edge_name(e) }, value, vec![d]);
        }
    }
    let missing = match parallel.first() {
        Some(e) => format!(
            "intersection class C_{{X(G\\e) ∩ X(G/e)}} for edge {e}, where deletion-contraction is guaranteed \
             applicable; no registry entry for the graph either"
        ),
        None => format!(
            "intersection class C_{{X(G\\e) ∩ X(G/e)}} for an edge satisfying conditions I and II (edge {} has no \
             parallel partner, so neither condition is guaranteed); no registry entry for the graph either",
            g.edges()[0].id
        ),
    };
    node(Rule::Blocked { missing }, None, vec![])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::feynman::banana_c;

    fn f(s: &str) -> FeynmanPoly {
        FeynmanPoly::parse(s).unwrap()
    }

    #[test]
    fn bananas_from_rules_alone() {
        let empty = Registry::empty();
        for n in 1..=8 {
            let (c, d) = compute_c_with(&Multigraph::banana(n), &empty);
            assert_eq!(c, Some(banana_c(n)), "{d:?}");
            assert!(d.first_blocker().is_none());
            assert!(!uses_registry(&d), "{d:?}");
        }
    }

    fn uses_registry(d: &Derivation) -> bool {
        matches!(d.rule, Rule::Registry { .. }) || d.children.iter().any(uses_registry)
    }

    #[test]
    fn forests_and_cycles() {
        let path = Multigraph::from_edges(&[("a", "b"), ("b", "c"), ("c", "d")]).unwrap();
        assert_eq!(compute_c(&path).0, Some(c_forest(3)));
        assert_eq!(compute_c(&Multigraph::polygon(3)).0, Some(f("t*(t+1)^2")));
        let tadpole = Multigraph::from_edges(&[("a", "a"), ("a", "b")]).unwrap();
        assert_eq!(compute_c(&tadpole).0, Some(f("t*(t+1)")));
    }

    #[test]
    fn k4_is_blocked() {
        let (c, d) = compute_c(&Multigraph::complete(4));
        assert!(c.is_none());
        let Rule::Blocked { missing } = &d.first_blocker().unwrap().rule else {
            panic!()
        };
        assert!(missing.contains("C_{X(G\\e) ∩ X(G/e)}"));
    }

    #[test]
    fn doubled_triangle_family() {
        let base = catalog::triangle_two_doubled();
        let e5 = EdgeId::new("e5").unwrap();
        for m in 1..=6 {
            let g = base.multiply_edge(&e5, m).unwrap();
            let k = num_bigint::BigInt::from(m - 1);
            let first = &f("(t^2 - t + 1)^2*t") * &f("t - 1").pow(m - 1);
            let inner = &f("4*t^3 + t^2 + 4*t - 1") + &f("t^3 + t^2 + 3*t - 1").scalar_mul(&k);
            let expected = &first + &(&inner * &f("t").pow(m));
            let (c, d) = compute_c(&g);
            assert_eq!(c.as_ref(), Some(&expected), "m = {m}: {}", serde_json::to_string_pretty(&d).unwrap());
        }
    }

    #[test]
    fn deletion_contraction_from_fixtures() {
        // keep the intersection classes of the triangle with two doubled
        // sides but forget its C, so it must be derived along a doubled side
        let shipped = Registry::shipped();
        let g = catalog::triangle_two_doubled();
        let key = g.canonical_key().unwrap();
        let reg = Registry::empty();
        for mut entry in shipped.entries() {
            if entry.key == key {
                entry.c = None;
                entry.csm = None;
                entry.provenance = Provenance::UserInput;
            }
            reg.insert(entry).unwrap();
        }
        let (c, d) = compute_c_with(&g, &reg);
        assert_eq!(c, Some(f("t^5 + 2*t^4 + 4*t^3 + 2*t^2")));
        assert!(matches!(d.rule, Rule::DeletionContraction { .. }));
        assert!(matches!(d.children[0].rule, Rule::Registry { .. }));
    }
}
