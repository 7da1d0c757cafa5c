//! The graph polynomial Ψ_Γ = Σ_T Π_{e∉T} t_e over maximal spanning forests.
//!
//! Three independent routes are provided and must agree exactly:
//! direct enumeration of spanning forests, the deletion-contraction
//! recursion (memoized on canonical keys), and the matrix-tree theorem
//! evaluated fraction-free over the polynomial ring.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::multigraph::{CanonicalKey, Dsu, EdgeClass, EdgeId, GraphError, Multigraph};
use crate::multipoly::{Monomial, MultiPoly, Vars};
use crate::scalar::{Field, Ring};
use crate::Rational;

pub const ENUMERATION_EDGE_LIMIT: usize = 20;
pub const MATRIX_TREE_EDGE_LIMIT: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PsiError {
    #[error("{method:?} is limited to {limit} edges, graph has {got}")]
    TooManyEdges {
        method: PsiMethod,
        limit: usize,
        got: usize,
    },
    #[error("edge `{edge}` is a {class}; the identity that applies is {identity}")]
    OneTermIdentity {
        edge: String,
        class: EdgeClass,
        identity: &'static str,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PsiMethod {
    Enumeration,
    MatrixTree,
    Recursion,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PsiResult<C: Ring> {
    pub polynomial: MultiPoly<C>,
    pub method: PsiMethod,
    pub forest_count: usize,
}

/// Ψ over the rationals.
pub type Psi = PsiResult<Rational>;

/// Variable set of a graph: one variable per edge, in edge order.
pub fn graph_vars(g: &Multigraph) -> Arc<Vars> {
    Vars::new(g.variable_names())
}

fn edge_var(g: &Multigraph, vars: &Arc<Vars>, e: &EdgeId) -> usize {
    let name = g.edge(e).expect("edge of g").id.default_variable();
    vars.index_of(&name).expect("graph variable")
}

fn result<C: Ring>(polynomial: MultiPoly<C>, method: PsiMethod) -> PsiResult<C> {
    PsiResult {
        forest_count: polynomial.len(),
        polynomial,
        method,
    }
}

/// Ψ by enumerating every maximal spanning forest.
pub fn psi_enumerate<C: Ring>(g: &Multigraph) -> Result<PsiResult<C>, PsiError> {
    let n = g.edge_count();
    if n > ENUMERATION_EDGE_LIMIT {
        return Err(PsiError::TooManyEdges {
            method: PsiMethod::Enumeration,
            limit: ENUMERATION_EDGE_LIMIT,
            got: n,
        });
    }
    let vars = graph_vars(g);
    let rank = g.vertex_count() - g.component_count();
    let candidates: Vec<usize> = (0..n).filter(|&i| !g.edges()[i].is_loop()).collect();
    let mut psi = MultiPoly::zero(vars);
    for_each_subset(candidates.len(), rank, |chosen| {
        let mut dsu = Dsu::new(g.vertex_count());
        let acyclic = chosen.iter().all(|&k| {
            let (a, b) = g.edges()[candidates[k]].ends;
            dsu.union(a, b)
        });
        if acyclic {
            let mut in_forest = vec![false; n];
            for &k in chosen {
                in_forest[candidates[k]] = true;
            }
            let m = Monomial::from_support(n, (0..n).filter(|&i| !in_forest[i]));
            psi.add_term(m, C::one());
        }
    });
    Ok(result(psi, PsiMethod::Enumeration))
}

/// Calls `f` with every `k`-subset of `0..n`, as sorted index lists.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Memo table for [`psi_recursion_with`], keyed by canonical graph key.
///
/// Stored polynomials are over positional variables in canonical edge order,
/// so a hit on any isomorphic graph can be relabeled back.
pub struct PsiMemo<C: Ring> {
    table: RwLock<HashMap<CanonicalKey, MultiPoly<C>>>,
}

impl<C: Ring> Default for PsiMemo<C> {
    fn default() -> Self {
        PsiMemo {
            table: RwLock::new(HashMap::new()),
        }
    }
}

impl<C: Ring> PsiMemo<C> {
    pub fn len(&self) -> usize {
        self.table.read().expect("memo lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Ψ by the recursion Ψ_Γ = t_e Ψ_{Γ∖e} + Ψ_{Γ/e} (loops: t_e Ψ_{Γ∖e};
/// bridges: Ψ_{Γ/e}).
pub fn psi_recursion<C: Ring>(g: &Multigraph) -> PsiResult<C> {
    psi_recursion_with(g, &PsiMemo::default())
}

pub fn psi_recursion_with<C: Ring>(g: &Multigraph, memo: &PsiMemo<C>) -> PsiResult<C> {
    result(recurse(g, memo), PsiMethod::Recursion)
}

fn recurse<C: Ring>(g: &Multigraph, memo: &PsiMemo<C>) -> MultiPoly<C> {
    let vars = graph_vars(g);
    if g.is_forest() {
        return MultiPoly::one(vars);
    }
    let canon = g.canonical_form().ok();
    let n = g.edge_count();
    if let Some(c) = &canon {
        if let Some(hit) = memo.table.read().expect("memo lock").get(&c.key) {
            let mut map = vec![0; n];
            for (pos, &edge) in c.edge_order.iter().enumerate() {
                map[pos] = edge;
            }
            return hit.relabel(vars, &map);
        }
    }

    let pick = |class: EdgeClass| {
        g.edges()
            .iter()
            .find(|e| g.classify_edge(&e.id).ok() == Some(class))
            .map(|e| e.id.clone())
    };
    let psi = if let Some(e) = g.edges().iter().find(|e| e.is_loop()).map(|e| e.id.clone()) {
        let t = MultiPoly::var(vars.clone(), edge_var(g, &vars, &e));
        let del = recurse(&g.delete_edge(&e).expect("edge"), memo);
        &t * &del.with_vars(&vars).expect("subset")
    } else if let Some(e) = pick(EdgeClass::Bridge) {
        recurse(&g.contract_edge(&e).expect("edge"), memo)
            .with_vars(&vars)
            .expect("subset")
    } else {
        // no loops or bridges, and not a forest: any edge lies on a cycle
        let e = g.edges()[0].id.clone();
        let t = MultiPoly::var(vars.clone(), edge_var(g, &vars, &e));
        let del = recurse(&g.delete_edge(&e).expect("edge"), memo).with_vars(&vars).expect("subset");
        let con = recurse(&g.contract_edge(&e).expect("edge"), memo)
            .with_vars(&vars)
            .expect("subset");
        &(&t * &del) + &con
    };

    if let Some(c) = canon {
        let positional = Vars::new((0..n).map(|i| format!("x{i}")));
        let mut map = vec![0; n];
        for (pos, &edge) in c.edge_order.iter().enumerate() {
            map[edge] = pos;
        }
        memo.table
            .write()
            .expect("memo lock")
            .entry(c.key)
            .or_insert_with(|| psi.relabel(positional, &map));
    }
    psi
}

/// Ψ via the matrix-tree theorem.
///
/// For each connected component the spanning-tree polynomial
/// K = Σ_T Π_{e∈T} t_e is the determinant of the reduced weighted Laplacian,
/// computed by fraction-free (Bareiss) elimination with exact polynomial
/// division. Each monomial of K is then replaced by the product over the
/// component's edges not in it, and the components are multiplied.
pub fn psi_matrix_tree<C: Field>(g: &Multigraph) -> Result<PsiResult<C>, PsiError> {
    let n = g.edge_count();
    if n > MATRIX_TREE_EDGE_LIMIT {
        return Err(PsiError::TooManyEdges {
            method: PsiMethod::MatrixTree,
            limit: MATRIX_TREE_EDGE_LIMIT,
            got: n,
        });
    }
    let vars = graph_vars(g);
    let (comp, ncomp) = g.components();
    let mut psi = MultiPoly::one(vars.clone());
    for c in 0..ncomp {
        let verts: Vec<usize> = (0..g.vertex_count()).filter(|&v| comp[v] == c).collect();
        let edges: Vec<usize> = (0..n).filter(|&i| comp[g.edges()[i].ends.0] == c).collect();
        let pos: HashMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        // reduced Laplacian: drop the last vertex of the component
        let k = verts.len() - 1;
        let mut lap = vec![vec![MultiPoly::zero(vars.clone()); k]; k];
        for &i in &edges {
            let e = &g.edges()[i];
            if e.is_loop() {
                continue;
            }
            let t = MultiPoly::var(vars.clone(), i);
            let (a, b) = (pos[&e.ends.0], pos[&e.ends.1]);
            if a < k {
                lap[a][a] = &lap[a][a] + &t;
            }
            if b < k {
                lap[b][b] = &lap[b][b] + &t;
            }
            if a < k && b < k {
                lap[a][b] = &lap[a][b] - &t;
                lap[b][a] = &lap[b][a] - &t;
            }
        }
        let tree_poly: MultiPoly<C> = bareiss_det(lap, &vars);
        let mut comp_psi = MultiPoly::zero(vars.clone());
        for (m, coeff) in tree_poly.terms() {
            let exps: Vec<u16> = (0..n)
                .map(|i| {
                    if comp[g.edges()[i].ends.0] == c {
                        1 - m.exponents()[i]
                    } else {
                        0
                    }
                })
                .collect();
            comp_psi.add_term(Monomial::from_exponents(exps), coeff.clone());
        }
        psi = &psi * &comp_psi;
    }
    Ok(result(psi, PsiMethod::MatrixTree))
}

/// Determinant by Bareiss elimination; every division is exact.
fn bareiss_det<C: Field>(mut m: Vec<Vec<MultiPoly<C>>>, vars: &Arc<Vars>) -> MultiPoly<C> {
    let k = m.len();
    if k == 0 {
        return MultiPoly::one(vars.clone());
    }
    let mut prev = MultiPoly::one(vars.clone());
    let mut negate = false;
    for p in 0..k {
        if m[p][p].is_zero() {
            match (p + 1..k).find(|&r| !m[r][p].is_zero()) {
                Some(r) => {
                    m.swap(p, r);
                    negate = !negate;
                }
                None => return MultiPoly::zero(vars.clone()),
            }
        }
        for i in p + 1..k {
            for j in p + 1..k {
                let num = &(&m[p][p] * &m[i][j]) - &(&m[i][p] * &m[p][j]);
                m[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
        }
        prev = m[p][p].clone();
    }
    let det = m[k - 1][k - 1].clone();
    if negate {
        -&det
    } else {
        det
    }
}

/// Ψ over the rationals by the recursion.
pub fn psi(g: &Multigraph) -> MultiPoly<Rational> {
    psi_recursion::<Rational>(g).polynomial
}

/// (Ψ_{Γ∖e}, Ψ_{Γ/e}) for an edge `e`.
pub fn deletion_contraction(
    g: &Multigraph,
    e: &EdgeId,
) -> Result<(MultiPoly<Rational>, MultiPoly<Rational>), PsiError> {
    Ok((psi(&g.delete_edge(e)?), psi(&g.contract_edge(e)?)))
}

/// Whether Ψ_Γ = t_e Ψ_{Γ∖e} + Ψ_{Γ/e} holds exactly. Loops and bridges are
/// rejected, naming the one-term identity that holds for them instead.
pub fn check_delcon_identity(g: &Multigraph, e: &EdgeId) -> Result<bool, PsiError> {
    match g.classify_edge(e)? {
        class @ EdgeClass::Loop => {
            return Err(PsiError::OneTermIdentity {
                edge: e.to_string(),
                class,
                identity: "Psi(G) = t_e * Psi(G \\ e)",
            })
        }
        class @ EdgeClass::Bridge => {
            return Err(PsiError::OneTermIdentity {
                edge: e.to_string(),
                class,
                identity: "Psi(G) = Psi(G / e)",
            })
        }
        _ => {}
    }
    let vars = graph_vars(g);
    let whole = psi_enumerate::<Rational>(g)
        .map(|r| r.polynomial)
        .unwrap_or_else(|_| psi(g));
    let (del, con) = deletion_contraction(g, e)?;
    let t = MultiPoly::var(vars.clone(), edge_var(g, &vars, e));
    Ok(whole == &(&t * &del) + &con)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> MultiPoly<Rational> {
        MultiPoly::parse(s).unwrap()
    }

    fn id(s: &str) -> EdgeId {
        EdgeId::new(s).unwrap()
    }

    fn triangle() -> Multigraph {
        Multigraph::from_edges(&[("a", "b"), ("b", "c"), ("c", "a")]).unwrap()
    }

    /// Triangle with edges 1,2 doubled between a and b, then 3 and 4.
    fn doubled_triangle() -> Multigraph {
        Multigraph::from_edges(&[("a", "b"), ("a", "b"), ("b", "c"), ("c", "a")]).unwrap()
    }

    fn all_three(g: &Multigraph) -> [MultiPoly<Rational>; 3] {
        [
            psi_enumerate(g).unwrap().polynomial,
            psi_recursion(g).polynomial,
            psi_matrix_tree(g).unwrap().polynomial,
        ]
    }

    #[test]
    fn triangle_and_banana() {
        for p in all_three(&triangle()) {
            assert_eq!(p, q("t1 + t2 + t3"));
        }
        for p in all_three(&Multigraph::banana(2)) {
            assert_eq!(p, q("t1 + t2"));
        }
    }

    #[test]
    fn forests_give_one() {
        let path = Multigraph::from_edges(&[("a", "b"), ("b", "c"), ("d", "e")]).unwrap();
        for p in all_three(&path) {
            assert_eq!(p, q("1"));
        }
        for p in all_three(&Multigraph::empty()) {
            assert_eq!(p, q("1"));
        }
    }

    #[test]
    fn doubled_edge_triangle() {
        // five spanning trees, enumerated by hand
        for p in all_three(&doubled_triangle()) {
            assert_eq!(p, q("(t1 + t2)*(t3 + t4) + t1*t2"));
        }
    }

    #[test]
    fn loops_multiply_by_their_variable() {
        let g = Multigraph::from_edges(&[("a", "a"), ("a", "b"), ("b", "a")]).unwrap();
        for p in all_three(&g) {
            assert_eq!(p, q("t1*(t2 + t3)"));
        }
    }

    #[test]
    fn k4_has_sixteen_trees() {
        let [e, r, m] = all_three(&Multigraph::complete(4));
        assert_eq!(e.len(), 16);
        assert_eq!(e.homogeneity(), Some(crate::multipoly::Homogeneity::Degree(3)));
        assert_eq!(e, r);
        assert_eq!(e, m);
    }

    #[test]
    fn memo_is_shared_between_isomorphic_subgraphs() {
        let memo = PsiMemo::<Rational>::default();
        let g = Multigraph::complete(4);
        let first = psi_recursion_with(&g, &memo).polynomial;
        let filled = memo.len();
        assert!(filled > 0);
        let relabeled = Multigraph::from_edges(&[
            ("p", "q"),
            ("r", "s"),
            ("q", "r"),
            ("p", "s"),
            ("q", "s"),
            ("p", "r"),
        ])
        .unwrap();
        let second = psi_recursion_with(&relabeled, &memo).polynomial;
        assert_eq!(memo.len(), filled);
        assert_eq!(first.len(), second.len());
        assert_eq!(second, psi_enumerate(&relabeled).unwrap().polynomial);
    }

    #[test]
    fn delcon_identity() {
        for e in ["e1", "e2", "e3"] {
            assert!(check_delcon_identity(&triangle(), &id(e)).unwrap());
        }
        let path = Multigraph::from_edges(&[("a", "b"), ("b", "c")]).unwrap();
        assert!(matches!(
            check_delcon_identity(&path, &id("e1")),
            Err(PsiError::OneTermIdentity { class: EdgeClass::Bridge, .. })
        ));
        let l = Multigraph::from_edges(&[("a", "a")]).unwrap();
        assert!(matches!(
            check_delcon_identity(&l, &id("e1")),
            Err(PsiError::OneTermIdentity { class: EdgeClass::Loop, .. })
        ));
    }

    #[test]
    fn enumeration_guard() {
        let g = Multigraph::banana(21);
        assert!(matches!(psi_enumerate::<Rational>(&g), Err(PsiError::TooManyEdges { .. })));
        assert!(matches!(psi_matrix_tree::<Rational>(&Multigraph::banana(17)), Err(PsiError::TooManyEdges { .. })));
    }

    #[test]
    fn subsets() {
        let mut seen = Vec::new();
        for_each_subset(4, 2, |s| seen.push(s.to_vec()));
        assert_eq!(seen.len(), 6);
        let mut empty = 0;
        for_each_subset(3, 0, |_| empty += 1);
        assert_eq!(empty, 1);
    }
}
