//! Finite multigraphs with loops and parallel edges.
//!
//! Edges carry stable string labels ([`EdgeId`]) which survive deletion and
//! contraction of other edges; graph polynomials name their variables after
//! these labels, so deletion/contraction identities can be checked term by
//! term.

mod canon;
mod io;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use canon::{CanonicalForm, CanonicalKey, MAX_CANONICAL_VERTICES};
pub use io::GraphFormat;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate edge label `{0}`")]
    DuplicateEdge(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("invalid edge label `{0}` (allowed: ASCII letters, digits, `_`)")]
    InvalidEdgeLabel(String),
    #[error("invalid vertex name `{0}`")]
    InvalidVertexName(String),
    #[error("edge labels `{0}` and `{1}` would both name the variable `{2}`")]
    VariableClash(String, String, String),
    #[error("edge multiplicity must be at least 1")]
    ZeroMultiplicity,
    #[error("edge `{0}` is a loop; parallelism is not defined for loops")]
    LoopHasNoParallel(String),
    #[error("canonical labeling supports at most {max} vertices, graph has {got}")]
    TooManyVertices { max: usize, got: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("graph JSON: {0}")]
    Json(String),
}

/// Stable label of an edge.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(String);

impl EdgeId {
    pub fn new(label: impl Into<String>) -> Result<Self, GraphError> {
        let label = label.into();
        let ok = !label.is_empty()
            && label
                .bytes()
                .all(|b| b.is_ascii_alphanumeric() || b == b'_');
        if ok {
            Ok(EdgeId(label))
        } else {
            Err(GraphError::InvalidEdgeLabel(label))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Name of the polynomial variable attached to this edge: `t7` for the
    /// labels `7` and `e7`, `t_<label>` otherwise.
    pub fn default_variable(&self) -> String {
        match numeric_suffix(&self.0) {
            Some(digits) => format!("t{digits}"),
            None => format!("t_{}", self.0),
        }
    }
}

fn numeric_suffix(label: &str) -> Option<&str> {
    let digits = label.strip_prefix('e').unwrap_or(label);
    (!digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())).then_some(digits)
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    /// Indices into the vertex list. Equal indices make a loop.
    pub ends: (usize, usize),
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.ends.0 == self.ends.1
    }

    fn joins(&self, a: usize, b: usize) -> bool {
        self.ends == (a, b) || self.ends == (b, a)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeClass {
    Bridge,
    Loop,
    NonRegularForestDeletion,
    Regular,
}

impl fmt::Display for EdgeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EdgeClass::Bridge => "bridge",
            EdgeClass::Loop => "loop",
            EdgeClass::NonRegularForestDeletion => "non-regular (deletion is a forest)",
            EdgeClass::Regular => "regular",
        };
        f.write_str(s)
    }
}

/// An immutable multigraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multigraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
}

/// Incremental construction of a [`Multigraph`].
#[derive(Default, Debug)]
pub struct GraphBuilder {
    vertices: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize, Option<String>)>,
}

impl GraphBuilder {
    pub fn vertex(&mut self, name: &str) -> Result<usize, GraphError> {
        if let Some(&i) = self.index.get(name) {
            return Ok(i);
        }
        if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == '#') {
            return Err(GraphError::InvalidVertexName(name.to_string()));
        }
        self.vertices.push(name.to_string());
        self.index.insert(name.to_string(), self.vertices.len() - 1);
        Ok(self.vertices.len() - 1)
    }

    pub fn edge(&mut self, u: &str, v: &str, label: Option<&str>) -> Result<&mut Self, GraphError> {
        let a = self.vertex(u)?;
        let b = self.vertex(v)?;
        self.edges.push((a, b, label.map(str::to_string)));
        Ok(self)
    }

    pub fn build(self) -> Result<Multigraph, GraphError> {
        let mut taken = std::collections::HashSet::new();
        for (_, _, label) in &self.edges {
            if let Some(l) = label {
                EdgeId::new(l.clone())?;
                if !taken.insert(l.clone()) {
                    return Err(GraphError::DuplicateEdge(l.clone()));
                }
            }
        }
        let mut vars: HashMap<String, String> = HashMap::new();
        for l in self.edges.iter().filter_map(|(_, _, l)| l.as_ref()) {
            let v = EdgeId(l.clone()).default_variable();
            if let Some(other) = vars.insert(v.clone(), l.clone()) {
                return Err(GraphError::VariableClash(other, l.clone(), v));
            }
        }
        let mut next = 1usize;
        let mut edges = Vec::with_capacity(self.edges.len());
        for (a, b, label) in self.edges {
            let id = match label {
                Some(l) => EdgeId(l),
                None => loop {
                    let candidate = format!("e{next}");
                    next += 1;
                    if !vars.contains_key(&EdgeId(candidate.clone()).default_variable())
                        && taken.insert(candidate.clone())
                    {
                        break EdgeId(candidate);
                    }
                },
            };
            edges.push(Edge { id, ends: (a, b) });
        }
        Ok(Multigraph {
            vertices: self.vertices,
            edges,
        })
    }
}

impl Multigraph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::default()
    }

    pub fn empty() -> Self {
        Multigraph {
            vertices: Vec::new(),
            edges: Vec::new(),
        }
    }

    /// Graph from unlabeled endpoint pairs; edges are labeled `e1, e2, ...`.
    pub fn from_edges(pairs: &[(&str, &str)]) -> Result<Self, GraphError> {
        let mut b = Self::builder();
        for (u, v) in pairs {
            b.edge(u, v, None)?;
        }
        b.build()
    }

    /// Graph from `(u, v, label)` triples plus extra isolated vertices.
    pub fn from_edge_list(
        edges: &[(&str, &str, Option<&str>)],
        isolated: &[&str],
    ) -> Result<Self, GraphError> {
        let mut b = Self::builder();
        for (u, v, l) in edges {
            b.edge(u, v, *l)?;
        }
        for v in isolated {
            b.vertex(v)?;
        }
        b.build()
    }

    /// The n-edge banana: n parallel edges `e1..en` between `a` and `b`.
    pub fn banana(n: usize) -> Self {
        let pairs = vec![("a", "b"); n];
        let mut g = Self::from_edges(&pairs).expect("static banana");
        if n == 0 {
            g.vertices = vec!["a".into(), "b".into()];
        }
        g
    }

    /// Cycle on `n >= 1` vertices (a single loop for `n == 1`).
    pub fn polygon(n: usize) -> Self {
        let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let mut b = Self::builder();
        for i in 0..n {
            b.edge(&names[i], &names[(i + 1) % n], None).expect("static polygon");
        }
        b.build().expect("static polygon")
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Self {
        let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let mut b = Self::builder();
        for i in 0..n {
            b.vertex(&names[i]).expect("static complete graph");
            for j in i + 1..n {
                b.edge(&names[i], &names[j], None).expect("static complete graph");
            }
        }
        b.build().expect("static complete graph")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = &EdgeId> {
        self.edges.iter().map(|e| &e.id)
    }

    pub fn edge_index(&self, e: &EdgeId) -> Result<usize, GraphError> {
        self.edges
            .iter()
            .position(|x| &x.id == e)
            .ok_or_else(|| GraphError::UnknownEdge(e.0.clone()))
    }

    /// Look up an edge by its textual label.
    pub fn edge_by_label(&self, label: &str) -> Result<&EdgeId, GraphError> {
        self.edges
            .iter()
            .map(|e| &e.id)
            .find(|id| id.as_str() == label)
            .ok_or_else(|| GraphError::UnknownEdge(label.to_string()))
    }

    pub fn edge(&self, e: &EdgeId) -> Result<&Edge, GraphError> {
        Ok(&self.edges[self.edge_index(e)?])
    }

    /// Variable names for the graph polynomial, in edge order.
    pub fn variable_names(&self) -> Vec<String> {
        self.edges.iter().map(|e| e.id.default_variable()).collect()
    }

    pub fn delete_edge(&self, e: &EdgeId) -> Result<Self, GraphError> {
        let idx = self.edge_index(e)?;
        let mut g = self.clone();
        g.edges.remove(idx);
        Ok(g)
    }

    /// Contract `e`, merging its endpoints. Contracting a loop deletes it.
    pub fn contract_edge(&self, e: &EdgeId) -> Result<Self, GraphError> {
        let idx = self.edge_index(e)?;
        let (a, b) = self.edges[idx].ends;
        if a == b {
            return self.delete_edge(e);
        }
        let (keep, gone) = (a.min(b), a.max(b));
        let remap = |v: usize| -> usize {
            let v = if v == gone { keep } else { v };
            if v > gone {
                v - 1
            } else {
                v
            }
        };
        let mut vertices = self.vertices.clone();
        vertices.remove(gone);
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != idx)
            .map(|(_, x)| Edge {
                id: x.id.clone(),
                ends: (remap(x.ends.0), remap(x.ends.1)),
            })
            .collect();
        Ok(Multigraph { vertices, edges })
    }

    /// Replace `e` by `m` parallel copies. The original label is kept; the
    /// copies are labeled `<e>_2, <e>_3, ...` (with extra `_` on collision).
    pub fn multiply_edge(&self, e: &EdgeId, m: usize) -> Result<Self, GraphError> {
        if m == 0 {
            return Err(GraphError::ZeroMultiplicity);
        }
        let idx = self.edge_index(e)?;
        let ends = self.edges[idx].ends;
        let mut g = self.clone();
        for (insert_at, k) in (idx + 1..).zip(2..=m) {
            let mut label = format!("{}_{k}", e.0);
            while g.edges.iter().any(|x| x.id.0 == label) {
                label.push('_');
            }
            g.edges.insert(
                insert_at,
                Edge {
                    id: EdgeId(label),
                    ends,
                },
            );
        }
        Ok(g)
    }

    /// Edges sharing both endpoints with `e` (excluding `e`).
    pub fn parallel_class(&self, e: &EdgeId) -> Result<Vec<EdgeId>, GraphError> {
        let edge = self.edge(e)?;
        if edge.is_loop() {
            return Err(GraphError::LoopHasNoParallel(e.0.clone()));
        }
        let (a, b) = edge.ends;
        Ok(self
            .edges
            .iter()
            .filter(|x| x.id != *e && x.joins(a, b))
            .map(|x| x.id.clone())
            .collect())
    }

    pub fn has_parallel(&self, e: &EdgeId) -> Result<bool, GraphError> {
        Ok(!self.parallel_class(e)?.is_empty())
    }

    /// Connected-component label of every vertex, ignoring edge `skip`.
    fn components_without(&self, skip: Option<usize>) -> (Vec<usize>, usize) {
        let mut dsu = Dsu::new(self.vertices.len());
        for (i, e) in self.edges.iter().enumerate() {
            if Some(i) != skip {
                dsu.union(e.ends.0, e.ends.1);
            }
        }
        dsu.labels()
    }

    /// Component label per vertex, and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        self.components_without(None)
    }

    pub fn component_count(&self) -> usize {
        self.components().1
    }

    /// First Betti number `|E| - |V| + #components`.
    pub fn betti1(&self) -> usize {
        self.edges.len() + self.component_count() - self.vertices.len()
    }

    pub fn is_forest(&self) -> bool {
        self.betti1() == 0
    }

    pub fn is_bridge(&self, e: &EdgeId) -> Result<bool, GraphError> {
        let idx = self.edge_index(e)?;
        if self.edges[idx].is_loop() {
            return Ok(false);
        }
        Ok(self.components_without(Some(idx)).1 > self.component_count())
    }

    pub fn classify_edge(&self, e: &EdgeId) -> Result<EdgeClass, GraphError> {
        let edge = self.edge(e)?;
        if edge.is_loop() {
            return Ok(EdgeClass::Loop);
        }
        if self.is_bridge(e)? {
            return Ok(EdgeClass::Bridge);
        }
        if self.delete_edge(e)?.is_forest() {
            return Ok(EdgeClass::NonRegularForestDeletion);
        }
        Ok(EdgeClass::Regular)
    }

    /// Biconnected blocks, as lists of edge indices. Loops are returned as
    /// singleton blocks; isolated vertices contribute nothing.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        let mut blocks = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.is_loop() {
                blocks.push(vec![i]);
            } else {
                adj[e.ends.0].push((e.ends.1, i));
                adj[e.ends.1].push((e.ends.0, i));
            }
        }
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut timer = 0usize;
        let mut stack: Vec<usize> = Vec::new();
        for root in 0..n {
            if disc[root] == usize::MAX {
                tarjan(
                    root, None, &adj, &mut disc, &mut low, &mut timer, &mut stack, &mut blocks,
                );
            }
        }
        blocks
    }

    /// Whether at least two biconnected blocks contain a cycle, so that the
    /// graph polynomial splits as a product of two non-constant factors.
    pub fn disjoinable(&self) -> bool {
        self.blocks()
            .iter()
            .filter(|b| b.len() >= 2 || self.edges[b[0]].is_loop())
            .count()
            >= 2
    }

    pub fn canonical_form(&self) -> Result<CanonicalForm, GraphError> {
        canon::canonical_form(self)
    }

    pub fn canonical_key(&self) -> Result<CanonicalKey, GraphError> {
        Ok(self.canonical_form()?.key)
    }

    /// Label of the automorphism orbit of `e` under the canonical labeling.
    pub fn canonical_edge_key(&self, e: &EdgeId) -> Result<String, GraphError> {
        canon::edge_orbit_key(self, self.edge_index(e)?)
    }

    pub fn parse(text: &str, format: GraphFormat) -> Result<Self, GraphError> {
        io::parse(text, format)
    }

    pub fn to_json(&self) -> String {
        io::to_json(self)
    }

    pub fn to_text(&self) -> String {
        io::to_text(self)
    }
}

#[allow(clippy::too_many_arguments)]
fn tarjan(
    v: usize,
    parent_edge: Option<usize>,
    adj: &[Vec<(usize, usize)>],
    disc: &mut [usize],
    low: &mut [usize],
    timer: &mut usize,
    stack: &mut Vec<usize>,
    blocks: &mut Vec<Vec<usize>>,
) {
    disc[v] = *timer;
    low[v] = *timer;
    *timer += 1;
    for &(w, ei) in &adj[v] {
        if Some(ei) == parent_edge {
            continue;
        }
        if disc[w] == usize::MAX {
            stack.push(ei);
            tarjan(w, Some(ei), adj, disc, low, timer, stack, blocks);
            low[v] = low[v].min(low[w]);
            if low[w] >= disc[v] {
                let mut block = Vec::new();
                while let Some(x) = stack.pop() {
                    block.push(x);
                    if x == ei {
                        break;
                    }
                }
                block.sort_unstable();
                blocks.push(block);
            }
        } else if disc[w] < disc[v] {
            stack.push(ei);
            low[v] = low[v].min(disc[w]);
        }
    }
}

pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }

    /// Dense component labels in order of first vertex, and their count.
    pub(crate) fn labels(&mut self) -> (Vec<usize>, usize) {
        let n = self.parent.len();
        let mut map = HashMap::new();
        let mut out = Vec::with_capacity(n);
        for v in 0..n {
            let r = self.find(v);
            let next = map.len();
            out.push(*map.entry(r).or_insert(next));
        }
        (out, map.len())
    }
}
