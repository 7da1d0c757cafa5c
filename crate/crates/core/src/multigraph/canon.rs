//! Brute-force canonical labeling for small multigraphs.
//!
//! Vertices are first split into cells by iterated color refinement (an
//! isomorphism invariant), then every labeling that respects the cell order
//! is tried and the lexicographically smallest sorted edge list wins.
//! Isolated vertices are interchangeable and are placed last without being
//! permuted.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{GraphError, Multigraph};

pub const MAX_CANONICAL_VERTICES: usize = 12;

/// Isomorphism-invariant key of a multigraph, e.g. `3:0-1,0-1,1-2`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalKey(String);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn from_string(s: String) -> Self {
        CanonicalKey(s)
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub key: CanonicalKey,
    /// `labeling[v]` is the canonical position of vertex `v`.
    pub labeling: Vec<usize>,
    /// Edge indices of the input graph in canonical edge order.
    pub edge_order: Vec<usize>,
}

type EdgeList = Vec<(usize, usize)>;

fn mapped_edges(g: &Multigraph, labeling: &[usize]) -> EdgeList {
    let mut out: EdgeList = g
        .edges
        .iter()
        .map(|e| {
            let (a, b) = (labeling[e.ends.0], labeling[e.ends.1]);
            (a.min(b), a.max(b))
        })
        .collect();
    out.sort_unstable();
    out
}

/// Iterated color refinement; returns cells ordered by invariant color.
fn refine(g: &Multigraph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut adj: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); n];
    let mut loops = vec![0usize; n];
    for e in &g.edges {
        if e.is_loop() {
            loops[e.ends.0] += 1;
        } else {
            *adj[e.ends.0].entry(e.ends.1).or_default() += 1;
            *adj[e.ends.1].entry(e.ends.0).or_default() += 1;
        }
    }
    let initial: Vec<(usize, usize)> = (0..n)
        .map(|v| (adj[v].values().sum::<usize>(), loops[v]))
        .collect();
    let mut color = rank(&initial);
    loop {
        let sigs: Vec<(usize, Vec<(usize, usize)>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<(usize, usize)> =
                    adj[v].iter().map(|(&w, &mult)| (color[w], mult)).collect();
                nb.sort_unstable();
                (color[v], nb)
            })
            .collect();
        let next = rank(&sigs);
        let before = color.iter().max().map_or(0, |m| m + 1);
        let after = next.iter().max().map_or(0, |m| m + 1);
        color = next;
        if after == before {
            break;
        }
    }
    let k = color.iter().max().map_or(0, |m| m + 1);
    let mut cells = vec![Vec::new(); k];
    for v in 0..n {
        cells[color[v]].push(v);
    }
    cells
}

fn rank<T: Ord + Clone>(sigs: &[T]) -> Vec<usize> {
    let mut distinct: Vec<T> = sigs.to_vec();
    distinct.sort();
    distinct.dedup();
    sigs.iter()
        .map(|s| distinct.binary_search(s).expect("present"))
        .collect()
}

/// Calls `visit` with every labeling that maps each cell onto its block of
/// consecutive positions.
fn for_each_labeling(g: &Multigraph, mut visit: impl FnMut(&[usize])) {
    let n = g.vertex_count();
    let mut isolated = vec![true; n];
    for e in &g.edges {
        isolated[e.ends.0] = false;
        isolated[e.ends.1] = false;
    }
    let mut cells: Vec<Vec<usize>> = refine(g)
        .into_iter()
        .map(|c| c.into_iter().filter(|&v| !isolated[v]).collect::<Vec<_>>())
        .filter(|c| !c.is_empty())
        .collect();
    let mut labeling = vec![0usize; n];
    let first_isolated = cells.iter().map(Vec::len).sum::<usize>();
    for (label, v) in (first_isolated..).zip((0..n).filter(|&v| isolated[v])) {
        labeling[v] = label;
    }
    let mut offsets = Vec::with_capacity(cells.len());
    let mut acc = 0;
    for c in &cells {
        offsets.push(acc);
        acc += c.len();
    }
    permute_cells(&mut cells, &offsets, 0, &mut labeling, &mut visit);
}

fn permute_cells(
    cells: &mut [Vec<usize>],
    offsets: &[usize],
    depth: usize,
    labeling: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if depth == cells.len() {
        visit(labeling);
        return;
    }
    let len = cells[depth].len();
    heap_permutations(&mut cells[depth].clone(), len, &mut |perm| {
        for (i, &v) in perm.iter().enumerate() {
            labeling[v] = offsets[depth] + i;
        }
        permute_cells(cells, offsets, depth + 1, labeling, visit);
    });
}

fn heap_permutations(items: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k <= 1 {
        f(items);
        return;
    }
    heap_permutations(items, k - 1, f);
    for i in 0..k - 1 {
        if k.is_multiple_of(2) {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
        heap_permutations(items, k - 1, f);
    }
}

fn check_size(g: &Multigraph) -> Result<(), GraphError> {
    if g.vertex_count() > MAX_CANONICAL_VERTICES {
        return Err(GraphError::TooManyVertices {
            max: MAX_CANONICAL_VERTICES,
            got: g.vertex_count(),
        });
    }
    Ok(())
}

fn serialize(n: usize, edges: &EdgeList) -> String {
    let body: Vec<String> = edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
    format!("{n}:{}", body.join(","))
}

pub(super) fn canonical_form(g: &Multigraph) -> Result<CanonicalForm, GraphError> {
    check_size(g)?;
    let mut best: Option<(EdgeList, Vec<usize>)> = None;
    for_each_labeling(g, |lab| {
        let edges = mapped_edges(g, lab);
        if best.as_ref().is_none_or(|(b, _)| edges < *b) {
            best = Some((edges, lab.to_vec()));
        }
    });
    let (edges, labeling) = best.unwrap_or_default();
    let mut edge_order: Vec<usize> = (0..g.edge_count()).collect();
    edge_order.sort_by_key(|&i| {
        let (a, b) = g.edges[i].ends;
        let (a, b) = (labeling[a], labeling[b]);
        ((a.min(b), a.max(b)), i)
    });
    Ok(CanonicalForm {
        key: CanonicalKey(serialize(g.vertex_count(), &edges)),
        labeling,
        edge_order,
    })
}

/// Smallest canonical endpoint pair that edge `idx` takes over all optimal
/// labelings; equal exactly for edges in the same automorphism orbit.
pub(super) fn edge_orbit_key(g: &Multigraph, idx: usize) -> Result<String, GraphError> {
    check_size(g)?;
    let mut best: Option<(EdgeList, (usize, usize))> = None;
    for_each_labeling(g, |lab| {
        let edges = mapped_edges(g, lab);
        let (a, b) = g.edges[idx].ends;
        let pair = (lab[a].min(lab[b]), lab[a].max(lab[b]));
        let better = match &best {
            None => true,
            Some((b, p)) => edges < *b || (edges == *b && pair < *p),
        };
        if better {
            best = Some((edges, pair));
        }
    });
    let (_, (a, b)) = best.expect("edge exists, so some labeling does");
    Ok(format!("{a}-{b}"))
}
