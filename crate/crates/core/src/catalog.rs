//! Named small graphs used as worked examples and test fixtures.

use std::collections::BTreeMap;

use crate::multigraph::{CanonicalKey, Multigraph};

/// Triangle on `a, b, c` with the sides `ab` and `bc` doubled.
///
/// Labels: `e1, e2` join `a b`; `e3, e4` join `b c`; `e5` joins `a c`.
/// Deleting `e5` leaves two 2-cycles joined at `b`.
pub fn triangle_two_doubled() -> Multigraph {
    from_labeled(&[
        ("a", "b", "e1"),
        ("a", "b", "e2"),
        ("b", "c", "e3"),
        ("b", "c", "e4"),
        ("a", "c", "e5"),
    ])
}

fn from_labeled(edges: &[(&str, &str, &str)]) -> Multigraph {
    let mut b = Multigraph::builder();
    for &(u, v, l) in edges {
        b.edge(u, v, Some(l)).expect("static graph");
    }
    b.build().expect("static graph")
}

/// Triangle with all three sides doubled; `e5_2` is the copy of `e5`.
pub fn triangle_all_doubled() -> Multigraph {
    let g = triangle_two_doubled();
    let e = g.edge_by_label("e5").expect("static graph").clone();
    g.multiply_edge(&e, 2).expect("static graph")
}

/// K4 on `0..3` with the edge `0 1` doubled.
///
/// Labels: `e1, e2` join `0 1`; `e3`: `0 2`; `e4`: `1 2`; `e5`: `0 3`;
/// `e6`: `1 3`; `e7`: `2 3`, the edge opposite the doubled pair.
pub fn k4_one_doubled() -> Multigraph {
    from_labeled(&[
        ("0", "1", "e1"),
        ("0", "1", "e2"),
        ("0", "2", "e3"),
        ("1", "2", "e4"),
        ("0", "3", "e5"),
        ("1", "3", "e6"),
        ("2", "3", "e7"),
    ])
}

/// Wheel with hub `h` and rim `r1..rn`; spokes are `s1..sn`, rim edges
/// `c1..cn` with `ci` joining `ri` to `r(i+1)`.
pub fn wheel(n: usize) -> Multigraph {
    assert!(n >= 3, "a wheel needs at least three spokes");
    let mut b = Multigraph::builder();
    for i in 1..=n {
        b.edge("h", &format!("r{i}"), Some(&format!("s{i}")))
            .expect("generated graph");
    }
    for i in 1..=n {
        let j = i % n + 1;
        b.edge(&format!("r{i}"), &format!("r{j}"), Some(&format!("c{i}")))
            .expect("generated graph");
    }
    b.build().expect("generated graph")
}

/// Every connected multigraph (loops and parallel edges allowed) with at
/// most `max_edges` edges, one per isomorphism class, ordered by edge count
/// then canonical key. Vertices are `v0, v1, ...` and edges `e1, e2, ...`.
///
/// Each connected graph with an edge has a non-bridge edge or a leaf, so
/// removing it leaves a smaller connected graph; growing by one edge at a
/// time therefore reaches every class.
pub fn connected_multigraphs(max_edges: usize) -> Vec<Multigraph> {
    let build = |vertices: usize, pairs: &[(usize, usize)]| {
        let names: Vec<String> = (0..vertices).map(|i| format!("v{i}")).collect();
        let mut b = Multigraph::builder();
        for name in &names {
            b.vertex(name).expect("generated graph");
        }
        for &(u, v) in pairs {
            b.edge(&names[u], &names[v], None).expect("generated graph");
        }
        b.build().expect("generated graph")
    };
    let mut layer: BTreeMap<CanonicalKey, (usize, Vec<(usize, usize)>)> = BTreeMap::new();
    let single = build(1, &[]);
    layer.insert(single.canonical_key().expect("small graph"), (1, vec![]));
    let mut out = vec![single];
    for _ in 0..max_edges {
        let mut next = BTreeMap::new();
        for (vertices, pairs) in layer.values() {
            let n = *vertices;
            let candidates = (0..n)
                .flat_map(|i| (i..=n).map(move |j| (i, j)))
                .filter(|&(i, _)| i < n);
            for (i, j) in candidates {
                let mut grown = pairs.clone();
                grown.push((i, j));
                let size = if j == n { n + 1 } else { n };
                let g = build(size, &grown);
                next.entry(g.canonical_key().expect("small graph"))
                    .or_insert((size, grown));
            }
        }
        out.extend(next.values().map(|(n, pairs)| build(*n, pairs)));
        layer = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let g = triangle_two_doubled();
        assert_eq!((g.vertex_count(), g.edge_count(), g.betti1()), (3, 5, 3));
        let g = triangle_all_doubled();
        assert_eq!((g.vertex_count(), g.edge_count(), g.betti1()), (3, 6, 4));
        let g = k4_one_doubled();
        assert_eq!((g.vertex_count(), g.edge_count(), g.betti1()), (4, 7, 4));
        let w = wheel(4);
        assert_eq!((w.vertex_count(), w.edge_count(), w.betti1()), (5, 8, 4));
    }

    #[test]
    fn corpus_sizes() {
        // isomorphism classes by edge count, from a networkx enumeration
        let corpus = connected_multigraphs(5);
        let counts: Vec<usize> = (0..=5)
            .map(|k| corpus.iter().filter(|g| g.edge_count() == k).count())
            .collect();
        assert_eq!(counts, vec![1, 2, 4, 11, 30, 95]);
    }
}
