//! JSON and line-based text formats for multigraphs.
//!
//! JSON: `{"vertices": ["v1", ...], "edges": [{"id": "e1", "ends": ["v1", "v2"]}, ...]}`.
//!
//! Text: one edge per line, `u v [label]`; a line with a single token
//! declares a vertex; `#` starts a comment.

use serde::{Deserialize, Serialize};

use super::{GraphError, Multigraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    Json,
    Text,
    /// JSON if the first non-blank character is `{`, text otherwise.
    Auto,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<String>,
    edges: Vec<EdgeJson>,
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    id: String,
    ends: [String; 2],
}

pub(super) fn parse(text: &str, format: GraphFormat) -> Result<Multigraph, GraphError> {
    match format {
        GraphFormat::Json => parse_json(text),
        GraphFormat::Text => parse_text(text),
        GraphFormat::Auto if text.trim_start().starts_with('{') => parse_json(text),
        GraphFormat::Auto => parse_text(text),
    }
}

fn parse_json(text: &str) -> Result<Multigraph, GraphError> {
    let raw: GraphJson = serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?;
    let mut b = Multigraph::builder();
    for v in &raw.vertices {
        if b.index.contains_key(v) {
            return Err(GraphError::DuplicateVertex(v.clone()));
        }
        b.vertex(v)?;
    }
    for e in &raw.edges {
        for end in &e.ends {
            if !b.index.contains_key(end) {
                return Err(GraphError::UnknownVertex(end.clone()));
            }
        }
        b.edge(&e.ends[0], &e.ends[1], Some(&e.id))?;
    }
    b.build()
}

fn parse_text(text: &str) -> Result<Multigraph, GraphError> {
    let mut b = Multigraph::builder();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let wrap = |e: GraphError| GraphError::Parse {
            line: lineno + 1,
            msg: e.to_string(),
        };
        match tokens.as_slice() {
            [] => {}
            [v] => {
                b.vertex(v).map_err(wrap)?;
            }
            [u, v] => {
                b.edge(u, v, None).map_err(wrap)?;
            }
            [u, v, label] => {
                b.edge(u, v, Some(label)).map_err(wrap)?;
            }
            _ => {
                return Err(GraphError::Parse {
                    line: lineno + 1,
                    msg: format!("expected `u v [label]`, found {} tokens", tokens.len()),
                })
            }
        }
    }
    b.build()
}

pub(super) fn to_json(g: &Multigraph) -> String {
    let raw = GraphJson {
        vertices: g.vertices.clone(),
        edges: g
            .edges
            .iter()
            .map(|e| EdgeJson {
                id: e.id.to_string(),
                ends: [g.vertices[e.ends.0].clone(), g.vertices[e.ends.1].clone()],
            })
            .collect(),
    };
    serde_json::to_string_pretty(&raw).expect("graph serializes")
}

pub(super) fn to_text(g: &Multigraph) -> String {
    // Vertex declarations are only needed when first-appearance order along
    // the edge list would not reproduce the vertex order.
    let mut seen = Vec::new();
    for e in &g.edges {
        for v in [e.ends.0, e.ends.1] {
            if !seen.contains(&v) {
                seen.push(v);
            }
        }
    }
    let mut out = String::new();
    if seen != (0..g.vertex_count()).collect::<Vec<_>>() {
        for v in &g.vertices {
            out.push_str(v);
            out.push('\n');
        }
    }
    for e in &g.edges {
        out.push_str(&format!(
            "{} {} {}\n",
            g.vertices[e.ends.0], g.vertices[e.ends.1], e.id
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_format() {
        let g = parse_text("# triangle\na b\nb c\nc a 9\n\nz\n").unwrap();
        assert_eq!(g.vertices(), &["a", "b", "c", "z"]);
        let ids: Vec<_> = g.edge_ids().map(|e| e.as_str()).collect();
        assert_eq!(ids, vec!["e1", "e2", "9"]);
        assert_eq!(parse_text(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn text_errors_carry_line_numbers() {
        let err = parse_text("a b\na b c d\n").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 2, .. }));
        let err = parse_text("a b x\nb c x\n").unwrap_err();
        assert_eq!(err, GraphError::DuplicateEdge("x".into()));
    }

    #[test]
    fn json_format() {
        let src = r#"{"vertices": ["v1", "v2", "v3"],
                      "edges": [{"id": "e1", "ends": ["v1", "v2"]}, {"id": "e2", "ends": ["v2", "v2"]}]}"#;
        let g = parse(src, GraphFormat::Auto).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert!(g.edges()[1].is_loop());
        assert_eq!(parse_json(&g.to_json()).unwrap(), g);
        assert_eq!(parse_text(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn json_rejects_unknown_vertex() {
        let src = r#"{"vertices": ["a"], "edges": [{"id": "e1", "ends": ["a", "b"]}]}"#;
        assert_eq!(parse_json(src).unwrap_err(), GraphError::UnknownVertex("b".into()));
    }
}
