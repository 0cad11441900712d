//! Plain-text edge lists.
//!
//! ```text
//! # vertices 3
//! # tag 0 hub 0
//! 0 1
//! 1 2 0.25
//! ```
//!
//! Header lines start with `#`. `# vertices N` fixes the vertex count
//! (otherwise the largest index plus one); `# tag V TEXT` labels a vertex.
//! Other comment lines are ignored. Weights use Rust's shortest round-trip
//! float formatting, so export followed by import is lossless.

use std::fmt::Write as _;

use super::{Graph, GraphError, WeightedGraph};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EdgeList {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize, Option<f64>)>,
    /// One entry per vertex; `None` for untagged vertices.
    pub tags: Vec<Option<String>>,
}

impl EdgeList {
    pub fn is_weighted(&self) -> bool {
        self.edges.iter().any(|e| e.2.is_some())
    }

    pub fn to_graph(&self) -> Result<Graph, GraphError> {
        let edges: Vec<_> = self.edges.iter().map(|&(u, v, _)| (u, v)).collect();
        Graph::from_edges(self.vertex_count, &edges)
    }

    /// Missing weights default to 1.
    pub fn to_weighted(&self) -> Result<WeightedGraph, GraphError> {
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|&(u, v, w)| (u, v, w.unwrap_or(1.0)))
            .collect();
        WeightedGraph::from_edges(self.vertex_count, &edges)
    }
}

pub fn write_edge_list(
    vertex_count: usize,
    edges: impl IntoIterator<Item = (usize, usize, Option<f64>)>,
    tags: Option<&[String]>,
) -> String {
    let mut out = String::new();
    writeln!(out, "# vertices {vertex_count}").unwrap();
    if let Some(tags) = tags {
        for (v, t) in tags.iter().enumerate() {
            writeln!(out, "# tag {v} {t}").unwrap();
        }
    }
    for (u, v, w) in edges {
        match w {
            Some(w) => writeln!(out, "{u} {v} {w}").unwrap(),
            None => writeln!(out, "{u} {v}").unwrap(),
        }
    }
    out
}

pub fn parse_edge_list(text: &str) -> Result<EdgeList, GraphError> {
    let mut declared = None;
    let mut tags: Vec<(usize, String)> = Vec::new();
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |reason: String| GraphError::Parse { line: i + 1, reason };
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(n) = rest.strip_prefix("vertices ") {
                declared = Some(n.trim().parse::<usize>().map_err(|e| err(e.to_string()))?);
            } else if let Some(t) = rest.strip_prefix("tag ") {
                let (v, text) = t.split_once(' ').ok_or_else(|| err("tag without text".into()))?;
                let v = v.parse::<usize>().map_err(|e| err(e.to_string()))?;
                tags.push((v, text.to_string()));
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(err(format!("expected `u v [weight]`, got `{line}`")));
        }
        let u = fields[0].parse::<usize>().map_err(|e| err(e.to_string()))?;
        let v = fields[1].parse::<usize>().map_err(|e| err(e.to_string()))?;
        let w = match fields.get(2) {
            Some(w) => Some(w.parse::<f64>().map_err(|e| err(e.to_string()))?),
            None => None,
        };
        edges.push((u, v, w));
    }
    let implied = edges
        .iter()
        .map(|&(u, v, _)| u.max(v) + 1)
        .chain(tags.iter().map(|t| t.0 + 1))
        .max()
        .unwrap_or(0);
    let vertex_count = match declared {
        Some(n) if n < implied => return Err(GraphError::VertexOutOfRange(implied - 1)),
        Some(n) => n,
        None => implied,
    };
    let mut tag_table = vec![None; vertex_count];
    for (v, t) in tags {
        tag_table[v] = Some(t);
    }
    Ok(EdgeList {
        vertex_count,
        edges,
        tags: tag_table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let tags = vec!["a".to_string(), "b c".to_string(), "d".to_string()];
        let text = write_edge_list(3, [(0, 1, None), (1, 2, Some(0.1 + 0.2))], Some(&tags));
        let parsed = parse_edge_list(&text).unwrap();
        assert_eq!(parsed.vertex_count, 3);
        assert_eq!(parsed.edges[1].2, Some(0.1 + 0.2));
        assert_eq!(parsed.tags[1].as_deref(), Some("b c"));
        assert_eq!(write_edge_list(3, parsed.edges.clone(), Some(&tags)), text);
    }

    #[test]
    fn plain_lists_and_errors() {
        let parsed = parse_edge_list("# K3\n0 1\n1 2\n2 0\n").unwrap();
        assert_eq!(parsed.vertex_count, 3);
        assert_eq!(parsed.to_graph().unwrap().edge_count(), 3);
        assert!(!parsed.is_weighted());
        assert!(matches!(parse_edge_list("0 x"), Err(GraphError::Parse { line: 1, .. })));
        assert!(parse_edge_list("0 1 2 3").is_err());
        assert!(parse_edge_list("# vertices 2\n0 5").is_err());
    }
}
