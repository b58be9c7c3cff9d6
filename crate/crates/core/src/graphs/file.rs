//! TOML graph description files.
//!
//! ```toml
//! vertices = 4
//! edges = [[0, 1], [2, 3], [0, 2], [1, 3]]
//! inputs = [0, 2]
//! outputs = [1, 3]
//! order = [0, 2, 1, 3]          # optional, identity by default
//! flow = [[0, 1], [2, 3]]       # pairs (v, f(v))
//! angles = [0, 1, 7, 0]         # base angles in units of π/4, optional
//! emitters = [[0, 1], [2, 3]]   # optional emitter chains V_q
//! extra = [0, 0, 0, 0]          # optional extra emissions per vertex
//! ```

use super::graph::{Graph, GraphParts, Vertex};
use crate::error::{Error, Result};
use crate::qstate::Angle8;
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGraph {
    vertices: usize,
    #[serde(default)]
    edges: Vec<[Vertex; 2]>,
    #[serde(default)]
    inputs: Vec<Vertex>,
    outputs: Option<Vec<Vertex>>,
    order: Option<Vec<Vertex>>,
    #[serde(default)]
    flow: Vec<[Vertex; 2]>,
    angles: Option<Vec<Angle8>>,
    emitters: Option<Vec<Vec<Vertex>>>,
    extra: Option<Vec<usize>>,
}

/// Parsed graph file.
#[derive(Clone, Debug)]
pub struct GraphDocument {
    pub graph: Graph,
    pub angles: Vec<Angle8>,
    pub emitters: Option<Vec<Vec<Vertex>>>,
    pub extra: Option<Vec<usize>>,
}

pub fn parse_graph_document(text: &str) -> Result<GraphDocument> {
    let raw: RawGraph = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let n = raw.vertices;
    let graph = Graph::from_parts(GraphParts {
        vertices: n,
        edges: raw.edges.iter().map(|e| (e[0], e[1])).collect(),
        inputs: raw.inputs,
        outputs: raw.outputs.unwrap_or_else(|| (0..n).collect()),
        order: raw.order,
        flow: raw.flow.iter().map(|e| (e[0], e[1])).collect(),
    })?;
    let angles = raw.angles.unwrap_or_else(|| vec![Angle8::ZERO; n]);
    if angles.len() != n {
        return Err(Error::PatternMismatch(format!(
            "{} angles for {} vertices",
            angles.len(),
            n
        )));
    }
    if let Some(extra) = &raw.extra {
        if extra.len() != n {
            return Err(Error::InvalidAssignment(format!(
                "{} extra counts for {} vertices",
                extra.len(),
                n
            )));
        }
    }
    Ok(GraphDocument {
        graph,
        angles,
        emitters: raw.emitters,
        extra: raw.extra,
    })
}

pub fn load_graph_file(path: &Path) -> Result<GraphDocument> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_graph_document(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRID: &str = r#"
vertices = 4
edges = [[0, 1], [2, 3], [0, 2], [1, 3]]
inputs = [0, 2]
outputs = [1, 3]
order = [0, 2, 1, 3]
flow = [[0, 1], [2, 3]]
angles = [0, 1, 7, 0]
emitters = [[0, 1], [2, 3]]
"#;

    #[test]
    fn parses_grid() {
        let d = parse_graph_document(GRID).unwrap();
        assert_eq!(d.graph, Graph::grid(2, 2));
        assert_eq!(d.angles[2], Angle8::new(7));
        assert_eq!(d.emitters.unwrap().len(), 2);
    }

    #[test]
    fn defaults() {
        let d = parse_graph_document("vertices = 2\nedges = [[0, 1]]\n").unwrap();
        assert_eq!(d.graph.outputs(), &[0, 1]);
        assert_eq!(d.angles, vec![Angle8::ZERO; 2]);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(
            parse_graph_document("vertices = 2\ncolour = 3\n"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_graph_document("vertices = 2\nangles = [9, 0]\n"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_graph_document("vertices = 2\nangles = [0]\n"),
            Err(Error::PatternMismatch(_))
        ));
        assert!(matches!(
            parse_graph_document("vertices = 2\nedges = [[0, 5]]\n"),
            Err(Error::InvalidGraph(_))
        ));
    }
}
