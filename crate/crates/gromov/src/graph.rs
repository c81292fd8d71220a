//! Finite simple graphs with per-vertex colors and an optional basepoint.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::Color;

/// Vertex keys are opaque printable strings; ordering is lexicographic and
/// used everywhere determinism matters.
pub type VertexKey = String;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("loop edge at vertex {0:?}")]
    LoopEdge(VertexKey),
    #[error("edge endpoint {0:?} is not a vertex")]
    DanglingEndpoint(VertexKey),
    #[error("vertex {0:?} has no color")]
    MissingColor(VertexKey),
    #[error("basepoint {0:?} is not a vertex")]
    BadBasepoint(VertexKey),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(VertexKey),
    #[error("graph has no basepoint")]
    NoBasepoint,
}

/// A finite simple graph with a total coloring and optional basepoint.
/// Immutable after construction.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "raw::RawGraph", into = "raw::RawGraph")]
pub struct FiniteColoredGraph {
    vertices: BTreeSet<VertexKey>,
    edges: BTreeSet<(VertexKey, VertexKey)>,
    coloring: BTreeMap<VertexKey, Color>,
    basepoint: Option<VertexKey>,
    adjacency: BTreeMap<VertexKey, Vec<VertexKey>>,
    connected: bool,
}

impl FiniteColoredGraph {
    pub fn new(
        vertices: impl IntoIterator<Item = VertexKey>,
        edges: impl IntoIterator<Item = (VertexKey, VertexKey)>,
        coloring: impl IntoIterator<Item = (VertexKey, Color)>,
        basepoint: Option<VertexKey>,
    ) -> Result<Self, GraphError> {
        let vertices: BTreeSet<VertexKey> = vertices.into_iter().collect();
        let coloring: BTreeMap<VertexKey, Color> = coloring.into_iter().collect();
        let mut normalized = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::LoopEdge(a));
            }
            for end in [&a, &b] {
                if !vertices.contains(end.as_str()) {
                    return Err(GraphError::DanglingEndpoint(end.clone()));
                }
            }
            let e = if a < b { (a, b) } else { (b, a) };
            normalized.insert(e);
        }
        for v in &vertices {
            if !coloring.contains_key(v) {
                return Err(GraphError::MissingColor(v.clone()));
            }
        }
        if let Some(b) = &basepoint {
            if !vertices.contains(b) {
                return Err(GraphError::BadBasepoint(b.clone()));
            }
        }
        let mut adjacency: BTreeMap<VertexKey, Vec<VertexKey>> =
            vertices.iter().map(|v| (v.clone(), Vec::new())).collect();
        for (a, b) in &normalized {
            adjacency.get_mut(a).unwrap().push(b.clone());
            adjacency.get_mut(b).unwrap().push(a.clone());
        }
        for nbrs in adjacency.values_mut() {
            nbrs.sort();
        }
        let connected = is_connected(&vertices, &adjacency);
        Ok(FiniteColoredGraph {
            vertices,
            edges: normalized,
            coloring,
            basepoint,
            adjacency,
            connected,
        })
    }

    /// Convenience constructor taking `&str` everywhere.
    pub fn build<'a>(
        vertices: impl IntoIterator<Item = &'a str>,
        edges: impl IntoIterator<Item = (&'a str, &'a str)>,
        coloring: impl IntoIterator<Item = (&'a str, Color)>,
        basepoint: Option<&'a str>,
    ) -> Result<Self, GraphError> {
        Self::new(
            vertices.into_iter().map(|v| v.to_string()),
            edges.into_iter().map(|(a, b)| (a.to_string(), b.to_string())),
            coloring.into_iter().map(|(v, c)| (v.to_string(), c)),
            basepoint.map(|b| b.to_string()),
        )
    }

    pub fn vertices(&self) -> impl Iterator<Item = &VertexKey> {
        self.vertices.iter()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = &(VertexKey, VertexKey)> {
        self.edges.iter()
    }

    pub fn has_vertex(&self, v: &str) -> bool {
        self.vertices.contains(v)
    }

    pub fn has_edge(&self, a: &str, b: &str) -> bool {
        let e = if a < b { (a.to_string(), b.to_string()) } else { (b.to_string(), a.to_string()) };
        self.edges.contains(&e)
    }

    pub fn neighbors(&self, v: &str) -> Result<&[VertexKey], GraphError> {
        self.adjacency
            .get(v)
            .map(|n| n.as_slice())
            .ok_or_else(|| GraphError::UnknownVertex(v.to_string()))
    }

    pub fn degree(&self, v: &str) -> Result<usize, GraphError> {
        Ok(self.neighbors(v)?.len())
    }

    pub fn color(&self, v: &str) -> Result<&Color, GraphError> {
        self.coloring
            .get(v)
            .ok_or_else(|| GraphError::UnknownVertex(v.to_string()))
    }

    pub fn coloring(&self) -> &BTreeMap<VertexKey, Color> {
        &self.coloring
    }

    pub fn basepoint(&self) -> Option<&VertexKey> {
        self.basepoint.as_ref()
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.values().map(|n| n.len()).max().unwrap_or(0)
    }

    /// Same graph with a different basepoint.
    pub fn with_basepoint(&self, b: Option<&str>) -> Result<Self, GraphError> {
        if let Some(b) = b {
            if !self.vertices.contains(b) {
                return Err(GraphError::BadBasepoint(b.to_string()));
            }
        }
        let mut g = self.clone();
        g.basepoint = b.map(|s| s.to_string());
        Ok(g)
    }

    /// Same graph with every color replaced from `coloring`.
    pub fn with_coloring(
        &self,
        coloring: impl IntoIterator<Item = (VertexKey, Color)>,
    ) -> Result<Self, GraphError> {
        Self::new(
            self.vertices.iter().cloned(),
            self.edges.iter().cloned(),
            coloring,
            self.basepoint.clone(),
        )
    }

    /// Induced subgraph on `keep`; the basepoint survives only if kept.
    pub fn induced(&self, keep: &BTreeSet<VertexKey>) -> Result<Self, GraphError> {
        for v in keep {
            if !self.vertices.contains(v) {
                return Err(GraphError::UnknownVertex(v.clone()));
            }
        }
        Self::new(
            keep.iter().cloned(),
            self.edges
                .iter()
                .filter(|(a, b)| keep.contains(a) && keep.contains(b))
                .cloned(),
            keep.iter().map(|v| (v.clone(), self.coloring[v].clone())),
            self.basepoint.clone().filter(|b| keep.contains(b)),
        )
    }

    /// Apply `f` to every vertex key; `f` must be injective on the vertex set.
    pub fn relabel(&self, mut f: impl FnMut(&str) -> String) -> Result<Self, GraphError> {
        let vertices: Vec<VertexKey> = self.vertices.iter().map(|v| f(v)).collect();
        let edges: Vec<(VertexKey, VertexKey)> =
            self.edges.iter().map(|(a, b)| (f(a), f(b))).collect();
        let coloring: Vec<(VertexKey, Color)> =
            self.coloring.iter().map(|(v, c)| (f(v), c.clone())).collect();
        let basepoint = self.basepoint.as_ref().map(|b| f(b));
        Self::new(vertices, edges, coloring, basepoint)
    }
}

fn is_connected(
    vertices: &BTreeSet<VertexKey>,
    adjacency: &BTreeMap<VertexKey, Vec<VertexKey>>,
) -> bool {
    let Some(start) = vertices.iter().next() else {
        return true;
    };
    let mut seen: BTreeSet<&VertexKey> = BTreeSet::new();
    let mut queue = VecDeque::from([start]);
    seen.insert(start);
    while let Some(v) = queue.pop_front() {
        for n in &adjacency[v] {
            if seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    seen.len() == vertices.len()
}

mod raw {
    //! JSON wire format:
    //! `{"vertices":[{"id":..,"color":"bits"}],"edges":[[a,b]],"basepoint":..}`

    use super::*;

    #[derive(Serialize, Deserialize)]
    pub struct RawVertex {
        pub id: VertexKey,
        pub color: Color,
    }

    #[derive(Serialize, Deserialize)]
    pub struct RawGraph {
        pub vertices: Vec<RawVertex>,
        pub edges: Vec<(VertexKey, VertexKey)>,
        #[serde(skip_serializing_if = "Option::is_none")]
        pub basepoint: Option<VertexKey>,
    }

    impl TryFrom<RawGraph> for FiniteColoredGraph {
        type Error = GraphError;

        fn try_from(raw: RawGraph) -> Result<Self, GraphError> {
            let ids: Vec<VertexKey> = raw.vertices.iter().map(|v| v.id.clone()).collect();
            FiniteColoredGraph::new(
                ids,
                raw.edges,
                raw.vertices.into_iter().map(|v| (v.id, v.color)),
                raw.basepoint,
            )
        }
    }

    impl From<FiniteColoredGraph> for RawGraph {
        fn from(g: FiniteColoredGraph) -> RawGraph {
            RawGraph {
                vertices: g
                    .vertices
                    .iter()
                    .map(|v| RawVertex { id: v.clone(), color: g.coloring[v].clone() })
                    .collect(),
                edges: g.edges.iter().cloned().collect(),
                basepoint: g.basepoint.clone(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> Color {
        s.parse().unwrap()
    }

    #[test]
    fn smallest_edge() {
        let g = FiniteColoredGraph::build(
            ["a", "b"],
            [("a", "b")],
            [("a", c("1")), ("b", c("1"))],
            Some("a"),
        )
        .unwrap();
        assert!(g.is_connected());
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.basepoint().unwrap(), "a");
    }

    #[test]
    fn loop_edge_rejected() {
        let err = FiniteColoredGraph::build(["a"], [("a", "a")], [("a", c(""))], None).unwrap_err();
        assert_eq!(err, GraphError::LoopEdge("a".into()));
    }

    #[test]
    fn path_three_vertices() {
        let g = FiniteColoredGraph::build(
            ["a", "b", "c"],
            [("a", "b"), ("b", "c")],
            [("a", c("")), ("b", c("1")), ("c", c(""))],
            None,
        )
        .unwrap();
        assert!(g.is_connected());
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.degree("b").unwrap(), 2);
    }

    #[test]
    fn validation_errors() {
        assert_eq!(
            FiniteColoredGraph::build(["a"], [("a", "b")], [("a", c(""))], None).unwrap_err(),
            GraphError::DanglingEndpoint("b".into())
        );
        assert_eq!(
            FiniteColoredGraph::build(["a"], [], [], None).unwrap_err(),
            GraphError::MissingColor("a".into())
        );
        assert_eq!(
            FiniteColoredGraph::build(["a"], [], [("a", c(""))], Some("z")).unwrap_err(),
            GraphError::BadBasepoint("z".into())
        );
    }

    #[test]
    fn multi_edge_collapses() {
        let g = FiniteColoredGraph::build(
            ["a", "b"],
            [("a", "b"), ("b", "a")],
            [("a", c("")), ("b", c(""))],
            None,
        )
        .unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn disconnected_flag() {
        let g = FiniteColoredGraph::build(
            ["a", "b"],
            [],
            [("a", c("")), ("b", c(""))],
            None,
        )
        .unwrap();
        assert!(!g.is_connected());
    }

    #[test]
    fn json_roundtrip() {
        let g = FiniteColoredGraph::build(
            ["a", "b", "c"],
            [("a", "b"), ("b", "c")],
            [("a", c("")), ("b", c("1")), ("c", c("01"))],
            Some("b"),
        )
        .unwrap();
        let s = serde_json::to_string(&g).unwrap();
        let g2: FiniteColoredGraph = serde_json::from_str(&s).unwrap();
        assert_eq!(g, g2);
    }
}
