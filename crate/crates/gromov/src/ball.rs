//! Metric-ball extraction by breadth-first search.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::expander::{ExpandError, GraphSource};
use crate::graph::{FiniteColoredGraph, VertexKey};

/// The disk `D(x,r)` with the induced graph structure, its basepoint, and
/// the distance of each vertex from the basepoint.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PointedBall {
    pub graph: FiniteColoredGraph,
    pub radius: usize,
    pub depth: BTreeMap<VertexKey, usize>,
}

impl PointedBall {
    pub fn basepoint(&self) -> &VertexKey {
        self.graph.basepoint().expect("pointed ball always has a basepoint")
    }

    /// Vertices at depth exactly `r`.
    pub fn sphere(&self, r: usize) -> BTreeSet<VertexKey> {
        self.depth
            .iter()
            .filter(|(_, d)| **d == r)
            .map(|(v, _)| v.clone())
            .collect()
    }

    /// The sub-ball of radius `r <= radius` around the same basepoint.
    /// Filters by the recorded ambient depths; re-running BFS inside the
    /// induced subgraph could lose vertices whose shortest ambient path
    /// leaves the ball.
    pub fn restrict(&self, r: usize) -> PointedBall {
        let keep: BTreeSet<VertexKey> = self
            .depth
            .iter()
            .filter(|(_, d)| **d <= r)
            .map(|(v, _)| v.clone())
            .collect();
        let graph = self.graph.induced(&keep).expect("restriction keeps known vertices");
        let depth = self
            .depth
            .iter()
            .filter(|(_, d)| **d <= r)
            .map(|(v, d)| (v.clone(), *d))
            .collect();
        PointedBall { graph, radius: r.min(self.radius), depth }
    }
}

/// Shortest-path distance by BFS. `horizon`, when given, bounds the search;
/// `None` in the result means the distance exceeds it.
pub fn graph_distance<S: GraphSource>(
    source: &S,
    from: &str,
    to: &str,
    horizon: Option<usize>,
) -> Result<Option<usize>, ExpandError> {
    // validate both endpoints up front
    source.color_of(from)?;
    source.color_of(to)?;
    if from == to {
        return Ok(Some(0));
    }
    let mut dist: BTreeMap<VertexKey, usize> = BTreeMap::from([(from.to_string(), 0)]);
    let mut queue = VecDeque::from([from.to_string()]);
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        if let Some(h) = horizon {
            if d >= h {
                continue;
            }
        }
        for n in source.neighbors_of(&v)? {
            if n == to {
                return Ok(Some(d + 1));
            }
            if !dist.contains_key(&n) {
                dist.insert(n.clone(), d + 1);
                queue.push_back(n);
            }
        }
    }
    Ok(None)
}

/// Extract `D(center, r)` as a pointed finite colored graph.
pub fn ball<S: GraphSource>(
    source: &S,
    center: &str,
    r: usize,
) -> Result<PointedBall, ExpandError> {
    source.color_of(center)?;
    let mut depth: BTreeMap<VertexKey, usize> = BTreeMap::from([(center.to_string(), 0)]);
    let mut queue = VecDeque::from([center.to_string()]);
    while let Some(v) = queue.pop_front() {
        let d = depth[&v];
        if d >= r {
            continue;
        }
        for n in source.neighbors_of(&v)? {
            if !depth.contains_key(&n) {
                depth.insert(n.clone(), d + 1);
                queue.push_back(n);
            }
        }
    }
    let mut edges: BTreeSet<(VertexKey, VertexKey)> = BTreeSet::new();
    let mut coloring = Vec::with_capacity(depth.len());
    for v in depth.keys() {
        coloring.push((v.clone(), source.color_of(v)?));
        for n in source.neighbors_of(v)? {
            if depth.contains_key(&n) {
                let e = if *v < n { (v.clone(), n) } else { (n, v.clone()) };
                edges.insert(e);
            }
        }
    }
    let graph = FiniteColoredGraph::new(
        depth.keys().cloned(),
        edges,
        coloring,
        Some(center.to_string()),
    )
    .expect("BFS ball is always a valid graph");
    Ok(PointedBall { graph, radius: r, depth })
}

/// The sphere `S(center, r)`: vertices at distance exactly `r`.
pub fn sphere<S: GraphSource>(
    source: &S,
    center: &str,
    r: usize,
) -> Result<BTreeSet<VertexKey>, ExpandError> {
    Ok(ball(source, center, r)?.sphere(r))
}

/// Vertices of the source in BFS order from `start`, annotated with their
/// distance, out to distance `max_dist`. Deterministic: ties broken by key.
pub fn bfs_order<S: GraphSource>(
    source: &S,
    start: &str,
    max_dist: usize,
) -> Result<Vec<(VertexKey, usize)>, ExpandError> {
    let b = ball(source, start, max_dist)?;
    let mut out: Vec<(VertexKey, usize)> = b.depth.into_iter().collect();
    out.sort_by(|(ka, da), (kb, db)| da.cmp(db).then_with(|| ka.cmp(kb)));
    Ok(out)
}
