//! `(R,ε)`-equivalence search between pointed disks, the truncated
//! ultrametric distance on classes, composition of equivalences, and
//! ε-tolerant colored subgraph embedding.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ball::{ball, PointedBall};
use crate::color::{color_distance, one_over, rational_to_string, DyadicDistance, Rational};
use crate::expander::{ExpandError, GraphSource};
use crate::graph::VertexKey;

#[derive(Debug, Error)]
pub enum EquivalenceError {
    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(String),
    #[error(transparent)]
    Ball(#[from] ExpandError),
    #[error("composition middle graphs disagree on the radius-{0} ball")]
    MismatchedMiddle(usize),
}

/// A witness `(R,ε)`-equivalence: a depth-preserving pointed isomorphism
/// between two radius-`R` disks moving every color by strictly less than ε.
/// The disks travel with the witness so it can be re-verified on its own.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct REquivalence {
    pub radius: usize,
    #[serde(with = "crate::io::rational_serde")]
    pub tolerance: Rational,
    pub domain: PointedBall,
    pub codomain: PointedBall,
    pub mapping: BTreeMap<VertexKey, VertexKey>,
}

/// First violation found when re-checking an [`REquivalence`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    WrongRadius { expected: usize, found: usize },
    NotABijection,
    UnknownVertex(VertexKey),
    BasepointNotMapped,
    DepthNotPreserved(VertexKey),
    EdgeNotPreserved(VertexKey, VertexKey),
    NonEdgeMapped(VertexKey, VertexKey),
    ColorBoundViolated(VertexKey),
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::WrongRadius { expected, found } => {
                write!(f, "ball radius {found} does not match declared radius {expected}")
            }
            Violation::NotABijection => write!(f, "mapping is not a bijection of the vertex sets"),
            Violation::UnknownVertex(v) => write!(f, "mapping touches unknown vertex {v:?}"),
            Violation::BasepointNotMapped => write!(f, "basepoint is not sent to basepoint"),
            Violation::DepthNotPreserved(v) => write!(f, "depth not preserved at {v:?}"),
            Violation::EdgeNotPreserved(a, b) => write!(f, "edge not preserved: {a:?}-{b:?}"),
            Violation::NonEdgeMapped(a, b) => write!(f, "non-edge mapped to edge: {a:?}-{b:?}"),
            Violation::ColorBoundViolated(v) => write!(f, "color bound violated at {v:?}"),
        }
    }
}

impl REquivalence {
    /// The inverse witness, swapping domain and codomain.
    pub fn inverse(&self) -> REquivalence {
        REquivalence {
            radius: self.radius,
            tolerance: self.tolerance.clone(),
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            mapping: self.mapping.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
        }
    }
}

/// Re-check every invariant of `h`, independently of how it was found.
/// Returns the first violation in a deterministic order, if any.
pub fn verify_equivalence(h: &REquivalence) -> Result<(), Violation> {
    let dom = &h.domain;
    let cod = &h.codomain;
    for (b, r) in [(dom, h.radius), (cod, h.radius)] {
        if b.radius != r {
            return Err(Violation::WrongRadius { expected: r, found: b.radius });
        }
    }
    // bijection between the vertex sets
    if h.mapping.len() != dom.graph.vertex_count() {
        return Err(Violation::NotABijection);
    }
    let image: BTreeSet<&VertexKey> = h.mapping.values().collect();
    if image.len() != cod.graph.vertex_count() {
        return Err(Violation::NotABijection);
    }
    for (u, v) in &h.mapping {
        if !dom.graph.has_vertex(u) {
            return Err(Violation::UnknownVertex(u.clone()));
        }
        if !cod.graph.has_vertex(v) {
            return Err(Violation::UnknownVertex(v.clone()));
        }
    }
    if h.mapping.get(dom.basepoint()) != Some(cod.basepoint()) {
        return Err(Violation::BasepointNotMapped);
    }
    for (u, v) in &h.mapping {
        if dom.depth[u] != cod.depth[v] {
            return Err(Violation::DepthNotPreserved(u.clone()));
        }
    }
    // edges preserved in both directions
    for (a, b) in dom.graph.edges() {
        if !cod.graph.has_edge(&h.mapping[a], &h.mapping[b]) {
            return Err(Violation::EdgeNotPreserved(a.clone(), b.clone()));
        }
    }
    let inverse: BTreeMap<&VertexKey, &VertexKey> =
        h.mapping.iter().map(|(a, b)| (b, a)).collect();
    for (a, b) in cod.graph.edges() {
        if !dom.graph.has_edge(inverse[a], inverse[b]) {
            return Err(Violation::NonEdgeMapped(inverse[a].clone(), inverse[b].clone()));
        }
    }
    // strict color bound
    for (u, v) in &h.mapping {
        let d = color_distance(dom.graph.color(u).unwrap(), cod.graph.color(v).unwrap());
        if d.to_rational() >= h.tolerance {
            return Err(Violation::ColorBoundViolated(u.clone()));
        }
    }
    Ok(())
}

/// Complete backtracking search for an `(R,ε)`-equivalence between two
/// pointed radius-`R` disks. Candidates are tried in (depth, degree, color,
/// key) order, so the first witness is deterministic.
pub fn find_equivalence_balls(
    a: &PointedBall,
    b: &PointedBall,
    tolerance: &Rational,
) -> Result<Option<REquivalence>, EquivalenceError> {
    if *tolerance <= Rational::from_integer(0.into()) {
        return Err(EquivalenceError::NonPositiveTolerance(rational_to_string(tolerance)));
    }
    if a.graph.vertex_count() != b.graph.vertex_count()
        || a.graph.edge_count() != b.graph.edge_count()
    {
        return Ok(None);
    }
    // fixed processing order over A: (depth, degree, color, key)
    let mut order: Vec<&VertexKey> = a.graph.vertices().collect();
    order.sort_by_key(|v| {
        (
            a.depth[*v],
            a.graph.degree(v).unwrap(),
            a.graph.color(v).unwrap().clone(),
            (*v).clone(),
        )
    });
    let mut mapping: BTreeMap<VertexKey, VertexKey> = BTreeMap::new();
    let mut used: BTreeSet<VertexKey> = BTreeSet::new();
    if !extend(a, b, tolerance, &order, 0, &mut mapping, &mut used) {
        return Ok(None);
    }
    Ok(Some(REquivalence {
        radius: a.radius,
        tolerance: tolerance.clone(),
        domain: a.clone(),
        codomain: b.clone(),
        mapping,
    }))
}

fn compatible(
    a: &PointedBall,
    b: &PointedBall,
    tolerance: &Rational,
    mapping: &BTreeMap<VertexKey, VertexKey>,
    u: &VertexKey,
    v: &VertexKey,
) -> bool {
    if a.depth[u] != b.depth[v] {
        return false;
    }
    if a.graph.degree(u).unwrap() != b.graph.degree(v).unwrap() {
        return false;
    }
    // basepoint must go to basepoint (depth 0 is a singleton, but be explicit)
    if (u == a.basepoint()) != (v == b.basepoint()) {
        return false;
    }
    let d = color_distance(a.graph.color(u).unwrap(), b.graph.color(v).unwrap());
    if d.to_rational() >= *tolerance {
        return false;
    }
    // consistency with already-placed vertices: adjacency in both directions
    for (pu, pv) in mapping {
        let adj_a = a.graph.has_edge(u, pu);
        let adj_b = b.graph.has_edge(v, pv);
        if adj_a != adj_b {
            return false;
        }
    }
    true
}

fn extend(
    a: &PointedBall,
    b: &PointedBall,
    tolerance: &Rational,
    order: &[&VertexKey],
    idx: usize,
    mapping: &mut BTreeMap<VertexKey, VertexKey>,
    used: &mut BTreeSet<VertexKey>,
) -> bool {
    if idx == order.len() {
        return true;
    }
    let u = order[idx];
    let mut candidates: Vec<&VertexKey> = b
        .graph
        .vertices()
        .filter(|v| !used.contains(*v))
        .collect();
    candidates.sort_by_key(|v| {
        (
            b.depth[*v],
            b.graph.degree(v).unwrap(),
            b.graph.color(v).unwrap().clone(),
            (*v).clone(),
        )
    });
    for v in candidates {
        if !compatible(a, b, tolerance, mapping, u, v) {
            continue;
        }
        mapping.insert(u.clone(), v.clone());
        used.insert(v.clone());
        if extend(a, b, tolerance, order, idx + 1, mapping, used) {
            return true;
        }
        mapping.remove(u);
        used.remove(v);
    }
    false
}

/// Extract radius-`R` disks around the two centers and search for an
/// `(R,ε)`-equivalence.
pub fn find_equivalence<SA: GraphSource, SB: GraphSource>(
    a: &SA,
    x: &str,
    b: &SB,
    y: &str,
    radius: usize,
    tolerance: &Rational,
) -> Result<Option<REquivalence>, EquivalenceError> {
    let da = ball(a, x, radius)?;
    let db = ball(b, y, radius)?;
    find_equivalence_balls(&da, &db, tolerance)
}

/// Composition per the min/max rule: an `(n,ε)`- and an `(m,δ)`-equivalence
/// through a common middle graph compose to a
/// `(min(n,m), max(ε,δ))`-equivalence.
pub fn compose(f: &REquivalence, g: &REquivalence) -> Result<REquivalence, EquivalenceError> {
    let r = f.radius.min(g.radius);
    let middle_from_f = f.codomain.restrict(r);
    let middle_from_g = g.domain.restrict(r);
    if middle_from_f != middle_from_g {
        return Err(EquivalenceError::MismatchedMiddle(r));
    }
    let domain = f.domain.restrict(r);
    let codomain = g.codomain.restrict(r);
    let mapping: BTreeMap<VertexKey, VertexKey> = domain
        .graph
        .vertices()
        .map(|u| (u.clone(), g.mapping[&f.mapping[u]].clone()))
        .collect();
    let tolerance = f.tolerance.clone().max(g.tolerance.clone());
    Ok(REquivalence { radius: r, tolerance, domain, codomain, mapping })
}

/// Truncated ultrametric distance between two pointed classes: the result
/// of scanning `(n, 1/n)`-equivalences for `n = 1..=N`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruncatedDistance {
    /// Not even `(1,1)`-equivalent; the diameter cap.
    One,
    /// Exactly `2^-n`: `(n,1/n)` holds and `(n+1,1/(n+1))` fails.
    Exact(DyadicDistance),
    /// Equivalence persists to the truncation depth `N`; the true distance
    /// is at most `2^-N`, possibly 0. Finite data cannot tell.
    AtMost(DyadicDistance),
}

/// Scan `n = 1..=N` for `(n,1/n)`-equivalence between `(A,x)` and `(B,y)`.
pub fn distance_truncated<SA: GraphSource, SB: GraphSource>(
    a: &SA,
    x: &str,
    b: &SB,
    y: &str,
    max_depth: usize,
) -> Result<TruncatedDistance, EquivalenceError> {
    assert!(max_depth >= 1, "truncation depth must be at least 1");
    for n in 1..=max_depth {
        let found = find_equivalence(a, x, b, y, n, &one_over(n as u64))?;
        if found.is_none() {
            return Ok(if n == 1 {
                TruncatedDistance::One
            } else {
                TruncatedDistance::Exact(DyadicDistance::PowNeg(n as u32 - 1))
            });
        }
    }
    Ok(TruncatedDistance::AtMost(DyadicDistance::PowNeg(max_depth as u32)))
}

/// Color matching mode for subgraph embedding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColorTolerance {
    /// Colors must be equal points.
    Exact,
    /// Strict bound: `d(pattern color, host color) < ε`.
    Within(Rational),
}

impl ColorTolerance {
    fn admits(&self, d: DyadicDistance) -> bool {
        match self {
            ColorTolerance::Exact => d.is_zero(),
            ColorTolerance::Within(eps) => d.to_rational() < *eps,
        }
    }
}

/// Search for an injective map of `pattern` into `host` preserving the
/// pattern's edges and the color bound. With `induced`, pattern non-edges
/// must also be absent between the mapped images.
pub fn embed_colored_subgraph(
    pattern: &crate::graph::FiniteColoredGraph,
    host: &crate::graph::FiniteColoredGraph,
    tolerance: &ColorTolerance,
    induced: bool,
) -> Option<BTreeMap<VertexKey, VertexKey>> {
    if pattern.vertex_count() > host.vertex_count() {
        return None;
    }
    // process pattern vertices so each (after the first) touches a placed one
    let mut order: Vec<VertexKey> = Vec::new();
    let mut remaining: BTreeSet<VertexKey> = pattern.vertices().cloned().collect();
    while let Some(next) = {
        order
            .iter()
            .flat_map(|p| pattern.neighbors(p).unwrap())
            .find(|n| remaining.contains(*n))
            .cloned()
            .or_else(|| remaining.iter().next().cloned())
    } {
        remaining.remove(&next);
        order.push(next);
        if remaining.is_empty() {
            break;
        }
    }
    let mut mapping = BTreeMap::new();
    let mut used = BTreeSet::new();
    if embed_extend(pattern, host, tolerance, induced, &order, 0, &mut mapping, &mut used) {
        Some(mapping)
    } else {
        None
    }
}

#[allow(clippy::too_many_arguments)]
fn embed_extend(
    pattern: &crate::graph::FiniteColoredGraph,
    host: &crate::graph::FiniteColoredGraph,
    tolerance: &ColorTolerance,
    induced: bool,
    order: &[VertexKey],
    idx: usize,
    mapping: &mut BTreeMap<VertexKey, VertexKey>,
    used: &mut BTreeSet<VertexKey>,
) -> bool {
    if idx == order.len() {
        return true;
    }
    let u = &order[idx];
    let pu_color = pattern.color(u).unwrap();
    for v in host.vertices() {
        if used.contains(v) {
            continue;
        }
        if !tolerance.admits(color_distance(pu_color, host.color(v).unwrap())) {
            continue;
        }
        let ok = mapping.iter().all(|(pu, pv)| {
            let adj_p = pattern.has_edge(u, pu);
            let adj_h = host.has_edge(v, pv);
            if induced {
                adj_p == adj_h
            } else {
                !adj_p || adj_h
            }
        });
        if !ok {
            continue;
        }
        mapping.insert(u.clone(), v.clone());
        used.insert(v.clone());
        if embed_extend(pattern, host, tolerance, induced, order, idx + 1, mapping, used) {
            return true;
        }
        mapping.remove(u);
        used.remove(v);
    }
    false
}
