//! Lazy representations of possibly-infinite colored graphs, and the
//! periodic (fundamental-domain) expanders used by the spine constructions.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::Color;
use crate::graph::{FiniteColoredGraph, VertexKey};

#[derive(Debug, Error)]
pub enum ExpandError {
    #[error("unknown vertex key {0:?}")]
    UnknownVertex(VertexKey),
    #[error("depth budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("{0}")]
    Invalid(String),
}

/// Declared supremum of vertex degrees.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum DegreeBound {
    Finite(usize),
    Unbounded,
}

impl fmt::Display for DegreeBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegreeBound::Finite(d) => write!(f, "{d}"),
            DegreeBound::Unbounded => write!(f, "unbounded"),
        }
    }
}

/// Result of expanding one vertex.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Expansion {
    /// Sorted by key.
    pub neighbors: Vec<VertexKey>,
    pub color: Color,
}

/// A deterministic lazy colored graph: vertex key to neighbors and color.
/// Implementations must be pure; repeated calls agree.
pub trait Expander {
    fn root(&self) -> VertexKey;
    fn expand(&self, key: &str) -> Result<Expansion, ExpandError>;
    fn degree_sup(&self) -> DegreeBound;
    fn is_infinite(&self) -> bool {
        true
    }
}

impl<T: Expander + ?Sized> Expander for &T {
    fn root(&self) -> VertexKey {
        (**self).root()
    }
    fn expand(&self, key: &str) -> Result<Expansion, ExpandError> {
        (**self).expand(key)
    }
    fn degree_sup(&self) -> DegreeBound {
        (**self).degree_sup()
    }
    fn is_infinite(&self) -> bool {
        (**self).is_infinite()
    }
}

impl Expander for Box<dyn Expander> {
    fn root(&self) -> VertexKey {
        (**self).root()
    }
    fn expand(&self, key: &str) -> Result<Expansion, ExpandError> {
        (**self).expand(key)
    }
    fn degree_sup(&self) -> DegreeBound {
        (**self).degree_sup()
    }
    fn is_infinite(&self) -> bool {
        (**self).is_infinite()
    }
}

/// Replace the declared degree bound of a source. Needed when an expander
/// only declares the unbounded marker but an operation requires a finite
/// value of deg X.
pub struct DegreeOverride<E> {
    pub inner: E,
    pub bound: usize,
}

impl<E: Expander> Expander for DegreeOverride<E> {
    fn root(&self) -> VertexKey {
        self.inner.root()
    }
    fn expand(&self, key: &str) -> Result<Expansion, ExpandError> {
        self.inner.expand(key)
    }
    fn degree_sup(&self) -> DegreeBound {
        DegreeBound::Finite(self.bound)
    }
    fn is_infinite(&self) -> bool {
        self.inner.is_infinite()
    }
}

/// Anything balls can be extracted from: a finite colored graph or a lazy
/// expander. The two cases share the neighbor/color interface.
pub trait GraphSource {
    fn neighbors_of(&self, key: &str) -> Result<Vec<VertexKey>, ExpandError>;
    fn color_of(&self, key: &str) -> Result<Color, ExpandError>;
}

impl GraphSource for FiniteColoredGraph {
    fn neighbors_of(&self, key: &str) -> Result<Vec<VertexKey>, ExpandError> {
        self.neighbors(key)
            .map(|n| n.to_vec())
            .map_err(|_| ExpandError::UnknownVertex(key.to_string()))
    }
    fn color_of(&self, key: &str) -> Result<Color, ExpandError> {
        self.color(key)
            .cloned()
            .map_err(|_| ExpandError::UnknownVertex(key.to_string()))
    }
}

/// Adapter so every `Expander` is a `GraphSource`.
pub struct Lazy<E>(pub E);

impl<E: Expander> GraphSource for Lazy<E> {
    fn neighbors_of(&self, key: &str) -> Result<Vec<VertexKey>, ExpandError> {
        self.0.expand(key).map(|e| e.neighbors)
    }
    fn color_of(&self, key: &str) -> Result<Color, ExpandError> {
        self.0.expand(key).map(|e| e.color)
    }
}

/// ℤ (or ℕ) as a line graph with a coloring function. Keys are decimal
/// integers; the root is `0`.
pub struct IntLine<F: Fn(i64) -> Color> {
    color: F,
    half_line: bool,
}

impl<F: Fn(i64) -> Color> IntLine<F> {
    pub fn full(color: F) -> Self {
        IntLine { color, half_line: false }
    }

    /// The half-line ℕ = {0, 1, 2, ...}.
    pub fn half(color: F) -> Self {
        IntLine { color, half_line: true }
    }
}

pub(crate) fn parse_int_key(key: &str) -> Result<i64, ExpandError> {
    key.parse()
        .map_err(|_| ExpandError::UnknownVertex(key.to_string()))
}

impl<F: Fn(i64) -> Color> Expander for IntLine<F> {
    fn root(&self) -> VertexKey {
        "0".into()
    }

    fn expand(&self, key: &str) -> Result<Expansion, ExpandError> {
        let z = parse_int_key(key)?;
        if self.half_line && z < 0 {
            return Err(ExpandError::UnknownVertex(key.to_string()));
        }
        let mut neighbors: Vec<VertexKey> = Vec::with_capacity(2);
        if !(self.half_line && z == 0) {
            neighbors.push((z - 1).to_string());
        }
        neighbors.push((z + 1).to_string());
        neighbors.sort();
        Ok(Expansion { neighbors, color: (self.color)(z) })
    }

    fn degree_sup(&self) -> DegreeBound {
        DegreeBound::Finite(2)
    }
}

/// How copy `z` of the fundamental domain meets spine vertex `z`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Gluing {
    /// Spine vertices are extra vertices carrying `spine_color`; an edge
    /// joins spine vertex `z` to the `attachment` vertex of copy `z`.
    Attach { attachment: VertexKey, spine_color: Color },
    /// The `fused` vertex of copy `z` *is* spine position `z`.
    Identify { fused: VertexKey },
}

/// A ℤ-periodic colored graph: one fundamental domain per integer, glued
/// along a spine. Shifting the copy index by 1 is a colored isomorphism.
///
/// Global keys: `s:{z}` for spine position `z`, `c:{z}:{local}` for the
/// non-spine vertices of copy `z`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PeriodicExpander {
    fundamental_domain: FiniteColoredGraph,
    gluing: Gluing,
    basepoint: VertexKey,
    degree_sup: usize,
}

#[derive(Debug, PartialEq, Eq)]
enum PeriodicKey<'a> {
    Spine(i64),
    Copy(i64, &'a str),
}

fn parse_periodic_key(key: &str) -> Result<PeriodicKey<'_>, ExpandError> {
    let bad = || ExpandError::UnknownVertex(key.to_string());
    if let Some(z) = key.strip_prefix("s:") {
        return Ok(PeriodicKey::Spine(z.parse().map_err(|_| bad())?));
    }
    if let Some(rest) = key.strip_prefix("c:") {
        let (z, local) = rest.split_once(':').ok_or_else(bad)?;
        return Ok(PeriodicKey::Copy(z.parse().map_err(|_| bad())?, local));
    }
    Err(bad())
}

impl PeriodicExpander {
    pub fn new(
        fundamental_domain: FiniteColoredGraph,
        gluing: Gluing,
        basepoint: VertexKey,
    ) -> Result<Self, ExpandError> {
        let local = match &gluing {
            Gluing::Attach { attachment, .. } => attachment,
            Gluing::Identify { fused } => fused,
        };
        if !fundamental_domain.has_vertex(local) {
            return Err(ExpandError::UnknownVertex(local.clone()));
        }
        let degree_sup = {
            let mut sup = 0usize;
            for v in fundamental_domain.vertices() {
                let d = fundamental_domain.degree(v).unwrap();
                let d = match &gluing {
                    Gluing::Attach { attachment, .. } if v == attachment => d + 1,
                    Gluing::Identify { fused } if v == fused => d + 2,
                    _ => d,
                };
                sup = sup.max(d);
            }
            if matches!(gluing, Gluing::Attach { .. }) {
                sup = sup.max(3); // spine vertex: two spine neighbors + attachment
            }
            sup
        };
        let e = PeriodicExpander { fundamental_domain, gluing, basepoint, degree_sup };
        // basepoint must be a real global key
        e.expand(&e.basepoint.clone())?;
        Ok(e)
    }

    pub fn fundamental_domain(&self) -> &FiniteColoredGraph {
        &self.fundamental_domain
    }

    pub fn gluing(&self) -> &Gluing {
        &self.gluing
    }

    /// Global key of `local` within copy `z`.
    pub fn copy_key(&self, z: i64, local: &str) -> VertexKey {
        match &self.gluing {
            Gluing::Identify { fused } if local == fused => format!("s:{z}"),
            _ => format!("c:{z}:{local}"),
        }
    }

    /// The shift-by-`s` self-map on global keys.
    pub fn shift_key(&self, key: &str, s: i64) -> Result<VertexKey, ExpandError> {
        Ok(match parse_periodic_key(key)? {
            PeriodicKey::Spine(z) => format!("s:{}", z + s),
            PeriodicKey::Copy(z, local) => format!("c:{}:{local}", z + s),
        })
    }
}

impl Expander for PeriodicExpander {
    fn root(&self) -> VertexKey {
        self.basepoint.clone()
    }

    fn expand(&self, key: &str) -> Result<Expansion, ExpandError> {
        let fd = &self.fundamental_domain;
        let local_err = |v: &str| ExpandError::UnknownVertex(format!("{key} (local {v:?})"));
        let (neighbors, color) = match (parse_periodic_key(key)?, &self.gluing) {
            (PeriodicKey::Spine(z), Gluing::Attach { attachment, spine_color }) => {
                let mut n = vec![
                    format!("s:{}", z - 1),
                    format!("s:{}", z + 1),
                    self.copy_key(z, attachment),
                ];
                n.sort();
                (n, spine_color.clone())
            }
            (PeriodicKey::Spine(z), Gluing::Identify { fused }) => {
                let mut n = vec![format!("s:{}", z - 1), format!("s:{}", z + 1)];
                for nb in fd.neighbors(fused).map_err(|_| local_err(fused))? {
                    n.push(self.copy_key(z, nb));
                }
                n.sort();
                (n, fd.color(fused).unwrap().clone())
            }
            (PeriodicKey::Copy(z, local), gluing) => {
                match gluing {
                    Gluing::Identify { fused } if local == fused => {
                        // the fused vertex only exists under its spine key
                        return Err(ExpandError::UnknownVertex(key.to_string()));
                    }
                    _ => {}
                }
                let mut n: Vec<VertexKey> = fd
                    .neighbors(local)
                    .map_err(|_| local_err(local))?
                    .iter()
                    .map(|nb| self.copy_key(z, nb))
                    .collect();
                if let Gluing::Attach { attachment, .. } = gluing {
                    if local == attachment {
                        n.push(format!("s:{z}"));
                    }
                }
                n.sort();
                (n, fd.color(local).map_err(|_| local_err(local))?.clone())
            }
        };
        Ok(Expansion { neighbors, color })
    }

    fn degree_sup(&self) -> DegreeBound {
        DegreeBound::Finite(self.degree_sup)
    }
}
