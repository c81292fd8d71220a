//! Serialization helpers: rationals on the wire, DOT export, and the
//! graph-spec documents consumed by the CLI.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::Color;
use crate::constructions::{
    build_h, build_k, build_z, champernowne_line, comb, section4_graph, universal_dense_graph,
    word_line, ConstructionError,
};
use crate::expander::{
    DegreeBound, DegreeOverride, ExpandError, Expander, GraphSource, IntLine, PeriodicExpander,
};
use crate::graph::{FiniteColoredGraph, VertexKey};

/// Serde adapter rendering rationals as `"p/q"` strings.
pub mod rational_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::color::{parse_rational, rational_to_string, Rational};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rational_to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Render a finite colored graph as DOT. Vertices appear in key order,
/// colors become labels, and the basepoint is drawn doubled.
pub fn export_dot(g: &FiniteColoredGraph) -> String {
    let mut out = String::from("graph {\n");
    for v in g.vertices() {
        let color = g.color(v).unwrap();
        let mut attrs = format!("label=\"{}|{}\"", dot_escape(v), color);
        if g.basepoint().map(|b| b == v).unwrap_or(false) {
            attrs.push_str(", peripheries=2");
        }
        out.push_str(&format!("  \"{}\" [{}];\n", dot_escape(v), attrs));
    }
    for (a, b) in g.edges() {
        out.push_str(&format!("  \"{}\" -- \"{}\";\n", dot_escape(a), dot_escape(b)));
    }
    out.push_str("}\n");
    out
}

/// A graph description the CLI can resolve: either an inline finite graph
/// or a named construction with parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphSpec {
    Inline(FiniteColoredGraph),
    Champernowne {
        order: ChampernowneOrder,
    },
    Comb,
    /// `build_K` applied to a named source.
    K {
        source: Box<GraphSpec>,
        n: usize,
        #[serde(default)]
        spine_color: crate::color::Color,
    },
    Dense {
        budget: usize,
    },
    Section4 {
        budget: usize,
    },
    H {
        n: usize,
        budget: usize,
    },
    Z {
        n: usize,
        budget: usize,
    },
    WordLine {
        alphabet: usize,
    },
    /// ℤ with a constant color.
    ConstLine {
        #[serde(default)]
        color: crate::color::Color,
    },
    /// ℕ with a constant color.
    HalfLine {
        #[serde(default)]
        color: crate::color::Color,
    },
}

pub use crate::constructions::ChampernowneOrder;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error("a finite graph cannot serve as the source of this construction")]
    FiniteSource,
}

/// A resolved graph spec, ready for ball extraction. The periodic case is
/// kept separate so callers can use the graph as its own shift witness.
pub enum ResolvedGraph {
    Finite(FiniteColoredGraph),
    Periodic(PeriodicExpander),
    Infinite(Box<dyn Expander>),
}

impl ResolvedGraph {
    /// The natural center: the basepoint of a finite graph, the root of an
    /// expander.
    pub fn center(&self) -> Option<VertexKey> {
        match self {
            ResolvedGraph::Finite(g) => g.basepoint().cloned(),
            ResolvedGraph::Periodic(p) => Some(p.root()),
            ResolvedGraph::Infinite(e) => Some(e.root()),
        }
    }

    pub fn as_expander(&self) -> Option<&dyn Expander> {
        match self {
            ResolvedGraph::Finite(_) => None,
            ResolvedGraph::Periodic(p) => Some(p),
            ResolvedGraph::Infinite(e) => Some(&**e),
        }
    }

    pub fn self_witness(&self) -> Option<&PeriodicExpander> {
        match self {
            ResolvedGraph::Periodic(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_finite(&self) -> Option<&FiniteColoredGraph> {
        match self {
            ResolvedGraph::Finite(g) => Some(g),
            _ => None,
        }
    }
}

impl GraphSource for ResolvedGraph {
    fn neighbors_of(&self, key: &str) -> Result<Vec<VertexKey>, ExpandError> {
        match self {
            ResolvedGraph::Finite(g) => g.neighbors_of(key),
            ResolvedGraph::Periodic(p) => p.expand(key).map(|e| e.neighbors),
            ResolvedGraph::Infinite(e) => e.expand(key).map(|x| x.neighbors),
        }
    }
    fn color_of(&self, key: &str) -> Result<Color, ExpandError> {
        match self {
            ResolvedGraph::Finite(g) => g.color_of(key),
            ResolvedGraph::Periodic(p) => p.expand(key).map(|e| e.color),
            ResolvedGraph::Infinite(e) => e.expand(key).map(|x| x.color),
        }
    }
}

fn k_of<E: Expander>(
    source: &E,
    n: usize,
    spine_color: Color,
    degree_bound: Option<usize>,
) -> Result<PeriodicExpander, ConstructionError> {
    let center = source.root();
    match (source.degree_sup(), degree_bound) {
        (DegreeBound::Unbounded, Some(bound)) => {
            build_k(&DegreeOverride { inner: source, bound }, &center, n, spine_color)
        }
        _ => build_k(source, &center, n, spine_color),
    }
}

impl GraphSpec {
    /// Instantiate the spec. `degree_bound` is the finite override used
    /// when a nested K-construction sits on an unbounded-degree source.
    pub fn resolve(&self, degree_bound: Option<usize>) -> Result<ResolvedGraph, SpecError> {
        Ok(match self {
            GraphSpec::Inline(g) => ResolvedGraph::Finite(g.clone()),
            GraphSpec::Champernowne { order } => {
                ResolvedGraph::Infinite(Box::new(champernowne_line(*order)))
            }
            GraphSpec::Comb => ResolvedGraph::Periodic(comb(Color::zeros())),
            GraphSpec::K { source, n, spine_color } => {
                let inner = source.resolve(degree_bound)?;
                let k = match &inner {
                    ResolvedGraph::Finite(_) => return Err(SpecError::FiniteSource),
                    ResolvedGraph::Periodic(p) => {
                        k_of(p, *n, spine_color.clone(), degree_bound)?
                    }
                    ResolvedGraph::Infinite(e) => {
                        k_of(&&**e, *n, spine_color.clone(), degree_bound)?
                    }
                };
                ResolvedGraph::Periodic(k)
            }
            GraphSpec::Dense { budget } => {
                ResolvedGraph::Infinite(Box::new(universal_dense_graph(*budget)))
            }
            GraphSpec::Section4 { budget } => {
                ResolvedGraph::Infinite(Box::new(section4_graph(*budget)))
            }
            GraphSpec::H { n, budget } => ResolvedGraph::Finite(build_h(*n, *budget)?),
            GraphSpec::Z { n, budget } => ResolvedGraph::Periodic(build_z(*n, *budget)?),
            GraphSpec::WordLine { alphabet } => {
                ResolvedGraph::Infinite(Box::new(word_line(*alphabet)?))
            }
            GraphSpec::ConstLine { color } => {
                let c = color.clone();
                ResolvedGraph::Infinite(Box::new(IntLine::full(move |_| c.clone())))
            }
            GraphSpec::HalfLine { color } => {
                let c = color.clone();
                ResolvedGraph::Infinite(Box::new(IntLine::half(move |_| c.clone())))
            }
        })
    }
}
