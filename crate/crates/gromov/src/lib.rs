//! Exact computation in the space of pointed colored graphs.
//!
//! Colors are points of a Cantor space with an exact dyadic ultrametric;
//! graphs may be finite or lazily expanded infinite objects. On top of the
//! data model the crate provides `(R,ε)`-equivalence search between pointed
//! disks, the resulting ultrametric distance on isomorphism classes,
//! automorphism and canonical-form machinery, the spine-based periodic
//! constructions, and finite, re-verifiable certificates for aperiodicity
//! and (almost) chaotic behavior.

pub mod ball;
pub mod chaos;
pub mod color;
pub mod constructions;
pub mod equivalence;
pub mod expander;
pub mod graph;
pub mod io;
pub mod symmetry;

pub use ball::{ball, graph_distance, sphere, PointedBall};
pub use chaos::{AlmostChaoticCertificate, AperiodicityCertificate, ChaosVerdict};
pub use color::{color_distance, Color, DyadicDistance, Rational};
pub use equivalence::{distance_truncated, verify_equivalence, REquivalence, TruncatedDistance};
pub use expander::{DegreeBound, DegreeOverride, Expander, GraphSource, Lazy, PeriodicExpander};
pub use graph::{FiniteColoredGraph, GraphError, VertexKey};
