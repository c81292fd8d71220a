//! The graph constructions: Champernowne-style colorings of ℤ, the
//! word-concatenation generalization, the free-edge lift, the spine
//! K-construction, the aperiodic enumerator, the dense universal graphs,
//! and the injective color perturbation.

use std::collections::BTreeMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ball::{ball, PointedBall};
use crate::color::{Color, Rational};
use crate::expander::{
    DegreeBound, ExpandError, Expander, Expansion, Gluing, IntLine, Lazy,
    PeriodicExpander,
};
use crate::graph::{FiniteColoredGraph, GraphError, VertexKey};
use crate::symmetry::{canonical_form, is_aperiodic, CanonicalKey};

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("no sphere vertex with ball-degree below the degree bound")]
    NoEligibleVertex,
    #[error("source must declare a finite degree bound")]
    UnboundedDegree,
    #[error("source must be infinite")]
    NotInfinite,
    #[error("alphabet needs at least 2 colors, got {0}")]
    AlphabetTooSmall(usize),
    #[error("coloring is not binary: vertex {0:?} has color {1}")]
    NonBinaryColor(VertexKey, Color),
    #[error("tolerance must be positive")]
    NonPositiveTolerance,
    #[error("n must be at least 1")]
    ZeroNotAllowed,
    #[error(transparent)]
    Expand(#[from] ExpandError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

// ---------------------------------------------------------------------------
// Champernowne and word lines
// ---------------------------------------------------------------------------

/// Which enumeration of binary words backs the Champernowne sequence.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChampernowneOrder {
    /// The printed enumeration 0,1,00,01,11,000,...: "10" is missing from
    /// the length-2 words.
    Paper,
    /// All binary words by length, then lexicographically.
    Standard,
}

fn binary_words(order: ChampernowneOrder) -> impl Iterator<Item = Vec<u8>> {
    (1usize..).flat_map(move |len| {
        (0..1u64 << len)
            .map(move |x| {
                (0..len)
                    .rev()
                    .map(|i| ((x >> i) & 1) as u8)
                    .collect::<Vec<u8>>()
            })
            .filter(move |w| !(order == ChampernowneOrder::Paper && w == &[1, 0]))
    })
}

/// Bit `a_n` of the concatenated word sequence; positions start at 1.
/// `0` for `n <= 0` (the `n = 0` case is a convention, see
/// [`champernowne_color`]).
pub fn champernowne_bit(n: i64, order: ChampernowneOrder) -> u8 {
    if n <= 0 {
        return 0;
    }
    let mut pos = n as usize; // 1-based
    for w in binary_words(order) {
        if pos <= w.len() {
            return w[pos - 1];
        }
        pos -= w.len();
    }
    unreachable!("the word stream is infinite")
}

/// The Champernowne coloring of ℤ: zero on the non-positive integers
/// (including 0, extending the negative rule), `a_n` for `n >= 1`.
pub fn champernowne_color(n: i64, order: ChampernowneOrder) -> Color {
    if champernowne_bit(n, order) == 1 {
        Color::from_bits([1])
    } else {
        Color::zeros()
    }
}

/// ℤ as a 2-regular line carrying the Champernowne coloring.
pub fn champernowne_line(order: ChampernowneOrder) -> IntLine<impl Fn(i64) -> Color> {
    IntLine::full(move |z| champernowne_color(z, order))
}

/// The first `count` colors of the canonical dense subset, used as a word
/// alphabet.
pub fn word_alphabet(count: usize) -> Vec<Color> {
    (0..count).map(Color::nth_canonical).collect()
}

/// Enumerate all nonempty words over alphabet indices `0..count` in the
/// diagonal well-order: grouped by (length + maximum index), lexicographic
/// within a group.
fn diagonal_words(count: usize) -> impl Iterator<Item = Vec<usize>> {
    (1usize..).flat_map(move |s| {
        let mut group: Vec<Vec<usize>> = Vec::new();
        for len in 1..=s {
            let max_idx = s - len;
            if max_idx >= count {
                continue;
            }
            let base = max_idx + 1;
            for x in 0..base.pow(len as u32) {
                let mut w = Vec::with_capacity(len);
                let mut rest = x;
                for _ in 0..len {
                    w.push(rest % base);
                    rest /= base;
                }
                w.reverse();
                if w.iter().max() == Some(&max_idx) {
                    group.push(w);
                }
            }
        }
        group.sort();
        group.into_iter()
    })
}

/// The word index at position `n >= 1` of the concatenated diagonal stream.
fn word_symbol(n: usize, count: usize) -> usize {
    let mut pos = n;
    for w in diagonal_words(count) {
        if pos <= w.len() {
            return w[pos - 1];
        }
        pos -= w.len();
    }
    unreachable!("the word stream is infinite")
}

/// ℤ colored by concatenating all finite words over the first `count`
/// canonical colors; `c_0` on the non-positive integers.
pub fn word_line(count: usize) -> Result<IntLine<impl Fn(i64) -> Color>, ConstructionError> {
    if count < 2 {
        return Err(ConstructionError::AlphabetTooSmall(count));
    }
    let alphabet = word_alphabet(count);
    Ok(IntLine::full(move |z| {
        if z <= 0 {
            alphabet[0].clone()
        } else {
            alphabet[word_symbol(z as usize, count)].clone()
        }
    }))
}

// ---------------------------------------------------------------------------
// Free-edge lift
// ---------------------------------------------------------------------------

/// The uncolored lift of a {0,1}-colored line: a pendant vertex is hung on
/// every 1-colored spine vertex and all colors become the zero point.
/// Spine keys are `sp:{key}`, pendants `pd:{key}`.
pub struct FreeEdgeLift<E: Expander> {
    inner: E,
}

/// Lift a binary-colored graph to an uncolored one by attaching a free
/// edge at each 1-colored vertex.
pub fn free_edge_lift<E: Expander>(inner: E) -> FreeEdgeLift<E> {
    FreeEdgeLift { inner }
}

impl<E: Expander> FreeEdgeLift<E> {
    fn inner_bit(&self, key: &str) -> Result<bool, ExpandError> {
        let color = self.inner.expand(key)?.color;
        if color.is_zeros() {
            Ok(false)
        } else if color == Color::from_bits([1]) {
            Ok(true)
        } else {
            Err(ExpandError::Invalid(format!(
                "free-edge lift needs a binary coloring, vertex {key:?} has color {color}"
            )))
        }
    }
}

impl<E: Expander> Expander for FreeEdgeLift<E> {
    fn root(&self) -> VertexKey {
        format!("sp:{}", self.inner.root())
    }

    fn expand(&self, key: &str) -> Result<Expansion, ExpandError> {
        if let Some(k) = key.strip_prefix("sp:") {
            let exp = self.inner.expand(k)?;
            let mut neighbors: Vec<VertexKey> =
                exp.neighbors.iter().map(|n| format!("sp:{n}")).collect();
            if self.inner_bit(k)? {
                neighbors.push(format!("pd:{k}"));
            }
            neighbors.sort();
            return Ok(Expansion { neighbors, color: Color::zeros() });
        }
        if let Some(k) = key.strip_prefix("pd:") {
            if !self.inner_bit(k)? {
                return Err(ExpandError::UnknownVertex(key.to_string()));
            }
            return Ok(Expansion { neighbors: vec![format!("sp:{k}")], color: Color::zeros() });
        }
        Err(ExpandError::UnknownVertex(key.to_string()))
    }

    fn degree_sup(&self) -> DegreeBound {
        match self.inner.degree_sup() {
            DegreeBound::Finite(d) => DegreeBound::Finite(d + 1),
            DegreeBound::Unbounded => DegreeBound::Unbounded,
        }
    }
}

// ---------------------------------------------------------------------------
// K-construction
// ---------------------------------------------------------------------------

/// The fixed attachment choice: the least sphere vertex (by key order)
/// whose degree inside the disk is below the ambient degree bound.
pub fn choose_attachment(
    disk: &PointedBall,
    degree_sup: usize,
) -> Result<VertexKey, ConstructionError> {
    disk.sphere(disk.radius)
        .into_iter()
        .find(|v| disk.graph.degree(v).unwrap() < degree_sup)
        .ok_or(ConstructionError::NoEligibleVertex)
}

/// Build `K`: a ℤ-spine colored constantly, with a copy of the disk
/// `D_X(x,n)` hung on every spine vertex via the fixed attachment choice.
/// The basepoint is the copy-0 center.
pub fn build_k<E: Expander>(
    source: &E,
    center: &str,
    n: usize,
    spine_color: Color,
) -> Result<PeriodicExpander, ConstructionError> {
    if !source.is_infinite() {
        return Err(ConstructionError::NotInfinite);
    }
    let DegreeBound::Finite(degree_sup) = source.degree_sup() else {
        return Err(ConstructionError::UnboundedDegree);
    };
    let disk = ball(&Lazy(source), center, n)?;
    let attachment = choose_attachment(&disk, degree_sup)?;
    let basepoint = format!("c:0:{center}");
    Ok(PeriodicExpander::new(disk.graph, Gluing::Attach { attachment, spine_color }, basepoint)?)
}

/// The comb graph: `build_k` of the constantly-colored ℤ-line at `n = 0`.
pub fn comb(spine_color: Color) -> PeriodicExpander {
    let line = IntLine::full(|_| Color::zeros());
    build_k(&line, "0", 0, spine_color).expect("comb construction cannot fail")
}

// ---------------------------------------------------------------------------
// Enumeration of aperiodic pointed colored graphs
// ---------------------------------------------------------------------------

/// What to enumerate: weight bound (vertex count plus total canonical
/// color bits), structural constraints, and the color pool.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnumerationSpec {
    pub weight: usize,
    /// Require every degree to be 1 or 3.
    #[serde(default)]
    pub degrees_one_three: bool,
    /// Require the basepoint to have degree 1.
    #[serde(default)]
    pub basepoint_degree_one: bool,
    /// Colors come from the first `c` canonical bit strings; `None` allows
    /// any canonical color the bit budget can pay for.
    #[serde(default)]
    pub color_pool: Option<usize>,
}

impl EnumerationSpec {
    pub fn plain(weight: usize, color_pool: usize) -> Self {
        EnumerationSpec {
            weight,
            degrees_one_three: false,
            basepoint_degree_one: false,
            color_pool: Some(color_pool),
        }
    }
}

fn connected_mask(nv: usize, pairs: &[(usize, usize)], mask: u32) -> bool {
    let mut reach = 1u32; // vertex 0
    loop {
        let mut next = reach;
        for (i, (a, b)) in pairs.iter().enumerate() {
            if mask & (1 << i) != 0 {
                if next & (1 << a) != 0 {
                    next |= 1 << b;
                }
                if next & (1 << b) != 0 {
                    next |= 1 << a;
                }
            }
        }
        if next == reach {
            break;
        }
        reach = next;
    }
    reach.count_ones() as usize == nv
}

/// Colors affordable within `bits` remaining, honoring the pool bound.
fn color_choices(pool: Option<usize>, bits: usize) -> Vec<Color> {
    match pool {
        Some(c) => (0..c)
            .map(Color::nth_canonical)
            .filter(|col| col.canonical_len() <= bits)
            .collect(),
        None => (0..1usize << bits).map(Color::nth_canonical).collect(),
    }
}

/// All members of exact weight `w`, deduplicated by pointed canonical
/// form, sorted by canonical key.
fn members_of_weight(spec: &EnumerationSpec, w: usize) -> Vec<FiniteColoredGraph> {
    let mut seen: BTreeMap<CanonicalKey, FiniteColoredGraph> = BTreeMap::new();
    for nv in 1..=w {
        let bits_budget = w - nv;
        let keys: Vec<VertexKey> = (0..nv).map(|i| format!("v{i}")).collect();
        let pairs: Vec<(usize, usize)> = (0..nv)
            .flat_map(|i| ((i + 1)..nv).map(move |j| (i, j)))
            .collect();
        for mask in 0..1u32 << pairs.len() {
            if !connected_mask(nv, &pairs, mask) {
                continue;
            }
            let edges: Vec<(VertexKey, VertexKey)> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, (a, b))| (keys[*a].clone(), keys[*b].clone()))
                .collect();
            if spec.degrees_one_three {
                let mut deg = vec![0usize; nv];
                for (a, b) in &pairs.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, p)| p).collect::<Vec<_>>() {
                    deg[*a] += 1;
                    deg[*b] += 1;
                }
                if deg.iter().any(|d| *d != 1 && *d != 3) {
                    continue;
                }
            }
            // colorings with total canonical bits == bits_budget
            let mut stack: Vec<(Vec<Color>, usize)> = vec![(Vec::new(), bits_budget)];
            while let Some((assigned, remaining)) = stack.pop() {
                if assigned.len() == nv {
                    if remaining != 0 {
                        continue;
                    }
                    emit_candidates(spec, &keys, &edges, &assigned, &mut seen);
                    continue;
                }
                for col in color_choices(spec.color_pool, remaining) {
                    let left = remaining - col.canonical_len();
                    let mut next = assigned.clone();
                    next.push(col);
                    stack.push((next, left));
                }
            }
        }
    }
    seen.into_values().collect()
}

fn emit_candidates(
    spec: &EnumerationSpec,
    keys: &[VertexKey],
    edges: &[(VertexKey, VertexKey)],
    colors: &[Color],
    seen: &mut BTreeMap<CanonicalKey, FiniteColoredGraph>,
) {
    let unpointed = FiniteColoredGraph::new(
        keys.to_vec(),
        edges.to_vec(),
        keys.iter().cloned().zip(colors.iter().cloned()),
        None,
    )
    .expect("generated graphs are valid");
    if !is_aperiodic(&unpointed) {
        return;
    }
    for bp in keys {
        if spec.basepoint_degree_one && unpointed.degree(bp).unwrap() != 1 {
            continue;
        }
        let pointed = unpointed.with_basepoint(Some(bp)).unwrap();
        let key = canonical_form(&pointed);
        seen.entry(key).or_insert(pointed);
    }
}

/// All connected pointed colored graphs within the weight bound, filtered
/// to aperiodic ones under the spec's constraints, deduplicated by pointed
/// canonical form, in deterministic (weight, canonical key) order.
pub fn enumerate_aperiodic(spec: &EnumerationSpec) -> Vec<FiniteColoredGraph> {
    (1..=spec.weight)
        .flat_map(|w| members_of_weight(spec, w))
        .collect()
}

// ---------------------------------------------------------------------------
// Dense universal graphs (Example "dense" and the degree-{1,3} family)
// ---------------------------------------------------------------------------

/// Injective spine coloring of ℤ: sign bit, then the magnitude bits
/// (least significant first), then a terminal 1.
pub fn spine_color(z: i64) -> Color {
    let mut bits = vec![if z < 0 { 1u8 } else { 0 }];
    let mut m = z.unsigned_abs();
    while m > 0 {
        bits.push((m & 1) as u8);
        m >>= 1;
    }
    bits.push(1);
    Color::from_bits(bits)
}

/// Spine position `z` draws the member at this stream index.
pub fn zigzag(z: i64) -> usize {
    if z >= 0 {
        2 * z as usize
    } else {
        (2 * (-z) as usize) - 1
    }
}

struct StreamState {
    members: Vec<FiniteColoredGraph>,
    next_weight: usize,
}

/// Lazy, monotonically memoized stream of enumerated aperiodic graphs in
/// (weight, canonical key) order, bounded by a weight budget.
pub struct AperiodicStream {
    spec: EnumerationSpec,
    budget: usize,
    state: Mutex<StreamState>,
}

impl AperiodicStream {
    pub fn new(degrees_one_three: bool, basepoint_degree_one: bool, budget: usize) -> Self {
        AperiodicStream {
            spec: EnumerationSpec {
                weight: 0, // per-weight groups are requested explicitly
                degrees_one_three,
                basepoint_degree_one,
                color_pool: None,
            },
            budget,
            state: Mutex::new(StreamState { members: Vec::new(), next_weight: 1 }),
        }
    }

    /// The `i`-th member of the stream, running the enumerator no further
    /// than the weight budget.
    pub fn get(&self, i: usize) -> Result<FiniteColoredGraph, ExpandError> {
        let mut state = self.state.lock().unwrap();
        while state.members.len() <= i && state.next_weight <= self.budget {
            let w = state.next_weight;
            let group = members_of_weight(&self.spec, w);
            state.members.extend(group);
            state.next_weight += 1;
        }
        state.members.get(i).cloned().ok_or_else(|| {
            ExpandError::BudgetExhausted(format!(
                "enumeration stream index {i} needs weight beyond the budget {}",
                self.budget
            ))
        })
    }
}

/// The dense universal construction: an injectively colored ℤ-spine with
/// the enumerated aperiodic pointed graphs attached, one per integer.
/// Spine keys are `s:{z}`, member vertices `a:{z}:{local}`.
pub struct UniversalSpineGraph {
    stream: AperiodicStream,
    degree: DegreeBound,
}

/// Example "dense": every aperiodic finite colored pointed graph hangs off
/// the spine. Unbounded degree; member lookups beyond the weight budget
/// report exhaustion.
pub fn universal_dense_graph(budget: usize) -> UniversalSpineGraph {
    UniversalSpineGraph {
        stream: AperiodicStream::new(false, false, budget),
        degree: DegreeBound::Unbounded,
    }
}

/// The §-style degree-{1,3} variant: members have all degrees 1 or 3 and
/// basepoint degree 1.
pub fn section4_graph(budget: usize) -> UniversalSpineGraph {
    UniversalSpineGraph {
        stream: AperiodicStream::new(true, true, budget),
        degree: DegreeBound::Finite(3),
    }
}

impl UniversalSpineGraph {
    pub fn member(&self, z: i64) -> Result<FiniteColoredGraph, ExpandError> {
        self.stream.get(zigzag(z))
    }
}

impl Expander for UniversalSpineGraph {
    fn root(&self) -> VertexKey {
        "s:0".into()
    }

    fn expand(&self, key: &str) -> Result<Expansion, ExpandError> {
        if let Some(z) = key.strip_prefix("s:") {
            let z: i64 = z
                .parse()
                .map_err(|_| ExpandError::UnknownVertex(key.to_string()))?;
            let member = self.member(z)?;
            let bp = member.basepoint().expect("enumerated members are pointed");
            let mut neighbors = vec![
                format!("s:{}", z - 1),
                format!("s:{}", z + 1),
                format!("a:{z}:{bp}"),
            ];
            neighbors.sort();
            return Ok(Expansion { neighbors, color: spine_color(z) });
        }
        if let Some(rest) = key.strip_prefix("a:") {
            let (z, local) = rest
                .split_once(':')
                .ok_or_else(|| ExpandError::UnknownVertex(key.to_string()))?;
            let z: i64 = z
                .parse()
                .map_err(|_| ExpandError::UnknownVertex(key.to_string()))?;
            let member = self.member(z)?;
            if !member.has_vertex(local) {
                return Err(ExpandError::UnknownVertex(key.to_string()));
            }
            let mut neighbors: Vec<VertexKey> = member
                .neighbors(local)
                .unwrap()
                .iter()
                .map(|n| format!("a:{z}:{n}"))
                .collect();
            if member.basepoint().map(|b| b == local).unwrap_or(false) {
                neighbors.push(format!("s:{z}"));
            }
            neighbors.sort();
            return Ok(Expansion {
                neighbors,
                color: member.color(local).unwrap().clone(),
            });
        }
        Err(ExpandError::UnknownVertex(key.to_string()))
    }

    fn degree_sup(&self) -> DegreeBound {
        self.degree
    }
}

/// `H_n`: the finite subgraph of the degree-{1,3} construction on spine
/// positions `-n..=n` plus the members attached strictly inside, pointed
/// at spine vertex `n`.
pub fn build_h(n: usize, budget: usize) -> Result<FiniteColoredGraph, ConstructionError> {
    if n == 0 {
        return Err(ConstructionError::ZeroNotAllowed);
    }
    let x = section4_graph(budget);
    let n = n as i64;
    let mut vertices: Vec<VertexKey> = Vec::new();
    let mut edges: Vec<(VertexKey, VertexKey)> = Vec::new();
    let mut coloring: Vec<(VertexKey, Color)> = Vec::new();
    for z in -n..=n {
        vertices.push(format!("s:{z}"));
        coloring.push((format!("s:{z}"), spine_color(z)));
        if z < n {
            edges.push((format!("s:{z}"), format!("s:{}", z + 1)));
        }
    }
    for z in (-n + 1)..n {
        let member = x.member(z)?;
        for v in member.vertices() {
            vertices.push(format!("a:{z}:{v}"));
            coloring.push((format!("a:{z}:{v}"), member.color(v).unwrap().clone()));
        }
        for (a, b) in member.edges() {
            edges.push((format!("a:{z}:{a}"), format!("a:{z}:{b}")));
        }
        let bp = member.basepoint().expect("members are pointed");
        edges.push((format!("s:{z}"), format!("a:{z}:{bp}")));
    }
    Ok(FiniteColoredGraph::new(vertices, edges, coloring, Some(format!("s:{n}")))?)
}

/// `Z_n`: ℤ-indexed copies of `H_n` with each copy's basepoint `x_n`
/// identified with the corresponding spine vertex.
pub fn build_z(n: usize, budget: usize) -> Result<PeriodicExpander, ConstructionError> {
    let h = build_h(n, budget)?;
    let fused = format!("s:{n}");
    Ok(PeriodicExpander::new(h, Gluing::Identify { fused }, "s:0".into())?)
}

// ---------------------------------------------------------------------------
// Injective perturbation
// ---------------------------------------------------------------------------

/// Recolor a disk so that colors become pairwise distinct while every
/// vertex moves by strictly less than ε (and by a nonzero amount): keep
/// the first `L` bits of the old color, `2^-L < ε`, and append a distinct
/// nonzero tag per vertex.
pub fn injective_perturbation(
    disk: &PointedBall,
    epsilon: &Rational,
) -> Result<PointedBall, ConstructionError> {
    if *epsilon <= Rational::from_integer(0.into()) {
        return Err(ConstructionError::NonPositiveTolerance);
    }
    let mut cut = 0usize;
    while Rational::new(BigInt::one(), BigInt::one() << cut) >= *epsilon {
        cut += 1;
    }
    let total = disk.graph.vertex_count();
    let mut coloring: Vec<(VertexKey, Color)> = Vec::with_capacity(total);
    for (j, v) in disk.graph.vertices().enumerate() {
        let old = disk.graph.color(v).unwrap();
        let mut fresh = old.with_tail(cut, &Color::nth_canonical(j + 1));
        if fresh == *old {
            // the only tag colliding with the old tail; any other is free
            fresh = old.with_tail(cut, &Color::nth_canonical(total + j + 1));
        }
        coloring.push((v.clone(), fresh));
    }
    let graph = disk.graph.with_coloring(coloring)?;
    Ok(PointedBall { graph, radius: disk.radius, depth: disk.depth.clone() })
}
