//! Automorphism groups of finite colored graphs, canonical forms, shift
//! self-maps of periodic expanders, and the forced-symmetry twin pattern.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::ball::{ball, PointedBall};
use crate::color::{Color, Rational};
use crate::equivalence::{find_equivalence_balls, EquivalenceError};
use crate::expander::{ExpandError, Expander, GraphSource, Lazy};
use crate::graph::{FiniteColoredGraph, VertexKey};

/// Complete description of the (color-exact) automorphism group of a
/// finite colored graph.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AutomorphismReport {
    /// Every non-identity automorphism, as a vertex permutation.
    pub generators: Vec<BTreeMap<VertexKey, VertexKey>>,
    /// Group order, including the identity.
    pub order: usize,
    /// Whether the basepoint was required to be fixed.
    pub pointed: bool,
}

/// Enumerate all automorphisms by backtracking. Colors must match exactly;
/// with `respect_basepoint`, the basepoint is fixed.
pub fn automorphisms(g: &FiniteColoredGraph, respect_basepoint: bool) -> AutomorphismReport {
    let vertices: Vec<&VertexKey> = g.vertices().collect();
    let mut all: Vec<BTreeMap<VertexKey, VertexKey>> = Vec::new();
    let mut mapping: BTreeMap<VertexKey, VertexKey> = BTreeMap::new();
    let mut used: BTreeSet<VertexKey> = BTreeSet::new();
    search_autos(g, respect_basepoint, &vertices, 0, &mut mapping, &mut used, &mut all);
    let order = all.len();
    let generators = all
        .into_iter()
        .filter(|m| m.iter().any(|(a, b)| a != b))
        .collect();
    AutomorphismReport { generators, order, pointed: respect_basepoint }
}

fn search_autos(
    g: &FiniteColoredGraph,
    pointed: bool,
    vertices: &[&VertexKey],
    idx: usize,
    mapping: &mut BTreeMap<VertexKey, VertexKey>,
    used: &mut BTreeSet<VertexKey>,
    out: &mut Vec<BTreeMap<VertexKey, VertexKey>>,
) {
    if idx == vertices.len() {
        out.push(mapping.clone());
        return;
    }
    let u = vertices[idx];
    for v in g.vertices() {
        if used.contains(v) {
            continue;
        }
        if pointed {
            let is_bp = |w: &VertexKey| g.basepoint() == Some(w);
            if is_bp(u) != is_bp(v) {
                continue;
            }
        }
        if g.color(u).unwrap() != g.color(v).unwrap() {
            continue;
        }
        if g.degree(u).unwrap() != g.degree(v).unwrap() {
            continue;
        }
        let consistent = mapping
            .iter()
            .all(|(pu, pv)| g.has_edge(u, pu) == g.has_edge(v, pv));
        if !consistent {
            continue;
        }
        mapping.insert(u.clone(), v.clone());
        used.insert(v.clone());
        search_autos(g, pointed, vertices, idx + 1, mapping, used, out);
        mapping.remove(u);
        used.remove(v);
    }
}

/// Trivial automorphism group of the colored (unpointed) graph.
pub fn is_aperiodic(g: &FiniteColoredGraph) -> bool {
    automorphisms(g, false).order == 1
}

/// Isomorphism-class identifier for finite (pointed) colored graphs:
/// equal keys iff isomorphic with exact colors.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct CanonicalKey(pub String);

/// Signature-based refinement partition, ordered invariantly. Returns the
/// vertex classes; two isomorphic graphs produce matching class sequences.
fn refine_partition(g: &FiniteColoredGraph) -> Vec<Vec<VertexKey>> {
    // initial signature: basepoint flag, degree, color
    let mut class_of: BTreeMap<VertexKey, usize> = BTreeMap::new();
    let mut signatures: Vec<String> = Vec::new();
    loop {
        let mut sig_map: BTreeMap<String, Vec<VertexKey>> = BTreeMap::new();
        for v in g.vertices() {
            let base = format!(
                "bp={};deg={};col={}",
                g.basepoint() == Some(v),
                g.degree(v).unwrap(),
                g.color(v).unwrap()
            );
            let sig = if class_of.is_empty() {
                base
            } else {
                let mut nbr_classes: Vec<usize> =
                    g.neighbors(v).unwrap().iter().map(|n| class_of[n]).collect();
                nbr_classes.sort();
                format!("{};self={};nbrs={:?}", base, class_of[v], nbr_classes)
            };
            sig_map.entry(sig).or_default().push(v.clone());
        }
        let new_sigs: Vec<String> = sig_map.keys().cloned().collect();
        let mut new_class_of = BTreeMap::new();
        for (i, members) in sig_map.values().enumerate() {
            for v in members {
                new_class_of.insert(v.clone(), i);
            }
        }
        let stable = new_sigs.len() == signatures.len() && new_class_of == class_of;
        class_of = new_class_of;
        signatures = new_sigs;
        if stable {
            break;
        }
    }
    let mut classes: Vec<Vec<VertexKey>> = vec![Vec::new(); signatures.len()];
    for (v, c) in &class_of {
        classes[*c].push(v.clone());
    }
    classes
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..n {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

fn encode_ordering(g: &FiniteColoredGraph, order: &[&VertexKey]) -> String {
    let index: BTreeMap<&VertexKey, usize> = order.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let bp = g.basepoint().map(|b| index[b] as i64).unwrap_or(-1);
    let colors: Vec<String> = order.iter().map(|v| g.color(v).unwrap().to_string()).collect();
    let mut adj = String::new();
    for i in 0..order.len() {
        for j in (i + 1)..order.len() {
            adj.push(if g.has_edge(order[i], order[j]) { '1' } else { '0' });
        }
    }
    format!("n={};bp={};colors={:?};adj={}", order.len(), bp, colors, adj)
}

/// Canonical byte sequence identifying the isomorphism class of a finite
/// (pointed when a basepoint is present) colored graph: the minimum
/// encoding over all vertex orderings consistent with the refinement
/// partition.
pub fn canonical_form(g: &FiniteColoredGraph) -> CanonicalKey {
    let classes = refine_partition(g);
    let per_class_perms: Vec<Vec<Vec<usize>>> =
        classes.iter().map(|c| permutations(c.len())).collect();
    let mut best: Option<String> = None;
    let mut choice: Vec<usize> = vec![0; classes.len()];
    loop {
        let mut order: Vec<&VertexKey> = Vec::with_capacity(g.vertex_count());
        for (ci, class) in classes.iter().enumerate() {
            for &vi in &per_class_perms[ci][choice[ci]] {
                order.push(&class[vi]);
            }
        }
        let enc = encode_ordering(g, &order);
        if best.as_ref().map(|b| enc < *b).unwrap_or(true) {
            best = Some(enc);
        }
        // odometer over per-class permutation choices
        let mut i = 0;
        loop {
            if i == classes.len() {
                return CanonicalKey(best.unwrap());
            }
            choice[i] += 1;
            if choice[i] < per_class_perms[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Partition of a window of basepoints by pairwise `(R,ε)`-equivalence.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassPartition {
    pub count: usize,
    /// One representative per class, with its members, in discovery order.
    pub classes: Vec<(VertexKey, Vec<VertexKey>)>,
}

/// Number of `(R,ε)`-equivalence classes among `{(G,v) : v in window}`:
/// a finite-scale proxy for quasi-transitivity.
pub fn pointed_class_count<S: GraphSource>(
    source: &S,
    window: &[VertexKey],
    radius: usize,
    tolerance: &Rational,
) -> Result<ClassPartition, EquivalenceError> {
    let mut reps: Vec<(VertexKey, PointedBall, Vec<VertexKey>)> = Vec::new();
    for v in window {
        let b = ball(source, v, radius)?;
        let mut placed = false;
        for (_, rep_ball, members) in reps.iter_mut() {
            if find_equivalence_balls(rep_ball, &b, tolerance)?.is_some() {
                members.push(v.clone());
                placed = true;
                break;
            }
        }
        if !placed {
            reps.push((v.clone(), b, vec![v.clone()]));
        }
    }
    Ok(ClassPartition {
        count: reps.len(),
        classes: reps.into_iter().map(|(r, _, m)| (r, m)).collect(),
    })
}

/// Expanders with a meaningful shift-by-`s` self-map on keys.
pub trait Shiftable {
    fn shift_key(&self, key: &str, s: i64) -> Result<VertexKey, ExpandError>;
}

impl Shiftable for crate::expander::PeriodicExpander {
    fn shift_key(&self, key: &str, s: i64) -> Result<VertexKey, ExpandError> {
        crate::expander::PeriodicExpander::shift_key(self, key, s)
    }
}

impl<F: Fn(i64) -> Color> Shiftable for crate::expander::IntLine<F> {
    fn shift_key(&self, key: &str, s: i64) -> Result<VertexKey, ExpandError> {
        let z: i64 = key
            .parse()
            .map_err(|_| ExpandError::UnknownVertex(key.to_string()))?;
        Ok((z + s).to_string())
    }
}

impl<T: Shiftable + ?Sized> Shiftable for &T {
    fn shift_key(&self, key: &str, s: i64) -> Result<VertexKey, ExpandError> {
        (**self).shift_key(key, s)
    }
}

/// Check that shifting by `s` is a colored isomorphism on the radius-`R`
/// window around the root: for every window vertex, color and shifted
/// neighbor set must agree with the image vertex's expansion.
pub fn shift_automorphism_check<E: Expander + Shiftable>(
    expander: &E,
    radius: usize,
    shift: i64,
) -> Result<bool, ExpandError> {
    let window = ball(&Lazy(expander), &expander.root(), radius)?;
    for v in window.graph.vertices() {
        let image = expander.shift_key(v, shift)?;
        let src = expander.expand(v)?;
        let dst = expander.expand(&image)?;
        if src.color != dst.color {
            return Ok(false);
        }
        let mut shifted: Vec<VertexKey> = src
            .neighbors
            .iter()
            .map(|n| expander.shift_key(n, shift))
            .collect::<Result<_, _>>()?;
        shifted.sort();
        if shifted != dst.neighbors {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Find vertices `a != b` with equal colors and the same neighbors apart
/// from each other; swapping such a pair is a nontrivial automorphism.
pub fn twin_pattern(g: &FiniteColoredGraph) -> Option<(VertexKey, VertexKey)> {
    let vs: Vec<&VertexKey> = g.vertices().collect();
    for (i, a) in vs.iter().enumerate() {
        for b in &vs[i + 1..] {
            if g.color(a).unwrap() != g.color(b).unwrap() {
                continue;
            }
            let na: BTreeSet<&VertexKey> =
                g.neighbors(a).unwrap().iter().filter(|n| n != b).collect();
            let nb: BTreeSet<&VertexKey> =
                g.neighbors(b).unwrap().iter().filter(|n| n != a).collect();
            if na == nb {
                return Some(((*a).clone(), (*b).clone()));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::one_over;
    use crate::expander::IntLine;

    fn c(s: &str) -> Color {
        s.parse().unwrap()
    }

    fn path3(colors: [&str; 3]) -> FiniteColoredGraph {
        FiniteColoredGraph::build(
            ["a", "b", "c"],
            [("a", "b"), ("b", "c")],
            [("a", c(colors[0])), ("b", c(colors[1])), ("c", c(colors[2]))],
            None,
        )
        .unwrap()
    }

    #[test]
    fn uncolored_path_reflection() {
        let g = path3(["", "", ""]);
        let rep = automorphisms(&g, false);
        assert_eq!(rep.order, 2);
        assert_eq!(rep.generators.len(), 1);
        // independent re-check of the reported generator
        let gen = &rep.generators[0];
        for (a, b) in g.edges() {
            assert!(g.has_edge(&gen[a], &gen[b]));
        }
        for v in g.vertices() {
            assert_eq!(g.color(v).unwrap(), g.color(&gen[v]).unwrap());
        }
    }

    #[test]
    fn distinct_colors_rigid() {
        let g = path3(["", "1", ""]);
        assert_eq!(automorphisms(&g, false).order, 2);
        let g = path3(["", "1", "01"]);
        assert_eq!(automorphisms(&g, false).order, 1);
        assert!(is_aperiodic(&g));
    }

    #[test]
    fn star_leaf_permutations() {
        let g = FiniteColoredGraph::build(
            ["hub", "l1", "l2", "l3"],
            [("hub", "l1"), ("hub", "l2"), ("hub", "l3")],
            [("hub", c("")), ("l1", c("")), ("l2", c("")), ("l3", c(""))],
            None,
        )
        .unwrap();
        assert_eq!(automorphisms(&g, false).order, 6);
    }

    #[test]
    fn pointed_flag_restricts() {
        let g = path3(["", "", ""]).with_basepoint(Some("a")).unwrap();
        assert_eq!(automorphisms(&g, true).order, 1);
        assert_eq!(automorphisms(&g, false).order, 2);
    }

    #[test]
    fn canonical_form_invariance() {
        let g = path3(["", "1", "01"]);
        let relabeled = g.relabel(|v| format!("x_{v}")).unwrap();
        assert_eq!(canonical_form(&g), canonical_form(&relabeled));
    }

    #[test]
    fn canonical_form_distinguishes() {
        let path = path3(["", "", ""]);
        let star = FiniteColoredGraph::build(
            ["h", "x", "y", "z"],
            [("h", "x"), ("h", "y"), ("h", "z")],
            [("h", c("")), ("x", c("")), ("y", c("")), ("z", c(""))],
            None,
        )
        .unwrap();
        assert_ne!(canonical_form(&path), canonical_form(&star));
        // same graph, different colorings
        assert_ne!(canonical_form(&path3(["", "", ""])), canonical_form(&path3(["1", "", ""])));
        // basepoint position matters
        let p1 = path3(["", "", ""]).with_basepoint(Some("a")).unwrap();
        let p2 = path3(["", "", ""]).with_basepoint(Some("b")).unwrap();
        assert_ne!(canonical_form(&p1), canonical_form(&p2));
        // ... but reflected endpoints agree
        let p3 = path3(["", "", ""]).with_basepoint(Some("c")).unwrap();
        assert_eq!(canonical_form(&p1), canonical_form(&p3));
    }

    #[test]
    fn class_count_constant_line() {
        let line = Lazy(IntLine::full(|_| Color::zeros()));
        let window: Vec<VertexKey> = (-3..=3).map(|z: i64| z.to_string()).collect();
        let p = pointed_class_count(&line, &window, 2, &one_over(1)).unwrap();
        assert_eq!(p.count, 1);
    }

    #[test]
    fn shift_check_on_line() {
        let constant = IntLine::full(|_| Color::zeros());
        assert!(shift_automorphism_check(&constant, 4, 1).unwrap());
        let marked = IntLine::full(|z| if z == 0 { c("1") } else { Color::zeros() });
        assert!(!shift_automorphism_check(&marked, 2, 1).unwrap());
    }

    #[test]
    fn twin_pendants() {
        let g = FiniteColoredGraph::build(
            ["v", "p", "q"],
            [("v", "p"), ("v", "q")],
            [("v", c("1")), ("p", c("")), ("q", c(""))],
            None,
        )
        .unwrap();
        assert_eq!(twin_pattern(&g), Some(("p".into(), "q".into())));
        assert!(automorphisms(&g, false).order >= 2);
    }

    #[test]
    fn twin_absent_when_colored_apart() {
        let g = path3(["", "1", "01"]);
        assert_eq!(twin_pattern(&g), None);
    }

    #[test]
    fn four_cycle_has_twins() {
        let g = FiniteColoredGraph::build(
            ["a", "b", "c", "d"],
            [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")],
            [("a", c("")), ("b", c("")), ("c", c("")), ("d", c(""))],
            None,
        )
        .unwrap();
        assert!(twin_pattern(&g).is_some());
    }
}
