//! Shared helpers for the integration suites: seeded random pointed
//! colored graphs and brute-force oracles kept independent of the library
//! paths they check.

#![allow(dead_code)]

use gromov::color::Color;
use gromov::FiniteColoredGraph;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random connected pointed colored graph: a random spanning tree plus
/// extra edges, colors drawn from the first `pool` canonical bit strings,
/// basepoint `v0`.
pub fn random_graph(rng: &mut impl Rng, max_vertices: usize, pool: usize) -> FiniteColoredGraph {
    let n = rng.gen_range(1..=max_vertices);
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges: Vec<(String, String)> = Vec::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        edges.push((names[j].clone(), names[i].clone()));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(0.15) {
                edges.push((names[i].clone(), names[j].clone()));
            }
        }
    }
    let coloring: Vec<(String, Color)> = names
        .iter()
        .map(|v| (v.clone(), Color::nth_canonical(rng.gen_range(0..pool))))
        .collect();
    FiniteColoredGraph::new(names.clone(), edges, coloring, Some("v0".to_string()))
        .expect("valid graph")
}

/// A random canonical color of bounded index.
pub fn random_color(rng: &mut impl Rng, pool: usize) -> Color {
    Color::nth_canonical(rng.gen_range(0..pool))
}

/// Brute-force automorphism count: try every vertex permutation and count
/// the color- and adjacency-preserving ones. Oracle for the search-based
/// implementation; basepoint-free.
pub fn automorphism_count_oracle(g: &FiniteColoredGraph) -> usize {
    let vertices: Vec<&String> = g.vertices().collect();
    let n = vertices.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut count = 0;
    permute(&mut perm, 0, &mut |p| {
        let ok = (0..n).all(|i| g.color(vertices[i]).unwrap() == g.color(vertices[p[i]]).unwrap())
            && (0..n).all(|i| {
                (0..n).all(|j| {
                    g.has_edge(vertices[i], vertices[j])
                        == g.has_edge(vertices[p[i]], vertices[p[j]])
                })
            });
        if ok {
            count += 1;
        }
    });
    count
}

fn permute(perm: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == perm.len() {
        visit(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(perm, k + 1, visit);
        perm.swap(k, i);
    }
}
