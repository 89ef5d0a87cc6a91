//! Shared fixtures and randomized network generators for integration tests.
#![allow(dead_code)] // each test target uses a different subset

use crn_core::model::{Complex, RateAssignment, Reaction, ReactionNetwork, Species};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FIGURE2: &str = "X1 + X2 -> 2 X1\nX2 + X3 -> X1 + X3\nX1 + X3 -> 2 X1\n";
pub const IVANOVA: &str =
    "X + Y -> 2 Y\nY + Z -> 2 Z\nX + Z -> 2 X\n2 X + Y + Z -> 3 X + Y\n";

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn parse(text: &str) -> ReactionNetwork {
    crn_core::parse_network(text).unwrap().0
}

fn species_table(n: usize) -> Vec<Species> {
    (0..n)
        .map(|id| Species {
            id,
            name: format!("S{id}"),
        })
        .collect()
}

/// Assembles a network from complexes and index pairs, keeping only the
/// complexes that some edge touches, in first-appearance order (the same
/// order parsing would produce).
fn assemble(n_species: usize, complexes: Vec<Complex>, pairs: Vec<(usize, usize)>) -> ReactionNetwork {
    let mut used: Vec<usize> = Vec::new();
    for &(a, b) in &pairs {
        for v in [a, b] {
            if !used.contains(&v) {
                used.push(v);
            }
        }
    }
    let remap: Vec<Option<usize>> = {
        let mut m = vec![None; complexes.len()];
        for (new, &old) in used.iter().enumerate() {
            m[old] = Some(new);
        }
        m
    };
    let vertices: Vec<Complex> = used.iter().map(|&old| complexes[old].clone()).collect();
    let edges: Vec<Reaction> = pairs
        .iter()
        .map(|&(a, b)| Reaction {
            source: remap[a].unwrap(),
            target: remap[b].unwrap(),
        })
        .collect();
    ReactionNetwork {
        species: species_table(n_species),
        vertices,
        edges,
    }
}

/// Random valid network: up to `max_species` species, up to `max_edges`
/// edges, coefficients bounded by `max_coeff`.
pub fn random_network(
    rng: &mut ChaCha8Rng,
    max_species: usize,
    max_edges: usize,
    max_coeff: u32,
) -> ReactionNetwork {
    let n = rng.random_range(1..=max_species);
    // Distinct complex pool.
    let mut pool: Vec<Complex> = Vec::new();
    let pool_target = rng.random_range(2..=(max_edges + 2).min(8));
    let mut guard = 0;
    while pool.len() < pool_target && guard < 200 {
        guard += 1;
        let coeffs: Vec<u32> = (0..n).map(|_| rng.random_range(0..=max_coeff)).collect();
        let cx = Complex::new(coeffs);
        if !pool.contains(&cx) {
            pool.push(cx);
        }
    }
    let m = rng.random_range(1..=max_edges);
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut guard = 0;
    while pairs.len() < m && guard < 200 {
        guard += 1;
        let a = rng.random_range(0..pool.len());
        let b = rng.random_range(0..pool.len());
        if a != b && !pairs.contains(&(a, b)) {
            pairs.push((a, b));
        }
    }
    assemble(n, pool, pairs)
}

/// Random weakly reversible network: a union of directed cycles over a
/// shared complex pool.
pub fn random_weakly_reversible(rng: &mut ChaCha8Rng) -> ReactionNetwork {
    let n = rng.random_range(1..=4);
    let mut pool: Vec<Complex> = Vec::new();
    let mut guard = 0;
    while pool.len() < 6 && guard < 300 {
        guard += 1;
        let coeffs: Vec<u32> = (0..n).map(|_| rng.random_range(0..=3)).collect();
        let cx = Complex::new(coeffs);
        if !pool.contains(&cx) {
            pool.push(cx);
        }
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for _ in 0..rng.random_range(1..=3) {
        let len = rng.random_range(2..=4.min(pool.len()));
        let mut idx: Vec<usize> = (0..pool.len()).collect();
        // Partial shuffle for the cycle support.
        for i in 0..len {
            let j = rng.random_range(i..idx.len());
            idx.swap(i, j);
        }
        for i in 0..len {
            let pair = (idx[i], idx[(i + 1) % len]);
            if !pairs.contains(&pair) {
                pairs.push(pair);
            }
        }
    }
    assemble(n, pool, pairs)
}

/// Random deficiency-zero network that is not weakly reversible, glued from
/// linkage classes with affinely independent vertices on disjoint species
/// blocks (so the class subspaces are independent).
pub fn random_deficiency_zero_non_wr(rng: &mut ChaCha8Rng) -> ReactionNetwork {
    let num_classes = rng.random_range(1..=3);
    let mut complexes: Vec<Complex> = Vec::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut species_count = 0usize;

    // Pre-draw class sizes so every complex has the full coefficient width.
    let sizes: Vec<usize> = (0..num_classes).map(|_| rng.random_range(2..=4)).collect();
    let total_species: usize = sizes.iter().sum();

    for (class, &m) in sizes.iter().enumerate() {
        let block = species_count;
        species_count += m;
        // Vertices base + c_j e_{block+j}: affinely independent.
        let mut base = vec![0u32; total_species];
        for slot in 0..m {
            base[block + slot] = rng.random_range(0..=1);
        }
        let first = complexes.len();
        for j in 0..m {
            let mut coeffs = base.clone();
            coeffs[block + j] += rng.random_range(1..=2);
            complexes.push(Complex::new(coeffs));
        }
        // Random spanning tree with random edge orientations.
        let mut tree_edges = Vec::new();
        for j in 1..m {
            let parent = rng.random_range(0..j);
            tree_edges.push((first + parent, first + j));
        }
        if class == 0 {
            // Keep the first class a pure tree: never strongly connected.
            for (a, b) in tree_edges {
                if rng.random_bool(0.5) {
                    pairs.push((a, b));
                } else {
                    pairs.push((b, a));
                }
            }
        } else {
            for (a, b) in tree_edges {
                if rng.random_bool(0.3) {
                    // A reversible pair keeps the class connected and may
                    // make it strongly connected; deficiency is unaffected.
                    pairs.push((a, b));
                    pairs.push((b, a));
                } else if rng.random_bool(0.5) {
                    pairs.push((a, b));
                } else {
                    pairs.push((b, a));
                }
            }
        }
    }
    assemble(total_species, complexes, pairs)
}

pub fn random_rates(rng: &mut ChaCha8Rng, num_edges: usize) -> RateAssignment {
    RateAssignment {
        k: (0..num_edges).map(|_| rng.random_range(0.5..2.0)).collect(),
    }
}

pub fn random_positive_state(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.05..2.0)).collect()
}

/// Random strictly positive state on the simplex `c . x = total`.
pub fn random_simplex_state(rng: &mut ChaCha8Rng, n: usize, total: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
    let sum: f64 = raw.iter().sum();
    raw.iter().map(|v| v / sum * total).collect()
}
