//! Certified test instances: random graphs, satisfying corpora, epsilon-far
//! recipes, and the trimmed random graph whose short cycles are broken
//! (degree cap plus girth floor).
//!
//! Every far instance is released together with its oracle certificate;
//! recipes retry with fresh seeds until certification succeeds.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{DegreeBound, Graph, VertexId};
use crate::oracle::{certify, CertVerdict, Certification, Model, Property};
use crate::sim::RngStream;

/// G(n, p): every unordered pair is an edge independently with probability p.
pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    assert!((0.0..=1.0).contains(&p), "p must lie in [0, 1]");
    let mut rng = RngStream::for_run(seed);
    let mut edges = Vec::new();
    for u in 0..n as VertexId {
        for v in (u + 1)..n as VertexId {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).expect("gnp produces simple graphs")
}

/// Parameters of the trimmed random-graph construction: sample G(n, c/n),
/// drop all edges at vertices above the degree cap, then break every cycle
/// of length at most `log n / log c`.
#[derive(Clone, Copy, Debug)]
pub struct LowerBoundParams {
    pub n: usize,
    pub c: f64,
    pub degree_cap: u32,
}

impl LowerBoundParams {
    pub fn new(n: usize, c: f64, degree_cap: u32) -> Result<Self> {
        if c < 2.0 {
            return Err(Error::invalid("edge-probability numerator c must be at least 2"));
        }
        if (degree_cap as f64) < c {
            return Err(Error::invalid("degree cap must be at least c"));
        }
        Ok(LowerBoundParams { n, c, degree_cap })
    }

    pub fn edge_probability(&self) -> f64 {
        (self.c / self.n as f64).min(1.0)
    }

    /// Cycles of length at most this are broken.
    pub fn girth_threshold(&self) -> usize {
        ((self.n as f64).ln() / self.c.ln()).floor() as usize
    }
}

/// What each stage of the construction removed.
#[derive(Clone, Debug, Default)]
pub struct ConstructionLog {
    pub initial_edges: usize,
    pub removed_high_degree: Vec<(VertexId, VertexId)>,
    pub removed_cycle_break: Vec<(VertexId, VertexId)>,
    pub final_edges: usize,
}

/// Runs the construction. The output graph has max degree at most the cap
/// and girth above the threshold; the log records every removed edge.
pub fn lower_bound_instance(
    params: &LowerBoundParams,
    seed: u64,
) -> Result<(Graph, ConstructionLog)> {
    let sample = gnp(params.n, params.edge_probability(), seed);
    let mut log = ConstructionLog {
        initial_edges: sample.m(),
        ..ConstructionLog::default()
    };

    // Stage 1: delete all edges incident with over-cap vertices.
    let over: Vec<bool> = (0..params.n as VertexId)
        .map(|v| sample.degree(v) > params.degree_cap as usize)
        .collect();
    let mut adj: Vec<Vec<VertexId>> = vec![Vec::new(); params.n];
    for (u, v) in sample.edges() {
        if over[u as usize] || over[v as usize] {
            log.removed_high_degree.push((u, v));
        } else {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
    }

    // Stage 2: break short cycles, smallest canonical cycle first, removing
    // its lexicographically smallest edge, re-enumerating after each removal.
    let threshold = params.girth_threshold();
    let mut budget: u64 = 200_000_000;
    loop {
        let mut cycles = enumerate_short_cycles(&adj, threshold, &mut budget)?;
        if cycles.is_empty() {
            break;
        }
        cycles.sort_unstable_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let cycle = &cycles[0];
        let edge = cycle
            .iter()
            .enumerate()
            .map(|(i, &u)| {
                let v = cycle[(i + 1) % cycle.len()];
                (u.min(v), u.max(v))
            })
            .min()
            .expect("cycles are nonempty");
        adj[edge.0 as usize].retain(|&x| x != edge.1);
        adj[edge.1 as usize].retain(|&x| x != edge.0);
        log.removed_cycle_break.push(edge);
    }

    let edges: Vec<(VertexId, VertexId)> = adjacency_edges(&adj);
    log.final_edges = edges.len();
    let g = Graph::from_edges(params.n, edges)?;
    debug_assert!(g.max_degree() <= params.degree_cap as usize);
    Ok((g, log))
}

fn adjacency_edges(adj: &[Vec<VertexId>]) -> Vec<(VertexId, VertexId)> {
    let mut edges = Vec::new();
    for (u, nbrs) in adj.iter().enumerate() {
        for &v in nbrs {
            if (u as VertexId) < v {
                edges.push((u as VertexId, v));
            }
        }
    }
    edges
}

/// All simple cycles of length at most `max_len`, canonically oriented:
/// the smallest vertex first, its smaller neighbor second.
pub fn enumerate_short_cycles(
    adj: &[Vec<VertexId>],
    max_len: usize,
    budget: &mut u64,
) -> Result<Vec<Vec<VertexId>>> {
    let n = adj.len();
    let mut cycles = Vec::new();
    if max_len < 3 {
        return Ok(cycles);
    }
    let mut sorted: Vec<Vec<VertexId>> = adj.to_vec();
    for nbrs in &mut sorted {
        nbrs.sort_unstable();
    }
    let mut path: Vec<VertexId> = Vec::with_capacity(max_len);
    let mut in_path = vec![false; n];
    for s in 0..n as VertexId {
        path.clear();
        path.push(s);
        in_path[s as usize] = true;
        dfs_cycles(&sorted, s, max_len, &mut path, &mut in_path, &mut cycles, budget)?;
        in_path[s as usize] = false;
    }
    Ok(cycles)
}

fn dfs_cycles(
    adj: &[Vec<VertexId>],
    s: VertexId,
    max_len: usize,
    path: &mut Vec<VertexId>,
    in_path: &mut Vec<bool>,
    cycles: &mut Vec<Vec<VertexId>>,
    budget: &mut u64,
) -> Result<()> {
    let v = *path.last().unwrap();
    for &w in &adj[v as usize] {
        if *budget == 0 {
            return Err(Error::BudgetExceeded(
                "short-cycle enumeration is too large; scale the construction down".into(),
            ));
        }
        *budget -= 1;
        if w == s {
            // Closing edge; count each cycle once per orientation.
            if path.len() >= 3 && path[1] < *path.last().unwrap() {
                cycles.push(path.clone());
            }
            continue;
        }
        // Intermediate vertices stay above the start, making it the canonical
        // minimum of the cycle.
        if w < s || in_path[w as usize] || path.len() == max_len {
            continue;
        }
        path.push(w);
        in_path[w as usize] = true;
        dfs_cycles(adj, s, max_len, path, in_path, cycles, budget)?;
        in_path[w as usize] = false;
        path.pop();
    }
    Ok(())
}

const FAR_INSTANCE_RETRIES: u32 = 64;

/// Draws a property-specific epsilon-far instance and certifies it before
/// release, retrying with fresh seeds on certification failure.
pub fn far_instance(
    property: Property,
    n: usize,
    epsilon: f64,
    model: Model,
    d: Option<DegreeBound>,
    seed: u64,
) -> Result<(Graph, Certification)> {
    for attempt in 0..FAR_INSTANCE_RETRIES {
        let attempt_seed = seed.wrapping_add(u64::from(attempt));
        let g = match property {
            Property::CycleFree => random_with_edge_count(n, 2 * n, attempt_seed),
            Property::TriangleFree => gnp(n, 0.5, attempt_seed),
            Property::Bipartite | Property::KColorable(2) => {
                triangles_plus_matching(n, attempt_seed)
            }
            Property::KColorable(_) => {
                return Err(Error::invalid(
                    "far-instance recipes cover bipartite, triangle_free, cycle_free, and k_colorable:2",
                ))
            }
        };
        let certification = certify(&g, property, epsilon, model, d)?;
        if certification.verdict == CertVerdict::EpsilonFar {
            return Ok((g, certification));
        }
    }
    Err(Error::GenerationFailed {
        attempts: FAR_INSTANCE_RETRIES,
        msg: format!("no {property} instance certified {epsilon}-far at n = {n}"),
    })
}

/// Exactly `m` distinct random edges.
pub fn random_with_edge_count(n: usize, m: usize, seed: u64) -> Graph {
    let max_edges = n * (n - 1) / 2;
    assert!(m <= max_edges, "requested more edges than pairs");
    let mut rng = RngStream::for_run(seed);
    let mut chosen = std::collections::HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    while edges.len() < m {
        let u = rng.random_range(0..n as VertexId);
        let v = rng.random_range(0..n as VertexId);
        if u == v {
            continue;
        }
        let e = (u.min(v), u.max(v));
        if chosen.insert(e) {
            edges.push(e);
        }
    }
    Graph::from_edges(n, edges).expect("distinct sampled edges form a simple graph")
}

/// Odd-cycle-rich bounded-degree graph: vertex-disjoint triangles covering
/// the prefix of the vertex set plus a random matching that avoids triangle
/// edges. Max degree 3.
pub fn triangles_plus_matching(n: usize, seed: u64) -> Graph {
    let mut rng = RngStream::for_run(seed);
    let t = n / 3;
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    for i in 0..t as VertexId {
        let b = 3 * i;
        edges.extend([(b, b + 1), (b + 1, b + 2), (b, b + 2)]);
    }
    let mut order: Vec<VertexId> = (0..n as VertexId).collect();
    order.shuffle(&mut rng);
    for pair in order.chunks_exact(2) {
        let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
        // Both endpoints in the same triangle would duplicate an edge.
        if a / 3 == b / 3 && (a as usize) < 3 * t && (b as usize) < 3 * t {
            continue;
        }
        edges.push((a, b));
    }
    Graph::from_edges(n, edges).expect("matching avoids existing edges")
}

/// Random tree where attachment respects a degree cap.
pub fn random_tree(n: usize, max_degree: usize, seed: u64) -> Graph {
    assert!(n >= 1 && max_degree >= 2);
    let mut rng = RngStream::for_run(seed);
    let mut degree = vec![0usize; n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for v in 1..n as VertexId {
        loop {
            let u = rng.random_range(0..v);
            if degree[u as usize] < max_degree {
                degree[u as usize] += 1;
                degree[v as usize] += 1;
                edges.push((u, v));
                break;
            }
        }
    }
    Graph::from_edges(n, edges).expect("tree edges are simple")
}

/// Random bipartite graph over halves `0..n/2` and `n/2..n` with every
/// degree at most `d`.
pub fn bounded_bipartite(n: usize, d: usize, target_m: usize, seed: u64) -> Graph {
    let half = n / 2;
    assert!(half >= 1);
    let mut rng = RngStream::for_run(seed);
    let mut degree = vec![0usize; n];
    let mut chosen = std::collections::HashSet::new();
    let mut edges = Vec::new();
    let mut attempts = 8 * target_m + 64;
    while edges.len() < target_m && attempts > 0 {
        attempts -= 1;
        let u = rng.random_range(0..half as VertexId);
        let v = rng.random_range(half as VertexId..n as VertexId);
        if degree[u as usize] >= d || degree[v as usize] >= d || !chosen.insert((u, v)) {
            continue;
        }
        degree[u as usize] += 1;
        degree[v as usize] += 1;
        edges.push((u, v));
    }
    Graph::from_edges(n, edges).expect("cross edges are simple")
}

/// rows x cols grid; degree at most 4 and bipartite.
pub fn grid(rows: usize, cols: usize) -> Graph {
    let id = |r: usize, c: usize| (r * cols + c) as VertexId;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    Graph::from_edges(rows * cols, edges).expect("grid is simple")
}

/// k-dimensional hypercube: n = 2^k vertices, degree k, bipartite.
pub fn hypercube(k: u32) -> Graph {
    let n = 1usize << k;
    let mut edges = Vec::new();
    for v in 0..n {
        for bit in 0..k {
            let w = v ^ (1 << bit);
            if v < w {
                edges.push((v as VertexId, w as VertexId));
            }
        }
    }
    Graph::from_edges(n, edges).expect("hypercube is simple")
}

/// A corpus of at least 20 graphs satisfying the property, sized up to 1024
/// vertices, suitable as inputs for the corresponding tester (in particular
/// the bipartite corpus keeps max degree at most 4).
pub fn satisfying_corpus(property: Property, seed: u64) -> Vec<Graph> {
    use crate::graph::build;
    let mut graphs: Vec<Graph> = Vec::new();
    match property {
        Property::CycleFree => {
            graphs.push(build::path(2));
            graphs.push(build::path(16));
            graphs.push(build::path(1024));
            graphs.push(build::star(9));
            graphs.push(build::star(63));
            graphs.push(Graph::from_edges(12, std::iter::empty()).unwrap());
            for i in 0..8 {
                graphs.push(random_tree(24 + 100 * i, 8, seed.wrapping_add(i as u64)));
            }
            for i in 0..6 {
                // Forests: a few disjoint random trees.
                let sizes = [30 + 10 * i, 17, 5];
                let mut edges = Vec::new();
                let mut base = 0u32;
                for (j, &sz) in sizes.iter().enumerate() {
                    let t = random_tree(sz, 6, seed.wrapping_add((10 + i * 3 + j) as u64));
                    edges.extend(t.edges().map(|(u, v)| (u + base, v + base)));
                    base += sz as u32;
                }
                graphs.push(Graph::from_edges(sizes.iter().sum(), edges).unwrap());
            }
        }
        Property::Bipartite => {
            graphs.push(build::path(10));
            graphs.push(build::path(512));
            graphs.push(build::cycle(4));
            graphs.push(build::cycle(128));
            graphs.push(build::cycle(1024));
            graphs.push(grid(4, 4));
            graphs.push(grid(16, 16));
            graphs.push(grid(32, 32));
            graphs.push(hypercube(4));
            for i in 0..6 {
                graphs.push(random_tree(50 + 150 * i, 4, seed.wrapping_add(i as u64)));
            }
            for i in 0..5 {
                let n = 64 + 128 * i;
                graphs.push(bounded_bipartite(n, 4, n, seed.wrapping_add(20 + i as u64)));
            }
        }
        Property::TriangleFree => {
            graphs.push(build::path(20));
            graphs.push(build::cycle(5));
            graphs.push(build::cycle(64));
            graphs.push(build::cycle(999));
            graphs.push(build::star(40));
            graphs.push(petersen());
            graphs.push(grid(10, 10));
            graphs.push(grid(32, 32));
            graphs.push(hypercube(10));
            for i in 0..5 {
                graphs.push(random_tree(100 + 200 * i, 12, seed.wrapping_add(i as u64)));
            }
            for i in 0..6 {
                let n = 50 + 180 * i;
                graphs.push(bounded_bipartite(n, 8, 2 * n, seed.wrapping_add(30 + i as u64)));
            }
        }
        Property::KColorable(2) => {
            graphs.push(build::path(25));
            graphs.push(build::cycle(6));
            graphs.push(build::cycle(500));
            graphs.push(build::star(100));
            graphs.push(grid(8, 8));
            graphs.push(grid(32, 32));
            graphs.push(hypercube(8));
            graphs.push(complete_bipartite(7, 9));
            graphs.push(complete_bipartite(20, 20));
            for i in 0..6 {
                graphs.push(random_tree(64 + 160 * i, 10, seed.wrapping_add(i as u64)));
            }
            for i in 0..5 {
                let n = 80 + 200 * i;
                graphs.push(bounded_bipartite(n, 6, 2 * n, seed.wrapping_add(40 + i as u64)));
            }
        }
        Property::KColorable(_) => {}
    }
    graphs
}

/// Complete bipartite graph K_{a,b}.
pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..a as VertexId {
        for v in 0..b as VertexId {
            edges.push((u, a as VertexId + v));
        }
    }
    Graph::from_edges(a + b, edges).expect("complete bipartite is simple")
}

/// The Petersen graph: triangle-free, not bipartite, 3-regular.
pub fn petersen() -> Graph {
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    for i in 0..5u32 {
        edges.push((i, (i + 1) % 5)); // outer cycle
        edges.push((5 + i, 5 + (i + 2) % 5)); // inner pentagram
        edges.push((i, 5 + i)); // spokes
    }
    Graph::from_edges(10, edges).unwrap()
}
