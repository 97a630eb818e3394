//! Exact centralized ground truth: property deciders and
//! distance-to-property computations used to certify test instances and to
//! validate the probabilistic claims of the distributed tests.
//!
//! Exhaustive routes have hard vertex budgets and fail with explicit errors
//! rather than approximating silently. Packing routes return certified lower
//! bounds.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DegreeBound, Graph, VertexId};

/// Properties the oracles and testers understand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Property {
    Bipartite,
    TriangleFree,
    CycleFree,
    KColorable(u32),
}

impl std::fmt::Display for Property {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Property::Bipartite => write!(f, "bipartite"),
            Property::TriangleFree => write!(f, "triangle_free"),
            Property::CycleFree => write!(f, "cycle_free"),
            Property::KColorable(k) => write!(f, "k_colorable:{k}"),
        }
    }
}

impl std::str::FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bipartite" => Ok(Property::Bipartite),
            "triangle_free" | "triangle-free" => Ok(Property::TriangleFree),
            "cycle_free" | "cycle-free" => Ok(Property::CycleFree),
            other => {
                if let Some(k) = other
                    .strip_prefix("k_colorable:")
                    .or_else(|| other.strip_prefix("k-colorable:"))
                {
                    let k: u32 = k
                        .parse()
                        .map_err(|_| Error::invalid(format!("bad color count in {other:?}")))?;
                    if k == 0 {
                        return Err(Error::invalid("k must be at least 1"));
                    }
                    Ok(Property::KColorable(k))
                } else {
                    Err(Error::invalid(format!("unknown property {other:?}")))
                }
            }
        }
    }
}

impl From<Property> for String {
    fn from(p: Property) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for Property {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Distance model: which normalizer makes a graph epsilon-far.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Normalizer n^2.
    Dense,
    /// Normalizer max(n, m).
    General,
    /// Normalizer d*n; requires a degree bound.
    Sparse,
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(Model::Dense),
            "general" => Ok(Model::General),
            "sparse" => Ok(Model::Sparse),
            other => Err(Error::invalid(format!("unknown model {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMethod {
    /// Exhaustive search; distance is exact.
    Exhaustive,
    /// Closed form; distance is exact.
    Formula,
    /// Certified lower bound from an edge-disjoint packing.
    PackingBound,
}

/// Machine-checkable statement of a graph's distance (exact or lower bound)
/// from a property under a named normalizer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FarnessCertificate {
    #[serde(with = "property_string")]
    pub property: Property,
    pub distance: u64,
    pub model: Model,
    pub normalizer: u64,
    pub epsilon_star: f64,
    pub method: DistanceMethod,
}

mod property_string {
    use super::Property;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(p: &Property, s: S) -> Result<S::Ok, S::Error> {
        p.to_string().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Property, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertVerdict {
    Satisfies,
    EpsilonFar,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certification {
    pub certificate: FarnessCertificate,
    pub verdict: CertVerdict,
}

/// Structural evidence accompanying a property decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PropertyWitness {
    TwoColoring(Vec<u8>),
    OddCycle(Vec<VertexId>),
    Triangle([VertexId; 3]),
    Cycle(Vec<VertexId>),
    KColoring(Vec<u8>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub satisfies: bool,
    pub witness: Option<PropertyWitness>,
}

/// Decides the property exactly, returning structural evidence where one
/// exists: a 2-coloring or an odd cycle, a triangle, a cycle, or a
/// k-coloring. k-colorability for k >= 3 is budgeted at 25 vertices.
pub fn decide_property(g: &Graph, property: Property) -> Result<Decision> {
    match property {
        Property::Bipartite => Ok(match two_coloring(g) {
            Ok(colors) => Decision {
                satisfies: true,
                witness: Some(PropertyWitness::TwoColoring(colors)),
            },
            Err(cycle) => Decision {
                satisfies: false,
                witness: Some(PropertyWitness::OddCycle(cycle)),
            },
        }),
        Property::TriangleFree => Ok(match find_triangle(g) {
            None => Decision {
                satisfies: true,
                witness: None,
            },
            Some(t) => Decision {
                satisfies: false,
                witness: Some(PropertyWitness::Triangle(t)),
            },
        }),
        Property::CycleFree => Ok(match find_cycle(g) {
            None => Decision {
                satisfies: true,
                witness: None,
            },
            Some(c) => Decision {
                satisfies: false,
                witness: Some(PropertyWitness::Cycle(c)),
            },
        }),
        Property::KColorable(k) => match k_coloring(g, k)? {
            Some(colors) => Ok(Decision {
                satisfies: true,
                witness: Some(PropertyWitness::KColoring(colors)),
            }),
            None => Ok(Decision {
                satisfies: false,
                witness: None,
            }),
        },
    }
}

/// BFS 2-coloring; on failure returns an odd cycle.
pub fn two_coloring(g: &Graph) -> std::result::Result<Vec<u8>, Vec<VertexId>> {
    let n = g.n();
    let mut color = vec![u8::MAX; n];
    let mut parent = vec![VertexId::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for start in 0..n as VertexId {
        if color[start as usize] != u8::MAX {
            continue;
        }
        color[start as usize] = 0;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if color[w as usize] == u8::MAX {
                    color[w as usize] = 1 - color[v as usize];
                    parent[w as usize] = v;
                    queue.push_back(w);
                } else if color[w as usize] == color[v as usize] {
                    return Err(extract_odd_cycle(v, w, &parent));
                }
            }
        }
    }
    Ok(color)
}

fn extract_odd_cycle(u: VertexId, w: VertexId, parent: &[VertexId]) -> Vec<VertexId> {
    let chain = |mut x: VertexId| {
        let mut path = vec![x];
        while parent[x as usize] != VertexId::MAX {
            x = parent[x as usize];
            path.push(x);
        }
        path
    };
    let pu = chain(u);
    let pw = chain(w);
    // Drop the common suffix up to the lowest common ancestor.
    let mut i = pu.len();
    let mut j = pw.len();
    while i > 0 && j > 0 && pu[i - 1] == pw[j - 1] {
        i -= 1;
        j -= 1;
    }
    let mut cycle: Vec<VertexId> = pu[..=i.min(pu.len() - 1)].to_vec();
    cycle.truncate(i + 1); // u .. lca
    let mut back: Vec<VertexId> = pw[..j].to_vec();
    back.reverse(); // lca-child .. w
    cycle.extend(back);
    debug_assert!(cycle.len() % 2 == 1, "even cycle extracted");
    cycle
}

/// Smallest-id triangle found by neighbor intersection, if any.
pub fn find_triangle(g: &Graph) -> Option<[VertexId; 3]> {
    for (u, v) in g.edges() {
        let (mut a, mut b) = (g.neighbors(u).iter(), g.neighbors(v).iter());
        let (mut x, mut y) = (a.next(), b.next());
        while let (Some(&p), Some(&q)) = (x, y) {
            match p.cmp(&q) {
                std::cmp::Ordering::Less => x = a.next(),
                std::cmp::Ordering::Greater => y = b.next(),
                std::cmp::Ordering::Equal => {
                    let mut t = [u, v, p];
                    t.sort_unstable();
                    return Some(t);
                }
            }
        }
    }
    None
}

/// Any cycle in `g`, as a vertex sequence, or `None` for forests.
pub fn find_cycle(g: &Graph) -> Option<Vec<VertexId>> {
    let n = g.n();
    let mut visited = vec![false; n];
    let mut parent = vec![VertexId::MAX; n];
    for start in 0..n as VertexId {
        if visited[start as usize] {
            continue;
        }
        // Iterative DFS; any non-tree edge in an undirected DFS closes a
        // cycle with an ancestor.
        let mut stack: Vec<(VertexId, usize)> = vec![(start, 0)];
        visited[start as usize] = true;
        let mut on_path = vec![false; n];
        on_path[start as usize] = true;
        while let Some(&mut (v, ref mut idx)) = stack.last_mut() {
            if *idx >= g.degree(v) {
                on_path[v as usize] = false;
                stack.pop();
                continue;
            }
            let w = g.neighbors(v)[*idx];
            *idx += 1;
            if !visited[w as usize] {
                visited[w as usize] = true;
                parent[w as usize] = v;
                on_path[w as usize] = true;
                stack.push((w, 0));
            } else if w != parent[v as usize] && on_path[w as usize] {
                let mut cycle = vec![v];
                let mut x = v;
                while x != w {
                    x = parent[x as usize];
                    cycle.push(x);
                }
                return Some(cycle);
            }
        }
    }
    None
}

/// Backtracking k-coloring; `None` when not k-colorable. Budgeted at 25
/// vertices for k >= 3; k <= 2 uses exact polynomial routes.
pub fn k_coloring(g: &Graph, k: u32) -> Result<Option<Vec<u8>>> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if k >= 2 && g.m() == 0 {
        return Ok(Some(vec![0; g.n()]));
    }
    if k == 1 {
        return Ok(if g.m() == 0 { Some(vec![0; g.n()]) } else { None });
    }
    if k == 2 {
        return Ok(two_coloring(g).ok());
    }
    if g.n() > 25 {
        return Err(Error::BudgetExceeded(format!(
            "k-coloring search limited to 25 vertices, got {}",
            g.n()
        )));
    }
    // Highest-degree-first ordering tightens the search.
    let mut order: Vec<VertexId> = (0..g.n() as VertexId).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(g.degree(v)));
    let mut colors = vec![u8::MAX; g.n()];
    if color_rec(g, &order, 0, k as u8, &mut colors) {
        Ok(Some(colors))
    } else {
        Ok(None)
    }
}

fn color_rec(g: &Graph, order: &[VertexId], pos: usize, k: u8, colors: &mut Vec<u8>) -> bool {
    if pos == order.len() {
        return true;
    }
    let v = order[pos];
    // Allowing at most one fresh color breaks color-permutation symmetry.
    let used = colors[..]
        .iter()
        .filter(|&&c| c != u8::MAX)
        .map(|&c| c + 1)
        .max()
        .unwrap_or(0);
    for c in 0..k.min(used + 1) {
        if g.neighbors(v).iter().any(|&w| colors[w as usize] == c) {
            continue;
        }
        colors[v as usize] = c;
        if color_rec(g, order, pos + 1, k, colors) {
            return true;
        }
        colors[v as usize] = u8::MAX;
    }
    false
}

/// Exact distance from cycle-freeness: any maximal cycle-free subgraph is a
/// spanning forest, so exactly `m - n + #components` edges must go.
pub fn distance_cycle_free(g: &Graph) -> u64 {
    (g.m() + g.component_count() - g.n()) as u64
}

/// Exact distance from bipartiteness by exhausting bipartitions; budgeted at
/// 24 vertices.
pub fn distance_bipartite(g: &Graph) -> Result<u64> {
    let n = g.n();
    if n > 24 {
        return Err(Error::BudgetExceeded(format!(
            "bipartition enumeration limited to 24 vertices, got {n}"
        )));
    }
    if n == 0 {
        return Ok(0);
    }
    let mut adj = vec![0u32; n];
    for (u, v) in g.edges() {
        adj[u as usize] |= 1 << v;
        adj[v as usize] |= 1 << u;
    }
    let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
    let mut best = u64::MAX;
    // Vertex n-1 pinned to the left side; sides are symmetric.
    for left in 0..(1u32 << (n - 1)) {
        let right = !left & full;
        let mut internal = 0u64;
        for v in 0..n {
            let side = if left >> v & 1 == 1 { left } else { right };
            internal += u64::from((adj[v] & side).count_ones());
        }
        best = best.min(internal / 2);
        if best == 0 {
            break;
        }
    }
    Ok(best)
}

/// Certified lower bound on the distance from triangle-freeness: a greedy
/// maximal edge-disjoint triangle packing (each packed triangle forces at
/// least one deletion).
pub fn distance_triangle_free_lower_bound(g: &Graph) -> u64 {
    greedy_triangle_packing(g).len() as u64
}

/// The packing itself, deterministic: edges scanned in canonical order, the
/// smallest completing vertex taken.
pub fn greedy_triangle_packing(g: &Graph) -> Vec<[VertexId; 3]> {
    let mut used: std::collections::HashSet<(VertexId, VertexId)> = std::collections::HashSet::new();
    let key = |a: VertexId, b: VertexId| (a.min(b), a.max(b));
    let mut packing = Vec::new();
    for (u, v) in g.edges() {
        if used.contains(&key(u, v)) {
            continue;
        }
        let w = common_neighbors(g, u, v)
            .into_iter()
            .find(|&w| !used.contains(&key(u, w)) && !used.contains(&key(v, w)));
        if let Some(w) = w {
            used.insert(key(u, v));
            used.insert(key(u, w));
            used.insert(key(v, w));
            let mut t = [u, v, w];
            t.sort_unstable();
            packing.push(t);
        }
    }
    packing
}

fn common_neighbors(g: &Graph, u: VertexId, v: VertexId) -> Vec<VertexId> {
    let (mut a, mut b) = (g.neighbors(u).iter(), g.neighbors(v).iter());
    let (mut x, mut y) = (a.next(), b.next());
    let mut out = Vec::new();
    while let (Some(&p), Some(&q)) = (x, y) {
        match p.cmp(&q) {
            std::cmp::Ordering::Less => x = a.next(),
            std::cmp::Ordering::Greater => y = b.next(),
            std::cmp::Ordering::Equal => {
                out.push(p);
                x = a.next();
                y = b.next();
            }
        }
    }
    out
}

/// Exact distance from triangle-freeness by branch and bound over deletions;
/// budgeted at 12 vertices.
pub fn exact_distance_triangle_free(g: &Graph) -> Result<u64> {
    if g.n() > 12 {
        return Err(Error::BudgetExceeded(format!(
            "exact triangle distance limited to 12 vertices, got {}",
            g.n()
        )));
    }
    let edges: Vec<(VertexId, VertexId)> = g.edges().collect();
    let mut edge_index: HashMap<(VertexId, VertexId), usize> = HashMap::new();
    for (i, &e) in edges.iter().enumerate() {
        edge_index.insert(e, i);
    }
    let key = |a: VertexId, b: VertexId| (a.min(b), a.max(b));
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    for u in 0..g.n() as VertexId {
        for &v in g.neighbors(u).iter().filter(|&&v| v > u) {
            for w in common_neighbors(g, u, v).into_iter().filter(|&w| w > v) {
                triangles.push([
                    edge_index[&key(u, v)],
                    edge_index[&key(u, w)],
                    edge_index[&key(v, w)],
                ]);
            }
        }
    }
    let mut best = edges.len() as u64;
    hit_triangles(&triangles, 0u128, 0, &mut best);
    Ok(best)
}

fn hit_triangles(triangles: &[[usize; 3]], removed: u128, count: u64, best: &mut u64) {
    if count >= *best {
        return;
    }
    match triangles
        .iter()
        .find(|t| t.iter().all(|&e| removed & (1 << e) == 0))
    {
        None => *best = count,
        Some(t) => {
            for &e in t {
                hit_triangles(triangles, removed | (1 << e), count + 1, best);
            }
        }
    }
}

/// Certified lower bound on the distance from bipartiteness: greedy maximal
/// packing of edge-disjoint odd cycles, shortest first.
pub fn odd_cycle_packing_lower_bound(g: &Graph) -> u64 {
    odd_cycle_packing(g).len() as u64
}

/// The packed cycles themselves (vertex sequences).
pub fn odd_cycle_packing(g: &Graph) -> Vec<Vec<VertexId>> {
    let n = g.n();
    let mut adj: Vec<Vec<VertexId>> = (0..n as VertexId).map(|v| g.neighbors(v).to_vec()).collect();
    let mut packing = Vec::new();
    while let Some(cycle) = shortest_odd_cycle(&adj) {
        for i in 0..cycle.len() {
            let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
            adj[a as usize].retain(|&x| x != b);
            adj[b as usize].retain(|&x| x != a);
        }
        packing.push(cycle);
    }
    packing
}

/// Globally shortest odd cycle via BFS on the parity double cover from every
/// source; the global minimum is necessarily simple.
fn shortest_odd_cycle(adj: &[Vec<VertexId>]) -> Option<Vec<VertexId>> {
    let n = adj.len();
    let mut best: Option<Vec<VertexId>> = None;
    let mut dist = vec![usize::MAX; 2 * n];
    let mut parent = vec![usize::MAX; 2 * n];
    for s in 0..n {
        if adj[s].is_empty() {
            continue;
        }
        let limit = best.as_ref().map_or(usize::MAX, |c| c.len());
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        let start = 2 * s;
        dist[start] = 0;
        parent[start] = usize::MAX;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(start);
        let goal = 2 * s + 1;
        while let Some(state) = queue.pop_front() {
            if dist[state] + 1 >= limit {
                break;
            }
            let (v, par) = (state / 2, state % 2);
            for &w in &adj[v] {
                let next = 2 * (w as usize) + (1 - par);
                if dist[next] == usize::MAX {
                    dist[next] = dist[state] + 1;
                    parent[next] = state;
                    queue.push_back(next);
                }
            }
        }
        if dist[goal] != usize::MAX && dist[goal] < limit {
            let mut walk = Vec::with_capacity(dist[goal]);
            let mut state = goal;
            while state != start {
                walk.push((state / 2) as VertexId);
                state = parent[state];
            }
            walk.reverse();
            walk.pop(); // drop the closing copy of s
            walk.insert(0, s as VertexId);
            best = Some(walk);
        }
    }
    if let Some(cycle) = &best {
        debug_assert!(
            {
                let mut sorted = cycle.clone();
                sorted.sort_unstable();
                sorted.windows(2).all(|w| w[0] != w[1])
            },
            "shortest odd closed walk must be a simple cycle"
        );
    }
    best
}

/// Exact distance from k-colorability by exhausting color assignments.
pub fn distance_k_colorable(g: &Graph, k: u32) -> Result<u64> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if k == 1 {
        return Ok(g.m() as u64);
    }
    if k == 2 {
        return distance_bipartite(g);
    }
    let n = g.n() as u32;
    let states = (k as f64).powi(n as i32);
    if states > 2e7 {
        return Err(Error::BudgetExceeded(format!(
            "k-coloring distance enumeration needs {k}^{n} assignments"
        )));
    }
    let edges: Vec<(VertexId, VertexId)> = g.edges().collect();
    let mut assign = vec![0u32; g.n()];
    let mut best = g.m() as u64;
    loop {
        let bad = edges
            .iter()
            .filter(|&&(u, v)| assign[u as usize] == assign[v as usize])
            .count() as u64;
        best = best.min(bad);
        // Odometer increment.
        let mut pos = 0;
        loop {
            if pos == assign.len() {
                return Ok(best);
            }
            assign[pos] += 1;
            if assign[pos] < k {
                break;
            }
            assign[pos] = 0;
            pos += 1;
        }
    }
}

/// Compares the distance (exact or lower-bounded) to `epsilon * normalizer`
/// and issues a certificate. `Neither` covers instances in the gap and
/// instances whose only evidence is a lower bound below the threshold.
pub fn certify(
    g: &Graph,
    property: Property,
    epsilon: f64,
    model: Model,
    d: Option<DegreeBound>,
) -> Result<Certification> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::invalid("epsilon must lie in (0, 1]"));
    }
    let normalizer: u64 = match model {
        Model::Dense => (g.n() as u64) * (g.n() as u64),
        Model::General => g.n().max(g.m()) as u64,
        Model::Sparse => {
            let d = d.ok_or_else(|| Error::invalid("sparse model requires a degree bound"))?;
            d.validate(g)?;
            u64::from(d.0) * g.n() as u64
        }
    };

    let (distance, method) = match property {
        Property::CycleFree => (distance_cycle_free(g), DistanceMethod::Formula),
        Property::Bipartite => {
            if g.n() <= 24 {
                (distance_bipartite(g)?, DistanceMethod::Exhaustive)
            } else if two_coloring(g).is_ok() {
                (0, DistanceMethod::Exhaustive)
            } else {
                (odd_cycle_packing_lower_bound(g), DistanceMethod::PackingBound)
            }
        }
        Property::TriangleFree => {
            if g.n() <= 12 {
                (exact_distance_triangle_free(g)?, DistanceMethod::Exhaustive)
            } else if find_triangle(g).is_none() {
                (0, DistanceMethod::Exhaustive)
            } else {
                (
                    distance_triangle_free_lower_bound(g),
                    DistanceMethod::PackingBound,
                )
            }
        }
        Property::KColorable(k) => (distance_k_colorable(g, k)?, DistanceMethod::Exhaustive),
    };

    let threshold = epsilon * normalizer as f64;
    let exact = method != DistanceMethod::PackingBound;
    let verdict = if distance as f64 >= threshold - 1e-9 {
        CertVerdict::EpsilonFar
    } else if exact && distance == 0 {
        CertVerdict::Satisfies
    } else {
        CertVerdict::Neither
    };

    Ok(Certification {
        certificate: FarnessCertificate {
            property,
            distance,
            model,
            normalizer,
            epsilon_star: distance as f64 / normalizer as f64,
            method,
        },
        verdict,
    })
}
