//! Immutable undirected simple graphs in adjacency-list (CSR) form, the
//! common substrate for the engine, the testers, the oracles, and the
//! generators.
//!
//! The interchange format is an edge-list text file: a first line `n m`
//! followed by `m` lines `u v`. Serialization is canonical: edges sorted by
//! `(min endpoint, max endpoint)`, one per line, LF endings.

use crate::error::{Error, Result};

pub type VertexId = u32;

/// Immutable undirected simple graph. Vertex ids are exactly `0..n-1`;
/// neighbor lists are sorted ascending; no self-loops or parallel edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
}

impl Graph {
    /// Builds a graph from an edge list, validating simplicity.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut normalized: Vec<(VertexId, VertexId)> = Vec::new();
        for (u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::invalid(format!(
                    "edge ({u}, {v}) out of range for n = {n}"
                )));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at vertex {u}")));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        Ok(Self::from_sorted_unique(n, &normalized))
    }

    fn from_sorted_unique(n: usize, edges: &[(VertexId, VertexId)]) -> Self {
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for v in 0..n {
            offsets.push(offsets[v] + degree[v]);
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0 as VertexId; edges.len() * 2];
        for &(u, v) in edges {
            targets[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            targets[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        for v in 0..n {
            targets[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Graph {
            n,
            offsets,
            targets,
        }
    }

    /// Parses the edge-list text format. Errors name the offending line
    /// (1-based).
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse {
                line: 1,
                msg: "empty input, expected header \"n m\"".into(),
            })?;
        let (n, m) = parse_pair(header, 1, "header")?;
        let n = n as usize;
        let m = m as usize;

        let mut edges: Vec<(VertexId, VertexId)> = Vec::with_capacity(m);
        let mut seen: Vec<(VertexId, VertexId, usize)> = Vec::with_capacity(m);
        for (idx, raw) in lines {
            let line_no = idx + 1;
            if raw.trim().is_empty() {
                continue;
            }
            if edges.len() == m {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("unexpected extra edge line, header declared m = {m}"),
                });
            }
            let (u, v) = parse_pair(raw, line_no, "edge")?;
            if u as usize >= n || v as usize >= n {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("vertex id out of range 0..{n} in edge ({u}, {v})"),
                });
            }
            if u == v {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("self-loop at vertex {u}"),
                });
            }
            edges.push((u, v));
            seen.push((u.min(v), u.max(v), line_no));
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: text.lines().count(),
                msg: format!("header declared m = {m} edges but found {}", edges.len()),
            });
        }
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::Parse {
                line: w[1].2,
                msg: format!("duplicate edge ({}, {})", w[1].0, w[1].1),
            });
        }
        let normalized: Vec<(VertexId, VertexId)> = seen.iter().map(|&(a, b, _)| (a, b)).collect();
        Ok(Self::from_sorted_unique(n, &normalized))
    }

    /// Canonical serialization: `n m` header, then edges sorted by
    /// `(min endpoint, max endpoint)`.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.m());
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn degree(&self, v: VertexId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v as VertexId)).max().unwrap_or(0)
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Index of `v` within `u`'s sorted neighbor list.
    pub fn neighbor_index(&self, u: VertexId, v: VertexId) -> Option<usize> {
        self.neighbors(u).binary_search(&v).ok()
    }

    /// Offset of `u`'s neighbor slice in the shared target array; together
    /// with [`neighbor_index`](Self::neighbor_index) this gives each directed
    /// edge a unique slot.
    pub(crate) fn csr_offset(&self, u: VertexId) -> usize {
        self.offsets[u as usize]
    }

    pub(crate) fn directed_edge_slots(&self) -> usize {
        self.targets.len()
    }

    /// Edges in canonical order (sorted by `(min, max)`).
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        (0..self.n as VertexId).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Partition of `0..n-1` into maximal connected sets, each sorted, the
    /// list ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<VertexId>> {
        let mut comp = vec![usize::MAX; self.n];
        let mut components = Vec::new();
        let mut queue = Vec::new();
        for start in 0..self.n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = components.len();
            comp[start] = id;
            queue.clear();
            queue.push(start as VertexId);
            let mut members = vec![start as VertexId];
            while let Some(v) = queue.pop() {
                for &w in self.neighbors(v) {
                    if comp[w as usize] == usize::MAX {
                        comp[w as usize] = id;
                        members.push(w);
                        queue.push(w);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }
        components
    }

    pub fn component_count(&self) -> usize {
        self.connected_components().len()
    }

    /// BFS distances from `src`, `usize::MAX` for unreachable vertices.
    pub fn bfs_distances(&self, src: VertexId) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        dist[src as usize] = 0;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(src);
        while let Some(v) = queue.pop_front() {
            for &w in self.neighbors(v) {
                if dist[w as usize] == usize::MAX {
                    dist[w as usize] = dist[v as usize] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

fn parse_pair(line: &str, line_no: usize, what: &str) -> Result<(VertexId, VertexId)> {
    let mut it = line.split_whitespace();
    let a = it.next().ok_or_else(|| Error::Parse {
        line: line_no,
        msg: format!("{what} line is empty"),
    })?;
    let b = it.next().ok_or_else(|| Error::Parse {
        line: line_no,
        msg: format!("{what} line has a single field, expected two"),
    })?;
    if it.next().is_some() {
        return Err(Error::Parse {
            line: line_no,
            msg: format!("{what} line has more than two fields"),
        });
    }
    let a: VertexId = a.parse().map_err(|_| Error::Parse {
        line: line_no,
        msg: format!("not an integer: {a:?}"),
    })?;
    let b: VertexId = b.parse().map_err(|_| Error::Parse {
        line: line_no,
        msg: format!("not an integer: {b:?}"),
    })?;
    Ok((a, b))
}

/// Optional maximum-degree guarantee of the bounded-degree model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeBound(pub u32);

impl DegreeBound {
    /// Checks that every vertex degree respects the bound.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        for v in 0..g.n() as VertexId {
            if g.degree(v) > self.0 as usize {
                return Err(Error::invalid(format!(
                    "vertex {v} has degree {} above the bound d = {}",
                    g.degree(v),
                    self.0
                )));
            }
        }
        Ok(())
    }
}

/// Relabels an arbitrary edge set onto compact ids `0..k-1` and returns the
/// graph together with the original id of each compact vertex.
pub fn graph_from_edge_set(edges: &[(VertexId, VertexId)]) -> Result<(Graph, Vec<VertexId>)> {
    let mut ids: Vec<VertexId> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    let index = |x: VertexId| ids.binary_search(&x).unwrap() as VertexId;
    let relabeled: Vec<(VertexId, VertexId)> =
        edges.iter().map(|&(u, v)| (index(u), index(v))).collect();
    let g = Graph::from_edges(ids.len(), relabeled)?;
    Ok((g, ids))
}

/// Convenience constructors used throughout the tests and generators.
pub mod build {
    use super::{Graph, VertexId};

    /// Path on `n` vertices: 0-1-2-...-(n-1).
    pub fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|v| (v as VertexId - 1, v as VertexId))).unwrap()
    }

    /// Cycle on `n >= 3` vertices.
    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3);
        let edges = (0..n).map(|v| (v as VertexId, ((v + 1) % n) as VertexId));
        Graph::from_edges(n, edges).unwrap()
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n as VertexId {
            for v in (u + 1)..n as VertexId {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, edges).unwrap()
    }

    /// Star with the center at vertex 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Graph {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v as VertexId))).unwrap()
    }

    /// Disjoint union: `b`'s vertex ids are shifted past `a`'s.
    pub fn disjoint_union(a: &Graph, b: &Graph) -> Graph {
        let shift = a.n() as VertexId;
        let edges: Vec<(VertexId, VertexId)> = a
            .edges()
            .chain(b.edges().map(|(u, v)| (u + shift, v + shift)))
            .collect();
        Graph::from_edges(a.n() + b.n(), edges).unwrap()
    }

    /// Complement of `g` on the same vertex set.
    pub fn complement(g: &Graph) -> Graph {
        let n = g.n();
        let mut edges = Vec::new();
        for u in 0..n as VertexId {
            for v in (u + 1)..n as VertexId {
                if !g.has_edge(u, v) {
                    edges.push((u, v));
                }
            }
        }
        Graph::from_edges(n, edges).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_triangle() {
        let g = Graph::parse_edge_list("3 3\n0 1\n1 2\n2 0\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.m(), 3);
        assert_eq!(g.neighbors(0), &[1, 2]);
        assert!(g.has_edge(2, 1));
    }

    #[test]
    fn parses_isolated_vertices() {
        let g = Graph::parse_edge_list("4 0\n").unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.m(), 0);
        assert_eq!(g.connected_components().len(), 4);
    }

    #[test]
    fn rejects_self_loop_with_line_number() {
        let err = Graph::parse_edge_list("2 1\n0 0\n").unwrap_err();
        match err {
            Error::Parse { line, msg } => {
                assert_eq!(line, 2);
                assert!(msg.contains("self-loop"));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn rejects_duplicate_edge() {
        let err = Graph::parse_edge_list("3 2\n0 1\n1 0\n").unwrap_err();
        match err {
            Error::Parse { line, msg } => {
                assert_eq!(line, 3);
                assert!(msg.contains("duplicate"));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn rejects_out_of_range_and_count_mismatch() {
        assert!(matches!(
            Graph::parse_edge_list("2 1\n0 5\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            Graph::parse_edge_list("3 2\n0 1\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn components_of_two_triangles() {
        let g = Graph::parse_edge_list("6 6\n0 1\n1 2\n2 0\n3 4\n4 5\n5 3\n").unwrap();
        let comps = g.connected_components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0], vec![0, 1, 2]);
        assert_eq!(comps[1], vec![3, 4, 5]);
    }

    #[test]
    fn single_component_for_triangle() {
        let g = build::cycle(3);
        assert_eq!(g.connected_components(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn degree_bound_validation() {
        let g = build::star(5);
        assert!(DegreeBound(5).validate(&g).is_ok());
        assert!(DegreeBound(4).validate(&g).is_err());
    }

    #[test]
    fn relabels_edge_sets() {
        let (g, ids) = graph_from_edge_set(&[(10, 20), (20, 30)]).unwrap();
        assert_eq!(ids, vec![10, 20, 30]);
        assert_eq!(g.n(), 3);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2) && !g.has_edge(0, 2));
    }

    fn arbitrary_graph() -> impl Strategy<Value = Graph> {
        (2usize..40).prop_flat_map(|n| {
            let pairs: Vec<(VertexId, VertexId)> = (0..n as VertexId)
                .flat_map(|u| ((u + 1)..n as VertexId).map(move |v| (u, v)))
                .collect();
            proptest::sample::subsequence(pairs.clone(), 0..=pairs.len())
                .prop_map(move |edges| Graph::from_edges(n, edges).unwrap())
        })
    }

    proptest! {
        #[test]
        fn serialize_parse_round_trip(g in arbitrary_graph()) {
            let text = g.to_edge_list();
            let back = Graph::parse_edge_list(&text).unwrap();
            prop_assert_eq!(&back, &g);
            prop_assert_eq!(back.to_edge_list(), text);
        }

        #[test]
        fn degree_sum_is_twice_edge_count(g in arbitrary_graph()) {
            let sum: usize = (0..g.n() as VertexId).map(|v| g.degree(v)).sum();
            prop_assert_eq!(sum, 2 * g.m());
        }

        #[test]
        fn components_partition_vertices(g in arbitrary_graph()) {
            let comps = g.connected_components();
            let mut all: Vec<VertexId> = comps.concat();
            all.sort_unstable();
            let expect: Vec<VertexId> = (0..g.n() as VertexId).collect();
            prop_assert_eq!(all, expect);
        }
    }
}
