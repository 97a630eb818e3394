//! Distributed emulation of dense-model vertex-sampling tests.
//!
//! Every vertex picks itself with probability `5q/n`; picked vertices flood
//! the edges among picked vertices through the picked subgraph for `10q`
//! hops, pipelined one edge per message, and reject when the edge set they
//! collected restricted to their own picked component is a witness against
//! the property. Two independent outer iterations push the failure
//! probability of the sampling step below one third.
//!
//! The property plugs in as a [`WitnessChecker`]. Only non-disjointed
//! properties are admissible (every witness must owe its witness-hood to a
//! connected component); a fixture-based self-test refuses checkers that
//! break this or the monotonicity contract before any run starts.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{build, graph_from_edge_set, Graph, VertexId};
use crate::oracle::two_coloring;
use crate::sim::{
    id_width, run_keep, Incoming, MessageWriter, Outbox, RejectionStats, RngStream, SimConfig,
    Transcript, Verdict, VertexAlgorithm, VertexContext,
};

/// Emulation of a q-query vertex-sampling test.
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct EmulationParams {
    pub q: u32,
    pub pick_probability: f64,
    pub inner_iterations: u32,
    pub edge_cap: usize,
    pub outer_iterations: u32,
}

/// Fixed constant of the quadratic round budget: total rounds never exceed
/// `ROUND_BUDGET_C * q^2`.
pub const ROUND_BUDGET_C: u64 = 202;

impl EmulationParams {
    pub fn new(q: u32, n: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::invalid("q must be at least 1"));
        }
        if n == 0 {
            return Err(Error::invalid("need at least one vertex"));
        }
        Ok(EmulationParams {
            q,
            pick_probability: (5.0 * f64::from(q) / n as f64).min(1.0),
            inner_iterations: 10 * q,
            edge_cap: 100 * q as usize * q as usize,
            outer_iterations: 2,
        })
    }

    /// Rounds allotted to one inner iteration: enough to pipeline one hop of
    /// flooding (unflushed queues carry over).
    pub fn inner_round_budget(&self) -> u64 {
        u64::from(10 * self.q)
    }

    /// Notify round plus the pipelined inner iterations.
    pub fn outer_round_len(&self) -> u64 {
        1 + u64::from(self.inner_iterations) * self.inner_round_budget()
    }

    pub fn total_rounds(&self) -> u64 {
        u64::from(self.outer_iterations) * self.outer_round_len()
    }
}

/// Decides whether a collected subgraph rules the property out entirely:
/// `is_witness` must be true exactly when the subgraph is not an induced
/// subgraph of any graph satisfying the property, and must be monotone
/// under taking supergraphs.
pub trait WitnessChecker: Send + Sync {
    fn name(&self) -> String;
    fn is_witness(&self, subgraph: &Graph) -> Result<bool>;
}

/// Witness when some connected component is not k-colorable.
pub struct KColorability {
    pub k: u32,
}

impl WitnessChecker for KColorability {
    fn name(&self) -> String {
        format!("k-colorability:{}", self.k)
    }

    fn is_witness(&self, subgraph: &Graph) -> Result<bool> {
        witness_k_colorability(subgraph, self.k)
    }
}

/// True iff some connected component of the subgraph is not k-colorable.
/// k = 1 reduces to edge presence and k = 2 to a bipartiteness check; the
/// 25-vertex exhaustive budget applies to k >= 3.
pub fn witness_k_colorability(subgraph: &Graph, k: u32) -> Result<bool> {
    match k {
        0 => Err(Error::invalid("k must be at least 1")),
        1 => Ok(subgraph.m() > 0),
        2 => Ok(two_coloring(subgraph).is_err()),
        _ => {
            for comp in subgraph.connected_components() {
                if comp.len() > 25 {
                    return Err(Error::BudgetExceeded(format!(
                        "k-colorability witness check limited to 25-vertex components, got {}",
                        comp.len()
                    )));
                }
                let edges: Vec<(VertexId, VertexId)> = subgraph
                    .edges()
                    .filter(|&(u, _)| comp.binary_search(&u).is_ok())
                    .collect();
                if edges.is_empty() {
                    continue;
                }
                let (comp_graph, _) = graph_from_edge_set(&edges)?;
                if crate::oracle::k_coloring(&comp_graph, k)?.is_none() {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}

/// Witness when some component contains an induced odd cycle of length at
/// least 5 or the complement of one, found by exhausting vertex subsets;
/// budgeted at 14 vertices.
pub struct PerfectGraph;

impl WitnessChecker for PerfectGraph {
    fn name(&self) -> String {
        "perfect".into()
    }

    fn is_witness(&self, subgraph: &Graph) -> Result<bool> {
        witness_perfect_graph(subgraph)
    }
}

pub fn witness_perfect_graph(subgraph: &Graph) -> Result<bool> {
    let n = subgraph.n();
    if n > 14 {
        return Err(Error::BudgetExceeded(format!(
            "perfect-graph witness check limited to 14 vertices, got {n}"
        )));
    }
    let mut subset: Vec<VertexId> = Vec::new();
    let mut size = 5;
    while size <= n {
        if search_odd_structure(subgraph, &mut subset, 0, size)? {
            return Ok(true);
        }
        size += 2;
    }
    Ok(false)
}

fn search_odd_structure(
    g: &Graph,
    subset: &mut Vec<VertexId>,
    next: VertexId,
    size: usize,
) -> Result<bool> {
    if subset.len() == size {
        return Ok(induced_is_cycle(g, subset, false) || induced_is_cycle(g, subset, true));
    }
    let remaining = size - subset.len();
    for v in next..g.n() as VertexId {
        if (g.n() as VertexId - v) < remaining as VertexId {
            break;
        }
        subset.push(v);
        if search_odd_structure(g, subset, v + 1, size)? {
            subset.pop();
            return Ok(true);
        }
        subset.pop();
    }
    Ok(false)
}

/// Does `subset` induce a cycle in `g` (or in its complement)? Exactly two
/// induced neighbors within the subset for every member, plus connectivity.
fn induced_is_cycle(g: &Graph, subset: &[VertexId], complement: bool) -> bool {
    let k = subset.len();
    let adj = |a: VertexId, b: VertexId| g.has_edge(a, b) != complement;
    let mut degs = vec![0usize; k];
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); k];
    for i in 0..k {
        for j in (i + 1)..k {
            if adj(subset[i], subset[j]) {
                degs[i] += 1;
                degs[j] += 1;
                nbrs[i].push(j);
                nbrs[j].push(i);
            }
        }
    }
    if degs.iter().any(|&d| d != 2) {
        return false;
    }
    // Degree-2 everywhere: a cycle iff connected.
    let mut seen = vec![false; k];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(i) = stack.pop() {
        for &j in &nbrs[i] {
            if !seen[j] {
                seen[j] = true;
                count += 1;
                stack.push(j);
            }
        }
    }
    count == k
}

/// Builds the registered checker for a CLI-style name: `k-colorability:<k>`
/// or `perfect`.
pub fn checker_by_name(name: &str) -> Result<Arc<dyn WitnessChecker>> {
    if let Some(k) = name.strip_prefix("k-colorability:") {
        let k: u32 = k
            .parse()
            .map_err(|_| Error::invalid(format!("bad color count in checker {name:?}")))?;
        if k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        return Ok(Arc::new(KColorability { k }));
    }
    if name == "perfect" {
        return Ok(Arc::new(PerfectGraph));
    }
    Err(Error::invalid(format!("unknown checker {name:?}")))
}

/// Probes the checker on small fixtures before a run: the disjoint union of
/// two non-witnesses must not be a witness (non-disjointedness), and
/// extending a witness by an isolated edge must keep it a witness
/// (monotonicity).
pub fn checker_self_test(checker: &dyn WitnessChecker) -> Result<()> {
    let fixtures: Vec<Graph> = vec![
        build::path(2),
        build::path(3),
        build::cycle(3),
        build::cycle(4),
        build::cycle(5),
        build::complete(4),
    ];
    let flags: Vec<bool> = fixtures
        .iter()
        .map(|g| checker.is_witness(g))
        .collect::<Result<_>>()?;
    for (i, a) in fixtures.iter().enumerate() {
        for (j, b) in fixtures.iter().enumerate() {
            if flags[i] || flags[j] {
                continue;
            }
            let union = build::disjoint_union(a, b);
            if checker.is_witness(&union)? {
                return Err(Error::ContractViolation(format!(
                    "checker {:?} flags a disjoint union of non-witnesses (fixtures {i} + {j}); \
                     the property is disjointed and cannot be emulated",
                    checker.name()
                )));
            }
        }
    }
    for (i, g) in fixtures.iter().enumerate() {
        if flags[i] {
            let extended = build::disjoint_union(g, &build::path(2));
            if !checker.is_witness(&extended)? {
                return Err(Error::ContractViolation(format!(
                    "checker {:?} is not monotone (fixture {i} stops being a witness under extension)",
                    checker.name()
                )));
            }
        }
    }
    Ok(())
}

type EdgeKey = (VertexId, VertexId);

fn edge_key(a: VertexId, b: VertexId) -> EdgeKey {
    (a.min(b), a.max(b))
}

pub struct EmulationVertex {
    id: VertexId,
    neighbors: Vec<VertexId>,
    params: EmulationParams,
    checker: Arc<dyn WitnessChecker>,
    id_bits: u32,
    picked: bool,
    picked_links: Vec<usize>,
    known: HashSet<EdgeKey>,
    log: Vec<EdgeKey>,
    cursors: Vec<usize>,
    recv_buffer: Vec<EdgeKey>,
    abstaining: bool,
    rejected: bool,
    reject_snapshot: Option<Vec<EdgeKey>>,
    done: bool,
    checker_error: Option<Error>,
    picks: [u64; 2],
    edges_sent: u64,
}

impl EmulationVertex {
    fn reset_outer(&mut self) {
        self.picked = false;
        self.picked_links.clear();
        self.known.clear();
        self.log.clear();
        self.cursors.iter_mut().for_each(|c| *c = 0);
        self.recv_buffer.clear();
        self.abstaining = false;
    }

    /// Folds received edges into the known set; newly discovered edges join
    /// the propagation log. Exceeding the cap stops this vertex's sends for
    /// the rest of the outer iteration.
    fn fold_received(&mut self) {
        let buffered = std::mem::take(&mut self.recv_buffer);
        for e in buffered {
            if self.known.insert(e) {
                self.log.push(e);
            }
        }
        if self.known.len() > self.params.edge_cap {
            self.abstaining = true;
        }
    }

    fn drain(&mut self, out: &mut Outbox) {
        if !self.picked || self.abstaining {
            return;
        }
        for &link in &self.picked_links {
            let cursor = self.cursors[link];
            if cursor < self.log.len() {
                let (a, b) = self.log[cursor];
                self.cursors[link] += 1;
                self.edges_sent += 1;
                out.send(
                    self.neighbors[link],
                    MessageWriter::new()
                        .push(u64::from(a), self.id_bits)
                        .push(u64::from(b), self.id_bits)
                        .finish(),
                );
            }
        }
    }

    /// The collected edge set restricted to this vertex's connected
    /// component of picked vertices.
    fn component_edges(&self) -> Vec<EdgeKey> {
        let mut adj: HashMap<VertexId, Vec<VertexId>> = HashMap::new();
        for &(a, b) in &self.known {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        let mut seen: HashSet<VertexId> = HashSet::from([self.id]);
        let mut stack = vec![self.id];
        while let Some(v) = stack.pop() {
            if let Some(nbrs) = adj.get(&v) {
                for &w in nbrs {
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
        }
        self.known
            .iter()
            .copied()
            .filter(|&(a, _)| seen.contains(&a))
            .collect()
    }

    fn witness_check(&mut self) {
        if !self.picked || self.abstaining || self.checker_error.is_some() {
            return;
        }
        self.fold_received();
        let edges = self.component_edges();
        let verdict = if edges.is_empty() {
            // A lone picked vertex induces the one-vertex graph.
            let single = Graph::from_edges(1, std::iter::empty()).expect("one vertex");
            self.checker.is_witness(&single)
        } else {
            match graph_from_edge_set(&edges) {
                Ok((g, _)) => self.checker.is_witness(&g),
                Err(e) => Err(e),
            }
        };
        match verdict {
            Ok(true) => {
                self.rejected = true;
                self.reject_snapshot = Some(edges);
            }
            Ok(false) => {}
            Err(e) => self.checker_error = Some(e),
        }
    }
}

impl VertexAlgorithm for EmulationVertex {
    fn on_round(&mut self, round: u64, inbox: &[Incoming], rng: &mut RngStream, out: &mut Outbox) {
        let outer_len = self.params.outer_round_len();
        let outer = (round - 1) / outer_len;
        let pos = (round - 1) % outer_len;

        if pos == 0 {
            // Stale in-flight edges from the previous outer iteration are
            // dropped with the reset.
            self.reset_outer();
            self.picked = rng.random_bool(self.params.pick_probability);
            if self.picked {
                self.picks[outer as usize] = 1;
                for &w in &self.neighbors {
                    out.send(w, MessageWriter::new().push(1, 1).finish());
                }
            }
            return;
        }

        if pos == 1 {
            // Notifications landed: learn which incident edges join the
            // picked subgraph and seed the flood with them.
            for inc in inbox {
                let link = self
                    .neighbors
                    .binary_search(&inc.from)
                    .expect("notification from a neighbor");
                self.picked_links.push(link);
            }
            if self.picked {
                for &link in &self.picked_links {
                    let e = edge_key(self.id, self.neighbors[link]);
                    if self.known.insert(e) {
                        self.log.push(e);
                    }
                }
                if self.known.len() > self.params.edge_cap {
                    self.abstaining = true;
                }
            }
        } else {
            for inc in inbox {
                let mut r = inc.msg.reader();
                let a = r.take(self.id_bits) as VertexId;
                let b = r.take(self.id_bits) as VertexId;
                self.recv_buffer.push(edge_key(a, b));
            }
            let inner_pos = (pos - 1) % self.inner_budget();
            if inner_pos == 0 {
                self.fold_received();
            }
        }

        self.drain(out);

        if pos == outer_len - 1 {
            self.witness_check();
            if outer + 1 == u64::from(self.params.outer_iterations) {
                self.done = true;
            }
        }
    }

    fn verdict(&self) -> Verdict {
        if self.rejected {
            Verdict::Reject
        } else if self.done {
            Verdict::Accept
        } else {
            Verdict::Undecided
        }
    }

    fn halted(&self) -> bool {
        self.done
    }

    fn report_metrics(&self, sink: &mut crate::sim::MetricSink) {
        sink.report("picked_outer_0", self.picks[0]);
        sink.report("picked_outer_1", self.picks[1]);
        sink.report("edges_sent", self.edges_sent);
    }
}

impl EmulationVertex {
    fn inner_budget(&self) -> u64 {
        self.params.inner_round_budget()
    }
}

fn emulation_factory(
    params: EmulationParams,
    checker: Arc<dyn WitnessChecker>,
) -> impl Fn(&VertexContext) -> EmulationVertex {
    move |ctx: &VertexContext| EmulationVertex {
        id: ctx.id,
        neighbors: ctx.neighbors.clone(),
        params,
        checker: checker.clone(),
        id_bits: id_width(ctx.n),
        picked: false,
        picked_links: Vec::new(),
        known: HashSet::new(),
        log: Vec::new(),
        cursors: vec![0; ctx.neighbors.len()],
        recv_buffer: Vec::new(),
        abstaining: false,
        rejected: false,
        reject_snapshot: None,
        done: false,
        checker_error: None,
        picks: [0, 0],
        edges_sent: 0,
    }
}

/// Runs the emulation: checker contract self-test, the simulation itself,
/// then a post-hoc re-verification that every rejecting vertex's collected
/// edge set really is a witness.
pub fn emulate(
    g: &Graph,
    checker: Arc<dyn WitnessChecker>,
    params: &EmulationParams,
    cfg: &SimConfig,
) -> Result<Transcript> {
    checker_self_test(checker.as_ref())?;
    emulate_unchecked(g, checker, params, cfg)
}

fn emulate_unchecked(
    g: &Graph,
    checker: Arc<dyn WitnessChecker>,
    params: &EmulationParams,
    cfg: &SimConfig,
) -> Result<Transcript> {
    let cfg = cfg.with_max_rounds(params.total_rounds());
    let sim = run_keep(g, emulation_factory(*params, checker.clone()), &cfg)?;
    for v in &sim.vertices {
        if let Some(e) = &v.checker_error {
            return Err(Error::BudgetExceeded(format!(
                "checker failed at vertex {}: {e}",
                v.id
            )));
        }
        if let Some(snapshot) = &v.reject_snapshot {
            let witness = if snapshot.is_empty() {
                checker.is_witness(&Graph::from_edges(1, std::iter::empty())?)?
            } else {
                let (sub, _) = graph_from_edge_set(snapshot)?;
                checker.is_witness(&sub)?
            };
            if !witness {
                return Err(Error::ContractViolation(format!(
                    "vertex {} rejected on a non-witness edge set",
                    v.id
                )));
            }
        }
    }
    Ok(sim.transcript)
}

/// Seeded trial harness over [`emulate`]; the self-test runs once.
pub fn emulate_trials(
    g: &Graph,
    checker: Arc<dyn WitnessChecker>,
    params: &EmulationParams,
    cfg: &SimConfig,
    trials: u32,
) -> Result<RejectionStats> {
    checker_self_test(checker.as_ref())?;
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let mut rejecting = 0u32;
    let mut total_rounds = 0u64;
    let mut max_congestion = 0u64;
    for t in 0..trials {
        let trial_cfg = cfg.with_seed(cfg.seed.wrapping_add(u64::from(t)));
        let transcript =
            emulate_unchecked(g, checker.clone(), params, &trial_cfg).map_err(|e| Error::Trial {
                trial: t,
                source: Box::new(e),
            })?;
        if transcript.reject {
            rejecting += 1;
        }
        total_rounds += transcript.rounds_used;
        max_congestion = max_congestion.max(
            transcript
                .per_round_messages
                .iter()
                .copied()
                .max()
                .unwrap_or(0),
        );
    }
    Ok(RejectionStats {
        trials,
        rejecting_trials: rejecting,
        reject_fraction: f64::from(rejecting) / f64::from(trials),
        mean_rounds: total_rounds as f64 / f64::from(trials),
        max_congestion_observed: max_congestion,
    })
}
