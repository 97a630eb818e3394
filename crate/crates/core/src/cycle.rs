//! Distributed cycle-freeness test.
//!
//! Three stages in one run: random edge sparsification (each edge dropped
//! with probability eps/2, decided by the lower-id endpoint), a prioritized
//! multi-BFS on the sparsified graph catching cycles in small-diameter
//! components, and a second prioritized BFS on the original graph, rooted by
//! the depths discovered in the first phase, catching the rest. A vertex
//! rejects when two distinct tuples with the same root reach it, which can
//! only happen on a cycle; in forests no duplicate ever arises, making the
//! accept side exact.
//!
//! The per-phase budgets are fixed up front, so the total round count is a
//! pure function of the parameters.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::sim::{
    count_width, id_width, run_keep, run_trials, Incoming, MessageWriter, Outbox, RejectionStats,
    RngStream, SimConfig, Transcript, Verdict, VertexAlgorithm, VertexContext,
};

/// Root identifier of a BFS: a plain vertex id in phase 1, a
/// `(depth, vertex)` pair after re-identification in phase 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RootId {
    Plain(VertexId),
    DepthTagged(u32, VertexId),
}

/// Total order on roots: phase 1 lets the lowest id win, phase 2 the
/// lexicographically highest `(depth, vertex)` pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BfsPriority {
    LowestId,
    HighestDepthThenId,
}

impl BfsPriority {
    pub fn better(&self, a: RootId, b: RootId) -> bool {
        match self {
            BfsPriority::LowestId => a < b,
            BfsPriority::HighestDepthThenId => a > b,
        }
    }
}

/// A stored BFS tuple: root, depth of this vertex in that BFS, parent it
/// arrived from (self for the seed).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BfsTuple {
    pub root: RootId,
    pub depth: u32,
    pub parent: VertexId,
}

/// Tuple list plus adoption state of one vertex during one BFS phase.
#[derive(Clone, Debug)]
struct PhaseState {
    priority: BfsPriority,
    list: Vec<BfsTuple>,
    seen_roots: HashMap<RootId, usize>,
    adopted_root: RootId,
    adopted_depth: u32,
    adopted_parent: Option<VertexId>,
    duplicate: bool,
}

/// Forwarding decision after a fold: the tuple to propagate and the parent
/// link to skip.
struct Adoption {
    root: RootId,
    next_depth: u32,
    exclude: Option<VertexId>,
}

impl PhaseState {
    fn seed(priority: BfsPriority, root: RootId, me: VertexId) -> Self {
        let mut seen_roots = HashMap::new();
        seen_roots.insert(root, 0);
        PhaseState {
            priority,
            list: vec![BfsTuple {
                root,
                depth: 0,
                parent: me,
            }],
            seen_roots,
            adopted_root: root,
            adopted_depth: 0,
            adopted_parent: None,
            duplicate: false,
        }
    }

    /// Appends arrivals to the list, flags duplicate roots, and re-adopts
    /// when a strictly better root shows up. Every vertex forwards a given
    /// root at most once, so any arrival whose root is already recorded is a
    /// distinct tuple.
    fn fold(&mut self, arrivals: &[BfsTuple]) -> Option<Adoption> {
        let mut changed = false;
        for &tuple in arrivals {
            if self.seen_roots.contains_key(&tuple.root) {
                self.duplicate = true;
            } else {
                self.seen_roots.insert(tuple.root, self.list.len());
            }
            self.list.push(tuple);
            if self.priority.better(tuple.root, self.adopted_root) {
                self.adopted_root = tuple.root;
                self.adopted_depth = tuple.depth;
                self.adopted_parent = Some(tuple.parent);
                changed = true;
            }
        }
        changed.then_some(Adoption {
            root: self.adopted_root,
            next_depth: self.adopted_depth + 1,
            exclude: self.adopted_parent,
        })
    }

    fn max_depth(&self) -> u32 {
        self.list.iter().map(|t| t.depth).max().unwrap_or(0)
    }
}

/// Test parameters. Phase lengths are `T = ceil(20 log n / eps)` and
/// `T/2 = ceil(10 log n / eps)`; the log base defaults to 2 and is a
/// configuration knob.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CycleParams {
    pub epsilon: f64,
    pub log_base: f64,
    pub phase1_rounds: u32,
    pub phase2_rounds: u32,
    pub deletion_probability: f64,
    pub force_no_deletion: bool,
}

impl CycleParams {
    pub fn new(n: usize, epsilon: f64) -> Result<Self> {
        Self::with_log_base(n, epsilon, 2.0)
    }

    pub fn with_log_base(n: usize, epsilon: f64, log_base: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::invalid("epsilon must lie in (0, 1]"));
        }
        if log_base <= 1.0 {
            return Err(Error::invalid("log base must exceed 1"));
        }
        if n < 2 {
            return Err(Error::invalid("need at least two vertices"));
        }
        let log_n = (n as f64).ln() / log_base.ln();
        let phase1_rounds = (20.0 * log_n / epsilon).ceil() as u32;
        let phase2_rounds = (10.0 * log_n / epsilon).ceil() as u32;
        debug_assert!(phase1_rounds >= 2);
        Ok(CycleParams {
            epsilon,
            log_base,
            phase1_rounds,
            phase2_rounds,
            deletion_probability: epsilon / 2.0,
            force_no_deletion: false,
        })
    }

    pub fn with_force_no_deletion(mut self, force: bool) -> Self {
        self.force_no_deletion = force;
        self
    }

    /// Sparsify handshake + seeded phase 1 + seeded phase 2, with the phase
    /// checks folded into the final round of each phase.
    pub fn total_rounds(&self) -> u64 {
        2 + u64::from(self.phase1_rounds) + u64::from(self.phase2_rounds)
    }
}

/// Centralized sparsification: each edge deleted independently with
/// probability `p`, edges drawn in canonical order. Returns the surviving
/// graph and the per-edge deletion mask (canonical edge index).
pub fn sparsify(g: &Graph, p: f64, rng: &mut impl Rng) -> (Graph, Vec<bool>) {
    assert!((0.0..=1.0).contains(&p));
    let mut deleted = Vec::with_capacity(g.m());
    let mut kept = Vec::new();
    for (u, v) in g.edges() {
        let drop = rng.random_bool(p);
        deleted.push(drop);
        if !drop {
            kept.push((u, v));
        }
    }
    let g_prime = Graph::from_edges(g.n(), kept).expect("subgraph of a simple graph");
    (g_prime, deleted)
}

struct CycleWire {
    id_bits: u32,
    depth1_bits: u32,
    depth2_bits: u32,
}

impl CycleWire {
    /// Depth values are bounded by the phase length and by the graph: a
    /// tuple's chain of forwarders has distinct vertices, so depth `n` is
    /// reachable only when a root's flood returns around a full cycle
    /// (needs n >= 3; otherwise depths stay below n).
    fn depth_cap(n: usize, phase_rounds: u32) -> u64 {
        let structural = if n >= 3 { n as u64 } else { n as u64 - 1 };
        u64::from(phase_rounds + 1).min(structural.max(1))
    }

    fn new(n: usize, params: &CycleParams, budget: u32) -> Result<Self> {
        let id_bits = id_width(n);
        let depth1_bits = count_width(Self::depth_cap(n, params.phase1_rounds));
        let depth2_bits = count_width(Self::depth_cap(n, params.phase2_rounds));
        let phase1 = id_bits + depth1_bits;
        let phase2 = depth1_bits + id_bits + depth2_bits;
        if phase1.max(phase2) > budget {
            return Err(Error::invalid(format!(
                "BFS tuple needs {} bits but the budget is {budget}",
                phase1.max(phase2)
            )));
        }
        Ok(CycleWire {
            id_bits,
            depth1_bits,
            depth2_bits,
        })
    }
}

enum CyclePhase {
    Sparsify,
    One(PhaseState),
    Two(PhaseState),
}

pub struct CycleVertex {
    id: VertexId,
    neighbors: Vec<VertexId>,
    params: CycleParams,
    wire: CycleWire,
    /// Which incident edges survived sparsification, aligned with
    /// `neighbors`. Complete after the handshake round.
    kept: Vec<bool>,
    phase: CyclePhase,
    phase1_list: Vec<BfsTuple>,
    phase1_duplicate: bool,
    reid_depth: u32,
    rejected: bool,
    done: bool,
    edges_deleted: u64,
}

impl CycleVertex {
    fn forward(&self, adoption: &Adoption, kept_only: bool, out: &mut Outbox) {
        for (idx, &w) in self.neighbors.iter().enumerate() {
            if kept_only && !self.kept[idx] {
                continue;
            }
            if adoption.exclude == Some(w) {
                continue;
            }
            let msg = match adoption.root {
                RootId::Plain(root) => MessageWriter::new()
                    .push(u64::from(root), self.wire.id_bits)
                    .push(u64::from(adoption.next_depth), self.wire.depth1_bits)
                    .finish(),
                RootId::DepthTagged(depth_tag, root) => MessageWriter::new()
                    .push(u64::from(depth_tag), self.wire.depth1_bits)
                    .push(u64::from(root), self.wire.id_bits)
                    .push(u64::from(adoption.next_depth), self.wire.depth2_bits)
                    .finish(),
            };
            out.send(w, msg);
        }
    }

    fn decode_arrivals(&self, inbox: &[Incoming], phase_two: bool) -> Vec<BfsTuple> {
        inbox
            .iter()
            .map(|inc| {
                let mut r = inc.msg.reader();
                if phase_two {
                    let depth_tag = r.take(self.wire.depth1_bits) as u32;
                    let root = r.take(self.wire.id_bits) as VertexId;
                    let depth = r.take(self.wire.depth2_bits) as u32;
                    BfsTuple {
                        root: RootId::DepthTagged(depth_tag, root),
                        depth,
                        parent: inc.from,
                    }
                } else {
                    let root = r.take(self.wire.id_bits) as VertexId;
                    let depth = r.take(self.wire.depth1_bits) as u32;
                    BfsTuple {
                        root: RootId::Plain(root),
                        depth,
                        parent: inc.from,
                    }
                }
            })
            .collect()
    }
}

impl VertexAlgorithm for CycleVertex {
    fn on_round(&mut self, round: u64, inbox: &[Incoming], rng: &mut RngStream, out: &mut Outbox) {
        let t1 = u64::from(self.params.phase1_rounds);
        let t2 = u64::from(self.params.phase2_rounds);
        match round {
            // Handshake: the lower endpoint of each edge decides deletion
            // and tells the other side about marked edges.
            1 => {
                for (idx, &w) in self.neighbors.iter().enumerate() {
                    if w > self.id && !self.params.force_no_deletion {
                        if rng.random_bool(self.params.deletion_probability) {
                            self.kept[idx] = false;
                            self.edges_deleted += 1;
                            out.send(w, MessageWriter::new().push(1, 1).finish());
                        }
                    }
                }
            }
            // Deletions learned; seed phase 1 over surviving edges.
            2 => {
                for inc in inbox {
                    let idx = self
                        .neighbors
                        .binary_search(&inc.from)
                        .expect("mark from a neighbor");
                    self.kept[idx] = false;
                }
                let state = PhaseState::seed(BfsPriority::LowestId, RootId::Plain(self.id), self.id);
                self.forward(
                    &Adoption {
                        root: RootId::Plain(self.id),
                        next_depth: 1,
                        exclude: None,
                    },
                    true,
                    out,
                );
                self.phase = CyclePhase::One(state);
            }
            r if r <= 2 + t1 => {
                let arrivals = self.decode_arrivals(inbox, false);
                let CyclePhase::One(state) = &mut self.phase else {
                    unreachable!("phase schedule is fixed");
                };
                let adoption = state.fold(&arrivals);
                if r < 2 + t1 {
                    if let Some(adoption) = adoption {
                        self.forward(&adoption, true, out);
                    }
                } else {
                    // Last phase-1 round: check, re-identify, seed phase 2 on
                    // the full graph.
                    if state.duplicate {
                        self.rejected = true;
                    }
                    self.reid_depth = state.max_depth();
                    self.phase1_duplicate = state.duplicate;
                    self.phase1_list = std::mem::take(&mut state.list);
                    let root = RootId::DepthTagged(self.reid_depth, self.id);
                    let state = PhaseState::seed(BfsPriority::HighestDepthThenId, root, self.id);
                    self.forward(
                        &Adoption {
                            root,
                            next_depth: 1,
                            exclude: None,
                        },
                        false,
                        out,
                    );
                    self.phase = CyclePhase::Two(state);
                }
            }
            r => {
                let arrivals = self.decode_arrivals(inbox, true);
                let CyclePhase::Two(state) = &mut self.phase else {
                    unreachable!("phase schedule is fixed");
                };
                let adoption = state.fold(&arrivals);
                if r < 2 + t1 + t2 {
                    if let Some(adoption) = adoption {
                        self.forward(&adoption, false, out);
                    }
                } else {
                    if state.duplicate {
                        self.rejected = true;
                    }
                    self.done = true;
                }
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
        sink.report("edges_deleted", self.edges_deleted);
        sink.report("reid_depth_max", u64::from(self.reid_depth));
    }
}

fn cycle_factory(params: CycleParams, n: usize, budget: u32) -> Result<impl Fn(&VertexContext) -> CycleVertex> {
    CycleWire::new(n, &params, budget)?;
    Ok(move |ctx: &VertexContext| CycleVertex {
        id: ctx.id,
        neighbors: ctx.neighbors.clone(),
        params,
        wire: CycleWire::new(ctx.n, &params, ctx.bandwidth_bits).expect("validated up front"),
        kept: vec![true; ctx.neighbors.len()],
        phase: CyclePhase::Sparsify,
        phase1_list: Vec::new(),
        phase1_duplicate: false,
        reid_depth: 0,
        rejected: false,
        done: false,
        edges_deleted: 0,
    })
}

/// A finished cycle-test run with everything needed for post-hoc analysis.
pub struct CycleRun {
    pub transcript: Transcript,
    /// The sparsified graph actually used in phase 1.
    pub g_prime: Graph,
    pub phase1_lists: Vec<Vec<BfsTuple>>,
    pub phase2_lists: Vec<Vec<BfsTuple>>,
}

pub fn run_cycle_test_keep(g: &Graph, params: &CycleParams, cfg: &SimConfig) -> Result<CycleRun> {
    let budget = cfg.validate(g.n())?;
    let factory = cycle_factory(*params, g.n(), budget)?;
    let cfg = cfg.with_max_rounds(params.total_rounds());
    let sim = run_keep(g, factory, &cfg)?;

    let mut kept_edges = Vec::new();
    for (u, v) in g.edges() {
        let idx = g.neighbor_index(u, v).expect("edge endpoints are neighbors");
        if sim.vertices[u as usize].kept[idx] {
            kept_edges.push((u, v));
        }
    }
    let g_prime = Graph::from_edges(g.n(), kept_edges).expect("subgraph of a simple graph");

    let run = CycleRun {
        transcript: sim.transcript,
        g_prime,
        phase1_lists: sim.vertices.iter().map(|v| v.phase1_list.clone()).collect(),
        phase2_lists: sim
            .vertices
            .iter()
            .map(|v| match &v.phase {
                CyclePhase::Two(state) => state.list.clone(),
                _ => Vec::new(),
            })
            .collect(),
    };

    // Every rejection must be justified by an actual cycle: the two parent
    // chains of a duplicated root close a walk that is not a forest.
    for v in 0..g.n() as VertexId {
        let vx = &sim.vertices[v as usize];
        if vx.phase1_duplicate {
            verify_duplicate_witness(&run.g_prime, &run.phase1_lists, v)?;
        }
        let phase2_dup = matches!(&vx.phase, CyclePhase::Two(s) if s.duplicate);
        if phase2_dup {
            verify_duplicate_witness(g, &run.phase2_lists, v)?;
        }
    }

    Ok(run)
}

pub fn run_cycle_test(g: &Graph, params: &CycleParams, cfg: &SimConfig) -> Result<Transcript> {
    run_cycle_test_keep(g, params, cfg).map(|r| r.transcript)
}

pub fn run_cycle_trials(
    g: &Graph,
    params: &CycleParams,
    cfg: &SimConfig,
    trials: u32,
) -> Result<RejectionStats> {
    let budget = cfg.validate(g.n())?;
    let factory = cycle_factory(*params, g.n(), budget)?;
    let cfg = cfg.with_max_rounds(params.total_rounds());
    run_trials(g, factory, &cfg, trials)
}

/// Checks that a duplicate arrival at `v` certifies a cycle: the parent
/// chains of two same-root tuples, extracted from the stored lists, form a
/// closed walk whose edge set is not a forest.
fn verify_duplicate_witness(
    graph: &Graph,
    lists: &[Vec<BfsTuple>],
    v: VertexId,
) -> Result<()> {
    let list = &lists[v as usize];
    let mut by_root: HashMap<RootId, Vec<&BfsTuple>> = HashMap::new();
    for t in list {
        by_root.entry(t.root).or_default().push(t);
    }
    let (root, pair) = by_root
        .iter()
        .find(|(_, ts)| ts.len() >= 2)
        .map(|(r, ts)| (*r, [ts[0], ts[1]]))
        .ok_or_else(|| {
            Error::ContractViolation(format!("vertex {v} rejected without a duplicated root"))
        })?;

    let chain = |start: &BfsTuple| -> Result<Vec<VertexId>> {
        let mut path = vec![v];
        let mut at = v;
        let mut cur = *start;
        while cur.depth > 0 {
            let p = cur.parent;
            if !graph.has_edge(at, p) {
                return Err(Error::ContractViolation(format!(
                    "parent chain of root {root:?} uses a missing edge ({at}, {p})"
                )));
            }
            let prev = lists[p as usize]
                .iter()
                .find(|t| t.root == cur.root && t.depth + 1 == cur.depth)
                .ok_or_else(|| {
                    Error::ContractViolation(format!(
                        "no predecessor tuple at vertex {p} for root {root:?}"
                    ))
                })?;
            path.push(p);
            at = p;
            cur = *prev;
        }
        Ok(path)
    };

    let a = chain(pair[0])?;
    let b = chain(pair[1])?;
    let mut edges: std::collections::HashSet<(VertexId, VertexId)> = std::collections::HashSet::new();
    let mut vertices: std::collections::HashSet<VertexId> = std::collections::HashSet::new();
    for path in [&a, &b] {
        vertices.extend(path.iter().copied());
        for w in path.windows(2) {
            edges.insert((w[0].min(w[1]), w[0].max(w[1])));
        }
    }
    if edges.len() >= vertices.len() {
        Ok(())
    } else {
        Err(Error::ContractViolation(format!(
            "duplicate at vertex {v} does not close a cycle"
        )))
    }
}

/// Standalone prioritized multi-BFS: every vertex seeds a BFS under its
/// given root id, runs `length` forwarding rounds, and the per-vertex tuple
/// lists are returned. Deterministic; the engine enforces the congestion
/// discipline.
pub fn prioritized_bfs(
    g: &Graph,
    length: u32,
    priority: BfsPriority,
    initial_ids: &[RootId],
) -> Result<Vec<Vec<BfsTuple>>> {
    if initial_ids.len() != g.n() {
        return Err(Error::invalid("one initial root id per vertex required"));
    }
    {
        let mut sorted = initial_ids.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("initial root ids must be distinct"));
        }
    }
    let cfg = SimConfig::new(0).with_max_rounds(u64::from(length) + 1);
    let budget = cfg.validate(g.n())?;
    let id_bits = id_width(g.n());
    let depth_bits = count_width(u64::from(length + 1).min(g.n() as u64));
    let tag_bits = count_width(
        initial_ids
            .iter()
            .map(|r| match r {
                RootId::Plain(_) => 0,
                RootId::DepthTagged(d, _) => u64::from(*d),
            })
            .max()
            .unwrap_or(0),
    );
    if id_bits + depth_bits + tag_bits > budget {
        return Err(Error::invalid("BFS tuple does not fit the bandwidth budget"));
    }

    struct BfsVertex {
        me: VertexId,
        neighbors: Vec<VertexId>,
        roots: std::sync::Arc<Vec<RootId>>,
        priority: BfsPriority,
        length: u32,
        id_bits: u32,
        depth_bits: u32,
        tag_bits: u32,
        state: Option<PhaseState>,
        done: bool,
    }

    impl BfsVertex {
        fn encode(&self, root: RootId, depth: u32) -> crate::sim::Message {
            let (tag, id) = match root {
                RootId::Plain(v) => (0u64, v),
                RootId::DepthTagged(t, v) => (u64::from(t), v),
            };
            MessageWriter::new()
                .push(tag, self.tag_bits)
                .push(u64::from(id), self.id_bits)
                .push(u64::from(depth), self.depth_bits)
                .finish()
        }

        fn send_all(&self, root: RootId, depth: u32, exclude: Option<VertexId>, out: &mut Outbox) {
            for &w in &self.neighbors {
                if exclude != Some(w) {
                    out.send(w, self.encode(root, depth));
                }
            }
        }
    }

    impl VertexAlgorithm for BfsVertex {
        fn on_round(&mut self, round: u64, inbox: &[Incoming], _: &mut RngStream, out: &mut Outbox) {
            if round == 1 {
                let root = self.roots[self.me as usize];
                self.state = Some(PhaseState::seed(self.priority, root, self.me));
                self.send_all(root, 1, None, out);
                if self.length == 0 {
                    self.done = true;
                }
                return;
            }
            let arrivals: Vec<BfsTuple> = inbox
                .iter()
                .map(|inc| {
                    let mut r = inc.msg.reader();
                    let tag = r.take(self.tag_bits) as u32;
                    let id = r.take(self.id_bits) as VertexId;
                    let depth = r.take(self.depth_bits) as u32;
                    let root = match self.roots[id as usize] {
                        RootId::Plain(_) => RootId::Plain(id),
                        RootId::DepthTagged(..) => RootId::DepthTagged(tag, id),
                    };
                    BfsTuple {
                        root,
                        depth,
                        parent: inc.from,
                    }
                })
                .collect();
            let state = self.state.as_mut().expect("seeded in round 1");
            let adoption = state.fold(&arrivals);
            if round < u64::from(self.length) + 1 {
                if let Some(adoption) = adoption {
                    self.send_all(adoption.root, adoption.next_depth, adoption.exclude, out);
                }
            } else {
                self.done = true;
            }
        }

        fn verdict(&self) -> Verdict {
            if self.done {
                Verdict::Accept
            } else {
                Verdict::Undecided
            }
        }

        fn halted(&self) -> bool {
            self.done
        }
    }

    let roots = std::sync::Arc::new(initial_ids.to_vec());
    let sim = run_keep(
        g,
        |ctx: &VertexContext| BfsVertex {
            me: ctx.id,
            neighbors: ctx.neighbors.clone(),
            roots: roots.clone(),
            priority,
            length,
            id_bits,
            depth_bits,
            tag_bits,
            state: None,
            done: false,
        },
        &cfg,
    )?;
    Ok(sim
        .vertices
        .into_iter()
        .map(|v| v.state.map(|s| s.list).unwrap_or_default())
        .collect())
}

/// Whether `v` lies on a closed walk in `g` of length at most `max_len`
/// that contains a simple cycle. A walk that crosses some edge exactly once
/// contains a simple cycle through it, so for every edge we route both legs
/// around it: `d(v,x) + 1 + d(y,v)` with distances avoiding the edge.
pub fn short_closed_walk_with_cycle(g: &Graph, v: VertexId, max_len: usize) -> bool {
    for (x, y) in g.edges() {
        let avoiding = bfs_avoiding_edge(g, v, (x, y));
        let dx = avoiding[x as usize];
        let dy = avoiding[y as usize];
        if dx != usize::MAX && dy != usize::MAX && dx + 1 + dy <= max_len {
            return true;
        }
    }
    false
}

fn bfs_avoiding_edge(g: &Graph, src: VertexId, skip: (VertexId, VertexId)) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    dist[src as usize] = 0;
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(src);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            let e = (u.min(w), u.max(w));
            if e == (skip.0.min(skip.1), skip.0.max(skip.1)) {
                continue;
            }
            if dist[w as usize] == usize::MAX {
                dist[w as usize] = dist[u as usize] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build;

    #[test]
    fn sparsify_extremes() {
        let g = build::complete(5);
        let mut rng = RngStream::for_run(1);
        let (same, mask) = sparsify(&g, 0.0, &mut rng);
        assert_eq!(same, g);
        assert!(mask.iter().all(|&d| !d));
        let (empty, mask) = sparsify(&g, 1.0, &mut rng);
        assert_eq!(empty.m(), 0);
        assert!(mask.iter().all(|&d| d));
    }

    #[test]
    fn sparsify_k4_matches_binomial_mean() {
        let g = build::complete(4);
        let seeds = 10_000u64;
        let total: u64 = (0..seeds)
            .map(|s| {
                let mut rng = RngStream::for_run(s);
                sparsify(&g, 0.5, &mut rng).0.m() as u64
            })
            .sum();
        let mean = total as f64 / seeds as f64;
        let sigma_mean = (6.0 * 0.25 / seeds as f64).sqrt();
        assert!(
            (mean - 3.0).abs() <= 3.0 * sigma_mean,
            "mean {mean} outside 3 +- {}",
            3.0 * sigma_mean
        );
    }

    #[test]
    fn bfs_on_path_propagates_lowest_root() {
        let g = build::path(3);
        let roots: Vec<RootId> = (0..3).map(RootId::Plain).collect();
        let lists = prioritized_bfs(&g, 2, BfsPriority::LowestId, &roots).unwrap();
        assert!(lists[2].contains(&BfsTuple {
            root: RootId::Plain(0),
            depth: 2,
            parent: 1
        }));
        // Trees never produce duplicate roots at any vertex.
        for list in &lists {
            let mut roots: Vec<RootId> = list.iter().map(|t| t.root).collect();
            roots.sort_unstable();
            roots.dedup();
            assert_eq!(roots.len(), list.len());
        }
    }

    #[test]
    fn bfs_on_c4_delivers_duplicate_to_far_vertex() {
        let g = build::cycle(4);
        let roots: Vec<RootId> = (0..4).map(RootId::Plain).collect();
        let lists = prioritized_bfs(&g, 2, BfsPriority::LowestId, &roots).unwrap();
        let dups: Vec<&BfsTuple> = lists[2]
            .iter()
            .filter(|t| t.root == RootId::Plain(0))
            .collect();
        assert_eq!(dups.len(), 2);
        let parents: Vec<VertexId> = dups.iter().map(|t| t.parent).collect();
        assert!(parents.contains(&1) && parents.contains(&3));
        assert!(dups.iter().all(|t| t.depth == 2));
    }

    #[test]
    fn bfs_on_star_reaches_all_leaves() {
        let g = build::star(5);
        let roots: Vec<RootId> = (0..6).map(RootId::Plain).collect();
        let lists = prioritized_bfs(&g, 1, BfsPriority::LowestId, &roots).unwrap();
        for leaf in 1..6 {
            assert!(lists[leaf].contains(&BfsTuple {
                root: RootId::Plain(0),
                depth: 1,
                parent: 0
            }));
        }
    }

    #[test]
    fn bfs_rejects_duplicate_roots() {
        let g = build::path(3);
        let roots = vec![RootId::Plain(0), RootId::Plain(0), RootId::Plain(2)];
        assert!(prioritized_bfs(&g, 1, BfsPriority::LowestId, &roots).is_err());
    }

    #[test]
    fn forests_always_accept() {
        for g in [build::path(20), build::star(12), crate::generators::random_tree(64, 5, 3)] {
            let params = CycleParams::new(g.n(), 0.5).unwrap();
            for seed in 0..5 {
                let t = run_cycle_test(&g, &params, &SimConfig::new(seed)).unwrap();
                assert!(!t.reject, "false rejection on a forest");
                assert_eq!(t.rounds_used, params.total_rounds());
                assert!(t.all_halted);
            }
        }
    }

    #[test]
    fn c4_with_deletion_disabled_rejects_in_phase_1() {
        let g = build::cycle(4);
        let params = CycleParams::new(4, 0.5).unwrap().with_force_no_deletion(true);
        let t = run_cycle_test(&g, &params, &SimConfig::new(9)).unwrap();
        assert!(t.reject);
        // Rejection lands at the phase-1 check round.
        assert_eq!(t.rounds_used, 2 + u64::from(params.phase1_rounds));
    }

    #[test]
    fn phase2_catches_cycle_missed_by_sparsified_phase1() {
        // Deletion probability forced to certainty: G' is empty, so phase 1
        // sees isolated vertices, and only the phase-2 BFS on G can reject.
        let g = build::cycle(6);
        let mut params = CycleParams::new(6, 1.0).unwrap();
        assert!((params.deletion_probability - 0.5).abs() < 1e-12);
        params.deletion_probability = 1.0;
        let t = run_cycle_test(&g, &params, &SimConfig::new(4)).unwrap();
        assert!(t.reject);
        assert!(t.rounds_used > 2 + u64::from(params.phase1_rounds));
    }

    #[test]
    fn round_budget_is_exact_for_accepting_runs() {
        let g = crate::generators::random_tree(200, 6, 8);
        let params = CycleParams::new(200, 0.25).unwrap();
        for seed in 0..3 {
            let t = run_cycle_test(&g, &params, &SimConfig::new(seed)).unwrap();
            assert_eq!(t.rounds_used, params.total_rounds());
        }
        // T and T/2 for n = 512, eps = 0.25 under log base 2.
        let p512 = CycleParams::new(512, 0.25).unwrap();
        assert_eq!(p512.phase1_rounds, 720);
        assert_eq!(p512.phase2_rounds, 360);
        assert_eq!(p512.total_rounds(), 1082);
    }

    #[test]
    fn closed_walk_detector_on_handcrafted_graph() {
        // C12: every vertex lies on the 12-cycle.
        let g = build::cycle(12);
        for v in 0..12 {
            assert!(short_closed_walk_with_cycle(&g, v, 12));
            assert!(!short_closed_walk_with_cycle(&g, v, 11));
        }
        // A tree has no closed walk containing a cycle.
        let t = build::path(8);
        for v in 0..8 {
            assert!(!short_closed_walk_with_cycle(&t, v, 100));
        }
        // Pendant vertex two hops from a triangle: walk = 2 + 3 + 2.
        let lollipop = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 2)]).unwrap();
        assert!(short_closed_walk_with_cycle(&lollipop, 0, 7));
        assert!(!short_closed_walk_with_cycle(&lollipop, 0, 6));
    }

    #[test]
    fn duplicate_witness_verification_runs_on_rejections() {
        // Many trials on a cyclic graph; every rejection passes the post-hoc
        // parent-chain verification inside run_cycle_test.
        let g = crate::generators::random_with_edge_count(64, 128, 5);
        let params = CycleParams::new(64, 0.25).unwrap();
        let mut rejected = 0;
        for seed in 0..20 {
            let t = run_cycle_test(&g, &params, &SimConfig::new(seed)).unwrap();
            if t.reject {
                rejected += 1;
            }
        }
        assert!(rejected > 0, "cyclic instance never rejected");
    }

    #[test]
    fn phase1_covers_small_components() {
        // In every component of G' with diameter <= T, the minimum-id BFS
        // reaches every vertex.
        let g = crate::generators::random_with_edge_count(48, 60, 2);
        let params = CycleParams::new(48, 0.5).unwrap();
        let run = run_cycle_test_keep(&g, &params, &SimConfig::new(3)).unwrap();
        if !run.transcript.reject {
            for comp in run.g_prime.connected_components() {
                let min_id = comp[0];
                for &v in &comp {
                    assert!(
                        run.phase1_lists[v as usize]
                            .iter()
                            .any(|t| t.root == RootId::Plain(min_id)),
                        "vertex {v} missed by BFS of {min_id}"
                    );
                }
            }
        }
    }
}
