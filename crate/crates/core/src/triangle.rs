//! Distributed triangle-freeness test.
//!
//! Per iteration every vertex with two neighbors picks an ordered pair
//! `(w1, w2)` of distinct neighbors uniformly and asks `w1` whether it is
//! adjacent to `w2`; a positive answer pins a triangle. Iterations take two
//! rounds (query, answer) and the round count is exact: a rejecting vertex
//! keeps answering queries, and the engine is run without the global
//! halt-on-reject so that `rounds_used = 2 * iterations` always.
//!
//! Rejection is recorded on both sides: the answering vertex knows all three
//! edges the moment its lookup succeeds, and the asker rejects when the
//! "yes" bit arrives one round later.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::sim::{
    id_width, run, run_trials, Incoming, MessageWriter, Outbox, RejectionStats,
    RngStream, SimConfig, Transcript, Verdict, VertexAlgorithm, VertexContext,
};

/// Test parameters; `iterations = ceil(32 / epsilon^2)`.
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct TriangleParams {
    pub epsilon: f64,
    pub iterations: u32,
}

impl TriangleParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::invalid("epsilon must lie in (0, 1]"));
        }
        let iterations = (32.0 / (epsilon * epsilon)).ceil() as u32;
        debug_assert!(iterations >= 32);
        Ok(TriangleParams { epsilon, iterations })
    }

    pub fn rounds(&self) -> u64 {
        2 * u64::from(self.iterations)
    }
}

/// Heavy/light edge diagnostics at threshold `b = 2 * sqrt(m / epsilon)`:
/// a vertex is heavy when its degree reaches `b`, an edge when both its
/// endpoints are heavy.
#[derive(Clone, Debug)]
pub struct TriangleDiagnostics {
    pub b: f64,
    pub heavy_vertices: Vec<VertexId>,
    pub heavy_edge_count: u64,
    pub light_triangle_edge_count: u64,
}

/// Computes the diagnostics and checks the heavy-edge bound
/// `|H| <= epsilon * m / 2`, which holds for every graph.
pub fn classify_edges(g: &Graph, epsilon: f64) -> Result<TriangleDiagnostics> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::invalid("epsilon must lie in (0, 1]"));
    }
    if g.m() == 0 {
        return Err(Error::invalid("edge classification needs at least one edge"));
    }
    let m = g.m() as f64;
    let b = 2.0 * (m / epsilon).sqrt();
    let heavy: Vec<bool> = (0..g.n() as VertexId)
        .map(|v| g.degree(v) as f64 >= b)
        .collect();
    let heavy_vertices: Vec<VertexId> = (0..g.n() as VertexId)
        .filter(|&v| heavy[v as usize])
        .collect();
    let mut heavy_edge_count = 0u64;
    let mut light_triangle_edge_count = 0u64;
    for (u, v) in g.edges() {
        if heavy[u as usize] && heavy[v as usize] {
            heavy_edge_count += 1;
        } else if in_triangle(g, u, v) {
            light_triangle_edge_count += 1;
        }
    }
    assert!(
        heavy_edge_count as f64 <= epsilon * m / 2.0,
        "heavy-edge bound violated: {heavy_edge_count} > {}",
        epsilon * m / 2.0
    );
    Ok(TriangleDiagnostics {
        b,
        heavy_vertices,
        heavy_edge_count,
        light_triangle_edge_count,
    })
}

fn in_triangle(g: &Graph, u: VertexId, v: VertexId) -> bool {
    let (mut a, mut b) = (g.neighbors(u).iter(), g.neighbors(v).iter());
    let (mut x, mut y) = (a.next(), b.next());
    while let (Some(&p), Some(&q)) = (x, y) {
        match p.cmp(&q) {
            std::cmp::Ordering::Less => x = a.next(),
            std::cmp::Ordering::Greater => y = b.next(),
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

pub struct TriangleVertex {
    neighbors: Vec<VertexId>,
    id_bits: u32,
    iterations: u32,
    rejected: bool,
    done: bool,
    queries_sent: u64,
}

impl VertexAlgorithm for TriangleVertex {
    fn on_round(&mut self, round: u64, inbox: &[Incoming], rng: &mut RngStream, out: &mut Outbox) {
        if round % 2 == 1 {
            // Query round: fold last iteration's answers, then ask.
            for inc in inbox {
                if inc.msg.reader().take(1) == 1 {
                    self.rejected = true;
                }
            }
            let iteration = round.div_ceil(2);
            if iteration <= u64::from(self.iterations) && self.neighbors.len() >= 2 {
                let deg = self.neighbors.len();
                let i = rng.random_range(0..deg);
                let mut j = rng.random_range(0..deg - 1);
                if j >= i {
                    j += 1;
                }
                let (w1, w2) = (self.neighbors[i], self.neighbors[j]);
                out.send(
                    w1,
                    MessageWriter::new().push(u64::from(w2), self.id_bits).finish(),
                );
                self.queries_sent += 1;
            }
        } else {
            // Answer round: every query gets a yes/no on its own edge.
            for inc in inbox {
                let w = inc.msg.reader().take(self.id_bits) as VertexId;
                let yes = self.neighbors.binary_search(&w).is_ok();
                if yes {
                    self.rejected = true;
                }
                out.send(
                    inc.from,
                    MessageWriter::new().push(u64::from(yes), 1).finish(),
                );
            }
            if round == 2 * u64::from(self.iterations) {
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
        sink.report("queries_sent", self.queries_sent);
    }
}

pub fn triangle_factory(params: TriangleParams) -> impl Fn(&VertexContext) -> TriangleVertex {
    move |ctx: &VertexContext| TriangleVertex {
        neighbors: ctx.neighbors.clone(),
        id_bits: id_width(ctx.n),
        iterations: params.iterations,
        rejected: false,
        done: false,
        queries_sent: 0,
    }
}

fn triangle_config(params: &TriangleParams, cfg: &SimConfig) -> SimConfig {
    cfg.with_halt_on_global_reject(false)
        .with_max_rounds(params.rounds())
}

pub fn run_triangle_test(g: &Graph, params: &TriangleParams, cfg: &SimConfig) -> Result<Transcript> {
    run(g, triangle_factory(*params), &triangle_config(params, cfg))
}

pub fn run_triangle_trials(
    g: &Graph,
    params: &TriangleParams,
    cfg: &SimConfig,
    trials: u32,
) -> Result<RejectionStats> {
    run_trials(
        g,
        triangle_factory(*params),
        &triangle_config(params, cfg),
        trials,
    )
}
