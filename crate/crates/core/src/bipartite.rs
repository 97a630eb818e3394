//! Distributed bipartiteness test for bounded-degree graphs.
//!
//! Each outer iteration starts two lazy random walks from every vertex and
//! advances them in lockstep for `L` steps; a vertex rejects when walks from
//! the same origin reach it through both an even and an odd number of actual
//! moves, which certifies an odd closed walk. Congestion is kept in check by
//! a per-vertex cap `xi`: a vertex holding more walks than the cap freezes
//! them for the step (they move again once the load drops).
//!
//! The walk dynamics (`WalkState`, [`move_walks_once`]) are also exposed as
//! a standalone centralized operation, used to validate conservation,
//! occupancy, and congestion claims independently of the message-passing
//! realization.

use std::collections::HashSet;
use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DegreeBound, Graph, VertexId};
use crate::sim::{
    count_width, id_width, run, run_trials, Incoming, MessageWriter, Outbox, RejectionStats,
    RngStream, SimConfig, Transcript, Verdict, VertexAlgorithm, VertexContext,
};

pub const WALKS_PER_VERTEX: usize = 2;

/// One lazy walk in flight: the number of actual vertex changes so far and
/// the origin. Lazy self-loops do not increment `moves`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WalkToken {
    pub moves: u32,
    pub origin: VertexId,
}

impl WalkToken {
    pub fn parity_odd(&self) -> bool {
        self.moves % 2 == 1
    }
}

/// One lazy step from `v`: each neighbor with probability exactly `1/2d`,
/// stay put otherwise. Realized by a single uniform integer draw from
/// `0..2d`, so the probabilities are exact rationals. Valid for degrees up
/// to `2d` (where the stay probability reaches zero).
pub fn lazy_step(v: VertexId, g: &Graph, d: DegreeBound, rng: &mut impl Rng) -> Result<VertexId> {
    let deg = g.degree(v);
    let two_d = 2 * d.0 as usize;
    if deg > two_d {
        return Err(Error::invalid(format!(
            "degree {deg} of vertex {v} breaks the lazy-step bound 2d = {two_d}"
        )));
    }
    let r = rng.random_range(0..two_d);
    Ok(if r < deg { g.neighbors(v)[r] } else { v })
}

/// Exact lazy-walk transition probability from `u` to `v`.
pub fn lazy_transition_probability(g: &Graph, d: DegreeBound, u: VertexId, v: VertexId) -> f64 {
    let two_d = 2.0 * f64::from(d.0);
    if u == v {
        1.0 - g.degree(u) as f64 / two_d
    } else if g.has_edge(u, v) {
        1.0 / two_d
    } else {
        0.0
    }
}

/// Centralized walk state: the resident multiset `W_v` and the history
/// `H_v` per vertex, the latter deduplicated by `(parity, origin)` which is
/// all the violation test needs.
#[derive(Clone, Debug)]
pub struct WalkState {
    pub resident: Vec<Vec<WalkToken>>,
    pub history: Vec<HashSet<u64>>,
}

fn parity_key(moves: u32, origin: VertexId) -> u64 {
    (u64::from(origin) << 1) | u64::from(moves % 2)
}

impl WalkState {
    /// Seeds `k` copies of the zero-move token at every vertex.
    pub fn new(n: usize, k: usize) -> Self {
        let resident = (0..n as VertexId)
            .map(|v| vec![WalkToken { moves: 0, origin: v }; k])
            .collect();
        let history = (0..n as VertexId)
            .map(|v| HashSet::from([parity_key(0, v)]))
            .collect();
        WalkState { resident, history }
    }

    pub fn total_walks(&self) -> usize {
        self.resident.iter().map(Vec::len).sum()
    }

    pub fn max_occupancy(&self) -> usize {
        self.resident.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Violation at `v`: some origin reached `v` with both parities.
    pub fn has_violation(&self, v: VertexId) -> bool {
        self.history[v as usize]
            .iter()
            .any(|&key| self.history[v as usize].contains(&(key ^ 1)) && key & 1 == 0)
    }
}

/// Advances every resident token by one lazy step, vertex by vertex in id
/// order. Vertices holding more than `xi` walks freeze them for this call;
/// arrivals are appended after the sweep so no token moves twice. Walk count
/// is conserved exactly.
pub fn move_walks_once(
    state: &mut WalkState,
    xi: f64,
    g: &Graph,
    d: DegreeBound,
    rng: &mut impl Rng,
) -> Result<()> {
    let before = state.total_walks();
    let n = g.n();
    let mut arrivals: Vec<(VertexId, WalkToken)> = Vec::new();
    for v in 0..n as VertexId {
        let load = state.resident[v as usize].len();
        if load as f64 > xi {
            continue; // frozen this step
        }
        let mut kept = Vec::with_capacity(load);
        for token in state.resident[v as usize].drain(..) {
            let dest = lazy_step(v, g, d, rng)?;
            if dest == v {
                kept.push(token);
            } else {
                arrivals.push((
                    dest,
                    WalkToken {
                        moves: token.moves + 1,
                        origin: token.origin,
                    },
                ));
            }
        }
        state.resident[v as usize] = kept;
    }
    for (dest, token) in arrivals {
        state.history[dest as usize].insert(parity_key(token.moves, token.origin));
        state.resident[dest as usize].push(token);
    }
    debug_assert_eq!(state.total_walks(), before, "walks must be conserved");
    Ok(())
}

/// True iff some origin appears with both an even-move and an odd-move token.
pub fn detect_violation<'a, I>(tokens: I) -> bool
where
    I: IntoIterator<Item = &'a WalkToken>,
{
    let mut seen: HashSet<u64> = HashSet::new();
    for t in tokens {
        let key = parity_key(t.moves, t.origin);
        if seen.contains(&(key ^ 1)) {
            return true;
        }
        seen.insert(key);
    }
    false
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BipartiteMode {
    /// Parameter formulas as analyzed; round counts are astronomically
    /// impractical, provided for shape checks only.
    PaperFaithful,
    /// Walk length and iteration count supplied directly.
    Scaled,
}

/// Natural log is used for the congestion threshold, base 2 for the
/// polylog factor of the paper-faithful walk length.
pub const GAMMA_LOG_BASE: f64 = std::f64::consts::E;
pub const WALK_LENGTH_LOG_BASE: f64 = 2.0;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BipartiteParams {
    pub d: u32,
    pub epsilon: f64,
    /// L: lazy steps per outer iteration.
    pub walk_length: u64,
    /// eta: outer iterations.
    pub eta: u64,
    /// K: the analysis parameter the iteration count is derived from.
    pub k_analysis: u64,
    /// gamma = 3 (2 ln n + ln L).
    pub gamma: f64,
    /// xi = gamma + 2: per-vertex congestion cap.
    pub xi: f64,
    pub mode: BipartiteMode,
}

impl BipartiteParams {
    /// Scaled mode: L and eta supplied directly.
    pub fn scaled(n: usize, d: u32, epsilon: f64, walk_length: u64, eta: u64) -> Result<Self> {
        validate_common(n, d, epsilon)?;
        if walk_length == 0 || eta == 0 {
            return Err(Error::invalid("walk length and eta must be at least 1"));
        }
        let gamma = gamma_for(n, walk_length);
        Ok(BipartiteParams {
            d,
            epsilon,
            walk_length,
            eta,
            k_analysis: k_formula(n, epsilon, 1.0),
            gamma,
            xi: gamma + 2.0,
            mode: BipartiteMode::Scaled,
        })
    }

    /// Paper-faithful formulas with unit constants.
    pub fn paper_faithful(n: usize, d: u32, epsilon: f64) -> Result<Self> {
        Self::paper_faithful_with_constants(n, d, epsilon, 1.0, 1.0)
    }

    /// Paper-faithful formulas with explicit leading constants `c_l`, `c_k`.
    pub fn paper_faithful_with_constants(
        n: usize,
        d: u32,
        epsilon: f64,
        c_l: f64,
        c_k: f64,
    ) -> Result<Self> {
        validate_common(n, d, epsilon)?;
        let walk_length = walk_length_formula(n, epsilon, c_l);
        let k = k_formula(n, epsilon, c_k);
        let eta = (320.0 * (k as f64) * (k as f64) / (n as f64 * epsilon)).ceil() as u64;
        let gamma = gamma_for(n, walk_length);
        Ok(BipartiteParams {
            d,
            epsilon,
            walk_length,
            eta,
            k_analysis: k,
            gamma,
            xi: gamma + 2.0,
            mode: BipartiteMode::PaperFaithful,
        })
    }

    /// Rounds consumed by one move step: the congestion cap, since a vertex
    /// may need to push every resident walk across a single edge one message
    /// at a time.
    pub fn move_step_rounds(&self) -> u64 {
        self.xi.ceil() as u64
    }

    /// Rounds per outer iteration: L move steps plus the fold-and-check
    /// round.
    pub fn iteration_rounds(&self) -> u64 {
        self.walk_length * self.move_step_rounds() + 1
    }

    pub fn total_rounds(&self) -> Option<u64> {
        self.eta.checked_mul(self.iteration_rounds())
    }
}

fn validate_common(n: usize, d: u32, epsilon: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid("need at least two vertices"));
    }
    if d == 0 {
        return Err(Error::invalid("degree bound must be at least 1"));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::invalid("epsilon must lie in (0, 1]"));
    }
    Ok(())
}

/// gamma = 3 (2 ln n + ln L).
pub fn gamma_for(n: usize, walk_length: u64) -> f64 {
    3.0 * (2.0 * (n as f64).ln() + (walk_length as f64).ln())
}

/// L = ceil(c_l * eps^-8 * log2(n)^6).
pub fn walk_length_formula(n: usize, epsilon: f64, c_l: f64) -> u64 {
    (c_l * epsilon.powi(-8) * (n as f64).log2().powi(6)).ceil() as u64
}

/// K = ceil(c_k * eps^-4 * sqrt(n) * ln(n / eps)^(1/2)).
pub fn k_formula(n: usize, epsilon: f64, c_k: f64) -> u64 {
    (c_k * epsilon.powi(-4) * (n as f64).sqrt() * (n as f64 / epsilon).ln().sqrt()).ceil() as u64
}

const RUNNABLE_ROUND_CAP: u64 = 1 << 32;

struct WirePlan {
    moves_bits: u32,
    id_bits: u32,
}

impl WirePlan {
    fn new(n: usize, walk_length: u64, budget: u32) -> Result<Self> {
        let moves_bits = count_width(walk_length);
        let id_bits = id_width(n);
        if moves_bits + id_bits > budget {
            return Err(Error::invalid(format!(
                "walk token needs {} bits but the budget is {budget}; walk length too large for n",
                moves_bits + id_bits
            )));
        }
        Ok(WirePlan { moves_bits, id_bits })
    }
}

pub struct BipartiteVertex {
    id: VertexId,
    neighbors: Vec<VertexId>,
    params: BipartiteParams,
    moves_bits: u32,
    id_bits: u32,
    resident: Vec<WalkToken>,
    arrivals: Vec<WalkToken>,
    queues: Vec<VecDeque<WalkToken>>,
    parity_seen: HashSet<u64>,
    violated: bool,
    rejected: bool,
    done: bool,
    occupancy_max: u64,
}

impl BipartiteVertex {
    fn reset_iteration(&mut self) {
        self.resident.clear();
        self.resident.extend(std::iter::repeat_n(
            WalkToken {
                moves: 0,
                origin: self.id,
            },
            WALKS_PER_VERTEX,
        ));
        self.arrivals.clear();
        for q in &mut self.queues {
            q.clear();
        }
        self.parity_seen.clear();
        self.parity_seen.insert(parity_key(0, self.id));
        self.violated = false;
    }

    fn fold_arrivals(&mut self) {
        for token in self.arrivals.drain(..) {
            let key = parity_key(token.moves, token.origin);
            if self.parity_seen.contains(&(key ^ 1)) {
                self.violated = true;
            }
            self.parity_seen.insert(key);
            self.resident.push(token);
        }
    }

    fn drain_queues(&mut self, out: &mut Outbox) {
        for (idx, q) in self.queues.iter_mut().enumerate() {
            if let Some(token) = q.pop_front() {
                let msg = MessageWriter::new()
                    .push(u64::from(token.moves), self.moves_bits)
                    .push(u64::from(token.origin), self.id_bits)
                    .finish();
                out.send(self.neighbors[idx], msg);
            }
        }
    }
}

impl VertexAlgorithm for BipartiteVertex {
    fn on_round(&mut self, round: u64, inbox: &[Incoming], rng: &mut RngStream, out: &mut Outbox) {
        for inc in inbox {
            let mut r = inc.msg.reader();
            let moves = r.take(self.moves_bits) as u32;
            let origin = r.take(self.id_bits) as VertexId;
            self.arrivals.push(WalkToken { moves, origin });
        }

        let step_rounds = self.params.move_step_rounds();
        let iter_rounds = self.params.iteration_rounds();
        let pos = (round - 1) % iter_rounds;
        let iteration = (round - 1) / iter_rounds;

        if pos == iter_rounds - 1 {
            // Fold-and-check round: every token of this iteration has
            // settled (queues drain fully within each move step).
            self.fold_arrivals();
            if self.violated {
                self.rejected = true;
            }
            if iteration + 1 == self.params.eta {
                self.done = true;
            }
            return;
        }

        if pos % step_rounds == 0 {
            if pos == 0 {
                self.reset_iteration();
            }
            self.fold_arrivals();
            self.occupancy_max = self.occupancy_max.max(self.resident.len() as u64);
            if self.resident.len() as f64 <= self.params.xi {
                let mut kept = Vec::with_capacity(self.resident.len());
                for token in self.resident.drain(..) {
                    let deg = self.neighbors.len();
                    let two_d = 2 * self.params.d as usize;
                    let r = rng.random_range(0..two_d);
                    if r < deg {
                        self.queues[r].push_back(WalkToken {
                            moves: token.moves + 1,
                            origin: token.origin,
                        });
                    } else {
                        kept.push(token);
                    }
                }
                self.resident = kept;
            }
        }
        self.drain_queues(out);
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
        sink.report("occupancy_max", self.occupancy_max);
        sink.report("walks_resident_final", self.resident.len() as u64);
    }
}

fn bipartite_factory(
    params: BipartiteParams,
    wire: WirePlan,
) -> impl Fn(&VertexContext) -> BipartiteVertex {
    move |ctx: &VertexContext| BipartiteVertex {
        id: ctx.id,
        neighbors: ctx.neighbors.clone(),
        params,
        moves_bits: wire.moves_bits,
        id_bits: wire.id_bits,
        resident: Vec::new(),
        arrivals: Vec::new(),
        queues: vec![VecDeque::new(); ctx.neighbors.len()],
        parity_seen: HashSet::new(),
        violated: false,
        rejected: false,
        done: false,
        occupancy_max: 0,
    }
}

fn prepare(g: &Graph, params: &BipartiteParams, cfg: &SimConfig) -> Result<(WirePlan, SimConfig)> {
    DegreeBound(params.d).validate(g)?;
    let budget = cfg.validate(g.n())?;
    let wire = WirePlan::new(g.n(), params.walk_length, budget)?;
    let total = params
        .total_rounds()
        .filter(|&r| r <= RUNNABLE_ROUND_CAP)
        .ok_or_else(|| {
            Error::invalid(
                "round budget is not desk-runnable; paper-faithful parameters are for shape checks, use scaled mode",
            )
        })?;
    Ok((wire, cfg.with_max_rounds(total)))
}

pub fn run_bipartite_test(
    g: &Graph,
    params: &BipartiteParams,
    cfg: &SimConfig,
) -> Result<Transcript> {
    let (wire, cfg) = prepare(g, params, cfg)?;
    run(g, bipartite_factory(*params, wire), &cfg)
}

pub fn run_bipartite_trials(
    g: &Graph,
    params: &BipartiteParams,
    cfg: &SimConfig,
    trials: u32,
) -> Result<RejectionStats> {
    let (wire, cfg) = prepare(g, params, cfg)?;
    run_trials(g, bipartite_factory(*params, wire), &cfg, trials)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build;

    #[test]
    fn lazy_step_examples() {
        let mut rng = RngStream::for_run(5);
        // Isolated vertex stays put with probability 1.
        let g = Graph::from_edges(3, [(1, 2)]).unwrap();
        for _ in 0..50 {
            assert_eq!(lazy_step(0, &g, DegreeBound(3), &mut rng).unwrap(), 0);
        }
        // Degree 2d never stays.
        let star = build::star(4);
        for _ in 0..50 {
            assert_ne!(lazy_step(0, &star, DegreeBound(2), &mut rng).unwrap(), 0);
        }
        // Degree above 2d breaks the formula's domain.
        assert!(lazy_step(0, &star, DegreeBound(1), &mut rng).is_err());
    }

    #[test]
    fn lazy_transition_matrix_is_doubly_stochastic_on_c4() {
        let g = build::cycle(4);
        let d = DegreeBound(2);
        for u in 0..4 {
            let row: f64 = (0..4).map(|v| lazy_transition_probability(&g, d, u, v)).sum();
            let col: f64 = (0..4).map(|v| lazy_transition_probability(&g, d, v, u)).sum();
            assert!((row - 1.0).abs() < 1e-12);
            assert!((col - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sampler_matches_transition_probabilities() {
        let g = build::cycle(4);
        let d = DegreeBound(2);
        let mut rng = RngStream::for_run(17);
        let trials = 40_000;
        let mut counts = [0usize; 4];
        for _ in 0..trials {
            counts[lazy_step(0, &g, d, &mut rng).unwrap() as usize] += 1;
        }
        // Stay probability 1/2, each neighbor 1/4.
        let f = |c: usize| c as f64 / trials as f64;
        assert!((f(counts[0]) - 0.5).abs() < 0.02);
        assert!((f(counts[1]) - 0.25).abs() < 0.02);
        assert!((f(counts[3]) - 0.25).abs() < 0.02);
        assert_eq!(counts[2], 0);
    }

    #[test]
    fn walks_are_conserved_exactly() {
        let g = crate::generators::gnp(40, 0.1, 3);
        let d = DegreeBound(g.max_degree() as u32);
        for seed in 0..20 {
            let mut rng = RngStream::for_run(seed);
            let mut state = WalkState::new(g.n(), WALKS_PER_VERTEX);
            for _ in 0..50 {
                move_walks_once(&mut state, 1e18, &g, d, &mut rng).unwrap();
                assert_eq!(state.total_walks(), WALKS_PER_VERTEX * g.n());
            }
        }
    }

    #[test]
    fn frozen_vertices_hold_their_walks() {
        // All tokens piled on one vertex beyond the cap: nothing moves out.
        let g = build::cycle(4);
        let d = DegreeBound(2);
        let mut state = WalkState::new(4, 2);
        let pile: Vec<WalkToken> = state.resident.iter().flatten().copied().collect();
        state.resident = vec![Vec::new(), Vec::new(), Vec::new(), pile];
        let xi = 7.0; // 8 tokens > xi
        let mut rng = RngStream::for_run(1);
        move_walks_once(&mut state, xi, &g, d, &mut rng).unwrap();
        assert_eq!(state.resident[3].len(), 8);
        assert_eq!(state.total_walks(), 8);
    }

    #[test]
    fn isolated_token_never_gains_moves() {
        // Vertex 2 is isolated: its token lazily self-loops forever and the
        // move counter stays at zero.
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let d = DegreeBound(1);
        let mut state = WalkState::new(3, 1);
        let mut rng = RngStream::for_run(2);
        for _ in 0..30 {
            move_walks_once(&mut state, 100.0, &g, d, &mut rng).unwrap();
            assert_eq!(state.resident[2], vec![WalkToken { moves: 0, origin: 2 }]);
        }
    }

    #[test]
    fn violation_detection_cases() {
        let t = |moves, origin| WalkToken { moves, origin };
        assert!(!detect_violation([t(0, 4), t(2, 4)].iter()));
        assert!(detect_violation([t(0, 4), t(3, 4)].iter()));
        assert!(!detect_violation([t(1, 4), t(2, 7)].iter()));
    }

    #[test]
    fn token_parity_tracks_bipartition() {
        // On a bipartite graph a token's move parity always equals the color
        // difference between its origin and its position.
        let g = crate::generators::grid(5, 6);
        let colors = crate::oracle::two_coloring(&g).unwrap();
        let d = DegreeBound(4);
        for seed in 0..10 {
            let mut rng = RngStream::for_run(seed);
            let mut state = WalkState::new(g.n(), WALKS_PER_VERTEX);
            for _ in 0..40 {
                move_walks_once(&mut state, 1e18, &g, d, &mut rng).unwrap();
            }
            for v in 0..g.n() as VertexId {
                for token in &state.resident[v as usize] {
                    let expect_odd = colors[v as usize] != colors[token.origin as usize];
                    assert_eq!(token.parity_odd(), expect_odd);
                }
                assert!(!state.has_violation(v));
            }
        }
    }

    #[test]
    fn c8_occupancy_mean_stays_near_two() {
        let g = build::cycle(8);
        let d = DegreeBound(2);
        let mut sum = 0f64;
        let mut samples = 0u64;
        for seed in 0..50 {
            let mut rng = RngStream::for_run(seed);
            let mut state = WalkState::new(8, 2);
            for _ in 0..1000 {
                move_walks_once(&mut state, 1e18, &g, d, &mut rng).unwrap();
                sum += state.total_walks() as f64 / 8.0;
                samples += 1;
            }
        }
        let mean = sum / samples as f64;
        assert!((mean - 2.0).abs() < 1e-9, "conservation forces mean 2, got {mean}");
    }

    #[test]
    fn paper_faithful_parameter_shapes() {
        let p = BipartiteParams::paper_faithful(1024, 4, 0.5).unwrap();
        assert_eq!(p.walk_length, 256_000_000);
        assert_eq!(p.k_analysis, 1414);
        assert_eq!(p.eta, 1_249_623);
        assert!(p.xi > 2.0);
        assert!((p.gamma - 3.0 * (2.0 * (1024f64).ln() + (2.56e8f64).ln())).abs() < 1e-6);
        // Tightening epsilon blows the parameters up monotonically.
        let q = BipartiteParams::paper_faithful(1024, 4, 0.25).unwrap();
        assert!(q.walk_length > p.walk_length);
        assert!(q.eta > p.eta);
        // Not desk-runnable: the runner must refuse rather than spin forever.
        let g = crate::generators::bounded_bipartite(64, 4, 64, 1);
        let err = run_bipartite_test(&g, &BipartiteParams::paper_faithful(64, 4, 0.5).unwrap(), &SimConfig::new(0));
        assert!(err.is_err());
    }

    #[test]
    fn bipartite_graphs_always_accept() {
        for (g, d) in [
            (build::cycle(8), 2),
            (build::path(12), 2),
            (crate::generators::grid(4, 4), 4),
        ] {
            let params = BipartiteParams::scaled(g.n(), d, 0.5, 8, 3).unwrap();
            for seed in 0..5 {
                let t = run_bipartite_test(&g, &params, &SimConfig::new(seed)).unwrap();
                assert!(!t.reject, "false rejection on a bipartite graph");
                assert_eq!(t.rounds_used, params.total_rounds().unwrap());
                assert_eq!(
                    t.metrics["walks_resident_final"],
                    (WALKS_PER_VERTEX * g.n()) as u64
                );
            }
        }
    }

    #[test]
    fn c5_rejects_quickly_in_scaled_mode() {
        let g = build::cycle(5);
        let params = BipartiteParams::scaled(5, 2, 0.5, 20, 50).unwrap();
        let stats = run_bipartite_trials(&g, &params, &SimConfig::new(11), 100).unwrap();
        assert!(
            stats.reject_fraction >= 0.9,
            "odd cycle detection too weak: {}",
            stats.reject_fraction
        );
    }

    #[test]
    fn degree_bound_is_enforced() {
        let g = build::star(5);
        let params = BipartiteParams::scaled(6, 2, 0.5, 4, 2).unwrap();
        assert!(run_bipartite_test(&g, &params, &SimConfig::new(0)).is_err());
    }

    #[test]
    fn pair_detection_dominates_scaled_k_walk_detection() {
        // Monte Carlo check of the pairwise-union bound relating two-walk
        // detection to K-walk detection on C9: p(2) >= 2 p(K) / (K (K-1)).
        let g = build::cycle(9);
        let d = DegreeBound(2);
        let walk_len = 18;
        let trials = 4000;
        let estimate = |k: usize, seed_base: u64| -> f64 {
            let mut hits = 0u32;
            for trial in 0..trials {
                let mut rng = RngStream::for_run(seed_base + trial as u64);
                let mut seen: HashSet<u64> = HashSet::new();
                let mut violated = false;
                for _ in 0..k {
                    let mut pos = 0 as VertexId;
                    let mut moves = 0u32;
                    let record = |pos: VertexId, moves: u32, seen: &mut HashSet<u64>| {
                        let key = (u64::from(pos) << 1) | u64::from(moves % 2);
                        if seen.contains(&(key ^ 1)) {
                            return true;
                        }
                        seen.insert(key);
                        false
                    };
                    violated |= record(pos, moves, &mut seen);
                    for _ in 0..walk_len {
                        let next = lazy_step(pos, &g, d, &mut rng).unwrap();
                        if next != pos {
                            pos = next;
                            moves += 1;
                        }
                        violated |= record(pos, moves, &mut seen);
                    }
                }
                if violated {
                    hits += 1;
                }
            }
            f64::from(hits) / trials as f64
        };
        let p2 = estimate(2, 10_000);
        let pk = estimate(6, 20_000);
        let bound = 2.0 * pk / (6.0 * 5.0);
        let sigma = (p2 * (1.0 - p2) / trials as f64).sqrt()
            + (pk * (1.0 - pk) / trials as f64).sqrt() / 15.0;
        assert!(
            p2 >= bound - 3.0 * sigma,
            "p2 = {p2} below union bound {bound}"
        );
    }
}
