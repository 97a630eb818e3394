//! Round-synchronous execution engine with CONGEST semantics.
//!
//! Per round, every vertex may send at most one bounded-size message per
//! incident edge; messages emitted in round `r` sit in inboxes at round
//! `r+1`. Execution is sequential in vertex-id order, which is the reference
//! semantics any parallel evaluation would have to reproduce; transcripts
//! are a pure function of `(graph, algorithm parameters, config)`.

use crate::error::{Error, FaultKind, Result};
use crate::graph::{Graph, VertexId};
use crate::sim::message::{Message, MAX_MESSAGE_BITS};
use crate::sim::rng::RngStream;
use crate::sim::transcript::{
    MetricSink, RejectionStats, Transcript, Verdict, VerdictCounts,
};

/// Engine configuration.
///
/// The per-edge budget is `B = ceil(c * log2 n)` bits with `c` the bandwidth
/// multiplier; the default `c = 4` fits one `(id, counter, id)` triple, the
/// largest payload any algorithm here sends.
#[derive(Clone, Copy, Debug)]
pub struct SimConfig {
    pub bandwidth_multiplier: f64,
    pub max_rounds: u64,
    pub seed: u64,
    /// Stop the run at the end of a round in which some vertex rejects.
    /// The triangle tester turns this off to keep its round count exact.
    pub halt_on_global_reject: bool,
}

impl SimConfig {
    pub fn new(seed: u64) -> Self {
        SimConfig {
            bandwidth_multiplier: 4.0,
            max_rounds: 10_000_000,
            seed,
            halt_on_global_reject: true,
        }
    }

    pub fn with_max_rounds(mut self, max_rounds: u64) -> Self {
        self.max_rounds = max_rounds;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_halt_on_global_reject(mut self, halt: bool) -> Self {
        self.halt_on_global_reject = halt;
        self
    }

    pub fn validate(&self, n: usize) -> Result<u32> {
        if self.bandwidth_multiplier <= 0.0 || !self.bandwidth_multiplier.is_finite() {
            return Err(Error::invalid("bandwidth multiplier must be positive"));
        }
        if self.max_rounds == 0 {
            return Err(Error::invalid("max_rounds must be at least 1"));
        }
        if n == 0 {
            return Err(Error::invalid("cannot simulate an empty graph"));
        }
        let budget = bandwidth_bits(n, self.bandwidth_multiplier);
        if budget > MAX_MESSAGE_BITS {
            return Err(Error::invalid(format!(
                "bandwidth budget {budget} exceeds the {MAX_MESSAGE_BITS}-bit payload cap"
            )));
        }
        Ok(budget)
    }
}

/// `B = ceil(c * log2 n)`, at least 1.
pub fn bandwidth_bits(n: usize, c: f64) -> u32 {
    ((n.max(2) as f64).log2() * c).ceil().max(1.0) as u32
}

/// What a vertex knows at start-up: its id, the network size, its sorted
/// neighbor ids, and the message budget.
#[derive(Clone, Debug)]
pub struct VertexContext {
    pub id: VertexId,
    pub n: usize,
    pub neighbors: Vec<VertexId>,
    pub bandwidth_bits: u32,
}

/// A message delivered this round, tagged with its sender.
#[derive(Clone, Copy, Debug)]
pub struct Incoming {
    pub from: VertexId,
    pub msg: Message,
}

/// Per-round send buffer. At most one message per neighbor; violations are
/// reported as simulation faults when the engine drains the buffer.
#[derive(Default)]
pub struct Outbox {
    entries: Vec<(VertexId, Message)>,
}

impl Outbox {
    pub fn send(&mut self, to: VertexId, msg: Message) {
        self.entries.push((to, msg));
    }
}

/// Per-vertex automaton contract.
///
/// `on_round` is called once per round with the messages sent to this vertex
/// in the previous round, in ascending sender order. A vertex signals local
/// termination through `halted`; the run stops once every vertex has halted.
/// Verdicts must be reject-sticky.
pub trait VertexAlgorithm {
    fn on_round(&mut self, round: u64, inbox: &[Incoming], rng: &mut RngStream, out: &mut Outbox);
    fn verdict(&self) -> Verdict;
    fn halted(&self) -> bool;
    fn report_metrics(&self, _sink: &mut MetricSink) {}
}

/// A finished run with the final automata, for post-hoc inspection.
pub struct SimRun<A> {
    pub transcript: Transcript,
    pub vertices: Vec<A>,
}

/// Runs the algorithm and returns transcript plus final vertex states.
pub fn run_keep<A, F>(g: &Graph, factory: F, cfg: &SimConfig) -> Result<SimRun<A>>
where
    A: VertexAlgorithm,
    F: Fn(&VertexContext) -> A,
{
    let budget = cfg.validate(g.n())?;
    let n = g.n();

    let mut vertices: Vec<A> = Vec::with_capacity(n);
    let mut rngs: Vec<RngStream> = Vec::with_capacity(n);
    for v in 0..n as VertexId {
        let ctx = VertexContext {
            id: v,
            n,
            neighbors: g.neighbors(v).to_vec(),
            bandwidth_bits: budget,
        };
        vertices.push(factory(&ctx));
        rngs.push(RngStream::for_vertex(cfg.seed, v));
    }

    // One slot per directed edge, stamped with the round of the last send,
    // to detect two messages on the same edge in one round.
    let mut edge_stamp: Vec<u64> = vec![0; g.directed_edge_slots()];

    let mut pending: Vec<(VertexId, VertexId, Message)> = Vec::new(); // (to, from, msg)
    let mut delivered: Vec<Incoming> = Vec::new();
    let mut inbox_start: Vec<usize> = vec![0; n + 1];
    let mut outbox = Outbox::default();
    let mut was_rejected = vec![false; n];

    let mut per_round_messages: Vec<u64> = Vec::new();
    let mut max_message_bits: u32 = 0;
    let mut rounds_used: u64 = 0;
    let mut all_halted = false;

    for round in 1..=cfg.max_rounds {
        rounds_used = round;

        // Deliver: counting sort of last round's sends by receiver, senders
        // staying in ascending order within each inbox.
        inbox_start.iter_mut().for_each(|s| *s = 0);
        for &(to, _, _) in &pending {
            inbox_start[to as usize + 1] += 1;
        }
        for v in 0..n {
            inbox_start[v + 1] += inbox_start[v];
        }
        delivered.clear();
        delivered.resize(
            pending.len(),
            Incoming {
                from: 0,
                msg: Message::default(),
            },
        );
        let mut cursor = inbox_start.clone();
        for &(to, from, msg) in &pending {
            delivered[cursor[to as usize]] = Incoming { from, msg };
            cursor[to as usize] += 1;
        }
        pending.clear();

        let mut sent_this_round: u64 = 0;
        let mut any_reject = false;
        let mut halted_count = 0usize;

        for v in 0..n {
            let vid = v as VertexId;
            if vertices[v].halted() {
                halted_count += 1;
                if vertices[v].verdict() == Verdict::Reject {
                    any_reject = true;
                }
                continue;
            }
            let inbox = &delivered[inbox_start[v]..inbox_start[v + 1]];
            vertices[v].on_round(round, inbox, &mut rngs[v], &mut outbox);

            for (to, msg) in outbox.entries.drain(..) {
                let idx = g.neighbor_index(vid, to).ok_or(Error::SimFault {
                    round,
                    vertex: vid,
                    kind: FaultKind::NotANeighbor { to },
                })?;
                if msg.bit_len() > budget {
                    return Err(Error::SimFault {
                        round,
                        vertex: vid,
                        kind: FaultKind::BandwidthExceeded {
                            bits: msg.bit_len(),
                            budget,
                        },
                    });
                }
                let slot = g.csr_offset(vid) + idx;
                if edge_stamp[slot] == round {
                    return Err(Error::SimFault {
                        round,
                        vertex: vid,
                        kind: FaultKind::DuplicateMessage { to },
                    });
                }
                edge_stamp[slot] = round;
                max_message_bits = max_message_bits.max(msg.bit_len());
                sent_this_round += 1;
                pending.push((to, vid, msg));
            }

            let verdict = vertices[v].verdict();
            if was_rejected[v] && verdict != Verdict::Reject {
                return Err(Error::SimFault {
                    round,
                    vertex: vid,
                    kind: FaultKind::VerdictRegression,
                });
            }
            if verdict == Verdict::Reject {
                was_rejected[v] = true;
                any_reject = true;
            }
            if vertices[v].halted() {
                halted_count += 1;
            }
        }

        per_round_messages.push(sent_this_round);

        if halted_count == n {
            all_halted = true;
            break;
        }
        if any_reject && cfg.halt_on_global_reject {
            break;
        }
    }

    let mut verdicts = VerdictCounts::default();
    let mut reject = false;
    for vtx in &vertices {
        let v = vtx.verdict();
        verdicts.record(v);
        reject |= v == Verdict::Reject;
    }

    let mut sink = MetricSink::default();
    for vtx in &vertices {
        vtx.report_metrics(&mut sink);
    }

    Ok(SimRun {
        transcript: Transcript {
            rounds_used,
            reject,
            per_round_messages,
            max_message_bits,
            verdicts,
            bandwidth_bits: budget,
            all_halted,
            metrics: sink.into_map(),
        },
        vertices,
    })
}

/// Runs the algorithm and returns only the transcript.
pub fn run<A, F>(g: &Graph, factory: F, cfg: &SimConfig) -> Result<Transcript>
where
    A: VertexAlgorithm,
    F: Fn(&VertexContext) -> A,
{
    run_keep(g, factory, cfg).map(|r| r.transcript)
}

/// Monte Carlo harness: runs `trials` independent trials with seeds
/// `seed+0 .. seed+trials-1` and aggregates rejection statistics.
pub fn run_trials<A, F>(g: &Graph, factory: F, cfg: &SimConfig, trials: u32) -> Result<RejectionStats>
where
    A: VertexAlgorithm,
    F: Fn(&VertexContext) -> A,
{
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let mut rejecting = 0u32;
    let mut total_rounds = 0u64;
    let mut max_congestion = 0u64;
    for t in 0..trials {
        let trial_cfg = cfg.with_seed(cfg.seed.wrapping_add(u64::from(t)));
        let transcript = run(g, &factory, &trial_cfg).map_err(|e| Error::Trial {
            trial: t,
            source: Box::new(e),
        })?;
        if transcript.reject {
            rejecting += 1;
        }
        total_rounds += transcript.rounds_used;
        max_congestion =
            max_congestion.max(transcript.per_round_messages.iter().copied().max().unwrap_or(0));
    }
    Ok(RejectionStats {
        trials,
        rejecting_trials: rejecting,
        reject_fraction: f64::from(rejecting) / f64::from(trials),
        mean_rounds: total_rounds as f64 / f64::from(trials),
        max_congestion_observed: max_congestion,
    })
}

impl Default for Message {
    fn default() -> Self {
        crate::sim::message::MessageWriter::new().finish()
    }
}
