//! The CONGEST simulation engine: bit-budgeted messages, per-vertex RNG
//! streams, the round loop, transcripts, and the seeded trial harness.

mod engine;
mod message;
mod rng;
mod transcript;

pub use engine::{
    bandwidth_bits, run, run_keep, run_trials, Incoming, Outbox, SimConfig, SimRun,
    VertexAlgorithm, VertexContext,
};
pub use message::{count_width, id_width, Message, MessageReader, MessageWriter, MAX_MESSAGE_BITS};
pub use rng::RngStream;
pub use transcript::{MetricSink, RejectionStats, Transcript, Verdict, VerdictCounts};
