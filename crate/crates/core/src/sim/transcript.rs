//! Full record of a simulation run.

use std::collections::BTreeMap;

use serde::Serialize;

/// Final output of one vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
    Undecided,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerdictCounts {
    pub accept: usize,
    pub reject: usize,
    pub undecided: usize,
}

impl VerdictCounts {
    pub fn record(&mut self, v: Verdict) {
        match v {
            Verdict::Accept => self.accept += 1,
            Verdict::Reject => self.reject += 1,
            Verdict::Undecided => self.undecided += 1,
        }
    }
}

/// Record of one run: round count, congestion statistics, verdicts, and
/// algorithm-reported counters. A transcript is a pure function of
/// `(graph, algorithm parameters, config)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Transcript {
    pub rounds_used: u64,
    pub reject: bool,
    pub per_round_messages: Vec<u64>,
    pub max_message_bits: u32,
    pub verdicts: VerdictCounts,
    pub bandwidth_bits: u32,
    pub all_halted: bool,
    /// Counters reported by vertex automata after the run. Keys ending in
    /// `_max` aggregate by maximum over vertices, all others by sum.
    pub metrics: BTreeMap<String, u64>,
}

impl Transcript {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serialization cannot fail")
    }

    pub fn total_messages(&self) -> u64 {
        self.per_round_messages.iter().sum()
    }
}

/// Sink for per-vertex counters, aggregated into [`Transcript::metrics`].
#[derive(Default)]
pub struct MetricSink {
    values: BTreeMap<&'static str, u64>,
}

impl MetricSink {
    pub fn report(&mut self, key: &'static str, value: u64) {
        let slot = self.values.entry(key).or_insert(0);
        if key.ends_with("_max") {
            *slot = (*slot).max(value);
        } else {
            *slot += value;
        }
    }

    pub(crate) fn into_map(self) -> BTreeMap<String, u64> {
        self.values
            .into_iter()
            .map(|(k, v)| (k.to_owned(), v))
            .collect()
    }
}

/// Aggregate statistics over repeated seeded runs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RejectionStats {
    pub trials: u32,
    pub rejecting_trials: u32,
    pub reject_fraction: f64,
    pub mean_rounds: f64,
    /// Peak number of messages delivered in any single round of any trial.
    pub max_congestion_observed: u64,
}
