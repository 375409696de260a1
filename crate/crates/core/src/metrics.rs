//! Per-iteration run records.

use std::time::Instant;

/// One measurement point of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub outer_iter: u64,
    pub inner_iter: Option<u64>,
    pub nodes_visited: u64,
    pub exploitability: f64,
    pub pop: (usize, usize),
    pub restricted_states: Option<usize>,
    pub wall_ms: u64,
}

/// Wall-clock source for records. Disabled clocks always read zero, which keeps
/// traces byte-identical across runs.
#[derive(Debug, Clone, Copy)]
pub struct Clock(Option<Instant>);

impl Clock {
    pub fn new(enabled: bool) -> Self {
        Clock(enabled.then(Instant::now))
    }

    pub fn elapsed_ms(&self) -> u64 {
        self.0.map_or(0, |t| t.elapsed().as_millis() as u64)
    }
}
