use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

/// Shared, monotone count of history-node visits made by one run.
///
/// Clones share the same count. Traversals that only report (and must not consume
/// budget) pass a fresh counter instead of the run's.
#[derive(Debug, Clone, Default)]
pub struct NodeCounter(Arc<AtomicU64>);

impl NodeCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn starting_at(value: u64) -> Self {
        NodeCounter(Arc::new(AtomicU64::new(value)))
    }

    #[inline]
    pub fn add(&self, visits: u64) {
        self.0.fetch_add(visits, Ordering::Relaxed);
    }

    #[inline]
    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }
}

/// Iteration and node limits for a solver run.
#[derive(Debug, Clone, Default)]
pub struct SolverBudget {
    pub max_iterations: Option<u64>,
    pub max_nodes: Option<u64>,
    pub counter: NodeCounter,
}

impl SolverBudget {
    pub fn iterations(n: u64) -> Self {
        SolverBudget {
            max_iterations: Some(n),
            ..Default::default()
        }
    }

    pub fn nodes(n: u64) -> Self {
        SolverBudget {
            max_nodes: Some(n),
            ..Default::default()
        }
    }

    pub fn with_counter(mut self, counter: NodeCounter) -> Self {
        self.counter = counter;
        self
    }

    pub fn nodes_exhausted(&self) -> bool {
        self.max_nodes.is_some_and(|m| self.counter.get() >= m)
    }

    pub fn iterations_exhausted(&self, done: u64) -> bool {
        self.max_iterations.is_some_and(|m| done >= m)
    }

    pub fn exhausted(&self, done: u64) -> bool {
        self.nodes_exhausted() || self.iterations_exhausted(done)
    }
}
