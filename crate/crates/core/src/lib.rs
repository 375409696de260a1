//! Tabular solvers for two-player zero-sum extensive-form games.
//!
//! Games implement [`Game`] and are compiled once into a flat [`Tree`]; best responses,
//! evaluation and every solver operate on that tree. [`xdo`] implements the
//! extensive-form double oracle, [`psro`] its normal-form counterpart, and
//! [`solvers`] the tabular baselines and matrix-game meta-solvers.

pub mod counter;
mod error;
pub mod eval;
pub mod game_core;
pub mod games;
pub mod metrics;
pub mod policy;
pub mod psro;
pub mod solvers;
pub mod tree;
pub mod xdo;

pub use counter::{NodeCounter, SolverBudget};
pub use error::{EvalError, MatrixError, SolveError};
pub use eval::{BestResponse, ValueReport};
pub use game_core::{ActionId, Game, GameError, InfostateKey, NodeKind, PlayerId};
pub use policy::{BehaviorPolicy, PolicyProfile, PurePolicy, PureStrategy, TabularPolicy};
pub use tree::{StateCounts, Tree, DEFAULT_MAX_NODES};
