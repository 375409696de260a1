//! Size of XDO's final restricted game relative to the full game.

use serde::{Deserialize, Serialize};
use xdo_core::xdo::{xdo_solve, XdoResult};
use xdo_core::{NodeCounter, Tree};

use crate::config::ExperimentConfig;
use crate::error::BenchError;
use crate::run::build_tree;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeReport {
    pub game: String,
    pub full_histories: usize,
    pub restricted_histories: usize,
    /// Restricted histories over full histories.
    pub ratio: f64,
    /// Per player, decision infostates of the restricted game over those of the full game.
    pub infostate_ratio: [f64; 2],
    pub outer_iterations: u64,
    pub terminated: bool,
    pub final_exploitability: f64,
}

pub fn size_report(game: &str, tree: &Tree, result: &XdoResult) -> SizeReport {
    let full = tree.counts();
    let restricted = &result.restricted_counts;
    SizeReport {
        game: game.to_string(),
        full_histories: full.histories,
        restricted_histories: restricted.histories,
        ratio: restricted.histories as f64 / full.histories as f64,
        infostate_ratio: [0, 1]
            .map(|p| restricted.infostates[p] as f64 / full.infostates[p].max(1) as f64),
        outer_iterations: result.outer_iterations,
        terminated: result.terminated,
        final_exploitability: result.final_exploitability,
    }
}

/// Runs XDO as configured by `config` (its first seed; XDO is deterministic) and
/// reports the final restricted game's size.
pub fn run_size_report(config: &ExperimentConfig) -> Result<SizeReport, BenchError> {
    config.validate()?;
    let (game, tree) = build_tree(config)?;
    let result = xdo_solve(&tree, &config.xdo_config(), &NodeCounter::new())?;
    Ok(size_report(&game.to_string(), &tree, &result))
}
