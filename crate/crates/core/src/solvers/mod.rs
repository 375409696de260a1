//! Tabular equilibrium solvers over a compiled [`Tree`](crate::tree::Tree), plus
//! matrix-game meta-solvers.

mod cfr;
mod lp;
mod matrix;
mod mccfr;
mod xfp;

pub use cfr::{cfr, Cfr, CfrConfig, RegretTable};
pub use lp::{LinearProgram, LpOutcome, Relation};
pub use matrix::{
    solve_matrix_fp, solve_matrix_lp, solve_matrix_lp_central, MatrixGame, MatrixSolution,
};
pub use mccfr::{mccfr_external, ExternalSampling};
pub use xfp::{xfp, Xfp};

use crate::counter::SolverBudget;
use crate::policy::BehaviorPolicy;

/// A solver that can be advanced one iteration at a time.
pub trait IterativeSolver {
    fn step(&mut self);
    fn iterations(&self) -> u64;
    /// The normalized average strategy profile.
    fn average(&self) -> [BehaviorPolicy; 2];
}

/// Average profile returned by a budgeted run.
#[derive(Debug, Clone)]
pub struct SolverOutput {
    pub profile: [BehaviorPolicy; 2],
    pub iterations: u64,
    /// The node budget ran out before the requested iterations completed.
    pub truncated: bool,
}

/// Steps `solver` until the budget's iteration or node limit is reached.
pub fn run_budgeted<S: IterativeSolver>(solver: &mut S, budget: &SolverBudget) -> SolverOutput {
    while !budget.exhausted(solver.iterations()) {
        solver.step();
    }
    SolverOutput {
        profile: solver.average(),
        iterations: solver.iterations(),
        truncated: !budget.iterations_exhausted(solver.iterations()),
    }
}

/// Regret matching: the positive part of `regrets`, normalized, or uniform when no
/// regret is positive.
pub fn regret_matching(regrets: &[f64], out: &mut [f64]) {
    let mut total = 0.0;
    for (o, &r) in out.iter_mut().zip(regrets) {
        *o = r.max(0.0);
        total += *o;
    }
    if total > 0.0 {
        out.iter_mut().for_each(|o| *o /= total);
    } else {
        out.fill(1.0 / out.len() as f64);
    }
}

/// Normalizes each infoset row of cumulative weights; empty rows become uniform.
pub(crate) fn normalize_rows(
    tree: &crate::tree::Tree,
    player: usize,
    sums: &[f64],
) -> BehaviorPolicy {
    let mut probs = sums.to_vec();
    for info in tree.infosets(player) {
        let row = &mut probs[info.slots()];
        let total: f64 = row.iter().sum();
        if total > 0.0 {
            row.iter_mut().for_each(|p| *p /= total);
        } else {
            row.fill(1.0 / row.len() as f64);
        }
    }
    BehaviorPolicy::from_slots(probs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regret_matching_rows() {
        let mut out = [0.0; 3];
        regret_matching(&[1.0, -2.0, 3.0], &mut out);
        assert_eq!(out, [0.25, 0.0, 0.75]);
        regret_matching(&[-1.0, 0.0, -3.0], &mut out);
        assert_eq!(out, [1.0 / 3.0; 3]);
    }
}
