use crate::counter::{NodeCounter, SolverBudget};
use crate::policy::BehaviorPolicy;
use crate::tree::{Tag, Tree};

use super::{normalize_rows, regret_matching, run_budgeted, IterativeSolver, SolverOutput};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CfrConfig {
    /// Regret clamping and linearly weighted averaging.
    pub plus: bool,
    /// Update one player per traversal instead of both at once.
    pub alternating: bool,
}

/// Cumulative regrets and strategy weights, laid out by action slot.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTable {
    pub regrets: [Vec<f64>; 2],
    pub strategy_sums: [Vec<f64>; 2],
}

impl RegretTable {
    pub fn new(tree: &Tree) -> Self {
        let zeros = |p: usize| vec![0.0; tree.num_slots(p)];
        RegretTable {
            regrets: [zeros(0), zeros(1)],
            strategy_sums: [zeros(0), zeros(1)],
        }
    }

    /// Regret-matching strategy for every infoset of `player`.
    pub fn current(&self, tree: &Tree, player: usize, out: &mut [f64]) {
        for info in tree.infosets(player) {
            regret_matching(&self.regrets[player][info.slots()], &mut out[info.slots()]);
        }
    }

    pub fn average(&self, tree: &Tree, player: usize) -> BehaviorPolicy {
        normalize_rows(tree, player, &self.strategy_sums[player])
    }
}

/// Vanilla CFR or CFR+ over a full tree.
pub struct Cfr<'a> {
    tree: &'a Tree,
    config: CfrConfig,
    table: RegretTable,
    current: [Vec<f64>; 2],
    iterations: u64,
    counter: NodeCounter,
}

impl<'a> Cfr<'a> {
    pub fn new(tree: &'a Tree, config: CfrConfig, counter: NodeCounter) -> Self {
        let table = RegretTable::new(tree);
        let current = [vec![0.0; tree.num_slots(0)], vec![0.0; tree.num_slots(1)]];
        Cfr {
            tree,
            config,
            table,
            current,
            iterations: 0,
            counter,
        }
    }

    /// Resumes from `table` as if `iterations` iterations had already run.
    pub fn from_table(
        tree: &'a Tree,
        config: CfrConfig,
        counter: NodeCounter,
        table: RegretTable,
        iterations: u64,
    ) -> Self {
        let mut s = Self::new(tree, config, counter);
        assert_eq!(
            table.regrets[0].len(),
            tree.num_slots(0),
            "table does not fit tree"
        );
        assert_eq!(
            table.regrets[1].len(),
            tree.num_slots(1),
            "table does not fit tree"
        );
        s.table = table;
        s.iterations = iterations;
        s
    }

    pub fn table(&self) -> &RegretTable {
        &self.table
    }

    pub fn into_table(self) -> (RegretTable, u64) {
        (self.table, self.iterations)
    }

    fn traverse(&mut self, update: [bool; 2], weight: f64) {
        let mut visits = 0;
        for p in 0..2 {
            self.table.current(self.tree, p, &mut self.current[p]);
        }
        self.walk(0, [1.0, 1.0], 1.0, update, weight, &mut visits);
        if self.config.plus {
            for p in (0..2).filter(|&p| update[p]) {
                self.table.regrets[p]
                    .iter_mut()
                    .for_each(|r| *r = r.max(0.0));
            }
        }
        self.counter.add(visits);
    }

    /// Returns player one's value of the subtree under the current strategies.
    fn walk(
        &mut self,
        idx: usize,
        reach: [f64; 2],
        chance: f64,
        update: [bool; 2],
        weight: f64,
        visits: &mut u64,
    ) -> f64 {
        *visits += 1;
        let node = *self.tree.node(idx);
        match node.tag {
            Tag::Terminal => node.payoff,
            Tag::Chance => node
                .children()
                .map(|c| {
                    let pr = self.tree.node(c).prob;
                    pr * self.walk(c, reach, chance * pr, update, weight, visits)
                })
                .sum(),
            tag => {
                let p = tag.player().unwrap();
                let info = self.tree.infoset(p, node.infoset as usize);
                let (offset, n) = (info.offset, info.num_actions());
                let mut child_values = [0.0f64; 64];
                let mut big;
                let values: &mut [f64] = if n <= 64 {
                    &mut child_values[..n]
                } else {
                    big = vec![0.0; n];
                    &mut big
                };
                let mut v = 0.0;
                for (a, c) in node.children().enumerate() {
                    let s = self.current[p][offset + a];
                    let mut r = reach;
                    r[p] *= s;
                    values[a] = self.walk(c, r, chance, update, weight, visits);
                    v += s * values[a];
                }
                if update[p] {
                    let sign = if p == 0 { 1.0 } else { -1.0 };
                    let cf = reach[1 - p] * chance;
                    let own = reach[p];
                    for a in 0..n {
                        self.table.regrets[p][offset + a] += cf * sign * (values[a] - v);
                        self.table.strategy_sums[p][offset + a] +=
                            weight * own * self.current[p][offset + a];
                    }
                }
                v
            }
        }
    }
}

impl IterativeSolver for Cfr<'_> {
    fn step(&mut self) {
        self.iterations += 1;
        let weight = if self.config.plus {
            self.iterations as f64
        } else {
            1.0
        };
        if self.config.alternating {
            self.traverse([true, false], weight);
            self.traverse([false, true], weight);
        } else {
            self.traverse([true, true], weight);
        }
    }

    fn iterations(&self) -> u64 {
        self.iterations
    }

    fn average(&self) -> [BehaviorPolicy; 2] {
        [
            self.table.average(self.tree, 0),
            self.table.average(self.tree, 1),
        ]
    }
}

/// Runs CFR (or CFR+ when `plus`) for `iterations`, stopping early if the budget's
/// node limit is reached. Visits are added to the budget's counter.
pub fn cfr(tree: &Tree, iterations: u64, plus: bool, budget: &SolverBudget) -> SolverOutput {
    let mut solver = Cfr::new(
        tree,
        CfrConfig {
            plus,
            alternating: false,
        },
        budget.counter.clone(),
    );
    let budget = SolverBudget {
        max_iterations: Some(iterations),
        ..budget.clone()
    };
    run_budgeted(&mut solver, &budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::exploitability;
    use crate::games::Kuhn;
    use crate::tree::DEFAULT_MAX_NODES;

    #[test]
    fn node_accounting_is_iterations_times_tree_size() {
        let t = Tree::build(&Kuhn::new(), DEFAULT_MAX_NODES).unwrap();
        let c = NodeCounter::starting_at(17);
        let out = cfr(
            &t,
            25,
            true,
            &SolverBudget::default().with_counter(c.clone()),
        );
        assert_eq!(out.iterations, 25);
        assert_eq!(c.get(), 17 + 25 * t.len() as u64);
        let c2 = NodeCounter::new();
        let mut alt = Cfr::new(
            &t,
            CfrConfig {
                plus: false,
                alternating: true,
            },
            c2.clone(),
        );
        alt.step();
        assert_eq!(c2.get(), 2 * t.len() as u64);
    }

    #[test]
    fn plus_keeps_regrets_nonnegative() {
        let t = Tree::build(&Kuhn::new(), DEFAULT_MAX_NODES).unwrap();
        let mut s = Cfr::new(
            &t,
            CfrConfig {
                plus: true,
                alternating: false,
            },
            NodeCounter::new(),
        );
        for _ in 0..50 {
            s.step();
            assert!(s.table().regrets.iter().flatten().all(|&r| r >= 0.0));
        }
    }

    #[test]
    fn kuhn_converges() {
        let t = Tree::build(&Kuhn::new(), DEFAULT_MAX_NODES).unwrap();
        let out = cfr(&t, 1000, true, &SolverBudget::default());
        let e = exploitability(&t, &out.profile, &NodeCounter::new()).unwrap();
        assert!(e < 0.01, "{e}");
        let out = cfr(&t, 2000, false, &SolverBudget::default());
        let e = exploitability(&t, &out.profile, &NodeCounter::new()).unwrap();
        assert!(e < 0.02, "{e}");
    }

    #[test]
    fn node_budget_truncates() {
        let t = Tree::build(&Kuhn::new(), DEFAULT_MAX_NODES).unwrap();
        let budget = SolverBudget::nodes(10 * t.len() as u64);
        let out = cfr(&t, 1000, true, &budget);
        assert!(out.truncated);
        assert_eq!(out.iterations, 10);
    }
}
