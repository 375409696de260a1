use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::counter::{NodeCounter, SolverBudget};
use crate::policy::BehaviorPolicy;
use crate::tree::{Tag, Tree};

use super::{
    normalize_rows, regret_matching, run_budgeted, IterativeSolver, RegretTable, SolverOutput,
};

/// Monte Carlo CFR with external sampling.
///
/// Each iteration runs one traversal per player: the traverser's actions are all
/// explored, chance and opponent actions are sampled once per visit. The opponent's
/// average strategy is accumulated at the nodes where it is sampled.
pub struct ExternalSampling<'a> {
    tree: &'a Tree,
    table: RegretTable,
    rng: ChaCha8Rng,
    iterations: u64,
    counter: NodeCounter,
}

fn sample(rng: &mut ChaCha8Rng, probs: impl Iterator<Item = f64>, n: usize) -> usize {
    let x: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probs.enumerate() {
        acc += p;
        if x < acc {
            return i;
        }
    }
    n - 1
}

impl<'a> ExternalSampling<'a> {
    pub fn new(tree: &'a Tree, seed: u64, counter: NodeCounter) -> Self {
        ExternalSampling {
            tree,
            table: RegretTable::new(tree),
            rng: ChaCha8Rng::seed_from_u64(seed),
            iterations: 0,
            counter,
        }
    }

    pub fn table(&self) -> &RegretTable {
        &self.table
    }

    fn strategy(&self, p: usize, offset: usize, n: usize) -> Vec<f64> {
        let mut s = vec![0.0; n];
        regret_matching(&self.table.regrets[p][offset..offset + n], &mut s);
        s
    }

    /// Sampled counterfactual value for `me`.
    fn walk(&mut self, idx: usize, me: usize, visits: &mut u64) -> f64 {
        *visits += 1;
        let node = *self.tree.node(idx);
        match node.tag {
            Tag::Terminal => {
                if me == 0 {
                    node.payoff
                } else {
                    -node.payoff
                }
            }
            Tag::Chance => {
                let tree = self.tree;
                let i = sample(
                    &mut self.rng,
                    node.children().map(|c| tree.node(c).prob),
                    node.num_children as usize,
                );
                self.walk(node.first_child as usize + i, me, visits)
            }
            tag => {
                let p = tag.player().unwrap();
                let info = self.tree.infoset(p, node.infoset as usize);
                let (offset, n) = (info.offset, info.num_actions());
                let sigma = self.strategy(p, offset, n);
                if p != me {
                    for a in 0..n {
                        self.table.strategy_sums[p][offset + a] += sigma[a];
                    }
                    let a = sample(&mut self.rng, sigma.iter().copied(), n);
                    return self.walk(node.first_child as usize + a, me, visits);
                }
                let mut values = vec![0.0; n];
                let mut v = 0.0;
                for a in 0..n {
                    values[a] = self.walk(node.first_child as usize + a, me, visits);
                    v += sigma[a] * values[a];
                }
                for a in 0..n {
                    self.table.regrets[p][offset + a] += values[a] - v;
                }
                v
            }
        }
    }
}

impl IterativeSolver for ExternalSampling<'_> {
    fn step(&mut self) {
        self.iterations += 1;
        let mut visits = 0;
        for me in 0..2 {
            self.walk(0, me, &mut visits);
        }
        self.counter.add(visits);
    }

    fn iterations(&self) -> u64 {
        self.iterations
    }

    fn average(&self) -> [BehaviorPolicy; 2] {
        [
            normalize_rows(self.tree, 0, &self.table.strategy_sums[0]),
            normalize_rows(self.tree, 1, &self.table.strategy_sums[1]),
        ]
    }
}

/// Runs external-sampling MCCFR for `iterations` with a seeded generator.
pub fn mccfr_external(
    tree: &Tree,
    iterations: u64,
    seed: u64,
    budget: &SolverBudget,
) -> SolverOutput {
    let mut solver = ExternalSampling::new(tree, seed, budget.counter.clone());
    let budget = SolverBudget {
        max_iterations: Some(iterations),
        ..budget.clone()
    };
    run_budgeted(&mut solver, &budget)
}
