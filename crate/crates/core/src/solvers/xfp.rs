use crate::counter::{NodeCounter, SolverBudget};
use crate::eval::best_response;
use crate::policy::BehaviorPolicy;
use crate::tree::Tree;

use super::{run_budgeted, IterativeSolver, SolverOutput};

/// Extensive-form fictitious play with exact best responses.
///
/// Starts from the uniform profile. Iteration `t` computes both players' best
/// responses to the current average and mixes each into its player's average with
/// weight `1/(t+1)`, realization-equivalently: at every infoset the two rows are
/// weighted by the reach probability of that infoset under each policy.
pub struct Xfp<'a> {
    tree: &'a Tree,
    average: [BehaviorPolicy; 2],
    iterations: u64,
    counter: NodeCounter,
}

/// Probability that `player`'s own actions lead to each of their infosets.
pub fn own_reach(tree: &Tree, player: usize, policy: &BehaviorPolicy) -> Vec<f64> {
    let infosets = tree.infosets(player);
    let mut reach = vec![f64::NAN; infosets.len()];
    fn fill(
        tree: &Tree,
        player: usize,
        policy: &BehaviorPolicy,
        reach: &mut [f64],
        i: usize,
    ) -> f64 {
        if reach[i].is_nan() {
            let info = tree.infoset(player, i);
            reach[i] = match info.parent {
                None => 1.0,
                Some((pi, a)) => {
                    let parent = tree.infoset(player, pi as usize);
                    fill(tree, player, policy, reach, pi as usize)
                        * policy.slots()[parent.offset + a as usize]
                }
            };
        }
        reach[i]
    }
    for i in 0..infosets.len() {
        fill(tree, player, policy, &mut reach, i);
    }
    reach
}

/// Realization-weighted mixture `(1-alpha) * a + alpha * b` of two policies of `player`.
/// Infosets neither policy reaches keep `a`'s row.
pub fn mix_policies(
    tree: &Tree,
    player: usize,
    a: &BehaviorPolicy,
    b: &BehaviorPolicy,
    alpha: f64,
) -> BehaviorPolicy {
    let ra = own_reach(tree, player, a);
    let rb = own_reach(tree, player, b);
    let mut out = a.clone();
    for (i, info) in tree.infosets(player).iter().enumerate() {
        let wa = (1.0 - alpha) * ra[i];
        let wb = alpha * rb[i];
        if wa + wb <= 0.0 {
            continue;
        }
        for s in info.slots() {
            out.slots_mut()[s] = (wa * a.slots()[s] + wb * b.slots()[s]) / (wa + wb);
        }
    }
    out
}

impl<'a> Xfp<'a> {
    pub fn new(tree: &'a Tree, counter: NodeCounter) -> Self {
        let average = [
            BehaviorPolicy::uniform(tree, 0),
            BehaviorPolicy::uniform(tree, 1),
        ];
        Xfp {
            tree,
            average,
            iterations: 0,
            counter,
        }
    }
}

impl IterativeSolver for Xfp<'_> {
    fn step(&mut self) {
        self.iterations += 1;
        let alpha = 1.0 / (self.iterations as f64 + 1.0);
        let brs: Vec<BehaviorPolicy> = (0..2)
            .map(|p| {
                let br = best_response(self.tree, p, &self.average[1 - p], None, &self.counter)
                    .expect("average policy is total");
                BehaviorPolicy::from_pure(self.tree, p, &br.strategy)
            })
            .collect();
        for (p, br) in brs.iter().enumerate() {
            self.average[p] = mix_policies(self.tree, p, &self.average[p], br, alpha);
        }
    }

    fn iterations(&self) -> u64 {
        self.iterations
    }

    fn average(&self) -> [BehaviorPolicy; 2] {
        self.average.clone()
    }
}

pub fn xfp(tree: &Tree, iterations: u64, budget: &SolverBudget) -> SolverOutput {
    let mut solver = Xfp::new(tree, budget.counter.clone());
    let budget = SolverBudget {
        max_iterations: Some(iterations),
        ..budget.clone()
    };
    run_budgeted(&mut solver, &budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{expected_value, exploitability};
    use crate::games::Kuhn;
    use crate::policy::PureStrategy;
    use crate::tree::DEFAULT_MAX_NODES;

    #[test]
    fn mixing_is_realization_equivalent() {
        // EV is linear in realization weights, so the mixed policy's value against any
        // opponent is the mixture of the two values.
        let t = Tree::build(&Kuhn::new(), DEFAULT_MAX_NODES).unwrap();
        let a = BehaviorPolicy::uniform(&t, 0);
        let mut pure = PureStrategy::default_for(&t, 0);
        for i in 0..t.infosets(0).len() {
            pure.set(i, (i % 2) as u16);
        }
        let b = BehaviorPolicy::from_pure(&t, 0, &pure);
        let opp = BehaviorPolicy::uniform(&t, 1);
        let c = NodeCounter::new();
        let va = expected_value(&t, &[a.clone(), opp.clone()], &c).unwrap();
        let vb = expected_value(&t, &[b.clone(), opp.clone()], &c).unwrap();
        let m = mix_policies(&t, 0, &a, &b, 0.3);
        let vm = expected_value(&t, &[m, opp], &c).unwrap();
        assert!((vm - (0.7 * va + 0.3 * vb)).abs() < 1e-12);
    }

    #[test]
    fn kuhn_converges() {
        let t = Tree::build(&Kuhn::new(), DEFAULT_MAX_NODES).unwrap();
        let out = xfp(&t, 1000, &SolverBudget::default());
        let e = exploitability(&t, &out.profile, &NodeCounter::new()).unwrap();
        assert!(e < 0.05, "{e}");
    }
}
