//! Tabular PSRO (normal-form double oracle) with exact best responses.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::counter::NodeCounter;
use crate::eval;
use crate::metrics::{Clock, Record};
use crate::policy::{pure_reach, realize_mixture, BehaviorPolicy, PureStrategy};
use crate::solvers::{solve_matrix_fp, solve_matrix_lp, solve_matrix_lp_central, MatrixGame};
use crate::tree::{Tag, Tree};
use crate::xdo::Population;
use crate::SolveError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetaSolver {
    /// Vertex solution from the simplex method.
    Lp,
    /// Analytic center of the equilibrium set, as an interior-point LP solver returns.
    LpCentral,
    /// Fictitious play for the given number of iterations.
    Fp(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayoffMode {
    Exact,
    /// Mean of seeded playouts per strategy pair.
    Sampled {
        games_per_pair: u32,
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialPopulation {
    /// Lowest-index action everywhere.
    Default,
    /// One uniformly random pure strategy per player.
    Random(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsroConfig {
    pub meta_solver: MetaSolver,
    pub payoff_mode: PayoffMode,
    /// Stop once neither best response gains more than this, or once both are
    /// already in the population.
    pub eps: f64,
    pub max_iterations: u64,
    pub initial: InitialPopulation,
    pub node_budget: Option<u64>,
    /// Wall-clock limit, checked once per iteration.
    pub time_limit: Option<Duration>,
    pub record_wall_time: bool,
}

impl Default for PsroConfig {
    fn default() -> Self {
        PsroConfig {
            meta_solver: MetaSolver::LpCentral,
            payoff_mode: PayoffMode::Exact,
            eps: 1e-3,
            max_iterations: 1000,
            initial: InitialPopulation::Default,
            node_budget: None,
            time_limit: None,
            record_wall_time: false,
        }
    }
}

impl PsroConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        if !(self.eps >= 0.0) {
            return Err(SolveError::InvalidConfig("eps must be nonnegative".into()));
        }
        if self.max_iterations == 0 {
            return Err(SolveError::InvalidConfig(
                "max_iterations must be at least 1".into(),
            ));
        }
        if let PayoffMode::Sampled {
            games_per_pair: 0, ..
        } = self.payoff_mode
        {
            return Err(SolveError::InvalidConfig(
                "games_per_pair must be at least 1".into(),
            ));
        }
        if let MetaSolver::Fp(0) = self.meta_solver {
            return Err(SolveError::InvalidConfig(
                "fictitious play needs at least 1 iteration".into(),
            ));
        }
        Ok(())
    }
}

/// Payoff matrix over the two populations; entries are player one's payoffs.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaGame {
    pub payoff: Vec<Vec<f64>>,
    pub mode: PayoffMode,
}

fn cell_seed(seed: u64, i: usize, j: usize) -> u64 {
    let mut z = seed ^ ((i as u64) << 32 | j as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Plays one game between two pure strategies, sampling chance.
fn playout(tree: &Tree, s: &[PureStrategy; 2], rng: &mut ChaCha8Rng, visits: &mut u64) -> f64 {
    let mut idx = 0;
    loop {
        *visits += 1;
        let node = tree.node(idx);
        idx = match node.tag {
            Tag::Terminal => return node.payoff,
            Tag::Chance => {
                let x: f64 = rng.gen();
                let mut acc = 0.0;
                let mut pick = node.first_child as usize + node.num_children as usize - 1;
                for c in node.children() {
                    acc += tree.node(c).prob;
                    if x < acc {
                        pick = c;
                        break;
                    }
                }
                pick
            }
            tag => {
                let p = tag.player().unwrap();
                node.first_child as usize + s[p].action(node.infoset as usize) as usize
            }
        };
    }
}

impl MetaGame {
    pub fn new(mode: PayoffMode) -> Self {
        MetaGame {
            payoff: Vec::new(),
            mode,
        }
    }

    fn entry(
        mode: PayoffMode,
        tree: &Tree,
        a: &PureStrategy,
        b: &PureStrategy,
        cell: (usize, usize),
        counter: &NodeCounter,
    ) -> f64 {
        match mode {
            PayoffMode::Exact => {
                let profile = [
                    BehaviorPolicy::from_pure(tree, 0, a),
                    BehaviorPolicy::from_pure(tree, 1, b),
                ];
                eval::expected_value(tree, &profile, counter).expect("pure profiles are total")
            }
            PayoffMode::Sampled {
                games_per_pair,
                seed,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(cell_seed(seed, cell.0, cell.1));
                let pair = [a.clone(), b.clone()];
                let mut visits = 0;
                let total: f64 = (0..games_per_pair)
                    .map(|_| playout(tree, &pair, &mut rng, &mut visits))
                    .sum();
                counter.add(visits);
                total / games_per_pair as f64
            }
        }
    }

    /// Fills the entries for population members added since the last update.
    pub fn update(&mut self, tree: &Tree, population: &Population, counter: &NodeCounter) {
        let (rows, cols) = (population.members(0), population.members(1));
        let mode = self.mode;
        let old_cols = self.payoff.first().map_or(0, Vec::len);
        for (i, row) in self.payoff.iter_mut().enumerate() {
            for (j, col) in cols.iter().enumerate().skip(old_cols) {
                row.push(Self::entry(mode, tree, &rows[i], col, (i, j), counter));
            }
        }
        for i in self.payoff.len()..rows.len() {
            let row = cols
                .iter()
                .enumerate()
                .map(|(j, c)| Self::entry(mode, tree, &rows[i], c, (i, j), counter))
                .collect();
            self.payoff.push(row);
        }
    }

    /// Full matrix for `population`.
    pub fn compute(
        tree: &Tree,
        population: &Population,
        mode: PayoffMode,
        counter: &NodeCounter,
    ) -> Self {
        let mut m = MetaGame::new(mode);
        m.update(tree, population, counter);
        m
    }

    pub fn matrix(&self) -> Result<MatrixGame, SolveError> {
        Ok(MatrixGame::new(self.payoff.clone())?)
    }
}

/// Distinct pure strategies after erasing actions at infosets the strategy itself
/// never reaches.
pub fn count_reduced(tree: &Tree, player: usize, members: &[PureStrategy]) -> usize {
    let mut reduced: Vec<Vec<u16>> = members
        .iter()
        .map(|s| {
            pure_reach(tree, player, s)
                .into_iter()
                .enumerate()
                .map(|(i, r)| if r { s.action(i) } else { u16::MAX })
                .collect()
        })
        .collect();
    reduced.sort_unstable();
    reduced.dedup();
    reduced.len()
}

/// Uniformly random pure strategy.
pub fn random_pure_strategy(tree: &Tree, player: usize, rng: &mut impl Rng) -> PureStrategy {
    PureStrategy::from_actions(
        tree.infosets(player)
            .iter()
            .map(|i| rng.gen_range(0..i.num_actions()) as u16)
            .collect(),
    )
}

#[derive(Debug, Clone)]
pub struct PsroResult {
    /// Realized meta-strategies of the last iteration.
    pub profile: [BehaviorPolicy; 2],
    pub meta_weights: [Vec<f64>; 2],
    pub population: Population,
    pub iterations: u64,
    pub terminated: bool,
    pub truncated: bool,
    pub final_exploitability: f64,
    pub records: Vec<Record>,
    /// Distinct reduced pure strategies per player at the end.
    pub strategies_expanded: (usize, usize),
}

pub fn psro_solve(
    tree: &Tree,
    config: &PsroConfig,
    counter: &NodeCounter,
) -> Result<PsroResult, SolveError> {
    config.validate()?;
    let clock = Clock::new(config.record_wall_time);
    let started = Instant::now();
    let mut population = Population::new();
    match config.initial {
        InitialPopulation::Default => {
            population = Population::initial(tree);
        }
        InitialPopulation::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for p in 0..2 {
                population.insert(p, random_pure_strategy(tree, p, &mut rng));
            }
        }
    }
    let mut meta = MetaGame::new(config.payoff_mode);
    let mut records = Vec::new();
    let mut iteration = 0;
    loop {
        iteration += 1;
        meta.update(tree, &population, counter);
        let m = meta.matrix()?;
        let solution = match config.meta_solver {
            MetaSolver::Lp => solve_matrix_lp(&m)?,
            MetaSolver::LpCentral => solve_matrix_lp_central(&m)?,
            MetaSolver::Fp(n) => solve_matrix_fp(&m, n),
        };
        let weights = [solution.row, solution.col];
        let profile = [0, 1].map(|p| realize_mixture(tree, p, population.members(p), &weights[p]));
        let (report, brs) = eval::evaluate(tree, &profile, counter)?;
        records.push(Record {
            outer_iter: iteration,
            inner_iter: None,
            nodes_visited: counter.get(),
            exploitability: report.exploitability,
            pop: population.sizes(),
            restricted_states: None,
            wall_ms: clock.elapsed_ms(),
        });
        let (g1, g2) = report.gains();
        // both responses already present: the meta-game is solved up to solver precision
        let nothing_new = (0..2).all(|p| population.members(p).contains(&brs[p].strategy));
        let terminated = (g1 <= config.eps && g2 <= config.eps) || nothing_new;
        let out_of_budget = iteration >= config.max_iterations
            || config.node_budget.is_some_and(|b| counter.get() >= b)
            || config.time_limit.is_some_and(|t| started.elapsed() >= t);
        if terminated || out_of_budget {
            let strategies_expanded = (
                count_reduced(tree, 0, population.members(0)),
                count_reduced(tree, 1, population.members(1)),
            );
            return Ok(PsroResult {
                profile,
                meta_weights: weights,
                population,
                iterations: iteration,
                terminated,
                truncated: !terminated,
                final_exploitability: report.exploitability,
                records,
                strategies_expanded,
            });
        }
        let [b1, b2] = brs;
        population.insert(0, b1.strategy);
        population.insert(1, b2.strategy);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{Kuhn, RpsChoice};
    use crate::tree::DEFAULT_MAX_NODES;

    #[test]
    fn rps_choice_reduced_counts() {
        let t = Tree::build(&RpsChoice::new(), DEFAULT_MAX_NODES).unwrap();
        let all = |p| crate::xdo::enumerate_pure_strategies(&t, p, 1 << 12).unwrap();
        assert_eq!(count_reduced(&t, 0, &all(0)), 6);
        assert_eq!(count_reduced(&t, 1, &all(1)), 9);
    }

    #[test]
    fn incremental_matches_full_matrix() {
        let t = Tree::build(&Kuhn::new(), DEFAULT_MAX_NODES).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut pop = Population::new();
        let mut meta = MetaGame::new(PayoffMode::Exact);
        for _ in 0..4 {
            pop.insert(0, random_pure_strategy(&t, 0, &mut rng));
            meta.update(&t, &pop, &NodeCounter::new());
            pop.insert(1, random_pure_strategy(&t, 1, &mut rng));
            meta.update(&t, &pop, &NodeCounter::new());
        }
        let full = MetaGame::compute(&t, &pop, PayoffMode::Exact, &NodeCounter::new());
        assert_eq!(meta, full);
    }

    #[test]
    fn kuhn_terminates() {
        let t = Tree::build(&Kuhn::new(), DEFAULT_MAX_NODES).unwrap();
        let res = psro_solve(&t, &PsroConfig::default(), &NodeCounter::new()).unwrap();
        assert!(res.terminated);
        assert!(res.final_exploitability <= 2e-3 + 1e-9);
    }
}
