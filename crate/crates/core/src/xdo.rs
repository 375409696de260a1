//! Extensive-form double oracle.
//!
//! Each outer iteration restricts the game to the actions some population member
//! plays at each infostate, solves that restricted game to within the current ε, and
//! adds both players' exact best responses against the restricted solution to the
//! population. The loop ends once neither player gains enough by deviating in the full
//! game.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use crate::counter::NodeCounter;
use crate::eval::{self, BestResponse, ValueReport, VALUE_TOL};
use crate::game_core::{ActionId, Game, InfostateKey, NodeKind, PlayerId};
use crate::metrics::{Clock, Record};
use crate::policy::{realize_mixture, BehaviorPolicy, PureStrategy};
use crate::solvers::{
    solve_matrix_lp, Cfr, CfrConfig, IterativeSolver, MatrixGame, RegretTable, Xfp,
};
use crate::tree::{StateCounts, Tree};
use crate::SolveError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerSolver {
    CfrPlus,
    Cfr,
    Xfp,
    /// Exact solution of the restricted game's normal form by linear programming.
    /// Only for restricted games with few pure strategies.
    NormalFormLp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct XdoConfig {
    pub eps0: f64,
    pub eps_decay: f64,
    /// ε is never decayed below this.
    pub eps_floor: f64,
    /// Fixed exploitability threshold for outer termination; `None` uses the current ε.
    pub termination_eps: Option<f64>,
    pub inner_solver: InnerSolver,
    pub inner_check_period: u64,
    pub max_inner_iterations: Option<u64>,
    pub max_outer_iterations: u64,
    pub node_budget: Option<u64>,
    /// Wall-clock limit, checked between solver iterations.
    pub time_limit: Option<Duration>,
    /// Break best-response ties in favor of already-allowed actions.
    pub prefer_restricted: bool,
    /// Pure-strategy cap per player for [`InnerSolver::NormalFormLp`].
    pub max_pure_strategies: usize,
    /// Carry CFR regrets and averages across outer iterations instead of restarting.
    pub warm_start: bool,
    pub record_wall_time: bool,
}

impl Default for XdoConfig {
    fn default() -> Self {
        XdoConfig {
            eps0: 0.35,
            eps_decay: 0.98,
            eps_floor: 1e-4,
            termination_eps: None,
            inner_solver: InnerSolver::CfrPlus,
            inner_check_period: 10,
            max_inner_iterations: None,
            max_outer_iterations: 1000,
            node_budget: None,
            time_limit: None,
            prefer_restricted: true,
            max_pure_strategies: 4096,
            warm_start: false,
            record_wall_time: false,
        }
    }
}

impl XdoConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        let bad = |m: &str| Err(SolveError::InvalidConfig(m.to_string()));
        if !(self.eps0 > 0.0) {
            return bad("eps0 must be positive");
        }
        if !(self.eps_decay > 0.0 && self.eps_decay < 1.0) {
            return bad("eps_decay must lie in (0, 1)");
        }
        if !(self.eps_floor > 0.0) {
            return bad("eps_floor must be positive");
        }
        if self.termination_eps.is_some_and(|e| !(e >= 0.0)) {
            return bad("termination_eps must be nonnegative");
        }
        if self.inner_check_period == 0 {
            return bad("inner_check_period must be at least 1");
        }
        if self.warm_start && !matches!(self.inner_solver, InnerSolver::Cfr | InnerSolver::CfrPlus)
        {
            return bad("warm_start needs a CFR inner solver");
        }
        if self.max_outer_iterations == 0 {
            return bad("max_outer_iterations must be at least 1");
        }
        Ok(())
    }
}

/// Pure strategies per player, over the full game's tree, without duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Population {
    members: [Vec<PureStrategy>; 2],
}

impl Population {
    pub fn new() -> Self {
        Self::default()
    }

    /// One lowest-index-everywhere strategy per player.
    pub fn initial(tree: &Tree) -> Self {
        Population {
            members: [
                PureStrategy::default_for(tree, 0),
                PureStrategy::default_for(tree, 1),
            ]
            .map(|s| vec![s]),
        }
    }

    pub fn members(&self, player: usize) -> &[PureStrategy] {
        &self.members[player]
    }

    pub fn sizes(&self) -> (usize, usize) {
        (self.members[0].len(), self.members[1].len())
    }

    /// Adds `strategy` unless already present; returns whether it was new.
    pub fn insert(&mut self, player: usize, strategy: PureStrategy) -> bool {
        if self.members[player].contains(&strategy) {
            false
        } else {
            self.members[player].push(strategy);
            true
        }
    }

    /// `allowed[p][infoset]`: the sorted actions some member of `p` plays there.
    pub fn allowed_sets(&self, tree: &Tree) -> [Vec<Vec<u16>>; 2] {
        [0, 1].map(|p| {
            (0..tree.infosets(p).len())
                .map(|i| {
                    let mut acts: Vec<u16> = self.members[p].iter().map(|s| s.action(i)).collect();
                    acts.sort_unstable();
                    acts.dedup();
                    acts
                })
                .collect()
        })
    }
}

/// Number of infostates (decision and terminal) whose preceding own action is played
/// by some population member. Root infostates count once the population is nonempty.
pub fn covered_infostate_count(population: &Population, tree: &Tree) -> usize {
    let allowed = population.allowed_sets(tree);
    let mut count = 0;
    for p in 0..2 {
        if population.members(p).is_empty() {
            continue;
        }
        let covered = |parent: Option<(u32, u16)>| match parent {
            None => true,
            Some((i, a)) => allowed[p][i as usize].contains(&a),
        };
        count += tree
            .infosets(p)
            .iter()
            .filter(|i| covered(i.parent))
            .count();
        count += tree
            .terminal_infosets(p)
            .iter()
            .filter(|t| covered(t.parent))
            .count();
    }
    count
}

/// The base game with each infostate's actions limited to an allowed subset.
///
/// Action `j` at an infostate is the `j`-th allowed base action in base order.
/// Infostates without an entry keep all their actions.
pub struct RestrictedGame<'g, G: Game> {
    base: &'g G,
    allowed: HashMap<InfostateKey, Vec<ActionId>>,
}

impl<'g, G: Game> RestrictedGame<'g, G> {
    pub fn new(base: &'g G, allowed: HashMap<InfostateKey, Vec<ActionId>>) -> Self {
        RestrictedGame { base, allowed }
    }

    pub fn allowed(&self, key: &InfostateKey) -> Option<&[ActionId]> {
        self.allowed.get(key).map(Vec::as_slice)
    }

    fn decision_key(&self, state: &G::State) -> Option<InfostateKey> {
        match self.base.kind(state) {
            NodeKind::Decision(p) => self.base.infostate_key(state, p).ok(),
            _ => None,
        }
    }

    fn base_action(&self, state: &G::State, action: ActionId) -> ActionId {
        self.decision_key(state)
            .and_then(|k| self.allowed.get(&k).map(|acts| acts[action.index()]))
            .unwrap_or(action)
    }
}

impl<G: Game> Game for RestrictedGame<'_, G> {
    type State = G::State;

    fn name(&self) -> String {
        format!("restricted({})", self.base.name())
    }

    fn root(&self) -> G::State {
        self.base.root()
    }

    fn kind(&self, state: &G::State) -> NodeKind {
        self.base.kind(state)
    }

    fn num_actions(&self, state: &G::State) -> usize {
        self.decision_key(state)
            .and_then(|k| self.allowed.get(&k).map(Vec::len))
            .unwrap_or_else(|| self.base.num_actions(state))
    }

    fn next(&self, state: &G::State, action: ActionId) -> G::State {
        self.base.next(state, self.base_action(state, action))
    }

    fn chance_probs(&self, state: &G::State) -> Vec<f64> {
        self.base.chance_probs(state)
    }

    fn payoff(&self, state: &G::State) -> f64 {
        self.base.payoff(state)
    }

    fn info_tokens(&self, state: &G::State, player: PlayerId) -> Vec<u16> {
        self.base.info_tokens(state, player)
    }

    fn depth(&self, state: &G::State) -> usize {
        self.base.depth(state)
    }

    fn action_label(&self, state: &G::State, action: ActionId) -> String {
        self.base
            .action_label(state, self.base_action(state, action))
    }
}

/// The restricted game of `population`, as a [`Game`] over `base`. `tree` must be the
/// compiled form of `base` that the population's strategies index.
pub fn build_restricted_game<'g, G: Game>(
    base: &'g G,
    tree: &Tree,
    population: &Population,
) -> Result<RestrictedGame<'g, G>, SolveError> {
    for p in 0..2 {
        if population.members(p).is_empty() {
            return Err(SolveError::EmptyPopulation(p + 1));
        }
    }
    let sets = population.allowed_sets(tree);
    let mut allowed = HashMap::new();
    for p in 0..2 {
        for (info, acts) in tree.infosets(p).iter().zip(&sets[p]) {
            allowed.insert(
                info.key.clone(),
                acts.iter()
                    .map(|&a| ActionId(info.labels[a as usize]))
                    .collect(),
            );
        }
    }
    Ok(RestrictedGame::new(base, allowed))
}

/// Lifts a restricted-tree policy to the full tree. Full-game infosets outside the
/// restricted tree play their lowest-index action.
pub fn extend_policy(
    full: &Tree,
    restricted: &Tree,
    player: usize,
    policy: &BehaviorPolicy,
) -> BehaviorPolicy {
    let mut probs = vec![0.0; full.num_slots(player)];
    let mut seen = vec![false; full.infosets(player).len()];
    for info in restricted.infosets(player) {
        let target = full.infoset(player, info.base as usize);
        seen[info.base as usize] = true;
        for (a, &label) in info.labels.iter().enumerate() {
            probs[target.offset + label as usize] = policy.slots()[info.offset + a];
        }
    }
    for (i, info) in full.infosets(player).iter().enumerate() {
        if !seen[i] {
            probs[info.offset] = 1.0;
        }
    }
    BehaviorPolicy::from_slots(probs)
}

/// Outcome of one restricted-game solve.
#[derive(Debug, Clone)]
pub struct InnerResult {
    /// The restricted solution extended to the full game.
    pub profile: [BehaviorPolicy; 2],
    pub restricted_exploitability: f64,
    /// Full-game evaluation of `profile`.
    pub full: ValueReport,
    /// Full-game best responses to `profile`.
    pub best_responses: [BestResponse; 2],
    pub iterations: u64,
    /// Stopped by a budget before the stopping conditions held.
    pub truncated: bool,
    pub records: Vec<Record>,
}

/// CFR tables in full-game slot layout, kept between outer iterations.
struct WarmTables {
    table: RegretTable,
    iterations: u64,
}

impl WarmTables {
    fn new(full: &Tree) -> Self {
        WarmTables {
            table: RegretTable::new(full),
            iterations: 0,
        }
    }

    fn slot_pairs<'t>(
        full: &'t Tree,
        restricted: &'t Tree,
        player: usize,
    ) -> impl Iterator<Item = (usize, usize)> + 't {
        restricted.infosets(player).iter().flat_map(move |info| {
            let target = full.infoset(player, info.base as usize).offset;
            info.labels
                .iter()
                .enumerate()
                .map(move |(a, &l)| (info.offset + a, target + l as usize))
        })
    }

    fn load(&self, full: &Tree, restricted: &Tree) -> RegretTable {
        let mut out = RegretTable::new(restricted);
        for p in 0..2 {
            for (r, f) in Self::slot_pairs(full, restricted, p) {
                out.regrets[p][r] = self.table.regrets[p][f];
                out.strategy_sums[p][r] = self.table.strategy_sums[p][f];
            }
        }
        out
    }

    fn store(&mut self, full: &Tree, restricted: &Tree, table: &RegretTable, iterations: u64) {
        for p in 0..2 {
            for (r, f) in Self::slot_pairs(full, restricted, p) {
                self.table.regrets[p][f] = table.regrets[p][r];
                self.table.strategy_sums[p][f] = table.strategy_sums[p][r];
            }
        }
        self.iterations = iterations;
    }
}

/// Shared state threaded through inner solves.
struct Run<'a> {
    full: &'a Tree,
    config: &'a XdoConfig,
    counter: NodeCounter,
    clock: Clock,
    started: Instant,
    outer: u64,
    pop: (usize, usize),
}

impl Run<'_> {
    fn budget_exhausted(&self) -> bool {
        self.config
            .node_budget
            .is_some_and(|b| self.counter.get() >= b)
            || self
                .config
                .time_limit
                .is_some_and(|t| self.started.elapsed() >= t)
    }

    fn full_eval(
        &self,
        profile: &[BehaviorPolicy; 2],
        prefer: &[Vec<Vec<u16>>; 2],
        counter: &NodeCounter,
    ) -> (ValueReport, [BestResponse; 2]) {
        let prefer = self.config.prefer_restricted.then_some(prefer);
        eval::evaluate_with_preference(self.full, profile, prefer, counter)
            .expect("extended profiles are total")
    }
}

/// Solves the restricted game until its exploitability is below `eps` and below the
/// full-game exploitability of the extended solution, or until the full-game
/// exploitability reaches `threshold`.
fn inner_solve(
    run: &Run,
    warm: Option<&mut WarmTables>,
    restricted: &Tree,
    allowed: &[Vec<Vec<u16>>; 2],
    eps: f64,
    threshold: f64,
) -> Result<InnerResult, SolveError> {
    let restricted_states = Some(restricted.len());
    let record = |inner: u64, exploitability: f64| Record {
        outer_iter: run.outer,
        inner_iter: Some(inner),
        nodes_visited: run.counter.get(),
        exploitability,
        pop: run.pop,
        restricted_states,
        wall_ms: run.clock.elapsed_ms(),
    };
    let extend =
        |p: &[BehaviorPolicy; 2]| [0, 1].map(|i| extend_policy(run.full, restricted, i, &p[i]));

    if run.config.inner_solver == InnerSolver::NormalFormLp {
        let solution = solve_normal_form(restricted, run.config.max_pure_strategies, &run.counter)?;
        let (r, _) = eval::evaluate(restricted, &solution, &run.counter)?;
        let profile = extend(&solution);
        let (full, brs) = run.full_eval(&profile, allowed, &run.counter);
        return Ok(InnerResult {
            profile,
            restricted_exploitability: r.exploitability,
            full,
            best_responses: brs,
            iterations: 1,
            truncated: false,
            records: vec![record(1, full.exploitability)],
        });
    }

    let cfr_config = |plus| CfrConfig {
        plus,
        alternating: false,
    };
    let new_cfr = |plus| match &warm {
        Some(w) => Cfr::from_table(
            restricted,
            cfr_config(plus),
            run.counter.clone(),
            w.load(run.full, restricted),
            w.iterations,
        ),
        None => Cfr::new(restricted, cfr_config(plus), run.counter.clone()),
    };
    let mut solver = match run.config.inner_solver {
        InnerSolver::CfrPlus => InnerEngine::Cfr(new_cfr(true)),
        InnerSolver::Cfr => InnerEngine::Cfr(new_cfr(false)),
        InnerSolver::Xfp => InnerEngine::Xfp(Xfp::new(restricted, run.counter.clone())),
        InnerSolver::NormalFormLp => unreachable!(),
    };
    let start = solver.get().iterations();
    let mut records = Vec::new();
    loop {
        for _ in 0..run.config.inner_check_period {
            solver.get().step();
            if run.budget_exhausted() {
                break;
            }
        }
        let iterations = solver.get().iterations() - start;
        let average = solver.get().average();
        let (r, _) = eval::evaluate(restricted, &average, &run.counter)?;
        let r = r.exploitability;
        let profile = extend(&average);
        let truncated = run.budget_exhausted()
            || run
                .config
                .max_inner_iterations
                .is_some_and(|m| iterations >= m);
        let stop_a = r < eps;
        // The full-game check drives the stopping decision only once (a) holds.
        let scratch = NodeCounter::new();
        let check_counter = if stop_a { &run.counter } else { &scratch };
        let (full, brs) = run.full_eval(&profile, allowed, check_counter);
        let f = full.exploitability;
        records.push(record(iterations, f));
        let stop_b = r < f - VALUE_TOL || f <= threshold;
        if (stop_a && stop_b) || truncated {
            if let (Some(w), InnerEngine::Cfr(cfr)) = (warm, solver) {
                let (table, total) = cfr.into_table();
                w.store(run.full, restricted, &table, total);
            }
            return Ok(InnerResult {
                profile,
                restricted_exploitability: r,
                full,
                best_responses: brs,
                iterations,
                truncated: truncated && !(stop_a && stop_b),
                records,
            });
        }
    }
}

enum InnerEngine<'t> {
    Cfr(Cfr<'t>),
    Xfp(Xfp<'t>),
}

impl<'t> InnerEngine<'t> {
    fn get(&mut self) -> &mut (dyn IterativeSolver + 't) {
        match self {
            InnerEngine::Cfr(s) => s,
            InnerEngine::Xfp(s) => s,
        }
    }
}

/// Every pure strategy of `player` in `tree`, or `None` past `cap`.
pub fn enumerate_pure_strategies(
    tree: &Tree,
    player: usize,
    cap: usize,
) -> Option<Vec<PureStrategy>> {
    let sizes: Vec<usize> = tree
        .infosets(player)
        .iter()
        .map(|i| i.num_actions())
        .collect();
    let mut total: usize = 1;
    for &s in &sizes {
        total = total.checked_mul(s).filter(|&t| t <= cap)?;
    }
    let mut out = Vec::with_capacity(total);
    let mut digits = vec![0u16; sizes.len()];
    loop {
        out.push(PureStrategy::from_actions(digits.clone()));
        let mut k = 0;
        loop {
            if k == sizes.len() {
                return Some(out);
            }
            digits[k] += 1;
            if (digits[k] as usize) < sizes[k] {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

/// Exact equilibrium of a small tree via its normal form.
pub fn solve_normal_form(
    tree: &Tree,
    cap: usize,
    counter: &NodeCounter,
) -> Result<[BehaviorPolicy; 2], SolveError> {
    let too_many = || SolveError::TooManyStrategies(cap);
    let rows = enumerate_pure_strategies(tree, 0, cap).ok_or_else(too_many)?;
    let cols = enumerate_pure_strategies(tree, 1, cap).ok_or_else(too_many)?;
    let row_pols: Vec<_> = rows
        .iter()
        .map(|s| BehaviorPolicy::from_pure(tree, 0, s))
        .collect();
    let col_pols: Vec<_> = cols
        .iter()
        .map(|s| BehaviorPolicy::from_pure(tree, 1, s))
        .collect();
    let mut payoff = vec![vec![0.0; cols.len()]; rows.len()];
    for (i, rp) in row_pols.iter().enumerate() {
        for (j, cp) in col_pols.iter().enumerate() {
            payoff[i][j] = eval::expected_value(tree, &[rp.clone(), cp.clone()], counter)?;
        }
    }
    let solution = solve_matrix_lp(&MatrixGame::new(payoff)?)?;
    Ok([
        realize_mixture(tree, 0, &rows, &solution.row),
        realize_mixture(tree, 1, &cols, &solution.col),
    ])
}

#[derive(Debug, Clone)]
pub struct XdoResult {
    /// Final restricted solution, extended to the full game.
    pub profile: [BehaviorPolicy; 2],
    pub outer_iterations: u64,
    pub terminated: bool,
    /// Stopped by the node budget or the outer iteration cap.
    pub truncated: bool,
    pub final_eps: f64,
    pub final_exploitability: f64,
    pub records: Vec<Record>,
    pub population: Population,
    /// Allowed sets of the final restricted game.
    pub allowed: [Vec<Vec<u16>>; 2],
    pub restricted_counts: StateCounts,
    /// Covered-infostate count before each outer iteration.
    pub covered: Vec<usize>,
    /// Restricted and full exploitability of each outer iteration's inner solve.
    pub inner_exploitability: Vec<(f64, f64)>,
}

/// Runs XDO on a compiled game from the default initial population.
pub fn xdo_solve(
    tree: &Tree,
    config: &XdoConfig,
    counter: &NodeCounter,
) -> Result<XdoResult, SolveError> {
    xdo_solve_from(tree, config, Population::initial(tree), counter)
}

/// Runs XDO from a caller-supplied initial population.
pub fn xdo_solve_from(
    tree: &Tree,
    config: &XdoConfig,
    mut population: Population,
    counter: &NodeCounter,
) -> Result<XdoResult, SolveError> {
    config.validate()?;
    for p in 0..2 {
        if population.members(p).is_empty() {
            return Err(SolveError::EmptyPopulation(p + 1));
        }
    }
    let mut run = Run {
        full: tree,
        config,
        counter: counter.clone(),
        clock: Clock::new(config.record_wall_time),
        started: Instant::now(),
        outer: 0,
        pop: population.sizes(),
    };
    let mut warm = config.warm_start.then(|| WarmTables::new(tree));
    let mut eps = config.eps0;
    let mut records = Vec::new();
    let mut covered = Vec::new();
    let mut inner_exploitability = Vec::new();
    loop {
        run.outer += 1;
        run.pop = population.sizes();
        covered.push(covered_infostate_count(&population, tree));
        let allowed = population.allowed_sets(tree);
        let restricted = tree.restrict(&allowed);
        let threshold = config.termination_eps.unwrap_or(eps);
        let inner = inner_solve(&run, warm.as_mut(), &restricted, &allowed, eps, threshold)?;
        records.extend(inner.records.iter().cloned());
        records.push(Record {
            outer_iter: run.outer,
            inner_iter: None,
            nodes_visited: counter.get(),
            exploitability: inner.full.exploitability,
            pop: run.pop,
            restricted_states: Some(restricted.len()),
            wall_ms: run.clock.elapsed_ms(),
        });
        inner_exploitability.push((inner.restricted_exploitability, inner.full.exploitability));

        let terminated = !inner.truncated && inner.full.exploitability <= threshold;
        let out_of_budget =
            inner.truncated || run.budget_exhausted() || run.outer >= config.max_outer_iterations;
        if terminated || out_of_budget {
            return Ok(XdoResult {
                profile: inner.profile,
                outer_iterations: run.outer,
                terminated,
                truncated: !terminated,
                final_eps: eps,
                final_exploitability: inner.full.exploitability,
                records,
                population,
                restricted_counts: restricted.counts(),
                allowed,
                covered,
                inner_exploitability,
            });
        }
        let [br1, br2] = inner.best_responses;
        population.insert(0, br1.strategy);
        population.insert(1, br2.strategy);
        eps = (eps * config.eps_decay).max(config.eps_floor);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{Gmp, Kuhn, RpsChoice};
    use crate::tree::DEFAULT_MAX_NODES;

    fn build<G: Game>(g: &G) -> Tree {
        Tree::build(g, DEFAULT_MAX_NODES).unwrap()
    }

    #[test]
    fn singleton_population_allows_one_action_everywhere() {
        let t = build(&Kuhn::new());
        let pop = Population::initial(&t);
        let allowed = pop.allowed_sets(&t);
        assert!(allowed.iter().flatten().all(|a| a == &vec![0]));
    }

    #[test]
    fn root_divergence_allows_two_root_actions() {
        let g = RpsChoice::new();
        let t = build(&g);
        let mut pop = Population::initial(&t);
        let root = t
            .lookup(&InfostateKey::new(PlayerId::Player1, vec![]).unwrap())
            .unwrap() as usize;
        let mut s = PureStrategy::default_for(&t, 0);
        s.set(root, 1);
        assert!(pop.insert(0, s.clone()));
        assert!(!pop.insert(0, s));
        let allowed = pop.allowed_sets(&t);
        for (i, a) in allowed[0].iter().enumerate() {
            assert_eq!(a.len(), if i == root { 2 } else { 1 });
        }
    }

    #[test]
    fn restricted_game_compiles_to_the_restricted_tree() {
        let g = Kuhn::new();
        let t = build(&g);
        let mut pop = Population::initial(&t);
        let mut s = PureStrategy::default_for(&t, 1);
        for i in (0..t.infosets(1).len()).step_by(2) {
            s.set(i, 1);
        }
        pop.insert(1, s);
        let view = build_restricted_game(&g, &t, &pop).unwrap();
        let from_view = build(&view);
        let direct = t.restrict(&pop.allowed_sets(&t));
        assert_eq!(from_view.counts(), direct.counts());
        let payoffs = |t: &Tree| {
            let mut v: Vec<f64> = t.nodes().iter().map(|n| n.payoff).collect();
            v.sort_by(f64::total_cmp);
            v
        };
        assert_eq!(payoffs(&from_view), payoffs(&direct));
        for p in 0..2 {
            for info in direct.infosets(p) {
                let other = from_view.lookup(&info.key).unwrap();
                assert_eq!(
                    from_view.infoset(p, other as usize).num_actions(),
                    info.num_actions()
                );
            }
        }
    }

    #[test]
    fn empty_population_is_rejected() {
        let g = Kuhn::new();
        let t = build(&g);
        assert!(matches!(
            build_restricted_game(&g, &t, &Population::new()),
            Err(SolveError::EmptyPopulation(1))
        ));
        assert_eq!(covered_infostate_count(&Population::new(), &t), 0);
    }

    #[test]
    fn one_action_restricted_game_is_solved_immediately() {
        let t = build(&Kuhn::new());
        let pop = Population::initial(&t);
        let r = t.restrict(&pop.allowed_sets(&t));
        let sol = solve_normal_form(&r, 16, &NodeCounter::new()).unwrap();
        let (rep, _) = eval::evaluate(&r, &sol, &NodeCounter::new()).unwrap();
        assert_eq!(rep.exploitability, 0.0);
    }

    #[test]
    fn kgmp_terminates_within_two_n() {
        let t = build(&Gmp::kgmp(2, 3).unwrap());
        let config = XdoConfig {
            inner_solver: InnerSolver::NormalFormLp,
            termination_eps: Some(1e-6),
            ..Default::default()
        };
        let res = xdo_solve(&t, &config, &NodeCounter::new()).unwrap();
        assert!(res.terminated);
        assert!(res.outer_iterations <= 6, "{}", res.outer_iterations);
        assert!(res.final_exploitability <= 1e-6);
    }

    #[test]
    fn kuhn_with_cfr_plus_terminates_and_is_deterministic() {
        let t = build(&Kuhn::new());
        let config = XdoConfig::default();
        let a = xdo_solve(&t, &config, &NodeCounter::new()).unwrap();
        let b = xdo_solve(&t, &config, &NodeCounter::new()).unwrap();
        assert!(a.terminated);
        assert!(a.final_exploitability <= a.final_eps + 1e-6);
        assert_eq!(a.records, b.records);
        for w in a.covered.windows(2) {
            assert!(w[1] > w[0], "{:?}", a.covered);
        }
    }

    #[test]
    fn config_validation() {
        let bad = XdoConfig {
            eps_decay: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = XdoConfig {
            inner_check_period: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert!(XdoConfig::default().validate().is_ok());
    }
}
