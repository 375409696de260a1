use proptest::prelude::*;

use xdo_core::games::{rps_payoff, Gmp, Kuhn, RpsChoice};
use xdo_core::psro::{psro_solve, MetaGame, MetaSolver, PayoffMode, PsroConfig, PsroResult};
use xdo_core::xdo::{enumerate_pure_strategies, Population};
use xdo_core::{
    ActionId, Game, NodeCounter, NodeKind, PlayerId, PureStrategy, Tree, DEFAULT_MAX_NODES,
};

/// One simultaneous round of rock-paper-scissors.
#[derive(Debug)]
struct Rps;

impl Game for Rps {
    type State = Vec<u16>;
    fn name(&self) -> String {
        "rps".into()
    }
    fn root(&self) -> Vec<u16> {
        Vec::new()
    }
    fn kind(&self, s: &Vec<u16>) -> NodeKind {
        match s.len() {
            0 => NodeKind::Decision(PlayerId::Player1),
            1 => NodeKind::Decision(PlayerId::Player2),
            _ => NodeKind::Terminal,
        }
    }
    fn num_actions(&self, s: &Vec<u16>) -> usize {
        if s.len() < 2 {
            3
        } else {
            0
        }
    }
    fn next(&self, s: &Vec<u16>, a: ActionId) -> Vec<u16> {
        let mut out = s.clone();
        out.push(a.0);
        out
    }
    fn chance_probs(&self, _: &Vec<u16>) -> Vec<f64> {
        Vec::new()
    }
    fn payoff(&self, s: &Vec<u16>) -> f64 {
        rps_payoff(s[0] as u8, s[1] as u8)
    }
    fn info_tokens(&self, _: &Vec<u16>, _: PlayerId) -> Vec<u16> {
        Vec::new()
    }
    fn depth(&self, s: &Vec<u16>) -> usize {
        s.len()
    }
}

fn pure_strategy_count(tree: &Tree, player: usize) -> f64 {
    tree.infosets(player)
        .iter()
        .map(|i| i.num_actions() as f64)
        .product()
}

fn check_growth(res: &PsroResult) {
    let pops: Vec<(usize, usize)> = res.records.iter().map(|r| r.pop).collect();
    for w in pops.windows(2) {
        assert!(w[1].0 >= w[0].0 && w[1].1 >= w[0].1);
        assert!(w[1] != w[0], "population stalled: {pops:?}");
    }
}

#[test]
fn populations_respect_the_pure_strategy_bound() {
    let games = [
        Tree::build(&Kuhn::new(), DEFAULT_MAX_NODES).unwrap(),
        Tree::build(&RpsChoice::new(), DEFAULT_MAX_NODES).unwrap(),
        Tree::build(&Gmp::kgmp(2, 3).unwrap(), DEFAULT_MAX_NODES).unwrap(),
        Tree::build(&Gmp::new(1, 2, 3).unwrap(), DEFAULT_MAX_NODES).unwrap(),
        Tree::build(&Gmp::perturbed(2, 3, 5).unwrap(), DEFAULT_MAX_NODES).unwrap(),
    ];
    for t in &games {
        let res = psro_solve(
            t,
            &PsroConfig {
                eps: 0.0,
                max_iterations: 200,
                ..Default::default()
            },
            &NodeCounter::new(),
        )
        .unwrap();
        let (a, b) = res.population.sizes();
        assert!(a as f64 <= pure_strategy_count(t, 0) && b as f64 <= pure_strategy_count(t, 1));
        check_growth(&res);
    }
}

#[test]
fn single_rps_needs_at_most_four_strategies() {
    let t = Tree::build(&Rps, DEFAULT_MAX_NODES).unwrap();
    let config = PsroConfig {
        eps: 1e-6,
        ..Default::default()
    };
    let res = psro_solve(&t, &config, &NodeCounter::new()).unwrap();
    assert!(res.terminated);
    let (a, b) = res.population.sizes();
    assert!(a <= 4 && b <= 4, "{a} {b}");
    assert!(res.final_exploitability <= 1e-6);
    let rock = PureStrategy::from_actions(vec![0]);
    let paper = PureStrategy::from_actions(vec![1]);
    let mut pop = Population::new();
    pop.insert(0, rock);
    pop.insert(1, paper);
    let m = MetaGame::compute(&t, &pop, PayoffMode::Exact, &NodeCounter::new());
    assert_eq!(m.payoff, vec![vec![-1.0]]);
}

#[test]
fn sampled_payoffs_agree_with_exact_values() {
    let t = Tree::build(&Kuhn::new(), DEFAULT_MAX_NODES).unwrap();
    let all = [0, 1].map(|p| enumerate_pure_strategies(&t, p, 1 << 8).unwrap());
    let mut pop = Population::new();
    for (i, j) in [(0, 0), (5, 17), (63, 40), (22, 9)] {
        pop.insert(0, all[0][i].clone());
        pop.insert(1, all[1][j].clone());
    }
    let exact = MetaGame::compute(&t, &pop, PayoffMode::Exact, &NodeCounter::new());
    let games = 10_000;
    let sampled = MetaGame::compute(
        &t,
        &pop,
        PayoffMode::Sampled {
            games_per_pair: games,
            seed: 1,
        },
        &NodeCounter::new(),
    );
    // payoffs lie in [-2, 2], so the standard deviation is at most 2
    let se = 2.0 / (games as f64).sqrt();
    for (er, sr) in exact.payoff.iter().zip(&sampled.payoff) {
        for (e, s) in er.iter().zip(sr) {
            assert!((e - s).abs() <= 3.0 * se, "{e} vs {s}");
        }
    }
}

#[test]
fn meta_matrix_permutes_with_the_population() {
    let t = Tree::build(&Kuhn::new(), DEFAULT_MAX_NODES).unwrap();
    let all = [0, 1].map(|p| enumerate_pure_strategies(&t, p, 1 << 8).unwrap());
    let picks = [3, 30, 50];
    let build = |order: &[usize]| {
        let mut pop = Population::new();
        for &i in order {
            pop.insert(0, all[0][picks[i]].clone());
            pop.insert(1, all[1][picks[i]].clone());
        }
        MetaGame::compute(&t, &pop, PayoffMode::Exact, &NodeCounter::new()).payoff
    };
    let a = build(&[0, 1, 2]);
    let b = build(&[2, 0, 1]);
    let perm = [2, 0, 1];
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(b[i][j], a[perm[i]][perm[j]]);
        }
    }
}

#[test]
fn perturbed_kgmp_forces_large_populations() {
    let mut large = 0;
    for seed in 0..20 {
        let t = Tree::build(&Gmp::perturbed(4, 4, seed).unwrap(), DEFAULT_MAX_NODES).unwrap();
        let res = psro_solve(
            &t,
            &PsroConfig {
                eps: 0.01,
                ..Default::default()
            },
            &NodeCounter::new(),
        )
        .unwrap();
        let (a, b) = res.population.sizes();
        if a >= 13 && b >= 13 {
            large += 1;
        }
    }
    assert!(large > 10, "{large} of 20");
}

#[test]
fn exploitability_trends_down() {
    for t in [
        Tree::build(&Kuhn::new(), DEFAULT_MAX_NODES).unwrap(),
        Tree::build(&Gmp::perturbed(2, 3, 4).unwrap(), DEFAULT_MAX_NODES).unwrap(),
    ] {
        let config = PsroConfig {
            meta_solver: MetaSolver::Lp,
            eps: 1e-9,
            ..Default::default()
        };
        let res = psro_solve(&t, &config, &NodeCounter::new()).unwrap();
        let e: Vec<f64> = res.records.iter().map(|r| r.exploitability).collect();
        let half = e.len() / 2;
        let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len().max(1) as f64;
        assert!(mean(&e[half..]) <= 1.1 * mean(&e[..half.max(1)]), "{e:?}");
        assert!(e.last().unwrap() <= &(1.1 * e[0]));
    }
}

#[test]
fn seeded_runs_are_reproducible() {
    let t = Tree::build(&Kuhn::new(), DEFAULT_MAX_NODES).unwrap();
    let config = PsroConfig {
        payoff_mode: PayoffMode::Sampled {
            games_per_pair: 100,
            seed: 7,
        },
        ..Default::default()
    };
    let a = psro_solve(&t, &config, &NodeCounter::new()).unwrap();
    let b = psro_solve(&t, &config, &NodeCounter::new()).unwrap();
    assert_eq!(a.records, b.records);
    assert_eq!(a.meta_weights, b.meta_weights);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_starts_grow_and_stay_bounded(seed in any::<u64>(), fp in any::<bool>()) {
        let t = Tree::build(&RpsChoice::new(), DEFAULT_MAX_NODES).unwrap();
        let meta_solver = if fp { MetaSolver::Fp(2000) } else { MetaSolver::LpCentral };
        let config = PsroConfig {
            meta_solver,
            initial: xdo_core::psro::InitialPopulation::Random(seed),
            ..Default::default()
        };
        let res = psro_solve(&t, &config, &NodeCounter::new()).unwrap();
        check_growth(&res);
        let (a, b) = res.population.sizes();
        prop_assert!(a <= 27 && b <= 27);
        prop_assert!(res.strategies_expanded.0 <= 6 && res.strategies_expanded.1 <= 9);
    }
}
