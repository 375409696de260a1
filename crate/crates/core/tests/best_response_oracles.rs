use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use xdo_core::eval::{self, best_response, expected_value};
use xdo_core::games::{Gmp, Kuhn, Leduc, RpsChoice};
use xdo_core::policy::realize_mixture;
use xdo_core::solvers::{cfr, run_budgeted, solve_matrix_lp, Cfr, CfrConfig, MatrixGame};
use xdo_core::xdo::enumerate_pure_strategies;
use xdo_core::{BehaviorPolicy, NodeCounter, PureStrategy, SolverBudget, Tree, DEFAULT_MAX_NODES};

fn random_policy(tree: &Tree, player: usize, rng: &mut ChaCha8Rng) -> BehaviorPolicy {
    let mut probs = vec![0.0; tree.num_slots(player)];
    for info in tree.infosets(player) {
        let w: Vec<f64> = (0..info.num_actions())
            .map(|_| rng.gen::<f64>().powi(3) + 1e-3)
            .collect();
        let total: f64 = w.iter().sum();
        for (a, x) in w.into_iter().enumerate() {
            probs[info.offset + a] = x / total;
        }
    }
    BehaviorPolicy::from_slots(probs)
}

fn value_of(tree: &Tree, player: usize, mine: &BehaviorPolicy, theirs: &BehaviorPolicy) -> f64 {
    let profile = if player == 0 {
        [mine.clone(), theirs.clone()]
    } else {
        [theirs.clone(), mine.clone()]
    };
    let v = expected_value(tree, &profile, &NodeCounter::new()).unwrap();
    if player == 0 {
        v
    } else {
        -v
    }
}

/// Best value over every pure strategy of `player`.
fn brute_force_br(tree: &Tree, player: usize, opponent: &BehaviorPolicy) -> f64 {
    enumerate_pure_strategies(tree, player, 1 << 16)
        .unwrap()
        .iter()
        .map(|s| {
            value_of(
                tree,
                player,
                &BehaviorPolicy::from_pure(tree, player, s),
                opponent,
            )
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn check_against_brute_force(tree: &Tree, seeds: std::ops::Range<u64>) {
    for seed in seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for player in 0..2 {
            let opponent = random_policy(tree, 1 - player, &mut rng);
            let br = best_response(tree, player, &opponent, None, &NodeCounter::new()).unwrap();
            let oracle = brute_force_br(tree, player, &opponent);
            assert!(
                (br.value - oracle).abs() <= 1e-12,
                "seed {seed} player {player}: {} vs {oracle}",
                br.value
            );
            let attained = value_of(
                tree,
                player,
                &BehaviorPolicy::from_pure(tree, player, &br.strategy),
                &opponent,
            );
            assert!((attained - oracle).abs() <= 1e-12);
        }
    }
}

#[test]
fn kuhn_best_response_matches_enumeration() {
    let t = Tree::build(&Kuhn::new(), DEFAULT_MAX_NODES).unwrap();
    assert_eq!(enumerate_pure_strategies(&t, 0, 1 << 16).unwrap().len(), 64);
    check_against_brute_force(&t, 0..20);
}

#[test]
fn kgmp_best_response_matches_enumeration() {
    let t = Tree::build(&Gmp::kgmp(1, 3).unwrap(), DEFAULT_MAX_NODES).unwrap();
    check_against_brute_force(&t, 0..20);
    let t = Tree::build(&RpsChoice::new(), DEFAULT_MAX_NODES).unwrap();
    check_against_brute_force(&t, 0..10);
}

#[test]
fn pure_opponents_match_enumeration() {
    let t = Tree::build(&Kuhn::new(), DEFAULT_MAX_NODES).unwrap();
    for s in enumerate_pure_strategies(&t, 1, 1 << 16)
        .unwrap()
        .iter()
        .step_by(7)
    {
        let opponent = BehaviorPolicy::from_pure(&t, 1, s);
        let br = best_response(&t, 0, &opponent, None, &NodeCounter::new()).unwrap();
        assert!((br.value - brute_force_br(&t, 0, &opponent)).abs() <= 1e-12);
    }
}

#[test]
fn kuhn_cfr_plus_value_matches_normal_form_lp() {
    let t = Tree::build(&Kuhn::new(), DEFAULT_MAX_NODES).unwrap();
    let rows = enumerate_pure_strategies(&t, 0, 1 << 8).unwrap();
    let cols = enumerate_pure_strategies(&t, 1, 1 << 8).unwrap();
    let payoff = MatrixGame::from_fn(rows.len(), cols.len(), |i, j| {
        let profile = [
            BehaviorPolicy::from_pure(&t, 0, &rows[i]),
            BehaviorPolicy::from_pure(&t, 1, &cols[j]),
        ];
        expected_value(&t, &profile, &NodeCounter::new()).unwrap()
    })
    .unwrap();
    assert_eq!((payoff.rows(), payoff.cols()), (64, 64));
    let lp = solve_matrix_lp(&payoff).unwrap();
    assert!((lp.value + 1.0 / 18.0).abs() < 1e-9, "{}", lp.value);

    let mut solver = Cfr::new(
        &t,
        CfrConfig {
            plus: true,
            alternating: true,
        },
        NodeCounter::new(),
    );
    let out = run_budgeted(&mut solver, &SolverBudget::iterations(10_000));
    let report = eval::evaluate(&t, &out.profile, &NodeCounter::new())
        .unwrap()
        .0;
    assert!(report.exploitability < 1e-3, "{}", report.exploitability);
    assert!(
        (report.ev.0 - lp.value).abs() < 1e-3,
        "{} vs {}",
        report.ev.0,
        lp.value
    );

    // simultaneous updates converge more slowly
    let out = cfr(&t, 1000, true, &SolverBudget::default());
    let report = eval::evaluate(&t, &out.profile, &NodeCounter::new())
        .unwrap()
        .0;
    assert!(report.exploitability < 1e-2, "{}", report.exploitability);
}

/// Exploitability of a mixture over pure strategies, by enumerating the opponent's
/// pure strategies against each member.
fn mixture_exploitability(
    tree: &Tree,
    members: &[[Vec<PureStrategy>; 1]; 2],
    weights: &[Vec<f64>; 2],
) -> f64 {
    let mut total = 0.0;
    for p in 0..2 {
        let opp = 1 - p;
        let responses = enumerate_pure_strategies(tree, p, 1 << 16).unwrap();
        let best = responses
            .iter()
            .map(|r| {
                let mine = BehaviorPolicy::from_pure(tree, p, r);
                members[opp][0]
                    .iter()
                    .zip(&weights[opp])
                    .map(|(s, w)| {
                        w * value_of(tree, p, &mine, &BehaviorPolicy::from_pure(tree, opp, s))
                    })
                    .sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        total += best;
    }
    total
}

#[test]
fn realized_mixture_matches_enumerated_mixture() {
    let t = Tree::build(&Kuhn::new(), DEFAULT_MAX_NODES).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let members: [[Vec<PureStrategy>; 1]; 2] = [0, 1].map(|p| {
            let all = enumerate_pure_strategies(&t, p, 1 << 16).unwrap();
            [(0..4)
                .map(|_| all[rng.gen_range(0..all.len())].clone())
                .collect()]
        });
        let weights: [Vec<f64>; 2] = [0, 1].map(|_| {
            let w: Vec<f64> = (0..4).map(|_| rng.gen::<f64>() + 0.05).collect();
            let s: f64 = w.iter().sum();
            w.into_iter().map(|x| x / s).collect()
        });
        let realized = [0, 1].map(|p| realize_mixture(&t, p, &members[p][0], &weights[p]));
        let e = eval::exploitability(&t, &realized, &NodeCounter::new()).unwrap();
        let oracle = mixture_exploitability(&t, &members, &weights);
        assert!((e - oracle).abs() < 1e-12, "{e} vs {oracle}");
    }
}

#[test]
fn best_response_on_leduc_dominates_random_policies() {
    let t = Tree::build(&Leduc::new(), DEFAULT_MAX_NODES).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..5 {
        let profile = [
            random_policy(&t, 0, &mut rng),
            random_policy(&t, 1, &mut rng),
        ];
        let report = eval::evaluate(&t, &profile, &NodeCounter::new()).unwrap().0;
        assert!(report.br_values.0 >= report.ev.0 - 1e-9);
        assert!(report.br_values.1 >= report.ev.1 - 1e-9);
        assert!((report.exploitability - report.br_values.0 - report.br_values.1).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn best_response_dominates(seed in any::<u64>(), player in 0usize..2, on_gmp in any::<bool>()) {
        let t = if on_gmp {
            Tree::build(&Gmp::kgmp(2, 3).unwrap(), DEFAULT_MAX_NODES).unwrap()
        } else {
            Tree::build(&Kuhn::new(), DEFAULT_MAX_NODES).unwrap()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mine = random_policy(&t, player, &mut rng);
        let theirs = random_policy(&t, 1 - player, &mut rng);
        let br = best_response(&t, player, &theirs, None, &NodeCounter::new()).unwrap();
        prop_assert!(br.value >= value_of(&t, player, &mine, &theirs) - 1e-9);
    }

    #[test]
    fn exploitability_is_nonnegative(seed in any::<u64>()) {
        let t = Tree::build(&RpsChoice::new(), DEFAULT_MAX_NODES).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let profile = [random_policy(&t, 0, &mut rng), random_policy(&t, 1, &mut rng)];
        prop_assert!(eval::exploitability(&t, &profile, &NodeCounter::new()).unwrap() >= -1e-9);
    }
}
