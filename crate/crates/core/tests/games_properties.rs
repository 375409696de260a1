use proptest::prelude::*;

use xdo_core::games::audit::{audit, replay_is_deterministic};
use xdo_core::games::{make_game, GameConfig, Gmp, Kuhn, Leduc, OshiZumo, RpsChoice};
use xdo_core::psro::count_reduced;
use xdo_core::solvers::{solve_matrix_lp, MatrixGame};
use xdo_core::xdo::enumerate_pure_strategies;
use xdo_core::{
    eval, ActionId, BehaviorPolicy, Game, NodeCounter, NodeKind, Tree, DEFAULT_MAX_NODES,
};

const LIMIT: usize = 2_000_000;

#[test]
fn shipped_small_games_pass_the_audit() {
    audit(&Kuhn::new(), LIMIT).unwrap();
    audit(&Leduc::new(), LIMIT).unwrap();
    audit(&RpsChoice::new(), LIMIT).unwrap();
    audit(&OshiZumo::new(4, 3, 6).unwrap(), LIMIT).unwrap();
    for k in 1..=3 {
        for n in 2..=4 {
            audit(&Gmp::kgmp(k, n).unwrap(), LIMIT).unwrap();
        }
    }
    audit(&Gmp::new(2, 3, 4).unwrap(), LIMIT).unwrap();
    audit(&Gmp::perturbed(3, 3, 5).unwrap(), LIMIT).unwrap();
}

#[test]
fn audit_counts_match_the_compiled_tree() {
    for cfg in [
        GameConfig::Kuhn,
        GameConfig::Leduc,
        GameConfig::RpsChoice,
        GameConfig::Kgmp { k: 3, n: 4 },
    ] {
        let g = make_game(&cfg).unwrap();
        let report = audit(&g, LIMIT).unwrap();
        let counts = Tree::build(&g, DEFAULT_MAX_NODES).unwrap().counts();
        assert_eq!(report.histories, counts.histories, "{cfg}");
        assert_eq!(report.terminals, counts.terminals, "{cfg}");
        assert_eq!(report.infostates, counts.infostates, "{cfg}");
    }
}

#[test]
fn kgmp_single_stage_has_nine_terminals() {
    let t = Tree::build(&Gmp::kgmp(1, 3).unwrap(), DEFAULT_MAX_NODES).unwrap();
    let c = t.counts();
    assert_eq!((c.chance_nodes, c.decision_nodes, c.terminals), (1, 4, 9));
}

#[test]
fn clone_leduc_is_about_fifty_times_leduc() {
    let leduc = Tree::build(&Leduc::new(), DEFAULT_MAX_NODES).unwrap().len() as f64;
    let clone = Tree::build(&Leduc::with_clones(2).unwrap(), DEFAULT_MAX_NODES)
        .unwrap()
        .len() as f64;
    let ratio = clone / leduc;
    assert!((35.0..=65.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn rps_choice_reduced_strategy_counts() {
    let t = Tree::build(&RpsChoice::new(), DEFAULT_MAX_NODES).unwrap();
    for (p, expected) in [(0, 6), (1, 9)] {
        let all = enumerate_pure_strategies(&t, p, 1 << 12).unwrap();
        assert_eq!(count_reduced(&t, p, &all), expected);
    }
}

/// Walks two clone subtrees in lockstep and compares structure and payoffs.
fn same_up_to_clone_tokens(
    g: &Leduc,
    a: &<Leduc as Game>::State,
    b: &<Leduc as Game>::State,
) -> bool {
    let kind = g.kind(a);
    if kind != g.kind(b) {
        return false;
    }
    match kind {
        NodeKind::Terminal => g.payoff(a) == g.payoff(b),
        NodeKind::Chance => {
            let (oa, ob) = (g.chance_outcomes(a).unwrap(), g.chance_outcomes(b).unwrap());
            oa.len() == ob.len()
                && oa.iter().zip(&ob).all(|(x, y)| {
                    x.1 == y.1
                        && same_up_to_clone_tokens(
                            g,
                            &g.apply(a, x.0).unwrap(),
                            &g.apply(b, y.0).unwrap(),
                        )
                })
        }
        NodeKind::Decision(_) => {
            let n = g.num_actions(a);
            n == g.num_actions(b)
                && (0..n).all(|i| {
                    let act = ActionId(i as u16);
                    same_up_to_clone_tokens(g, &g.apply(a, act).unwrap(), &g.apply(b, act).unwrap())
                })
        }
    }
}

#[test]
fn clone_actions_are_payoff_identical() {
    let g = Leduc::with_clones(2).unwrap();
    let root = g.root();
    let deal = g.apply(&root, ActionId(7)).unwrap();
    // first decision: base actions call and raise, two clones each
    assert_eq!(g.num_actions(&deal), 4);
    for base in 0..2u16 {
        let c0 = g.apply(&deal, ActionId(base * 2)).unwrap();
        let c1 = g.apply(&deal, ActionId(base * 2 + 1)).unwrap();
        assert!(same_up_to_clone_tokens(&g, &c0, &c1));
        let p2 = xdo_core::PlayerId::Player2;
        assert_ne!(
            g.infostate_key(&c0, p2).unwrap(),
            g.infostate_key(&c1, p2).unwrap()
        );
    }
}

#[test]
fn oshi_zumo_positions_and_coins_stay_in_range() {
    let g = OshiZumo::new(4, 3, 6).unwrap();
    fn walk(g: &OshiZumo, s: &<OshiZumo as Game>::State, rounds: u32) {
        let pos = g.position(s);
        assert!((-1..=3).contains(&pos), "position {pos}");
        assert!(rounds <= 6);
        if g.is_terminal(s) {
            let off = !(0..3).contains(&pos);
            assert!(off || rounds == 6 || g.coins_left(s) == [0, 0]);
            return;
        }
        let p1_moves = g.kind(s) == NodeKind::Decision(xdo_core::PlayerId::Player1);
        for a in g.legal_actions(s).unwrap() {
            let next = g.apply(s, a).unwrap();
            walk(g, &next, rounds + u32::from(!p1_moves));
        }
    }
    walk(&g, &g.root(), 0);
}

#[test]
fn uniform_is_an_exact_equilibrium_of_unperturbed_gmp() {
    for (k, n, m) in [
        (1, 2, 1),
        (1, 3, 1),
        (2, 3, 1),
        (3, 4, 1),
        (2, 3, 4),
        (1, 2, 3),
    ] {
        let t = Tree::build(&Gmp::new(k, n, m).unwrap(), DEFAULT_MAX_NODES).unwrap();
        let uniform = [
            BehaviorPolicy::uniform(&t, 0),
            BehaviorPolicy::uniform(&t, 1),
        ];
        let e = eval::exploitability(&t, &uniform, &NodeCounter::new()).unwrap();
        assert!(e <= 1e-9, "k={k} n={n} m={m}: {e}");
    }
}

#[test]
fn perturbed_stage_games_have_distinct_equilibria() {
    let g = Gmp::perturbed(4, 4, 11).unwrap();
    let solutions: Vec<Vec<f64>> = (0..4)
        .map(|j| {
            solve_matrix_lp(&MatrixGame::new(g.stage_matrix(j)).unwrap())
                .unwrap()
                .col
        })
        .collect();
    for a in 0..4 {
        for b in a + 1..4 {
            let diff = solutions[a]
                .iter()
                .zip(&solutions[b])
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            assert!(diff > 1e-6, "stages {a} and {b} share an equilibrium");
        }
    }
    let unperturbed = Gmp::kgmp(2, 4).unwrap();
    assert_eq!(unperturbed.stage_matrix(0), unperturbed.stage_matrix(1));
}

fn random_playout<G: Game>(g: &G, choices: &[u16]) -> Vec<ActionId> {
    let mut s = g.root();
    let mut path = Vec::new();
    let mut i = 0;
    while !g.is_terminal(&s) {
        let n = g.num_actions(&s) as u16;
        let a = ActionId(choices[i % choices.len()] % n);
        i += 1;
        path.push(a);
        s = g.apply(&s, a).unwrap();
    }
    path
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn replays_are_deterministic(choices in prop::collection::vec(0u16..64, 1..16)) {
        let leduc = Leduc::with_clones(2).unwrap();
        prop_assert!(replay_is_deterministic(&leduc, &random_playout(&leduc, &choices)).unwrap());
        let oshi = OshiZumo::new(4, 3, 6).unwrap();
        prop_assert!(replay_is_deterministic(&oshi, &random_playout(&oshi, &choices)).unwrap());
    }

    #[test]
    fn terminal_payoffs_are_zero_sum(choices in prop::collection::vec(0u16..64, 1..16)) {
        let g = Leduc::with_clones(2).unwrap();
        let mut s = g.root();
        for a in random_playout(&g, &choices) {
            s = g.apply(&s, a).unwrap();
        }
        let (a, b) = g.returns(&s).unwrap();
        prop_assert_eq!(a + b, 0.0);
    }
}
