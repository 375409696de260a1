//! Exact expected value, best response and exploitability over a compiled tree.
//!
//! Best responses are computed in two passes: a top-down pass collects, for each of
//! the responder's infoset nodes, the reach probability contributed by chance and the
//! opponent; a memoized bottom-up pass then picks the value-maximizing action per
//! infoset. Subtrees the opponent never plays into are skipped, so responses to
//! sparse policies are cheap.

use crate::counter::NodeCounter;
use crate::game_core::PlayerId;
use crate::policy::{BehaviorPolicy, PolicyProfile, PurePolicy, PureStrategy, TabularPolicy};
use crate::tree::{Tag, Tree};
use crate::EvalError;

/// Absolute tolerance for value comparisons.
pub const VALUE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueReport {
    pub ev: (f64, f64),
    pub br_values: (f64, f64),
    pub exploitability: f64,
}

impl ValueReport {
    /// What each player gains by switching to a best response.
    pub fn gains(&self) -> (f64, f64) {
        (self.br_values.0 - self.ev.0, self.br_values.1 - self.ev.1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestResponse {
    pub strategy: PureStrategy,
    pub value: f64,
}

fn missing(tree: &Tree, player: usize, infoset: u32) -> EvalError {
    EvalError::MissingInfostate(tree.infoset(player, infoset as usize).key.to_string())
}

/// Player one's expected value under `profile`.
pub fn expected_value(
    tree: &Tree,
    profile: &[BehaviorPolicy; 2],
    counter: &NodeCounter,
) -> Result<f64, EvalError> {
    let mut visits = 0u64;
    let v = ev_node(tree, profile, 0, &mut visits);
    counter.add(visits);
    v
}

fn ev_node(
    tree: &Tree,
    profile: &[BehaviorPolicy; 2],
    idx: usize,
    visits: &mut u64,
) -> Result<f64, EvalError> {
    *visits += 1;
    let node = tree.node(idx);
    match node.tag {
        Tag::Terminal => Ok(node.payoff),
        Tag::Chance => {
            let mut v = 0.0;
            for c in node.children() {
                v += tree.node(c).prob * ev_node(tree, profile, c, visits)?;
            }
            Ok(v)
        }
        tag => {
            let p = tag.player().unwrap();
            let info = tree.infoset(p, node.infoset as usize);
            let row = &profile[p].slots()[info.slots()];
            let mut v = 0.0;
            for (a, c) in node.children().enumerate() {
                let pr = row[a];
                if pr.is_nan() {
                    return Err(missing(tree, p, node.infoset));
                }
                if pr > 0.0 {
                    v += pr * ev_node(tree, profile, c, visits)?;
                }
            }
            Ok(v)
        }
    }
}

struct BrPass<'a> {
    tree: &'a Tree,
    me: usize,
    opponent: &'a BehaviorPolicy,
    prefer: Option<&'a [Vec<u16>]>,
    reach: Vec<Vec<(u32, f64)>>,
    best: Vec<u16>,
    values: Vec<f64>,
    visits: u64,
    missing: Option<u32>,
}

const UNSET: u16 = u16::MAX;

impl BrPass<'_> {
    fn collect(&mut self, idx: usize, reach: f64) {
        self.visits += 1;
        let node = *self.tree.node(idx);
        match node.tag {
            Tag::Terminal => {}
            Tag::Chance => {
                for c in node.children() {
                    self.collect(c, reach * self.tree.node(c).prob);
                }
            }
            tag if tag.player() == Some(self.me) => {
                self.reach[node.infoset as usize].push((idx as u32, reach));
                for c in node.children() {
                    self.collect(c, reach);
                }
            }
            _ => {
                let info = self.tree.infoset(1 - self.me, node.infoset as usize);
                for (a, c) in node.children().enumerate() {
                    let pr = self.opponent.slots()[info.offset + a];
                    if pr.is_nan() {
                        self.missing.get_or_insert(node.infoset);
                    } else if pr > 0.0 {
                        self.collect(c, reach * pr);
                    }
                }
            }
        }
    }

    fn value(&mut self, idx: usize) -> f64 {
        let memo = self.values[idx];
        if !memo.is_nan() {
            return memo;
        }
        self.visits += 1;
        let node = *self.tree.node(idx);
        let v = match node.tag {
            Tag::Terminal => {
                if self.me == 0 {
                    node.payoff
                } else {
                    -node.payoff
                }
            }
            Tag::Chance => node
                .children()
                .map(|c| self.tree.node(c).prob * self.value(c))
                .sum(),
            tag if tag.player() == Some(self.me) => {
                let a = self.best_action(node.infoset as usize);
                self.value(node.first_child as usize + a as usize)
            }
            _ => {
                let info = self.tree.infoset(1 - self.me, node.infoset as usize);
                let mut v = 0.0;
                for (a, c) in node.children().enumerate() {
                    let pr = self.opponent.slots()[info.offset + a];
                    if pr > 0.0 {
                        v += pr * self.value(c);
                    }
                }
                v
            }
        };
        self.values[idx] = v;
        v
    }

    fn best_action(&mut self, infoset: usize) -> u16 {
        if self.best[infoset] != UNSET {
            return self.best[infoset];
        }
        let n = self.tree.infoset(self.me, infoset).num_actions();
        let mut q = vec![0.0; n];
        let nodes = std::mem::take(&mut self.reach[infoset]);
        for &(h, r) in &nodes {
            let first = self.tree.node(h as usize).first_child as usize;
            for (a, qa) in q.iter_mut().enumerate() {
                *qa += r * self.value(first + a);
            }
        }
        self.reach[infoset] = nodes;
        let choice = pick_action(&q, self.prefer.map(|p| p[infoset].as_slice()));
        self.best[infoset] = choice;
        choice
    }
}

/// Index of a maximal entry of `q`. Entries within [`VALUE_TOL`] of the maximum tie;
/// ties go to the lowest-index action in `prefer` if any, else the lowest index.
pub fn pick_action(q: &[f64], prefer: Option<&[u16]>) -> u16 {
    let max = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tied = |a: usize| q[a] >= max - VALUE_TOL;
    if let Some(allowed) = prefer {
        if let Some(&a) = allowed.iter().find(|&&a| tied(a as usize)) {
            return a;
        }
    }
    (0..q.len()).find(|&a| tied(a)).unwrap_or(0) as u16
}

/// Exact best response of `player` (0 or 1) to the opponent's policy.
///
/// `prefer[infoset]`, when given, lists already-allowed actions (sorted) that win
/// value ties. Infosets the opponent and chance never reach get the same tie-break
/// over equal (zero) values, so the returned strategy is total.
pub fn best_response(
    tree: &Tree,
    player: usize,
    opponent: &BehaviorPolicy,
    prefer: Option<&[Vec<u16>]>,
    counter: &NodeCounter,
) -> Result<BestResponse, EvalError> {
    let infosets = tree.infosets(player).len();
    let mut pass = BrPass {
        tree,
        me: player,
        opponent,
        prefer,
        reach: vec![Vec::new(); infosets],
        best: vec![UNSET; infosets],
        values: vec![f64::NAN; tree.len()],
        visits: 0,
        missing: None,
    };
    pass.collect(0, 1.0);
    if let Some(i) = pass.missing {
        counter.add(pass.visits);
        return Err(missing(tree, 1 - player, i));
    }
    let value = pass.value(0);
    let zero = |i: usize| -> u16 { prefer.map_or(0, |p| p[i].first().copied().unwrap_or(0)) };
    let actions = (0..infosets)
        .map(|i| {
            if pass.best[i] == UNSET {
                zero(i)
            } else {
                pass.best[i]
            }
        })
        .collect();
    counter.add(pass.visits);
    Ok(BestResponse {
        strategy: PureStrategy::from_actions(actions),
        value,
    })
}

/// Best-response value only.
pub fn best_response_value(
    tree: &Tree,
    player: usize,
    opponent: &BehaviorPolicy,
    counter: &NodeCounter,
) -> Result<f64, EvalError> {
    Ok(best_response(tree, player, opponent, None, counter)?.value)
}

/// Both best responses, the profile's value and its exploitability
/// `br_value_1 + br_value_2`.
pub fn evaluate(
    tree: &Tree,
    profile: &[BehaviorPolicy; 2],
    counter: &NodeCounter,
) -> Result<(ValueReport, [BestResponse; 2]), EvalError> {
    evaluate_with_preference(tree, profile, None, counter)
}

pub fn evaluate_with_preference(
    tree: &Tree,
    profile: &[BehaviorPolicy; 2],
    prefer: Option<&[Vec<Vec<u16>>; 2]>,
    counter: &NodeCounter,
) -> Result<(ValueReport, [BestResponse; 2]), EvalError> {
    let ev = expected_value(tree, profile, counter)?;
    let br1 = best_response(
        tree,
        0,
        &profile[1],
        prefer.map(|p| p[0].as_slice()),
        counter,
    )?;
    let br2 = best_response(
        tree,
        1,
        &profile[0],
        prefer.map(|p| p[1].as_slice()),
        counter,
    )?;
    let report = ValueReport {
        ev: (ev, -ev),
        br_values: (br1.value, br2.value),
        exploitability: br1.value + br2.value,
    };
    Ok((report, [br1, br2]))
}

pub fn exploitability(
    tree: &Tree,
    profile: &[BehaviorPolicy; 2],
    counter: &NodeCounter,
) -> Result<f64, EvalError> {
    let b1 = best_response_value(tree, 0, &profile[1], counter)?;
    let b2 = best_response_value(tree, 1, &profile[0], counter)?;
    Ok(b1 + b2)
}

/// Whether `candidate` is within `eps` of a best response for `player`.
pub fn is_epsilon_br(
    tree: &Tree,
    player: usize,
    candidate: &BehaviorPolicy,
    opponent: &BehaviorPolicy,
    eps: f64,
) -> Result<bool, EvalError> {
    let scratch = NodeCounter::new();
    let best = best_response_value(tree, player, opponent, &scratch)?;
    let profile = if player == 0 {
        [candidate.clone(), opponent.clone()]
    } else {
        [opponent.clone(), candidate.clone()]
    };
    let v = expected_value(tree, &profile, &scratch)?;
    let mine = if player == 0 { v } else { -v };
    Ok(mine >= best - eps - VALUE_TOL)
}

/// Keyed-policy evaluation: values, best-response values and exploitability.
pub fn evaluate_profile(tree: &Tree, profile: &PolicyProfile) -> Result<ValueReport, EvalError> {
    let dense = profile.to_behavior(tree)?;
    Ok(evaluate(tree, &dense, &NodeCounter::new())?.0)
}

/// Keyed best response of `player` against `opponent`.
pub fn best_response_to(
    tree: &Tree,
    opponent: &TabularPolicy,
    player: PlayerId,
) -> Result<(PurePolicy, f64), EvalError> {
    let p = player.index().ok_or(crate::GameError::ChanceInfostate)?;
    let opp = opponent.to_behavior(tree, 1 - p)?;
    let br = best_response(tree, p, &opp, None, &NodeCounter::new())?;
    Ok((br.strategy.to_pure_policy(tree, p), br.value))
}
