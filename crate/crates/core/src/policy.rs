//! Policy representations.
//!
//! [`TabularPolicy`] and [`PurePolicy`] are keyed by [`InfostateKey`] and independent of
//! any compiled tree. Solvers work with the dense [`BehaviorPolicy`] and
//! [`PureStrategy`], which index a specific [`Tree`]'s infosets and action slots.

use std::collections::BTreeMap;

use crate::game_core::{ActionId, InfostateKey};
use crate::tree::Tree;
use crate::EvalError;

/// Dense behavioral policy of one player over a tree's action slots.
#[derive(Debug, Clone, PartialEq)]
pub struct BehaviorPolicy {
    probs: Vec<f64>,
}

impl BehaviorPolicy {
    pub fn from_slots(probs: Vec<f64>) -> Self {
        BehaviorPolicy { probs }
    }

    pub fn uniform(tree: &Tree, player: usize) -> Self {
        let mut probs = vec![0.0; tree.num_slots(player)];
        for info in tree.infosets(player) {
            let u = 1.0 / info.num_actions() as f64;
            probs[info.slots()].fill(u);
        }
        BehaviorPolicy { probs }
    }

    pub fn from_pure(tree: &Tree, player: usize, pure: &PureStrategy) -> Self {
        let mut probs = vec![0.0; tree.num_slots(player)];
        for (info, &a) in tree.infosets(player).iter().zip(pure.actions()) {
            probs[info.offset + a as usize] = 1.0;
        }
        BehaviorPolicy { probs }
    }

    #[inline]
    pub fn slots(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    pub fn slots_mut(&mut self) -> &mut [f64] {
        &mut self.probs
    }

    #[inline]
    pub fn row(&self, tree: &Tree, player: usize, infoset: usize) -> &[f64] {
        &self.probs[tree.infoset(player, infoset).slots()]
    }

    /// Largest deviation of any row from summing to one.
    pub fn max_row_error(&self, tree: &Tree, player: usize) -> f64 {
        tree.infosets(player)
            .iter()
            .map(|info| (self.probs[info.slots()].iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Dense deterministic strategy: one local action per infoset of a tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PureStrategy {
    actions: Vec<u16>,
}

impl PureStrategy {
    /// Lowest-index action everywhere.
    pub fn default_for(tree: &Tree, player: usize) -> Self {
        PureStrategy {
            actions: vec![0; tree.infosets(player).len()],
        }
    }

    pub fn from_actions(actions: Vec<u16>) -> Self {
        PureStrategy { actions }
    }

    #[inline]
    pub fn actions(&self) -> &[u16] {
        &self.actions
    }

    #[inline]
    pub fn action(&self, infoset: usize) -> u16 {
        self.actions[infoset]
    }

    pub fn set(&mut self, infoset: usize, action: u16) {
        self.actions[infoset] = action;
    }

    /// Keyed form over `tree`'s infosets, with base-game action indices.
    pub fn to_pure_policy(&self, tree: &Tree, player: usize) -> PurePolicy {
        let table = tree
            .infosets(player)
            .iter()
            .zip(&self.actions)
            .map(|(info, &a)| (info.key.clone(), ActionId(info.labels[a as usize])))
            .collect();
        PurePolicy { table }
    }
}

/// Behavioral policy keyed by infostate. Infostates absent from the table play their
/// lowest-index action when `default_first_action` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularPolicy {
    pub table: BTreeMap<InfostateKey, Vec<f64>>,
    pub default_first_action: bool,
}

impl Default for TabularPolicy {
    fn default() -> Self {
        TabularPolicy {
            table: BTreeMap::new(),
            default_first_action: true,
        }
    }
}

impl TabularPolicy {
    pub fn new() -> Self {
        Self::default()
    }

    /// A policy with no fallback: evaluating it where a reachable infostate is
    /// missing is an error.
    pub fn strict() -> Self {
        TabularPolicy {
            table: BTreeMap::new(),
            default_first_action: false,
        }
    }

    pub fn insert(&mut self, key: InfostateKey, probs: Vec<f64>) {
        self.table.insert(key, probs);
    }

    pub fn get(&self, key: &InfostateKey) -> Option<&[f64]> {
        self.table.get(key).map(Vec::as_slice)
    }

    /// Dense form over `tree`. Missing infostates get the one-hot default row, or NaN
    /// when the policy is strict (caught when such a row is reached).
    pub fn to_behavior(&self, tree: &Tree, player: usize) -> Result<BehaviorPolicy, EvalError> {
        let mut probs = vec![0.0; tree.num_slots(player)];
        for info in tree.infosets(player) {
            let row = &mut probs[info.slots()];
            match self.table.get(&info.key) {
                Some(v) => {
                    if v.len() != row.len() {
                        return Err(EvalError::BadRow {
                            key: info.key.to_string(),
                            reason: format!("{} entries for {} actions", v.len(), row.len()),
                        });
                    }
                    let sum: f64 = v.iter().sum();
                    if v.iter().any(|&p| !(p >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
                        return Err(EvalError::BadRow {
                            key: info.key.to_string(),
                            reason: format!("not a distribution (sum {sum})"),
                        });
                    }
                    row.copy_from_slice(v);
                }
                None if self.default_first_action => row[0] = 1.0,
                None => row.fill(f64::NAN),
            }
        }
        Ok(BehaviorPolicy { probs })
    }

    pub fn from_behavior(tree: &Tree, player: usize, policy: &BehaviorPolicy) -> Self {
        let table = tree
            .infosets(player)
            .iter()
            .map(|info| (info.key.clone(), policy.slots()[info.slots()].to_vec()))
            .collect();
        TabularPolicy {
            table,
            default_first_action: true,
        }
    }
}

/// One tabular policy per player.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolicyProfile {
    pub policies: [TabularPolicy; 2],
}

impl PolicyProfile {
    pub fn new(p1: TabularPolicy, p2: TabularPolicy) -> Self {
        PolicyProfile { policies: [p1, p2] }
    }

    pub fn to_behavior(&self, tree: &Tree) -> Result<[BehaviorPolicy; 2], EvalError> {
        Ok([
            self.policies[0].to_behavior(tree, 0)?,
            self.policies[1].to_behavior(tree, 1)?,
        ])
    }

    pub fn from_behavior(tree: &Tree, profile: &[BehaviorPolicy; 2]) -> Self {
        PolicyProfile {
            policies: [
                TabularPolicy::from_behavior(tree, 0, &profile[0]),
                TabularPolicy::from_behavior(tree, 1, &profile[1]),
            ],
        }
    }
}

/// Deterministic policy keyed by infostate; absent keys play action 0.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PurePolicy {
    pub table: BTreeMap<InfostateKey, ActionId>,
}

impl PurePolicy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn action(&self, key: &InfostateKey) -> ActionId {
        self.table.get(key).copied().unwrap_or_default()
    }

    /// Dense form over `tree`. Fails if a stored action is not legal there.
    pub fn to_strategy(&self, tree: &Tree, player: usize) -> Result<PureStrategy, EvalError> {
        let mut actions = Vec::with_capacity(tree.infosets(player).len());
        for info in tree.infosets(player) {
            let a = self.action(&info.key);
            match info.labels.iter().position(|&l| l == a.0) {
                Some(local) => actions.push(local as u16),
                None => {
                    return Err(EvalError::BadRow {
                        key: info.key.to_string(),
                        reason: format!("action {a} not available"),
                    })
                }
            }
        }
        Ok(PureStrategy { actions })
    }

    pub fn to_tabular(&self, tree: &Tree, player: usize) -> Result<TabularPolicy, EvalError> {
        let s = self.to_strategy(tree, player)?;
        Ok(TabularPolicy::from_behavior(
            tree,
            player,
            &BehaviorPolicy::from_pure(tree, player, &s),
        ))
    }
}

/// Completes a partial pure policy over every infostate of `player` in `tree`,
/// assigning the lowest-index legal action where the table has no entry. Existing
/// entries are kept as they are.
pub fn extend_with_default(policy: &PurePolicy, tree: &Tree, player: usize) -> PurePolicy {
    let mut table = policy.table.clone();
    for info in tree.infosets(player) {
        table
            .entry(info.key.clone())
            .or_insert(ActionId(info.labels[0]));
    }
    PurePolicy { table }
}

/// Whether `pure`'s own actions lead to each infoset of `player`.
pub fn pure_reach(tree: &Tree, player: usize, pure: &PureStrategy) -> Vec<bool> {
    let infosets = tree.infosets(player);
    let mut reach: Vec<Option<bool>> = vec![None; infosets.len()];
    fn fill(
        tree: &Tree,
        player: usize,
        pure: &PureStrategy,
        reach: &mut [Option<bool>],
        i: usize,
    ) -> bool {
        if let Some(r) = reach[i] {
            return r;
        }
        let r = match tree.infoset(player, i).parent {
            None => true,
            Some((pi, a)) => {
                pure.action(pi as usize) == a && fill(tree, player, pure, reach, pi as usize)
            }
        };
        reach[i] = Some(r);
        r
    }
    (0..infosets.len())
        .map(|i| fill(tree, player, pure, &mut reach, i))
        .collect()
}

/// Behavioral policy realization-equivalent to the mixture of `members` with `weights`.
///
/// Each infoset's row averages the members' one-hot rows, weighted by mixture weight
/// times whether the member reaches the infoset. Infosets no weighted member reaches
/// play the lowest-index action.
pub fn realize_mixture(
    tree: &Tree,
    player: usize,
    members: &[PureStrategy],
    weights: &[f64],
) -> BehaviorPolicy {
    let mut probs = vec![0.0; tree.num_slots(player)];
    let mut mass = vec![0.0; tree.infosets(player).len()];
    for (member, &w) in members.iter().zip(weights) {
        if w <= 0.0 {
            continue;
        }
        for (i, reached) in pure_reach(tree, player, member).into_iter().enumerate() {
            if reached {
                probs[tree.infoset(player, i).offset + member.action(i) as usize] += w;
                mass[i] += w;
            }
        }
    }
    for (i, info) in tree.infosets(player).iter().enumerate() {
        let row = &mut probs[info.slots()];
        if mass[i] > 0.0 {
            row.iter_mut().for_each(|p| *p /= mass[i]);
        } else {
            row[0] = 1.0;
        }
    }
    BehaviorPolicy { probs }
}
