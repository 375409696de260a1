//! Exhaustive structural checks for a [`Game`].

use std::collections::HashMap;

use thiserror::Error;

use crate::game_core::{ActionId, Game, GameError, InfostateKey, NodeKind, PlayerId};

#[derive(Debug, Error, PartialEq)]
pub enum AuditError {
    #[error("terminal payoffs ({0}, {1}) do not sum to zero")]
    NotZeroSum(f64, f64),
    #[error("chance distribution at depth {depth} is invalid (sum {sum})")]
    BadChance { depth: usize, sum: f64 },
    #[error("histories sharing infostate {0} disagree on legal actions")]
    InconsistentActions(String),
    #[error("infostate {later} does not extend earlier infostate {earlier}")]
    PerfectRecall { earlier: String, later: String },
    #[error("histories sharing infostate {0} have different own action histories")]
    OwnHistoryMismatch(String),
    #[error("traversal exceeded {0} histories")]
    TooLarge(usize),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// What an audit saw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AuditReport {
    pub histories: usize,
    pub terminals: usize,
    pub infostates: [usize; 2],
}

type OwnSequence = Vec<(InfostateKey, u16)>;

struct Auditor<'g, G: Game> {
    game: &'g G,
    max_histories: usize,
    report: AuditReport,
    actions: [HashMap<InfostateKey, Vec<String>>; 2],
    sequences: [HashMap<InfostateKey, OwnSequence>; 2],
}

impl<G: Game> Auditor<'_, G> {
    fn visit(
        &mut self,
        state: &G::State,
        own: &mut [OwnSequence; 2],
        last: &mut [Option<InfostateKey>; 2],
    ) -> Result<(), AuditError> {
        self.report.histories += 1;
        if self.report.histories > self.max_histories {
            return Err(AuditError::TooLarge(self.max_histories));
        }
        let kind = self.game.kind(state);
        let mut saved = [None, None];
        if kind != NodeKind::Chance {
            for (p, pid) in [PlayerId::Player1, PlayerId::Player2]
                .into_iter()
                .enumerate()
            {
                if kind == NodeKind::Terminal || kind == NodeKind::Decision(pid) {
                    let key = self.game.infostate_key(state, pid)?;
                    if let Some(prev) = &last[p] {
                        if !prev.is_prefix_of(&key) {
                            return Err(AuditError::PerfectRecall {
                                earlier: format!("{prev:?}"),
                                later: format!("{key:?}"),
                            });
                        }
                    }
                    saved[p] = Some(last[p].replace(key));
                }
            }
        }
        let result = match kind {
            NodeKind::Terminal => {
                self.report.terminals += 1;
                let (a, b) = self.game.returns(state)?;
                if a + b != 0.0 {
                    return Err(AuditError::NotZeroSum(a, b));
                }
                Ok(())
            }
            NodeKind::Chance => {
                let outcomes = self.game.chance_outcomes(state)?;
                let sum: f64 = outcomes.iter().map(|o| o.1).sum();
                if outcomes.is_empty()
                    || outcomes.iter().any(|o| !(o.1 > 0.0))
                    || (sum - 1.0).abs() > 1e-12
                {
                    return Err(AuditError::BadChance {
                        depth: self.game.depth(state),
                        sum,
                    });
                }
                for (a, _) in outcomes {
                    self.visit(&self.game.apply(state, a)?, own, last)?;
                }
                Ok(())
            }
            NodeKind::Decision(pid) => {
                let p = pid.index().expect("decision player");
                let key = self.game.infostate_key(state, pid)?;
                let n = self.game.num_actions(state);
                let labels: Vec<String> = (0..n)
                    .map(|a| self.game.action_label(state, ActionId(a as u16)))
                    .collect();
                match self.actions[p].get(&key) {
                    Some(seen) if seen != &labels => {
                        return Err(AuditError::InconsistentActions(format!("{key:?}")))
                    }
                    Some(_) => {}
                    None => {
                        self.report.infostates[p] += 1;
                        self.actions[p].insert(key.clone(), labels);
                    }
                }
                match self.sequences[p].get(&key) {
                    Some(seq) if seq != &own[p] => {
                        return Err(AuditError::OwnHistoryMismatch(format!("{key:?}")))
                    }
                    Some(_) => {}
                    None => {
                        self.sequences[p].insert(key.clone(), own[p].clone());
                    }
                }
                for a in 0..n {
                    own[p].push((key.clone(), a as u16));
                    let r = self.visit(&self.game.apply(state, ActionId(a as u16))?, own, last);
                    own[p].pop();
                    r?;
                }
                Ok(())
            }
        };
        for p in 0..2 {
            if let Some(prev) = saved[p].take() {
                last[p] = prev;
            }
        }
        result
    }
}

/// Walks every history of `game`, checking zero-sum payoffs, chance distributions,
/// legal-action consistency within infostates and perfect recall.
pub fn audit<G: Game>(game: &G, max_histories: usize) -> Result<AuditReport, AuditError> {
    let mut auditor = Auditor {
        game,
        max_histories,
        report: AuditReport::default(),
        actions: [HashMap::new(), HashMap::new()],
        sequences: [HashMap::new(), HashMap::new()],
    };
    let mut own = [Vec::new(), Vec::new()];
    let mut last = [None, None];
    auditor.visit(&game.root(), &mut own, &mut last)?;
    Ok(auditor.report)
}

/// Plays `actions` from the root twice and checks both runs agree on every key and
/// the final payoff.
pub fn replay_is_deterministic<G: Game>(game: &G, actions: &[ActionId]) -> Result<bool, GameError> {
    let run = || -> Result<(Vec<Option<InfostateKey>>, Option<f64>), GameError> {
        let mut s = game.root();
        let mut keys = Vec::new();
        for &a in actions {
            if let NodeKind::Decision(p) = game.kind(&s) {
                keys.push(Some(game.infostate_key(&s, p)?));
            } else {
                keys.push(None);
            }
            s = game.apply(&s, a)?;
        }
        let payoff = game.is_terminal(&s).then(|| game.payoff(&s));
        Ok((keys, payoff))
    };
    Ok(run()? == run()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{Kuhn, RpsChoice};

    #[test]
    fn kuhn_passes() {
        let r = audit(&Kuhn::new(), 1000).unwrap();
        assert_eq!(r.histories, 55);
        assert_eq!(r.infostates, [6, 6]);
    }

    #[test]
    fn budget_is_enforced() {
        assert_eq!(audit(&RpsChoice::new(), 3), Err(AuditError::TooLarge(3)));
    }

    /// Player two forgets its own first action.
    #[derive(Debug)]
    struct Forgetful;

    impl Game for Forgetful {
        type State = Vec<u16>;
        fn name(&self) -> String {
            "forgetful".into()
        }
        fn root(&self) -> Vec<u16> {
            Vec::new()
        }
        fn kind(&self, s: &Vec<u16>) -> NodeKind {
            match s.len() {
                0 | 2 => NodeKind::Decision(PlayerId::Player2),
                1 => NodeKind::Decision(PlayerId::Player1),
                _ => NodeKind::Terminal,
            }
        }
        fn num_actions(&self, s: &Vec<u16>) -> usize {
            if s.len() < 3 {
                2
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
            f64::from(s[0] ^ s[2])
        }
        fn info_tokens(&self, s: &Vec<u16>, p: PlayerId) -> Vec<u16> {
            match p {
                PlayerId::Player2 if s.len() >= 2 => vec![9],
                PlayerId::Player1 => s.iter().skip(1).take(1).copied().collect(),
                _ => Vec::new(),
            }
        }
        fn depth(&self, s: &Vec<u16>) -> usize {
            s.len()
        }
    }

    #[test]
    fn forgetting_is_detected() {
        let err = audit(&Forgetful, 1000).unwrap_err();
        assert!(
            matches!(
                err,
                AuditError::OwnHistoryMismatch(_) | AuditError::PerfectRecall { .. }
            ),
            "{err}"
        );
    }
}
