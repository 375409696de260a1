//! The extensive-form game interface every game and solver goes through.
//!
//! Games are perfect-recall, two-player zero-sum, with chance modelled as explicit
//! enumerable nodes. Simultaneous moves are sequentialized: player one acts first and
//! player two's infostate hides that pending action until it is revealed.

use std::fmt;

use thiserror::Error;

/// Who acts at a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlayerId {
    Player1,
    Player2,
    Chance,
}

impl PlayerId {
    /// Both decision players, in order.
    pub const DECISION: [PlayerId; 2] = [PlayerId::Player1, PlayerId::Player2];

    /// Index `0` or `1` for decision players, `None` for chance.
    pub fn index(self) -> Option<usize> {
        match self {
            PlayerId::Player1 => Some(0),
            PlayerId::Player2 => Some(1),
            PlayerId::Chance => None,
        }
    }

    pub fn from_index(index: usize) -> PlayerId {
        match index {
            0 => PlayerId::Player1,
            1 => PlayerId::Player2,
            _ => panic!("decision player index out of range: {index}"),
        }
    }

    pub fn opponent(self) -> PlayerId {
        match self {
            PlayerId::Player1 => PlayerId::Player2,
            PlayerId::Player2 => PlayerId::Player1,
            PlayerId::Chance => PlayerId::Chance,
        }
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlayerId::Player1 => write!(f, "p1"),
            PlayerId::Player2 => write!(f, "p2"),
            PlayerId::Chance => write!(f, "chance"),
        }
    }
}

/// Index into the ordered legal-action (or chance-outcome) list of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ActionId(pub u16);

impl ActionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for ActionId {
    fn from(value: usize) -> Self {
        ActionId(u16::try_from(value).expect("action index exceeds u16"))
    }
}

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Kind of a history node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Terminal,
    Chance,
    Decision(PlayerId),
}

/// Player-scoped observation-action sequence identifying an infostate.
///
/// Tokens are small game-defined integers. Successor infostates of the same player
/// extend the token sequence of their predecessors (perfect recall).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InfostateKey {
    player: PlayerId,
    tokens: Vec<u16>,
}

impl InfostateKey {
    pub fn new(player: PlayerId, tokens: Vec<u16>) -> Result<Self, GameError> {
        if player == PlayerId::Chance {
            return Err(GameError::ChanceInfostate);
        }
        Ok(InfostateKey { player, tokens })
    }

    pub fn player(&self) -> PlayerId {
        self.player
    }

    pub fn tokens(&self) -> &[u16] {
        &self.tokens
    }

    /// True when `self` is a (non-strict) prefix of `other` for the same player.
    pub fn is_prefix_of(&self, other: &InfostateKey) -> bool {
        self.player == other.player && other.tokens.starts_with(&self.tokens)
    }

    /// Canonical byte encoding: player byte, token count (u32 LE), then each token
    /// as a length-prefixed little-endian u16.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(5 + 3 * self.tokens.len());
        out.push(self.player.index().unwrap_or(2) as u8);
        out.extend_from_slice(&(self.tokens.len() as u32).to_le_bytes());
        for t in &self.tokens {
            out.push(2);
            out.extend_from_slice(&t.to_le_bytes());
        }
        out
    }
}

impl fmt::Display for InfostateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.player)?;
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("node is terminal")]
    TerminalNode,
    #[error("node is not terminal")]
    NotTerminal,
    #[error("node is a chance node")]
    ChanceNode,
    #[error("node is not a chance node")]
    NotChance,
    #[error("action {action} is not legal here ({count} actions available)")]
    IllegalAction { action: u16, count: usize },
    #[error("chance has no infostate")]
    ChanceInfostate,
    #[error("invalid game parameters: {0}")]
    InvalidConfig(String),
    #[error("traversal budget of {0} histories exceeded")]
    BudgetExceeded(usize),
}

/// A two-player zero-sum perfect-recall game with explicit chance.
///
/// States are immutable values; `apply` returns a new successor.
pub trait Game: Send + Sync {
    type State: Clone + fmt::Debug + Send + Sync;

    fn name(&self) -> String;

    fn root(&self) -> Self::State;

    fn kind(&self, state: &Self::State) -> NodeKind;

    /// Number of legal actions at a decision node, or outcomes at a chance node.
    fn num_actions(&self, state: &Self::State) -> usize;

    /// Successor after `action`. Callers must pass a legal index; use
    /// [`Game::apply`] for a checked variant.
    fn next(&self, state: &Self::State, action: ActionId) -> Self::State;

    /// Outcome probabilities at a chance node, in outcome-index order.
    fn chance_probs(&self, state: &Self::State) -> Vec<f64>;

    /// Player one's payoff at a terminal node.
    fn payoff(&self, state: &Self::State) -> f64;

    /// Observation tokens of `player` (a decision player) at `state`.
    fn info_tokens(&self, state: &Self::State, player: PlayerId) -> Vec<u16>;

    fn depth(&self, state: &Self::State) -> usize;

    /// Human-readable label for an action at a decision node.
    fn action_label(&self, _state: &Self::State, action: ActionId) -> String {
        action.to_string()
    }

    fn is_terminal(&self, state: &Self::State) -> bool {
        self.kind(state) == NodeKind::Terminal
    }

    fn legal_actions(&self, state: &Self::State) -> Result<Vec<ActionId>, GameError> {
        match self.kind(state) {
            NodeKind::Terminal => Err(GameError::TerminalNode),
            NodeKind::Chance => Err(GameError::ChanceNode),
            NodeKind::Decision(_) => Ok((0..self.num_actions(state)).map(ActionId::from).collect()),
        }
    }

    fn apply(&self, state: &Self::State, action: ActionId) -> Result<Self::State, GameError> {
        if self.is_terminal(state) {
            return Err(GameError::TerminalNode);
        }
        let count = self.num_actions(state);
        if action.index() >= count {
            return Err(GameError::IllegalAction {
                action: action.0,
                count,
            });
        }
        Ok(self.next(state, action))
    }

    fn chance_outcomes(&self, state: &Self::State) -> Result<Vec<(ActionId, f64)>, GameError> {
        if self.kind(state) != NodeKind::Chance {
            return Err(GameError::NotChance);
        }
        Ok(self
            .chance_probs(state)
            .into_iter()
            .enumerate()
            .map(|(i, p)| (ActionId::from(i), p))
            .collect())
    }

    /// Payoff pair `(p1, p2)`; always sums to exactly zero.
    fn returns(&self, state: &Self::State) -> Result<(f64, f64), GameError> {
        if !self.is_terminal(state) {
            return Err(GameError::NotTerminal);
        }
        let v = self.payoff(state);
        Ok((v, -v))
    }

    fn infostate_key(
        &self,
        state: &Self::State,
        player: PlayerId,
    ) -> Result<InfostateKey, GameError> {
        if player == PlayerId::Chance {
            return Err(GameError::ChanceInfostate);
        }
        InfostateKey::new(player, self.info_tokens(state, player))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_prefix_and_bytes() {
        let a = InfostateKey::new(PlayerId::Player1, vec![1, 2]).unwrap();
        let b = InfostateKey::new(PlayerId::Player1, vec![1, 2, 7]).unwrap();
        let c = InfostateKey::new(PlayerId::Player2, vec![1, 2, 7]).unwrap();
        assert!(a.is_prefix_of(&b));
        assert!(!b.is_prefix_of(&a));
        assert!(!a.is_prefix_of(&c));
        assert_ne!(b.to_bytes(), c.to_bytes());
        assert_eq!(a.to_string(), "p1:1.2");
    }

    #[test]
    fn chance_has_no_key() {
        assert_eq!(
            InfostateKey::new(PlayerId::Chance, vec![]).unwrap_err(),
            GameError::ChanceInfostate
        );
        assert_eq!(PlayerId::Player1.opponent(), PlayerId::Player2);
    }
}
