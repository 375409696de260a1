//! Two rock-paper-scissors games behind a choice by player one.
//!
//! Player one first picks which of two RPS games is played; both players see the
//! choice. Then both move simultaneously (player one first, hidden from player two).
//! Actions are ordered `[rock, paper, scissors]` with standard +1/-1/0 payoffs.

use crate::game_core::{ActionId, Game, NodeKind, PlayerId};

#[derive(Debug, Clone, Default)]
pub struct RpsChoice;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RpsChoiceState {
    game: Option<u8>,
    first: Option<u8>,
    second: Option<u8>,
}

/// Player one's RPS payoff.
pub fn rps_payoff(a: u8, b: u8) -> f64 {
    match (3 + a - b) % 3 {
        0 => 0.0,
        1 => 1.0,
        _ => -1.0,
    }
}

impl RpsChoice {
    pub fn new() -> Self {
        RpsChoice
    }
}

impl Game for RpsChoice {
    type State = RpsChoiceState;

    fn name(&self) -> String {
        "rps_choice".into()
    }

    fn root(&self) -> RpsChoiceState {
        RpsChoiceState {
            game: None,
            first: None,
            second: None,
        }
    }

    fn kind(&self, s: &RpsChoiceState) -> NodeKind {
        match (s.game, s.first, s.second) {
            (None, _, _) | (Some(_), None, _) => NodeKind::Decision(PlayerId::Player1),
            (Some(_), Some(_), None) => NodeKind::Decision(PlayerId::Player2),
            _ => NodeKind::Terminal,
        }
    }

    fn num_actions(&self, s: &RpsChoiceState) -> usize {
        match (s.game, self.kind(s)) {
            (_, NodeKind::Terminal) => 0,
            (None, _) => 2,
            _ => 3,
        }
    }

    fn next(&self, s: &RpsChoiceState, a: ActionId) -> RpsChoiceState {
        let mut out = *s;
        let a = a.0 as u8;
        if s.game.is_none() {
            out.game = Some(a);
        } else if s.first.is_none() {
            out.first = Some(a);
        } else {
            out.second = Some(a);
        }
        out
    }

    fn chance_probs(&self, _s: &RpsChoiceState) -> Vec<f64> {
        Vec::new()
    }

    fn payoff(&self, s: &RpsChoiceState) -> f64 {
        rps_payoff(s.first.unwrap(), s.second.unwrap())
    }

    fn info_tokens(&self, s: &RpsChoiceState, player: PlayerId) -> Vec<u16> {
        let mut tokens = Vec::with_capacity(2);
        if let Some(g) = s.game {
            tokens.push(g as u16);
        }
        let own = if player == PlayerId::Player1 {
            s.first
        } else {
            s.second
        };
        if let Some(a) = own {
            tokens.push(a as u16);
        }
        tokens
    }

    fn depth(&self, s: &RpsChoiceState) -> usize {
        [s.game, s.first, s.second]
            .iter()
            .filter(|x| x.is_some())
            .count()
    }

    fn action_label(&self, s: &RpsChoiceState, a: ActionId) -> String {
        if s.game.is_none() {
            format!("game{}", a.0 + 1)
        } else {
            ["rock", "paper", "scissors"][a.index()].into()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_is_player_one_choice() {
        let g = RpsChoice::new();
        assert_eq!(g.kind(&g.root()), NodeKind::Decision(PlayerId::Player1));
        assert_eq!(g.num_actions(&g.root()), 2);
    }

    #[test]
    fn rock_loses_to_paper() {
        assert_eq!(rps_payoff(0, 1), -1.0);
        assert_eq!(rps_payoff(2, 1), 1.0);
        assert_eq!(rps_payoff(1, 1), 0.0);
    }

    #[test]
    fn player_two_sees_game_not_move() {
        let g = RpsChoice::new();
        let s = g.apply(&g.root(), ActionId(1)).unwrap();
        let a = g.apply(&s, ActionId(0)).unwrap();
        let b = g.apply(&s, ActionId(2)).unwrap();
        let ka = g.infostate_key(&a, PlayerId::Player2).unwrap();
        assert_eq!(ka, g.infostate_key(&b, PlayerId::Player2).unwrap());
        assert_eq!(ka.tokens(), &[1]);
    }
}
