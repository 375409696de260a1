//! Kuhn poker: three cards (J < Q < K), ante 1, one betting round with bet size 1.
//!
//! Action order is frozen as `[pass, bet]` (pass = check or fold, bet = bet or call).
//! The root is a single chance node over the six ordered deals.

use crate::game_core::{ActionId, Game, NodeKind, PlayerId};

const DEALS: [[u8; 2]; 6] = [[0, 1], [0, 2], [1, 0], [1, 2], [2, 0], [2, 1]];
pub const PASS: u8 = 0;
pub const BET: u8 = 1;

#[derive(Debug, Clone, Default)]
pub struct Kuhn;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KuhnState {
    cards: Option<[u8; 2]>,
    actions: Vec<u8>,
}

impl Kuhn {
    pub fn new() -> Self {
        Kuhn
    }

    fn finished(actions: &[u8]) -> bool {
        matches!(actions, [PASS, PASS] | [BET, _] | [PASS, BET, _])
    }
}

impl Game for Kuhn {
    type State = KuhnState;

    fn name(&self) -> String {
        "kuhn".into()
    }

    fn root(&self) -> KuhnState {
        KuhnState {
            cards: None,
            actions: Vec::new(),
        }
    }

    fn kind(&self, s: &KuhnState) -> NodeKind {
        if s.cards.is_none() {
            NodeKind::Chance
        } else if Self::finished(&s.actions) {
            NodeKind::Terminal
        } else {
            NodeKind::Decision(PlayerId::from_index(s.actions.len() % 2))
        }
    }

    fn num_actions(&self, s: &KuhnState) -> usize {
        match self.kind(s) {
            NodeKind::Chance => DEALS.len(),
            NodeKind::Decision(_) => 2,
            NodeKind::Terminal => 0,
        }
    }

    fn next(&self, s: &KuhnState, a: ActionId) -> KuhnState {
        let mut out = s.clone();
        if s.cards.is_none() {
            out.cards = Some(DEALS[a.index()]);
        } else {
            out.actions.push(a.0 as u8);
        }
        out
    }

    fn chance_probs(&self, _s: &KuhnState) -> Vec<f64> {
        vec![1.0 / 6.0; 6]
    }

    fn payoff(&self, s: &KuhnState) -> f64 {
        let cards = s.cards.expect("terminal has cards");
        let showdown = if cards[0] > cards[1] { 1.0 } else { -1.0 };
        match s.actions.as_slice() {
            [PASS, PASS] => showdown,
            [BET, PASS] => 1.0,
            [PASS, BET, PASS] => -1.0,
            _ => 2.0 * showdown,
        }
    }

    fn info_tokens(&self, s: &KuhnState, player: PlayerId) -> Vec<u16> {
        let mut tokens = Vec::with_capacity(1 + s.actions.len());
        if let (Some(cards), Some(i)) = (s.cards, player.index()) {
            tokens.push(cards[i] as u16);
        }
        tokens.extend(s.actions.iter().map(|&a| 10 + a as u16));
        tokens
    }

    fn depth(&self, s: &KuhnState) -> usize {
        usize::from(s.cards.is_some()) + s.actions.len()
    }

    fn action_label(&self, _s: &KuhnState, a: ActionId) -> String {
        if a.0 == PASS as u16 { "pass" } else { "bet" }.into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_deals_six_ways() {
        let g = Kuhn::new();
        let root = g.root();
        assert_eq!(g.kind(&root), NodeKind::Chance);
        let outcomes = g.chance_outcomes(&root).unwrap();
        assert_eq!(outcomes.len(), 6);
        assert!(outcomes.iter().all(|(_, p)| (p - 1.0 / 6.0).abs() < 1e-15));
    }

    #[test]
    fn first_infostate_is_card_only() {
        let g = Kuhn::new();
        // deal index 0 gives P1 the jack
        let s = g.apply(&g.root(), ActionId(0)).unwrap();
        assert_eq!(g.kind(&s), NodeKind::Decision(PlayerId::Player1));
        let key = g.infostate_key(&s, PlayerId::Player1).unwrap();
        assert_eq!(key.tokens(), &[0]);
    }

    #[test]
    fn payoffs() {
        let g = Kuhn::new();
        let play = |deal: u16, acts: &[u16]| {
            let mut s = g.apply(&g.root(), ActionId(deal)).unwrap();
            for &a in acts {
                s = g.apply(&s, ActionId(a)).unwrap();
            }
            g.returns(&s).unwrap()
        };
        // deal 5 = (K, Q)
        assert_eq!(play(5, &[1, 1]), (2.0, -2.0));
        assert_eq!(play(5, &[0, 0]), (1.0, -1.0));
        assert_eq!(play(0, &[0, 1, 0]), (-1.0, 1.0));
        assert_eq!(play(0, &[1, 0]), (1.0, -1.0));
        assert_eq!(play(0, &[0, 1, 1]), (-2.0, 2.0));
    }

    #[test]
    fn errors() {
        let g = Kuhn::new();
        let root = g.root();
        assert!(g.legal_actions(&root).is_err());
        assert!(g.returns(&root).is_err());
        let s = g.apply(&root, ActionId(0)).unwrap();
        assert!(g.chance_outcomes(&s).is_err());
        assert!(matches!(
            g.apply(&s, ActionId(2)),
            Err(crate::GameError::IllegalAction {
                action: 2,
                count: 2
            })
        ));
    }
}
