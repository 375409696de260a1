//! Oshi-Zumo, sequentialized.
//!
//! Each round both players secretly bid between 0 and their remaining coins. Both
//! bids are paid. The higher bidder pushes the token one space toward the opponent;
//! equal bids leave it in place. Player one pushes toward the high end of the board.
//! The game ends when the token is pushed off the board, when both players are out of
//! coins, or after `horizon` rounds. The winner is whoever has the token on the
//! opponent's side (+1/-1), with 0 when it sits on the middle space.
//!
//! Player one bids first; player two's infostate does not include that pending bid.
//! Both bids are revealed once the round resolves.

use crate::game_core::{ActionId, Game, GameError, NodeKind, PlayerId};

#[derive(Debug, Clone)]
pub struct OshiZumo {
    coins: u8,
    board: u8,
    horizon: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OshiZumoState {
    coins: [u8; 2],
    /// `-1` is off the low (player two) edge, `board` is off the high edge.
    position: i8,
    round: u8,
    pending: Option<u8>,
    bids: Vec<[u8; 2]>,
}

impl OshiZumo {
    pub fn new(coins: u8, board: u8, horizon: u8) -> Result<Self, GameError> {
        if coins == 0 {
            return Err(GameError::InvalidConfig("coins must be >= 1".into()));
        }
        if board < 3 || board.is_multiple_of(2) || board > 99 {
            return Err(GameError::InvalidConfig(
                "board must be odd and >= 3".into(),
            ));
        }
        if horizon == 0 {
            return Err(GameError::InvalidConfig("horizon must be >= 1".into()));
        }
        Ok(OshiZumo {
            coins,
            board,
            horizon,
        })
    }

    pub fn middle(&self) -> i8 {
        (self.board / 2) as i8
    }

    pub fn position(&self, s: &OshiZumoState) -> i8 {
        s.position
    }

    pub fn coins_left(&self, s: &OshiZumoState) -> [u8; 2] {
        s.coins
    }

    fn over(&self, s: &OshiZumoState) -> bool {
        s.pending.is_none()
            && (s.position < 0
                || s.position >= self.board as i8
                || s.round >= self.horizon
                || s.coins == [0, 0])
    }
}

impl Game for OshiZumo {
    type State = OshiZumoState;

    fn name(&self) -> String {
        format!(
            "oshi_zumo(coins={},board={},horizon={})",
            self.coins, self.board, self.horizon
        )
    }

    fn root(&self) -> OshiZumoState {
        OshiZumoState {
            coins: [self.coins; 2],
            position: self.middle(),
            round: 0,
            pending: None,
            bids: Vec::new(),
        }
    }

    fn kind(&self, s: &OshiZumoState) -> NodeKind {
        if self.over(s) {
            NodeKind::Terminal
        } else if s.pending.is_none() {
            NodeKind::Decision(PlayerId::Player1)
        } else {
            NodeKind::Decision(PlayerId::Player2)
        }
    }

    fn num_actions(&self, s: &OshiZumoState) -> usize {
        match self.kind(s) {
            NodeKind::Decision(p) => s.coins[p.index().unwrap()] as usize + 1,
            _ => 0,
        }
    }

    fn next(&self, s: &OshiZumoState, a: ActionId) -> OshiZumoState {
        let mut out = s.clone();
        let bid = a.0 as u8;
        match s.pending {
            None => out.pending = Some(bid),
            Some(b1) => {
                let b2 = bid;
                out.pending = None;
                out.coins[0] -= b1;
                out.coins[1] -= b2;
                if b1 > b2 {
                    out.position += 1;
                } else if b2 > b1 {
                    out.position -= 1;
                }
                out.round += 1;
                out.bids.push([b1, b2]);
            }
        }
        out
    }

    fn chance_probs(&self, _s: &OshiZumoState) -> Vec<f64> {
        Vec::new()
    }

    fn payoff(&self, s: &OshiZumoState) -> f64 {
        (s.position - self.middle()).signum() as f64
    }

    fn info_tokens(&self, s: &OshiZumoState, player: PlayerId) -> Vec<u16> {
        // each resolved round contributes (own bid, opponent bid)
        let me = player.index().expect("decision player");
        let mut tokens = Vec::with_capacity(2 * s.bids.len() + 1);
        for b in &s.bids {
            tokens.push(b[me] as u16);
            tokens.push(b[1 - me] as u16);
        }
        if me == 0 {
            if let Some(b1) = s.pending {
                tokens.push(b1 as u16);
            }
        }
        tokens
    }

    fn depth(&self, s: &OshiZumoState) -> usize {
        2 * s.bids.len() + usize::from(s.pending.is_some())
    }

    fn action_label(&self, _s: &OshiZumoState, a: ActionId) -> String {
        format!("bid{}", a.0)
    }
}
