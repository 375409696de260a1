//! Leduc hold'em and its m-clone variant.
//!
//! Rules: a six-card deck (two suits of J, Q, K), ante 1 each, one private card per
//! player, a first betting round with raise size 2, one public card, and a second round
//! with raise size 4. At most two raises per round. Fold is only legal when facing a
//! bet. At showdown a player pairing the public card wins, otherwise the higher rank
//! wins and equal ranks split.
//!
//! Legal base actions are ordered `[call, raise, fold]` (with absent ones dropped). With
//! `clones = m` every base action appears `m` times, base-major: index `b * m + c` is
//! clone `c` of the `b`-th legal base action. The clone index is publicly observed, so
//! each clone leads to a distinct but payoff-identical subtree.

use crate::game_core::{ActionId, Game, GameError, NodeKind, PlayerId};

pub const CALL: u8 = 0;
pub const RAISE: u8 = 1;
pub const FOLD: u8 = 2;

const NUM_CARDS: u8 = 6;
const MAX_RAISES: u8 = 2;
const RAISE_SIZE: [u16; 2] = [2, 4];

const TOKEN_ACTION: u16 = 16;
const TOKEN_PUBLIC: u16 = 8;

#[derive(Debug, Clone)]
pub struct Leduc {
    clones: u16,
    private_deals: Vec<[u8; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LeducState {
    private: Option<[u8; 2]>,
    public: Option<u8>,
    round: u8,
    to_act: u8,
    contrib: [u16; 2],
    raises: u8,
    round_actions: u8,
    awaiting_public: bool,
    folded: Option<u8>,
    finished: bool,
    /// public tokens: action tokens and the public card
    history: Vec<u16>,
}

fn rank(card: u8) -> u8 {
    card / 2
}

impl Leduc {
    pub fn new() -> Self {
        Self::with_clones(1).expect("one clone is valid")
    }

    pub fn with_clones(clones: u16) -> Result<Self, GameError> {
        if clones == 0 {
            return Err(GameError::InvalidConfig(
                "clone count m must be >= 1".into(),
            ));
        }
        let mut private_deals = Vec::with_capacity(30);
        for a in 0..NUM_CARDS {
            for b in 0..NUM_CARDS {
                if a != b {
                    private_deals.push([a, b]);
                }
            }
        }
        Ok(Leduc {
            clones,
            private_deals,
        })
    }

    pub fn clones(&self) -> u16 {
        self.clones
    }

    /// Legal base actions at a decision node, in frozen order.
    pub fn legal_base(&self, s: &LeducState) -> Vec<u8> {
        let me = s.to_act as usize;
        let mut out = vec![CALL];
        if s.raises < MAX_RAISES {
            out.push(RAISE);
        }
        if s.contrib[1 - me] > s.contrib[me] {
            out.push(FOLD);
        }
        out
    }

    /// Splits an action index into `(base action, clone)`.
    pub fn decode(&self, s: &LeducState, a: ActionId) -> (u8, u16) {
        let legal = self.legal_base(s);
        let m = self.clones as usize;
        (legal[a.index() / m], (a.index() % m) as u16)
    }

    fn remaining_public(&self, s: &LeducState) -> Vec<u8> {
        let p = s.private.expect("private cards dealt");
        (0..NUM_CARDS).filter(|c| !p.contains(c)).collect()
    }

    fn end_round(&self, s: &mut LeducState) {
        if s.round == 0 {
            s.awaiting_public = true;
        } else {
            s.finished = true;
        }
    }
}

impl Default for Leduc {
    fn default() -> Self {
        Leduc::new()
    }
}

impl Game for Leduc {
    type State = LeducState;

    fn name(&self) -> String {
        if self.clones == 1 {
            "leduc".into()
        } else {
            format!("clone_leduc(m={})", self.clones)
        }
    }

    fn root(&self) -> LeducState {
        LeducState {
            private: None,
            public: None,
            round: 0,
            to_act: 0,
            contrib: [1, 1],
            raises: 0,
            round_actions: 0,
            awaiting_public: false,
            folded: None,
            finished: false,
            history: Vec::new(),
        }
    }

    fn kind(&self, s: &LeducState) -> NodeKind {
        if s.finished {
            NodeKind::Terminal
        } else if s.private.is_none() || s.awaiting_public {
            NodeKind::Chance
        } else {
            NodeKind::Decision(PlayerId::from_index(s.to_act as usize))
        }
    }

    fn num_actions(&self, s: &LeducState) -> usize {
        match self.kind(s) {
            NodeKind::Terminal => 0,
            NodeKind::Chance if s.private.is_none() => self.private_deals.len(),
            NodeKind::Chance => self.remaining_public(s).len(),
            NodeKind::Decision(_) => self.legal_base(s).len() * self.clones as usize,
        }
    }

    fn next(&self, s: &LeducState, a: ActionId) -> LeducState {
        let mut out = s.clone();
        if s.private.is_none() {
            out.private = Some(self.private_deals[a.index()]);
            return out;
        }
        if s.awaiting_public {
            let card = self.remaining_public(s)[a.index()];
            out.public = Some(card);
            out.history.push(TOKEN_PUBLIC + rank(card) as u16);
            out.awaiting_public = false;
            out.round = 1;
            out.to_act = 0;
            out.raises = 0;
            out.round_actions = 0;
            return out;
        }
        let (base, clone) = self.decode(s, a);
        let me = s.to_act as usize;
        out.history
            .push(TOKEN_ACTION + base as u16 * self.clones + clone);
        match base {
            FOLD => {
                out.folded = Some(s.to_act);
                out.finished = true;
            }
            CALL => {
                out.contrib[me] = s.contrib[1 - me];
                if s.round_actions >= 1 {
                    self.end_round(&mut out);
                } else {
                    out.round_actions += 1;
                    out.to_act = 1 - s.to_act;
                }
            }
            _ => {
                out.contrib[me] = s.contrib[1 - me] + RAISE_SIZE[s.round as usize];
                out.raises += 1;
                out.round_actions += 1;
                out.to_act = 1 - s.to_act;
            }
        }
        out
    }

    fn chance_probs(&self, s: &LeducState) -> Vec<f64> {
        let n = self.num_actions(s);
        vec![1.0 / n as f64; n]
    }

    fn payoff(&self, s: &LeducState) -> f64 {
        if let Some(folder) = s.folded {
            return if folder == 0 {
                -(s.contrib[0] as f64)
            } else {
                s.contrib[1] as f64
            };
        }
        let p = s.private.expect("dealt");
        let public = rank(s.public.expect("showdown after public card"));
        let (r1, r2) = (rank(p[0]), rank(p[1]));
        let winner = if r1 == public {
            1
        } else if r2 == public {
            -1
        } else {
            (r1 as i32 - r2 as i32).signum()
        };
        match winner {
            1 => s.contrib[1] as f64,
            -1 => -(s.contrib[0] as f64),
            _ => 0.0,
        }
    }

    fn info_tokens(&self, s: &LeducState, player: PlayerId) -> Vec<u16> {
        let mut tokens = Vec::with_capacity(1 + s.history.len());
        if let (Some(p), Some(i)) = (s.private, player.index()) {
            tokens.push(rank(p[i]) as u16);
        }
        tokens.extend_from_slice(&s.history);
        tokens
    }

    fn depth(&self, s: &LeducState) -> usize {
        usize::from(s.private.is_some()) + s.history.len()
    }

    fn action_label(&self, s: &LeducState, a: ActionId) -> String {
        let (base, clone) = self.decode(s, a);
        let name = ["call", "raise", "fold"][base as usize];
        if self.clones == 1 {
            name.into()
        } else {
            format!("{name}#{clone}")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first_decision(g: &Leduc) -> LeducState {
        g.apply(&g.root(), ActionId(0)).unwrap()
    }

    #[test]
    fn first_node_actions() {
        let g = Leduc::new();
        let s = first_decision(&g);
        assert_eq!(g.legal_base(&s), vec![CALL, RAISE]);
        let g2 = Leduc::with_clones(2).unwrap();
        let s2 = first_decision(&g2);
        assert_eq!(g2.num_actions(&s2), 4);
        assert_eq!(g2.decode(&s2, ActionId(3)), (RAISE, 1));
    }

    #[test]
    fn fold_only_when_facing_bet() {
        let g = Leduc::new();
        let s = first_decision(&g);
        let s = g.apply(&s, ActionId(1)).unwrap(); // raise
        assert_eq!(g.legal_base(&s), vec![CALL, RAISE, FOLD]);
        let s = g.apply(&s, ActionId(1)).unwrap(); // re-raise
        assert_eq!(g.legal_base(&s), vec![CALL, FOLD]);
        let s = g.apply(&s, ActionId(1)).unwrap(); // fold
                                                   // P1 raised to 3, P2 re-raised to 5, P1 folds losing 3
        assert_eq!(g.returns(&s).unwrap(), (-3.0, 3.0));
    }

    #[test]
    fn check_check_reaches_public_card() {
        let g = Leduc::new();
        let s = first_decision(&g);
        let s = g.apply(&s, ActionId(0)).unwrap();
        assert_eq!(g.kind(&s), NodeKind::Decision(PlayerId::Player2));
        let s = g.apply(&s, ActionId(0)).unwrap();
        assert_eq!(g.kind(&s), NodeKind::Chance);
        let outcomes = g.chance_outcomes(&s).unwrap();
        assert_eq!(outcomes.len(), 4);
        assert!(outcomes.iter().all(|(_, p)| (*p - 0.25).abs() < 1e-15));
    }

    #[test]
    fn showdown_pair_beats_high_card() {
        let g = Leduc::new();
        // deal index for private (J0, K0): cards 0 and 4
        let deal = g.private_deals.iter().position(|d| *d == [0, 4]).unwrap();
        let mut s = g.apply(&g.root(), ActionId::from(deal)).unwrap();
        s = g.apply(&s, ActionId(0)).unwrap();
        s = g.apply(&s, ActionId(0)).unwrap();
        // remaining cards are 1,2,3,5; outcome 0 is J1 which pairs player one
        s = g.apply(&s, ActionId(0)).unwrap();
        s = g.apply(&s, ActionId(1)).unwrap(); // raise 4
        s = g.apply(&s, ActionId(0)).unwrap(); // call
        assert!(g.is_terminal(&s));
        assert_eq!(g.returns(&s).unwrap(), (5.0, -5.0));
    }

    #[test]
    fn zero_clones_rejected() {
        assert!(Leduc::with_clones(0).is_err());
    }
}
