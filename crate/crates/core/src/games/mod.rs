//! The benchmark games, addressable by a [`GameConfig`].

pub mod audit;
mod gmp;
mod kuhn;
mod leduc;
mod oshi_zumo;
mod rps_choice;

use std::fmt;

pub use gmp::{perturb_kgmp, Gmp, GmpState};
pub use kuhn::{Kuhn, KuhnState};
pub use leduc::{Leduc, LeducState};
pub use oshi_zumo::{OshiZumo, OshiZumoState};
pub use rps_choice::{rps_payoff, RpsChoice, RpsChoiceState};

use crate::game_core::{ActionId, Game, GameError, NodeKind, PlayerId};

/// Which game to build, with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum GameConfig {
    Kuhn,
    Leduc,
    CloneLeduc { m: u16 },
    OshiZumo { coins: u8, board: u8, horizon: u8 },
    Kgmp { k: usize, n: usize },
    PerturbedKgmp { k: usize, n: usize, seed: u64 },
    CloneGmp { k: usize, m: usize, n: usize },
    RpsChoice,
}

impl GameConfig {
    /// Names accepted by [`GameConfig::from_name`].
    pub const NAMES: [&'static str; 8] = [
        "kuhn",
        "leduc",
        "clone_leduc",
        "oshi_zumo",
        "kgmp",
        "perturbed_kgmp",
        "clone_gmp",
        "rps_choice",
    ];

    /// Builds a config from a game name and a parameter lookup; absent parameters
    /// take the defaults used in the experiments (m=2, coins=4, board=3, horizon=6,
    /// k=2, n=3, seed=0).
    pub fn from_name(name: &str, param: impl Fn(&str) -> Option<u64>) -> Result<Self, GameError> {
        let get = |key: &str, default: u64| param(key).unwrap_or(default);
        let narrow = |key: &str, default: u64, max: u64| {
            let v = get(key, default);
            if v > max {
                Err(GameError::InvalidConfig(format!("{key}={v} is too large")))
            } else {
                Ok(v)
            }
        };
        Ok(match name {
            "kuhn" => GameConfig::Kuhn,
            "leduc" => GameConfig::Leduc,
            "clone_leduc" => GameConfig::CloneLeduc {
                m: narrow("m", 2, 64)? as u16,
            },
            "oshi_zumo" => GameConfig::OshiZumo {
                coins: narrow("coins", 4, 50)? as u8,
                board: narrow("board", 3, 99)? as u8,
                horizon: narrow("horizon", 6, 100)? as u8,
            },
            "kgmp" => GameConfig::Kgmp {
                k: narrow("k", 2, 4096)? as usize,
                n: narrow("n", 3, 1024)? as usize,
            },
            "perturbed_kgmp" => GameConfig::PerturbedKgmp {
                k: narrow("k", 2, 4096)? as usize,
                n: narrow("n", 3, 1024)? as usize,
                seed: get("seed", 0),
            },
            "clone_gmp" => GameConfig::CloneGmp {
                k: narrow("k", 2, 4096)? as usize,
                m: narrow("m", 2, 1024)? as usize,
                n: narrow("n", 3, 1024)? as usize,
            },
            "rps_choice" => GameConfig::RpsChoice,
            other => return Err(GameError::InvalidConfig(format!("unknown game '{other}'"))),
        })
    }
}

impl fmt::Display for GameConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameConfig::Kuhn => write!(f, "kuhn"),
            GameConfig::Leduc => write!(f, "leduc"),
            GameConfig::CloneLeduc { m } => write!(f, "clone_leduc(m={m})"),
            GameConfig::OshiZumo {
                coins,
                board,
                horizon,
            } => {
                write!(
                    f,
                    "oshi_zumo(coins={coins},board={board},horizon={horizon})"
                )
            }
            GameConfig::Kgmp { k, n } => write!(f, "kgmp(k={k},n={n})"),
            GameConfig::PerturbedKgmp { k, n, seed } => {
                write!(f, "perturbed_kgmp(k={k},n={n},seed={seed})")
            }
            GameConfig::CloneGmp { k, m, n } => write!(f, "clone_gmp(k={k},m={m},n={n})"),
            GameConfig::RpsChoice => write!(f, "rps_choice"),
        }
    }
}

/// Any of the shipped games behind one type.
#[derive(Debug, Clone)]
pub enum AnyGame {
    Kuhn(Kuhn),
    Leduc(Leduc),
    OshiZumo(OshiZumo),
    Gmp(Gmp),
    RpsChoice(RpsChoice),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AnyState {
    Kuhn(KuhnState),
    Leduc(LeducState),
    OshiZumo(OshiZumoState),
    Gmp(GmpState),
    RpsChoice(RpsChoiceState),
}

pub fn make_game(config: &GameConfig) -> Result<AnyGame, GameError> {
    Ok(match *config {
        GameConfig::Kuhn => AnyGame::Kuhn(Kuhn::new()),
        GameConfig::Leduc => AnyGame::Leduc(Leduc::new()),
        GameConfig::CloneLeduc { m } => AnyGame::Leduc(Leduc::with_clones(m)?),
        GameConfig::OshiZumo {
            coins,
            board,
            horizon,
        } => AnyGame::OshiZumo(OshiZumo::new(coins, board, horizon)?),
        GameConfig::Kgmp { k, n } => AnyGame::Gmp(Gmp::kgmp(k, n)?),
        GameConfig::PerturbedKgmp { k, n, seed } => AnyGame::Gmp(Gmp::perturbed(k, n, seed)?),
        GameConfig::CloneGmp { k, m, n } => AnyGame::Gmp(Gmp::new(k, n, m)?),
        GameConfig::RpsChoice => AnyGame::RpsChoice(RpsChoice::new()),
    })
}

macro_rules! dispatch {
    ($self:ident, $state:ident, |$g:ident, $s:ident| $body:expr) => {
        match ($self, $state) {
            (AnyGame::Kuhn($g), AnyState::Kuhn($s)) => $body,
            (AnyGame::Leduc($g), AnyState::Leduc($s)) => $body,
            (AnyGame::OshiZumo($g), AnyState::OshiZumo($s)) => $body,
            (AnyGame::Gmp($g), AnyState::Gmp($s)) => $body,
            (AnyGame::RpsChoice($g), AnyState::RpsChoice($s)) => $body,
            _ => panic!("state does not belong to this game"),
        }
    };
}

impl Game for AnyGame {
    type State = AnyState;

    fn name(&self) -> String {
        match self {
            AnyGame::Kuhn(g) => g.name(),
            AnyGame::Leduc(g) => g.name(),
            AnyGame::OshiZumo(g) => g.name(),
            AnyGame::Gmp(g) => g.name(),
            AnyGame::RpsChoice(g) => g.name(),
        }
    }

    fn root(&self) -> AnyState {
        match self {
            AnyGame::Kuhn(g) => AnyState::Kuhn(g.root()),
            AnyGame::Leduc(g) => AnyState::Leduc(g.root()),
            AnyGame::OshiZumo(g) => AnyState::OshiZumo(g.root()),
            AnyGame::Gmp(g) => AnyState::Gmp(g.root()),
            AnyGame::RpsChoice(g) => AnyState::RpsChoice(g.root()),
        }
    }

    fn kind(&self, state: &AnyState) -> NodeKind {
        dispatch!(self, state, |g, s| g.kind(s))
    }

    fn num_actions(&self, state: &AnyState) -> usize {
        dispatch!(self, state, |g, s| g.num_actions(s))
    }

    fn next(&self, state: &AnyState, a: ActionId) -> AnyState {
        match (self, state) {
            (AnyGame::Kuhn(g), AnyState::Kuhn(s)) => AnyState::Kuhn(g.next(s, a)),
            (AnyGame::Leduc(g), AnyState::Leduc(s)) => AnyState::Leduc(g.next(s, a)),
            (AnyGame::OshiZumo(g), AnyState::OshiZumo(s)) => AnyState::OshiZumo(g.next(s, a)),
            (AnyGame::Gmp(g), AnyState::Gmp(s)) => AnyState::Gmp(g.next(s, a)),
            (AnyGame::RpsChoice(g), AnyState::RpsChoice(s)) => AnyState::RpsChoice(g.next(s, a)),
            _ => panic!("state does not belong to this game"),
        }
    }

    fn chance_probs(&self, state: &AnyState) -> Vec<f64> {
        dispatch!(self, state, |g, s| g.chance_probs(s))
    }

    fn payoff(&self, state: &AnyState) -> f64 {
        dispatch!(self, state, |g, s| g.payoff(s))
    }

    fn info_tokens(&self, state: &AnyState, player: PlayerId) -> Vec<u16> {
        dispatch!(self, state, |g, s| g.info_tokens(s, player))
    }

    fn depth(&self, state: &AnyState) -> usize {
        dispatch!(self, state, |g, s| g.depth(s))
    }

    fn action_label(&self, state: &AnyState, a: ActionId) -> String {
        dispatch!(self, state, |g, s| g.action_label(s, a))
    }
}
