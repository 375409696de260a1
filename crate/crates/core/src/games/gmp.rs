//! Generalized matching pennies families.
//!
//! A chance node picks one of `k` stage games uniformly; both players observe which.
//! In each stage the players simultaneously pick one of `n * m` actions, split into
//! `n` classes of `m` clones (action `a` belongs to class `a / m`). Matching classes pay
//! player one the stage's match payoff for that class (`n - 1` unperturbed), anything
//! else pays `-1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game_core::{ActionId, Game, GameError, NodeKind, PlayerId};

#[derive(Debug, Clone)]
pub struct Gmp {
    stages: usize,
    classes: usize,
    clones: usize,
    /// `match_payoff[stage][class]`, player one's payoff on a match
    match_payoff: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GmpState {
    stage: Option<u16>,
    first: Option<u16>,
    second: Option<u16>,
}

/// Match payoffs of a perturbed k-GMP: `n - 1` plus an independent draw from
/// `(-1, 1)` per stage game and matching action.
pub fn perturb_kgmp(k: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..k)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let mut d: f64 = rng.gen_range(-1.0..1.0);
                    while d <= -1.0 {
                        d = rng.gen_range(-1.0..1.0);
                    }
                    (n - 1) as f64 + d
                })
                .collect()
        })
        .collect()
}

impl Gmp {
    pub fn new(stages: usize, classes: usize, clones: usize) -> Result<Self, GameError> {
        let payoff = vec![vec![classes.saturating_sub(1) as f64; classes]; stages];
        Self::with_payoffs(classes, clones, payoff)
    }

    pub fn kgmp(k: usize, n: usize) -> Result<Self, GameError> {
        Self::new(k, n, 1)
    }

    pub fn perturbed(k: usize, n: usize, seed: u64) -> Result<Self, GameError> {
        Self::validate(k, n, 1)?;
        Self::with_payoffs(n, 1, perturb_kgmp(k, n, seed))
    }

    pub fn with_payoffs(
        classes: usize,
        clones: usize,
        match_payoff: Vec<Vec<f64>>,
    ) -> Result<Self, GameError> {
        Self::validate(match_payoff.len(), classes, clones)?;
        if match_payoff.iter().any(|row| row.len() != classes) {
            return Err(GameError::InvalidConfig(
                "payoff table must be k x n".into(),
            ));
        }
        Ok(Gmp {
            stages: match_payoff.len(),
            classes,
            clones,
            match_payoff,
        })
    }

    fn validate(k: usize, n: usize, m: usize) -> Result<(), GameError> {
        if k == 0 || k > 4096 {
            return Err(GameError::InvalidConfig("k must be in 1..=4096".into()));
        }
        if n < 2 || m == 0 || n * m > 1024 {
            return Err(GameError::InvalidConfig(
                "need n >= 2, m >= 1, n*m <= 1024".into(),
            ));
        }
        Ok(())
    }

    pub fn stages(&self) -> usize {
        self.stages
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn clones(&self) -> usize {
        self.clones
    }

    pub fn class_of(&self, action: ActionId) -> usize {
        action.index() / self.clones
    }

    pub fn match_payoffs(&self) -> &[Vec<f64>] {
        &self.match_payoff
    }

    /// Stage game `j` as player one's payoff matrix over classes.
    pub fn stage_matrix(&self, stage: usize) -> Vec<Vec<f64>> {
        (0..self.classes)
            .map(|r| {
                (0..self.classes)
                    .map(|c| {
                        if r == c {
                            self.match_payoff[stage][r]
                        } else {
                            -1.0
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

impl Game for Gmp {
    type State = GmpState;

    fn name(&self) -> String {
        format!(
            "gmp(k={},n={},m={})",
            self.stages, self.classes, self.clones
        )
    }

    fn root(&self) -> GmpState {
        GmpState {
            stage: None,
            first: None,
            second: None,
        }
    }

    fn kind(&self, s: &GmpState) -> NodeKind {
        match (s.stage, s.first, s.second) {
            (None, _, _) => NodeKind::Chance,
            (Some(_), None, _) => NodeKind::Decision(PlayerId::Player1),
            (Some(_), Some(_), None) => NodeKind::Decision(PlayerId::Player2),
            _ => NodeKind::Terminal,
        }
    }

    fn num_actions(&self, s: &GmpState) -> usize {
        match self.kind(s) {
            NodeKind::Chance => self.stages,
            NodeKind::Decision(_) => self.classes * self.clones,
            NodeKind::Terminal => 0,
        }
    }

    fn next(&self, s: &GmpState, a: ActionId) -> GmpState {
        let mut out = *s;
        match self.kind(s) {
            NodeKind::Chance => out.stage = Some(a.0),
            NodeKind::Decision(PlayerId::Player1) => out.first = Some(a.0),
            _ => out.second = Some(a.0),
        }
        out
    }

    fn chance_probs(&self, _s: &GmpState) -> Vec<f64> {
        vec![1.0 / self.stages as f64; self.stages]
    }

    fn payoff(&self, s: &GmpState) -> f64 {
        let stage = s.stage.unwrap() as usize;
        let c1 = self.class_of(ActionId(s.first.unwrap()));
        let c2 = self.class_of(ActionId(s.second.unwrap()));
        if c1 == c2 {
            self.match_payoff[stage][c1]
        } else {
            -1.0
        }
    }

    fn info_tokens(&self, s: &GmpState, player: PlayerId) -> Vec<u16> {
        let mut tokens = Vec::with_capacity(2);
        if let Some(stage) = s.stage {
            tokens.push(stage);
        }
        let own = if player == PlayerId::Player1 {
            s.first
        } else {
            s.second
        };
        if let Some(a) = own {
            tokens.push(a);
        }
        tokens
    }

    fn depth(&self, s: &GmpState) -> usize {
        [s.stage, s.first, s.second]
            .iter()
            .filter(|x| x.is_some())
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn match_pays_n_minus_one() {
        let g = Gmp::kgmp(1, 3).unwrap();
        let s = g.apply(&g.root(), ActionId(0)).unwrap();
        let s = g.apply(&s, ActionId(2)).unwrap();
        let hit = g.apply(&s, ActionId(2)).unwrap();
        let miss = g.apply(&s, ActionId(1)).unwrap();
        assert_eq!(g.returns(&hit).unwrap(), (2.0, -2.0));
        assert_eq!(g.returns(&miss).unwrap(), (-1.0, 1.0));
    }

    #[test]
    fn root_is_uniform_chance() {
        let g = Gmp::kgmp(3, 3).unwrap();
        let out = g.chance_outcomes(&g.root()).unwrap();
        assert_eq!(out.len(), 3);
        assert!(out.iter().all(|(_, p)| (p - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn clones_share_class() {
        let g = Gmp::new(2, 3, 4).unwrap();
        assert_eq!(g.class_of(ActionId(7)), 1);
        let s = g.apply(&g.root(), ActionId(1)).unwrap();
        assert_eq!(g.num_actions(&s), 12);
        let s = g.apply(&s, ActionId(4)).unwrap();
        let s = g.apply(&s, ActionId(7)).unwrap();
        assert_eq!(g.returns(&s).unwrap().0, 2.0);
    }

    #[test]
    fn perturbation_range_and_determinism() {
        let a = perturb_kgmp(2, 2, 7);
        let b = perturb_kgmp(2, 2, 7);
        assert_eq!(a, b);
        assert_eq!(a.iter().flatten().count(), 4);
        for v in a.iter().flatten() {
            let d = v - 1.0;
            assert!(d > -1.0 && d < 1.0);
        }
        assert_ne!(perturb_kgmp(2, 2, 8), a);
    }

    #[test]
    fn invalid_parameters() {
        assert!(Gmp::kgmp(0, 3).is_err());
        assert!(Gmp::kgmp(2, 1).is_err());
        assert!(Gmp::new(2, 3, 0).is_err());
    }
}
