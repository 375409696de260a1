//! Experiment configuration: a TOML file, command-line overrides, and the resolved
//! [`ExperimentConfig`].

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use xdo_core::games::GameConfig;
use xdo_core::psro::{InitialPopulation, MetaSolver, PayoffMode, PsroConfig};
use xdo_core::xdo::{InnerSolver, XdoConfig};
use xdo_core::DEFAULT_MAX_NODES;

use crate::error::{config_err, BenchError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algo {
    Xdo,
    Psro,
    Cfr,
    CfrPlus,
    MccfrEs,
    Xfp,
}

impl Algo {
    pub const ALL: [Algo; 6] = [
        Algo::Xdo,
        Algo::Psro,
        Algo::Cfr,
        Algo::CfrPlus,
        Algo::MccfrEs,
        Algo::Xfp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algo::Xdo => "xdo",
            Algo::Psro => "psro",
            Algo::Cfr => "cfr",
            Algo::CfrPlus => "cfr_plus",
            Algo::MccfrEs => "mccfr_es",
            Algo::Xfp => "xfp",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algo {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        Algo::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| config_err(format!("unknown algorithm '{s}' (expected one of xdo, psro, cfr, cfr_plus, mccfr_es, xfp)")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSpec {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, u64>,
}

impl GameSpec {
    pub fn new(name: &str) -> Self {
        GameSpec {
            name: name.to_string(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: u64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn resolve(&self) -> Result<GameConfig, BenchError> {
        if !GameConfig::NAMES.contains(&self.name.as_str()) {
            return Err(config_err(format!("unknown game '{}'", self.name)));
        }
        Ok(GameConfig::from_name(&self.name, |k| {
            self.params.get(k).copied()
        })?)
    }
}

/// Stopping bounds shared by every algorithm. `iterations` counts outer iterations
/// for xdo and psro and solver iterations otherwise.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budget {
    pub nodes: Option<u64>,
    pub iterations: Option<u64>,
    pub wall_seconds: Option<f64>,
}

impl Budget {
    pub fn time_limit(&self) -> Option<Duration> {
        self.wall_seconds.map(Duration::from_secs_f64)
    }
}

/// Geometric evaluation points for the iterative baselines: node counts
/// `start`, `start * factor`, `start * factor^2`, ...
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cadence {
    pub start: u64,
    pub factor: f64,
}

impl Default for Cadence {
    fn default() -> Self {
        Cadence {
            start: 10_000,
            factor: 2.0,
        }
    }
}

impl Cadence {
    /// The first evaluation point strictly above `nodes`.
    pub fn next_after(&self, nodes: u64) -> u64 {
        let mut point = self.start;
        while point <= nodes {
            point = ((point as f64) * self.factor).ceil() as u64;
        }
        point
    }
}

impl FromStr for Cadence {
    type Err = BenchError;

    /// `START` or `START:FACTOR`.
    fn from_str(s: &str) -> Result<Self, BenchError> {
        let bad = || {
            config_err(format!(
                "invalid eval cadence '{s}' (expected START or START:FACTOR)"
            ))
        };
        let (start, factor) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (s, None),
        };
        let start = start.trim().parse().map_err(|_| bad())?;
        let factor = match factor {
            Some(f) => f.trim().parse().map_err(|_| bad())?,
            None => Cadence::default().factor,
        };
        Ok(Cadence { start, factor })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerKind {
    CfrPlus,
    Cfr,
    Xfp,
    Lp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct XdoSection {
    pub eps0: f64,
    pub eps_decay: f64,
    pub eps_floor: f64,
    pub termination_eps: Option<f64>,
    pub inner: InnerKind,
    pub check_period: u64,
    pub prefer_restricted: bool,
    pub warm_start: bool,
    pub max_pure_strategies: usize,
}

impl Default for XdoSection {
    fn default() -> Self {
        let d = XdoConfig::default();
        XdoSection {
            eps0: d.eps0,
            eps_decay: d.eps_decay,
            eps_floor: d.eps_floor,
            termination_eps: d.termination_eps,
            inner: InnerKind::CfrPlus,
            check_period: d.inner_check_period,
            prefer_restricted: d.prefer_restricted,
            warm_start: d.warm_start,
            max_pure_strategies: d.max_pure_strategies,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetaKind {
    LpCentral,
    Lp,
    Fp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PayoffKind {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    Default,
    /// One random pure strategy per player, drawn from the run's seed.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsroSection {
    pub meta_solver: MetaKind,
    pub fp_iterations: usize,
    pub payoffs: PayoffKind,
    pub games_per_pair: u32,
    pub eps: f64,
    pub initial: InitialKind,
}

impl Default for PsroSection {
    fn default() -> Self {
        PsroSection {
            meta_solver: MetaKind::LpCentral,
            fp_iterations: 10_000,
            payoffs: PayoffKind::Exact,
            games_per_pair: 100,
            eps: PsroConfig::default().eps,
            initial: InitialKind::Default,
        }
    }
}

impl PsroSection {
    pub fn meta(&self) -> MetaSolver {
        match self.meta_solver {
            MetaKind::LpCentral => MetaSolver::LpCentral,
            MetaKind::Lp => MetaSolver::Lp,
            MetaKind::Fp => MetaSolver::Fp(self.fp_iterations),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CfrSection {
    /// Update one player per traversal (cfr and cfr_plus).
    pub alternating: bool,
}

/// A fully resolved experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub game: GameSpec,
    pub algo: Algo,
    pub seeds: Vec<u64>,
    pub budget: Budget,
    pub out: PathBuf,
    #[serde(default)]
    pub eval_cadence: Cadence,
    /// Fill the wall_ms column. Off by default so traces are byte-identical.
    #[serde(default)]
    pub record_wall_time: bool,
    /// Largest game tree that will be compiled.
    #[serde(default = "default_max_tree_nodes")]
    pub max_tree_nodes: usize,
    #[serde(default)]
    pub xdo: XdoSection,
    #[serde(default)]
    pub psro: PsroSection,
    #[serde(default)]
    pub cfr: CfrSection,
}

fn default_max_tree_nodes() -> usize {
    DEFAULT_MAX_NODES
}

impl ExperimentConfig {
    pub fn new(game: GameSpec, algo: Algo, budget: Budget) -> Self {
        ExperimentConfig {
            game,
            algo,
            seeds: vec![0],
            budget,
            out: PathBuf::from("results"),
            eval_cadence: Cadence::default(),
            record_wall_time: false,
            max_tree_nodes: DEFAULT_MAX_NODES,
            xdo: XdoSection::default(),
            psro: PsroSection::default(),
            cfr: CfrSection::default(),
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.seeds.is_empty() {
            return Err(config_err("at least one seed is required"));
        }
        let b = &self.budget;
        if b.nodes.is_none() && b.iterations.is_none() && b.wall_seconds.is_none() {
            return Err(config_err(
                "at least one budget bound (nodes, iterations, wall_seconds) is required",
            ));
        }
        if b.nodes == Some(0) || b.iterations == Some(0) {
            return Err(config_err("budget bounds must be positive"));
        }
        if b.wall_seconds.is_some_and(|w| !(w > 0.0 && w.is_finite())) {
            return Err(config_err("wall_seconds must be positive"));
        }
        if self.eval_cadence.start == 0 || !(self.eval_cadence.factor > 1.0) {
            return Err(config_err("eval cadence needs start >= 1 and factor > 1"));
        }
        self.game.resolve()?;
        match self.algo {
            Algo::Xdo => self.xdo_config().validate()?,
            Algo::Psro => self.psro_config(0).validate()?,
            _ => {}
        }
        Ok(())
    }

    pub fn xdo_config(&self) -> XdoConfig {
        let x = &self.xdo;
        XdoConfig {
            eps0: x.eps0,
            eps_decay: x.eps_decay,
            eps_floor: x.eps_floor,
            termination_eps: x.termination_eps,
            inner_solver: match x.inner {
                InnerKind::CfrPlus => InnerSolver::CfrPlus,
                InnerKind::Cfr => InnerSolver::Cfr,
                InnerKind::Xfp => InnerSolver::Xfp,
                InnerKind::Lp => InnerSolver::NormalFormLp,
            },
            inner_check_period: x.check_period,
            max_inner_iterations: None,
            max_outer_iterations: self.budget.iterations.unwrap_or(u64::MAX),
            node_budget: self.budget.nodes,
            time_limit: self.budget.time_limit(),
            prefer_restricted: x.prefer_restricted,
            max_pure_strategies: x.max_pure_strategies,
            warm_start: x.warm_start,
            record_wall_time: self.record_wall_time,
        }
    }

    pub fn psro_config(&self, seed: u64) -> PsroConfig {
        let p = &self.psro;
        PsroConfig {
            meta_solver: p.meta(),
            payoff_mode: match p.payoffs {
                PayoffKind::Exact => PayoffMode::Exact,
                PayoffKind::Sampled => PayoffMode::Sampled {
                    games_per_pair: p.games_per_pair,
                    seed,
                },
            },
            eps: p.eps,
            max_iterations: self.budget.iterations.unwrap_or(u64::MAX),
            initial: match p.initial {
                InitialKind::Default => InitialPopulation::Default,
                InitialKind::Random => InitialPopulation::Random(seed),
            },
            node_budget: self.budget.nodes,
            time_limit: self.budget.time_limit(),
            record_wall_time: self.record_wall_time,
        }
    }
}

/// A config file as written: every top-level field may be left for the command line.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub game: Option<GameSpec>,
    pub algo: Option<Algo>,
    pub seeds: Option<Vec<u64>>,
    #[serde(default)]
    pub budget: Budget,
    pub out: Option<PathBuf>,
    pub eval_cadence: Option<Cadence>,
    pub record_wall_time: Option<bool>,
    pub max_tree_nodes: Option<usize>,
    #[serde(default)]
    pub xdo: XdoSection,
    #[serde(default)]
    pub psro: PsroSection,
    #[serde(default)]
    pub cfr: CfrSection,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, BenchError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub game: Option<String>,
    pub params: Vec<(String, u64)>,
    pub algo: Option<Algo>,
    pub seeds: Option<Vec<u64>>,
    pub node_budget: Option<u64>,
    pub max_iters: Option<u64>,
    pub wall_seconds: Option<f64>,
    pub out: Option<PathBuf>,
    pub eval_cadence: Option<Cadence>,
    pub record_wall_time: bool,
}

impl ExperimentConfig {
    /// Merges `file` (if any) with `cli` and validates the result.
    pub fn resolve(file: Option<FileConfig>, cli: Overrides) -> Result<Self, BenchError> {
        let file = file.unwrap_or_default();
        let mut game = match (cli.game, file.game) {
            (Some(name), Some(spec)) if name == spec.name => spec,
            (Some(name), _) => GameSpec::new(&name),
            (None, Some(spec)) => spec,
            (None, None) => {
                return Err(config_err("no game given (use --game or a [game] section)"))
            }
        };
        for (k, v) in cli.params {
            game.params.insert(k, v);
        }
        let algo = cli
            .algo
            .or(file.algo)
            .ok_or_else(|| config_err("no algorithm given (use --algo or algo = ...)"))?;
        let mut budget = file.budget;
        budget.nodes = cli.node_budget.or(budget.nodes);
        budget.iterations = cli.max_iters.or(budget.iterations);
        budget.wall_seconds = cli.wall_seconds.or(budget.wall_seconds);
        let config = ExperimentConfig {
            game,
            algo,
            seeds: cli.seeds.or(file.seeds).unwrap_or_else(|| vec![0]),
            budget,
            out: cli
                .out
                .or(file.out)
                .unwrap_or_else(|| PathBuf::from("results")),
            eval_cadence: cli.eval_cadence.or(file.eval_cadence).unwrap_or_default(),
            record_wall_time: cli.record_wall_time || file.record_wall_time.unwrap_or(false),
            max_tree_nodes: file.max_tree_nodes.unwrap_or(DEFAULT_MAX_NODES),
            xdo: file.xdo,
            psro: file.psro,
            cfr: file.cfr,
        };
        config.validate()?;
        Ok(config)
    }
}

/// Parses `key=value` game parameters.
pub fn parse_param(s: &str) -> Result<(String, u64), BenchError> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| config_err(format!("parameter '{s}' is not key=value")))?;
    let v = v
        .trim()
        .parse()
        .map_err(|_| config_err(format!("parameter '{s}' needs an integer value")))?;
    Ok((k.trim().to_string(), v))
}
