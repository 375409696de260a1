//! Seeded runs of one algorithm on one game, written as CSV traces and JSON summaries.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use xdo_core::games::{make_game, GameConfig};
use xdo_core::metrics::Record;
use xdo_core::psro::psro_solve;
use xdo_core::solvers::{Cfr, CfrConfig, ExternalSampling, IterativeSolver, Xfp};
use xdo_core::xdo::{xdo_solve, XdoResult};
use xdo_core::{eval, BehaviorPolicy, NodeCounter, SolveError, Tree};

use crate::config::{Algo, ExperimentConfig};
use crate::error::BenchError;

/// Column order of every trace file.
pub const CSV_HEADER: [&str; 11] = [
    "algo",
    "game",
    "seed",
    "outer_iter",
    "inner_iter",
    "nodes_visited",
    "exploitability",
    "pop1",
    "pop2",
    "restricted_states",
    "wall_ms",
];

/// Bumped whenever the trace columns or the summary fields change.
pub const SCHEMA_VERSION: u32 = 1;

/// One trace line. Empty cells mean "not applicable".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub algo: Algo,
    pub game: String,
    pub seed: u64,
    pub outer_iter: u64,
    pub inner_iter: Option<u64>,
    pub nodes_visited: u64,
    pub exploitability: f64,
    pub pop1: Option<usize>,
    pub pop2: Option<usize>,
    pub restricted_states: Option<usize>,
    pub wall_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub code_version: String,
    pub algo: Algo,
    pub game: String,
    pub seed: u64,
    pub final_exploitability: f64,
    pub nodes_visited: u64,
    /// Outer iterations for xdo and psro, solver iterations otherwise.
    pub iterations: u64,
    /// Reached the algorithm's own convergence test (xdo and psro only).
    pub terminated: Option<bool>,
    /// Exploitability threshold of the last outer test (xdo only).
    pub termination_threshold: Option<f64>,
    /// Stopped by a node, iteration or wall-time bound.
    pub truncated: bool,
    pub population: Option<(usize, usize)>,
    pub strategies_expanded: Option<(usize, usize)>,
    pub full_histories: usize,
    pub restricted_histories: Option<usize>,
    pub restricted_ratio: Option<f64>,
    pub records: usize,
    pub csv: String,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub summary: RunSummary,
    pub rows: Vec<Row>,
    /// Final profile: the average strategy, the extended restricted solution (xdo) or
    /// the realized meta-strategy (psro).
    pub profile: [BehaviorPolicy; 2],
    pub xdo: Option<XdoResult>,
}

impl RunOutput {
    pub fn csv_bytes(&self) -> Result<Vec<u8>, BenchError> {
        csv_bytes(&self.rows)
    }
}

pub fn csv_bytes(rows: &[Row]) -> Result<Vec<u8>, BenchError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| BenchError::Io(e.into_error()))
}

/// Builds the game tree named by `config`.
pub fn build_tree(config: &ExperimentConfig) -> Result<(GameConfig, Tree), BenchError> {
    let game = config.game.resolve()?;
    let tree = Tree::build(&make_game(&game)?, config.max_tree_nodes)?;
    Ok((game, tree))
}

/// File stem shared by a run's CSV and JSON files.
pub fn file_stem(algo: Algo, game: &GameConfig, seed: u64) -> String {
    let mut slug: String = game
        .to_string()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    while slug.ends_with('_') {
        slug.pop();
    }
    format!("{algo}_{slug}_seed{seed}")
}

struct Trace<'a> {
    algo: Algo,
    game: String,
    seed: u64,
    started: Option<Instant>,
    rows: Vec<Row>,
    tree: &'a Tree,
}

impl Trace<'_> {
    fn push_record(&mut self, r: &Record) {
        self.rows.push(Row {
            algo: self.algo,
            game: self.game.clone(),
            seed: self.seed,
            outer_iter: r.outer_iter,
            inner_iter: r.inner_iter,
            nodes_visited: r.nodes_visited,
            exploitability: r.exploitability,
            pop1: Some(r.pop.0),
            pop2: Some(r.pop.1),
            restricted_states: r.restricted_states,
            wall_ms: r.wall_ms,
        });
    }

    fn push_solver(&mut self, solver: &dyn IterativeSolver, nodes: u64) -> Result<f64, BenchError> {
        // reporting only: evaluation visits are not charged to the run
        let e = eval::exploitability(self.tree, &solver.average(), &NodeCounter::new())
            .map_err(SolveError::from)?;
        self.rows.push(Row {
            algo: self.algo,
            game: self.game.clone(),
            seed: self.seed,
            outer_iter: solver.iterations(),
            inner_iter: None,
            nodes_visited: nodes,
            exploitability: e,
            pop1: None,
            pop2: None,
            restricted_states: None,
            wall_ms: self.started.map_or(0, |t| t.elapsed().as_millis() as u64),
        });
        Ok(e)
    }
}

/// Runs one seed of `config` on an already built tree. Nothing is written to disk.
pub fn run_single(
    config: &ExperimentConfig,
    game: &GameConfig,
    tree: &Tree,
    seed: u64,
) -> Result<RunOutput, BenchError> {
    let counter = NodeCounter::new();
    let started = Instant::now();
    let mut trace = Trace {
        algo: config.algo,
        game: game.to_string(),
        seed,
        started: config.record_wall_time.then_some(started),
        rows: Vec::new(),
        tree,
    };
    let mut summary = RunSummary {
        schema_version: SCHEMA_VERSION,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        algo: config.algo,
        game: game.to_string(),
        seed,
        final_exploitability: f64::NAN,
        nodes_visited: 0,
        iterations: 0,
        terminated: None,
        termination_threshold: None,
        truncated: false,
        population: None,
        strategies_expanded: None,
        full_histories: tree.len(),
        restricted_histories: None,
        restricted_ratio: None,
        records: 0,
        csv: format!("{}.csv", file_stem(config.algo, game, seed)),
        config: config.clone(),
    };
    let mut xdo = None;
    let profile = match config.algo {
        Algo::Xdo => {
            let xdo_config = config.xdo_config();
            let res = xdo_solve(tree, &xdo_config, &counter)?;
            res.records.iter().for_each(|r| trace.push_record(r));
            summary.final_exploitability = res.final_exploitability;
            summary.iterations = res.outer_iterations;
            summary.terminated = Some(res.terminated);
            summary.termination_threshold =
                Some(xdo_config.termination_eps.unwrap_or(res.final_eps));
            summary.truncated = res.truncated;
            summary.population = Some(res.population.sizes());
            summary.restricted_histories = Some(res.restricted_counts.histories);
            summary.restricted_ratio =
                Some(res.restricted_counts.histories as f64 / tree.len() as f64);
            let profile = res.profile.clone();
            xdo = Some(res);
            profile
        }
        Algo::Psro => {
            let res = psro_solve(tree, &config.psro_config(seed), &counter)?;
            res.records.iter().for_each(|r| trace.push_record(r));
            summary.final_exploitability = res.final_exploitability;
            summary.iterations = res.iterations;
            summary.terminated = Some(res.terminated);
            summary.truncated = res.truncated;
            summary.population = Some(res.population.sizes());
            summary.strategies_expanded = Some(res.strategies_expanded);
            res.profile
        }
        Algo::Cfr | Algo::CfrPlus => {
            let plus = config.algo == Algo::CfrPlus;
            let cfg = CfrConfig {
                plus,
                alternating: config.cfr.alternating,
            };
            let mut solver = Cfr::new(tree, cfg, counter.clone());
            run_iterative(
                config,
                &mut solver,
                &counter,
                started,
                &mut trace,
                &mut summary,
            )?
        }
        Algo::MccfrEs => {
            let mut solver = ExternalSampling::new(tree, seed, counter.clone());
            run_iterative(
                config,
                &mut solver,
                &counter,
                started,
                &mut trace,
                &mut summary,
            )?
        }
        Algo::Xfp => {
            let mut solver = Xfp::new(tree, counter.clone());
            run_iterative(
                config,
                &mut solver,
                &counter,
                started,
                &mut trace,
                &mut summary,
            )?
        }
    };
    summary.nodes_visited = counter.get();
    summary.records = trace.rows.len();
    Ok(RunOutput {
        summary,
        rows: trace.rows,
        profile,
        xdo,
    })
}

/// Steps `solver` until a budget bound is hit, evaluating at the geometric cadence
/// and once more at the end.
fn run_iterative(
    config: &ExperimentConfig,
    solver: &mut dyn IterativeSolver,
    counter: &NodeCounter,
    started: Instant,
    trace: &mut Trace,
    summary: &mut RunSummary,
) -> Result<[BehaviorPolicy; 2], BenchError> {
    let budget = &config.budget;
    let time_limit = budget.time_limit();
    let mut next_eval = config.eval_cadence.next_after(0);
    let mut last_eval = None;
    let mut truncated = false;
    loop {
        if budget.iterations.is_some_and(|m| solver.iterations() >= m) {
            break;
        }
        if budget.nodes.is_some_and(|m| counter.get() >= m)
            || time_limit.is_some_and(|t| started.elapsed() >= t)
        {
            truncated = true;
            break;
        }
        solver.step();
        let nodes = counter.get();
        if nodes >= next_eval {
            trace.push_solver(solver, nodes)?;
            last_eval = Some(solver.iterations());
            next_eval = config.eval_cadence.next_after(nodes);
        }
    }
    let final_e = match last_eval {
        Some(it) if it == solver.iterations() => trace.rows.last().unwrap().exploitability,
        _ => trace.push_solver(solver, counter.get())?,
    };
    summary.final_exploitability = final_e;
    summary.iterations = solver.iterations();
    summary.truncated = truncated;
    Ok(solver.average())
}

/// Paths written for one run.
#[derive(Debug, Clone)]
pub struct RunFiles {
    pub csv: PathBuf,
    pub json: PathBuf,
}

pub fn write_run(dir: &Path, output: &RunOutput) -> Result<RunFiles, BenchError> {
    fs::create_dir_all(dir)?;
    let csv = dir.join(&output.summary.csv);
    let json = csv.with_extension("json");
    fs::write(&csv, output.csv_bytes()?)?;
    fs::write(&json, serde_json::to_string_pretty(&output.summary)? + "\n")?;
    Ok(RunFiles { csv, json })
}

/// Runs every seed of `config` in parallel and writes one CSV and one JSON summary
/// per seed under `config.out`.
pub fn run(config: &ExperimentConfig) -> Result<Vec<RunSummary>, BenchError> {
    config.validate()?;
    let (game, tree) = build_tree(config)?;
    let outputs: Vec<RunOutput> = config
        .seeds
        .par_iter()
        .map(|&seed| run_single(config, &game, &tree, seed))
        .collect::<Result<_, _>>()?;
    let mut summaries = Vec::with_capacity(outputs.len());
    for out in outputs {
        write_run(&config.out, &out)?;
        summaries.push(out.summary);
    }
    Ok(summaries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Budget, GameSpec};

    fn cfg(algo: Algo, budget: Budget) -> ExperimentConfig {
        ExperimentConfig::new(GameSpec::new("kuhn"), algo, budget)
    }

    fn run_kuhn(config: &ExperimentConfig) -> RunOutput {
        let (game, tree) = build_tree(config).unwrap();
        run_single(config, &game, &tree, 0).unwrap()
    }

    #[test]
    fn header_matches_row_fields() {
        let out = run_kuhn(&cfg(
            Algo::CfrPlus,
            Budget {
                iterations: Some(5),
                ..Default::default()
            },
        ));
        let bytes = out.csv_bytes().unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let rows: Vec<Row> = r.deserialize().collect::<Result<_, _>>().unwrap();
        assert_eq!(rows, out.rows);
    }

    #[test]
    fn cadence_is_geometric_and_final_point_is_recorded() {
        let mut c = cfg(
            Algo::Cfr,
            Budget {
                nodes: Some(20_000),
                ..Default::default()
            },
        );
        c.eval_cadence = "1000:2".parse().unwrap();
        let out = run_kuhn(&c);
        let nodes: Vec<u64> = out.rows.iter().map(|r| r.nodes_visited).collect();
        // 1000, 2000, 4000, 8000, 16000 crossings plus the final point
        assert_eq!(nodes.len(), 6, "{nodes:?}");
        assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(out.summary.truncated);
        assert_eq!(
            out.summary.final_exploitability,
            out.rows.last().unwrap().exploitability
        );
        assert!(out.summary.nodes_visited >= 20_000);
    }

    #[test]
    fn iteration_budget_is_exact() {
        let out = run_kuhn(&cfg(
            Algo::Xfp,
            Budget {
                iterations: Some(7),
                ..Default::default()
            },
        ));
        assert_eq!(out.summary.iterations, 7);
        assert!(!out.summary.truncated);
        assert_eq!(out.rows.last().unwrap().outer_iter, 7);
    }

    #[test]
    fn every_algorithm_runs_on_kuhn() {
        for algo in Algo::ALL {
            let out = run_kuhn(&cfg(
                algo,
                Budget {
                    nodes: Some(50_000),
                    iterations: Some(200),
                    ..Default::default()
                },
            ));
            assert!(out.summary.final_exploitability.is_finite(), "{algo}");
            assert!(out.rows.iter().all(|r| r.exploitability >= -1e-9));
            assert!(
                out.rows
                    .windows(2)
                    .all(|w| w[0].nodes_visited <= w[1].nodes_visited),
                "{algo}"
            );
            assert_eq!(
                out.rows.iter().all(|r| r.pop1.is_some()),
                matches!(algo, Algo::Xdo | Algo::Psro)
            );
        }
    }

    #[test]
    fn file_stems_are_filesystem_safe() {
        let g = GameConfig::OshiZumo {
            coins: 4,
            board: 3,
            horizon: 6,
        };
        assert_eq!(
            file_stem(Algo::CfrPlus, &g, 2),
            "cfr_plus_oshi_zumo_coins_4_board_3_horizon_6_seed2"
        );
    }
}
