//! How many pure strategies PSRO expands on RpsChoice from random starts.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use xdo_core::games::RpsChoice;
use xdo_core::psro::{psro_solve, InitialPopulation, PsroConfig};
use xdo_core::{NodeCounter, Tree, DEFAULT_MAX_NODES};

use crate::error::{config_err, BenchError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub expanded1: usize,
    pub expanded2: usize,
    pub iterations: u64,
    pub final_exploitability: f64,
    pub terminated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub trials: Vec<TrialRecord>,
    /// `counts[p][k]`: trials in which player `p` expanded `k` strategies.
    pub counts: [BTreeMap<usize, usize>; 2],
}

impl Histogram {
    /// Fraction of trials in which `player` expanded exactly `k` strategies.
    pub fn share(&self, player: usize, k: usize) -> f64 {
        self.counts[player].get(&k).copied().unwrap_or(0) as f64 / self.trials.len() as f64
    }
}

/// Runs `trials` PSRO runs on RpsChoice, trial `i` starting from one random pure
/// strategy per player drawn with seed `seed0 + i`. `base` supplies the remaining
/// PSRO settings.
pub fn psro_histogram(
    trials: usize,
    seed0: u64,
    base: &PsroConfig,
) -> Result<Histogram, BenchError> {
    if trials == 0 {
        return Err(config_err("trials must be at least 1"));
    }
    let tree = Tree::build(&RpsChoice::new(), DEFAULT_MAX_NODES)?;
    let records: Vec<TrialRecord> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let seed = seed0 + i;
            let config = PsroConfig {
                initial: InitialPopulation::Random(seed),
                ..base.clone()
            };
            let res = psro_solve(&tree, &config, &NodeCounter::new())?;
            Ok(TrialRecord {
                seed,
                expanded1: res.strategies_expanded.0,
                expanded2: res.strategies_expanded.1,
                iterations: res.iterations,
                final_exploitability: res.final_exploitability,
                terminated: res.terminated,
            })
        })
        .collect::<Result<_, BenchError>>()?;
    let mut counts = [BTreeMap::new(), BTreeMap::new()];
    for r in &records {
        *counts[0].entry(r.expanded1).or_insert(0) += 1;
        *counts[1].entry(r.expanded2).or_insert(0) += 1;
    }
    Ok(Histogram {
        trials: records,
        counts,
    })
}

/// Writes `psro_hist_trials.csv` (one line per trial) and `psro_hist.csv`
/// (player, strategies, trials) into `dir`.
pub fn write_histogram(dir: &Path, hist: &Histogram) -> Result<(), BenchError> {
    fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join("psro_hist_trials.csv"))?;
    for r in &hist.trials {
        w.serialize(r)?;
    }
    w.flush()?;
    let mut w = csv::Writer::from_path(dir.join("psro_hist.csv"))?;
    w.write_record(["player", "strategies", "trials"])?;
    for (p, counts) in hist.counts.iter().enumerate() {
        for (k, n) in counts {
            w.write_record([(p + 1).to_string(), k.to_string(), n.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}
