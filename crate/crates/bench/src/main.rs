use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use xdo_bench::config::{parse_param, MetaKind, PsroSection};
use xdo_bench::hist::{psro_histogram, write_histogram};
use xdo_bench::size::run_size_report;
use xdo_bench::{run, Algo, BenchError, Cadence, ExperimentConfig, FileConfig, Overrides};
use xdo_core::games::GameConfig;
use xdo_core::psro::PsroConfig;

#[derive(Parser)]
#[command(
    name = "xdo-bench",
    version,
    about = "Run seeded solver experiments and write CSV traces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm on one game for each seed.
    Run(RunArgs),
    /// PSRO strategy-count histogram on RpsChoice from random starts.
    PsroHist(HistArgs),
    /// Size of XDO's final restricted game relative to the full game.
    SizeReport(RunArgs),
    /// List the available games and their parameters.
    ListGames,
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment file; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    game: Option<String>,
    /// Game parameter as key=value (repeatable), e.g. --param m=2.
    #[arg(long = "param", value_parser = parse_param_arg)]
    params: Vec<(String, u64)>,
    #[arg(long, value_parser = parse_algo)]
    algo: Option<Algo>,
    /// Single seed (repeatable).
    #[arg(long = "seed")]
    seed: Vec<u64>,
    /// Comma-separated seeds.
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
    #[arg(long)]
    node_budget: Option<u64>,
    #[arg(long)]
    max_iters: Option<u64>,
    #[arg(long)]
    wall_seconds: Option<f64>,
    /// Output directory (run) or JSON file (size-report).
    #[arg(long)]
    out: Option<PathBuf>,
    /// START or START:FACTOR node counts for baseline evaluations.
    #[arg(long, value_parser = parse_cadence)]
    eval_cadence: Option<Cadence>,
    /// Record wall-clock milliseconds (makes traces non-reproducible).
    #[arg(long)]
    wall_time: bool,
}

#[derive(Args)]
struct HistArgs {
    #[arg(long, default_value_t = 150)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed0: u64,
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    /// lp_central, lp or fp.
    #[arg(long, default_value = "lp_central", value_parser = parse_meta)]
    meta_solver: MetaKind,
    #[arg(long, default_value = "results/psro_hist")]
    out: PathBuf,
}

fn parse_param_arg(s: &str) -> Result<(String, u64), String> {
    parse_param(s).map_err(|e| e.to_string())
}

fn parse_algo(s: &str) -> Result<Algo, String> {
    s.parse().map_err(|e: BenchError| e.to_string())
}

fn parse_cadence(s: &str) -> Result<Cadence, String> {
    s.parse().map_err(|e: BenchError| e.to_string())
}

fn parse_meta(s: &str) -> Result<MetaKind, String> {
    match s {
        "lp_central" => Ok(MetaKind::LpCentral),
        "lp" => Ok(MetaKind::Lp),
        "fp" => Ok(MetaKind::Fp),
        _ => Err(format!(
            "unknown meta-solver '{s}' (expected lp_central, lp or fp)"
        )),
    }
}

fn resolve(args: RunArgs, default_algo: Option<Algo>) -> Result<ExperimentConfig, BenchError> {
    let file = args.config.as_deref().map(FileConfig::load).transpose()?;
    let mut seeds = args.seed;
    seeds.extend(args.seeds);
    let cli = Overrides {
        game: args.game,
        params: args.params,
        algo: args.algo.or(default_algo),
        seeds: (!seeds.is_empty()).then_some(seeds),
        node_budget: args.node_budget,
        max_iters: args.max_iters,
        wall_seconds: args.wall_seconds,
        out: args.out,
        eval_cadence: args.eval_cadence,
        record_wall_time: args.wall_time,
    };
    ExperimentConfig::resolve(file, cli)
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run(args) => {
            let config = resolve(args, None)?;
            let summaries = run(&config)?;
            for s in &summaries {
                let status = match (s.terminated, s.truncated) {
                    (Some(true), _) => "terminated",
                    (_, true) => "truncated",
                    _ => "done",
                };
                println!(
                    "{} {} seed {}: exploitability {:.6} after {} iterations, {} nodes ({status}) -> {}",
                    s.algo,
                    s.game,
                    s.seed,
                    s.final_exploitability,
                    s.iterations,
                    s.nodes_visited,
                    config.out.join(&s.csv).display()
                );
            }
        }
        Command::PsroHist(args) => {
            let section = PsroSection {
                meta_solver: args.meta_solver,
                ..Default::default()
            };
            let base = PsroConfig {
                meta_solver: section.meta(),
                eps: args.eps,
                ..Default::default()
            };
            base.validate().map_err(BenchError::from)?;
            let hist = psro_histogram(args.trials, args.seed0, &base)?;
            write_histogram(&args.out, &hist)?;
            for (p, counts) in hist.counts.iter().enumerate() {
                let line: Vec<String> = counts.iter().map(|(k, n)| format!("{k}:{n}")).collect();
                println!(
                    "player {} strategies expanded (count:trials) {}",
                    p + 1,
                    line.join(" ")
                );
            }
            println!("wrote {}", args.out.display());
        }
        Command::SizeReport(args) => {
            let out = args.out.clone();
            let config = resolve(RunArgs { out: None, ..args }, Some(Algo::Xdo))?;
            if config.algo != Algo::Xdo {
                return Err(BenchError::Config(
                    "size-report runs xdo; drop --algo or set it to xdo".into(),
                )
                .into());
            }
            let report = run_size_report(&config)?;
            let json = serde_json::to_string_pretty(&report).context("serializing report")?;
            match out {
                Some(path) => {
                    if let Some(dir) = path.parent() {
                        std::fs::create_dir_all(dir)?;
                    }
                    std::fs::write(&path, json + "\n")?;
                    println!("ratio {:.4} -> {}", report.ratio, path.display());
                }
                None => println!("{json}"),
            }
        }
        Command::ListGames => {
            for name in GameConfig::NAMES {
                let example = GameConfig::from_name(name, |_| None).expect("defaults are valid");
                println!("{name:<16} default: {example}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e
                .downcast_ref::<BenchError>()
                .map_or(1, BenchError::exit_code);
            ExitCode::from(code)
        }
    }
}
