use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use extreme_bandit::{
    log_checkpoints, reference_arms, reference_c, simulate, write_curves_csv, ArmSpec, BoundParams, Curve,
    PolicyConfig, REFERENCE_GAMMA,
};
use mcts_sr::benchdata::{benchmark, load_csv};
use mcts_sr::expr::{node_count, simplify_basic};
use mcts_sr::search::{write_log, Source};
use mcts_sr::{search, BenchmarkSpec, Dataset, SearchOutcome};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::recovery::{check_recovery, RecoveryCheck};
use crate::report::{RecoveryReport, TrialResult};
use crate::tail::{fit_tail, fit_tail_ks};
use crate::CliError;

/// Where the training data of a run come from.
enum DataSource {
    Benchmark(BenchmarkSpec),
    File(Dataset),
}

fn resolve(cfg: &RunConfig) -> Result<DataSource, CliError> {
    match (&cfg.benchmark, &cfg.data) {
        (Some(name), None) => Ok(DataSource::Benchmark(benchmark(name)?)),
        (None, Some(path)) => Ok(DataSource::File(load_csv(path)?)),
        (None, None) => Err(CliError::Config("one of --benchmark or --data is required".into())),
        (Some(_), Some(_)) => Err(CliError::Config("give either a benchmark or a data file, not both".into())),
    }
}

fn require_benchmark(cfg: &RunConfig) -> Result<BenchmarkSpec, CliError> {
    match resolve(cfg)? {
        DataSource::Benchmark(spec) => Ok(spec),
        DataSource::File(_) => Err(CliError::Config("this command needs --benchmark".into())),
    }
}

fn run_search(cfg: &RunConfig, data: &Dataset, with_constants: bool, seed: u64, record_log: bool) -> Result<SearchOutcome, CliError> {
    let mdp = cfg.mdp_config(data.n_vars(), with_constants);
    let search_cfg = mcts_sr::SearchConfig { seed, record_log, ..cfg.search_config() };
    Ok(search(data, &mdp, &search_cfg)?)
}

fn create_out_file(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    std::fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

/// Result of a single search.
#[derive(Clone, Debug, Serialize)]
pub struct SolveResult {
    pub expression: String,
    pub reward: f64,
    pub complexity: usize,
    pub evaluations: u64,
    pub stopped_early: bool,
    pub recovery: Option<RecoveryCheck>,
    pub log_path: Option<PathBuf>,
}

/// One search; writes the JSON-lines run log to `out/run_log.jsonl` when an
/// output directory is set.
pub fn cmd_solve(cfg: &RunConfig) -> Result<SolveResult, CliError> {
    cfg.validate()?;
    let seed = cfg.seed();
    let (data, spec) = match resolve(cfg)? {
        DataSource::Benchmark(spec) => (spec.generate(seed)?, Some(spec)),
        DataSource::File(data) => (data, None),
    };
    let with_constants = spec.as_ref().is_none_or(|s| s.constants_allowed);
    let outcome = run_search(cfg, &data, with_constants, seed, cfg.out.is_some())?;
    let simplified = simplify_basic(&outcome.best);
    let log_path = match &cfg.out {
        Some(dir) => {
            let mut w = create_out_file(dir, "run_log.jsonl")?;
            write_log(&mut w, &outcome.log)?;
            w.flush()?;
            Some(dir.join("run_log.jsonl"))
        }
        None => None,
    };
    Ok(SolveResult {
        expression: simplified.to_infix(),
        reward: outcome.best_reward,
        complexity: node_count(&simplified),
        evaluations: outcome.evaluations,
        stopped_early: outcome.stopped_early,
        recovery: spec.map(|s| check_recovery(&outcome.best, &s, outcome.best_reward)),
        log_path,
    })
}

/// Runs `trials` independent searches with seeds `seed, seed+1, …`, each on
/// its own sample of the benchmark. Writes `out/bench.csv` when set.
pub fn cmd_bench(cfg: &RunConfig) -> Result<RecoveryReport, CliError> {
    cfg.validate()?;
    let spec = require_benchmark(cfg)?;
    let base = cfg.seed();
    let trials: Result<Vec<TrialResult>, CliError> = (0..cfg.trials())
        .into_par_iter()
        .map(|trial| {
            let seed = base + trial;
            let start = Instant::now();
            let data = spec.generate(seed)?;
            let outcome = run_search(cfg, &data, spec.constants_allowed, seed, false)?;
            let check = check_recovery(&outcome.best, &spec, outcome.best_reward);
            Ok(TrialResult {
                trial,
                seed,
                recovered: check.recovered,
                symbolic: check.symbolic,
                numeric: check.numeric,
                fresh_nrmse: check.fresh_nrmse,
                evaluations: outcome.evaluations,
                wall_seconds: start.elapsed().as_secs_f64(),
                best_reward: outcome.best_reward,
                expression: outcome.best.to_infix(),
            })
        })
        .collect();
    let report = RecoveryReport { benchmark: spec.name.clone(), trials: trials? };
    if let Some(dir) = &cfg.out {
        report.write_csv(create_out_file(dir, "bench.csv")?)?;
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolicyKind {
    UcbExtreme,
    Ucb1,
    EpsGreedy,
}

impl std::str::FromStr for PolicyKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ucb-extreme" | "ucb_extreme" | "ucbextreme" => Ok(PolicyKind::UcbExtreme),
            "ucb1" => Ok(PolicyKind::Ucb1),
            "eps-greedy" | "eps_greedy" | "epsgreedy" => Ok(PolicyKind::EpsGreedy),
            other => Err(CliError::Config(format!("unknown policy '{other}'"))),
        }
    }
}

/// Bandit experiment settings. Defaults reproduce the four-arm study.
#[derive(Clone, Debug)]
pub struct BanditSimConfig {
    pub arms: Vec<ArmSpec>,
    pub policies: Vec<PolicyKind>,
    pub horizon: u64,
    pub repeats: u64,
    pub seed: u64,
    /// Shared by UCB-extreme (with `gamma`) and UCB1.
    pub c: f64,
    pub gamma: f64,
    pub epsilon: f64,
    /// Replaces the computed constant `C` of the regret bound.
    pub c_override: Option<f64>,
    pub checkpoints_per_decade: usize,
    pub out: Option<PathBuf>,
}

impl Default for BanditSimConfig {
    fn default() -> Self {
        Self {
            arms: reference_arms(),
            policies: vec![PolicyKind::UcbExtreme, PolicyKind::Ucb1, PolicyKind::EpsGreedy],
            horizon: 50_000,
            repeats: 400,
            seed: 0,
            c: reference_c(),
            gamma: REFERENCE_GAMMA,
            epsilon: 0.25,
            c_override: Some(10.0),
            checkpoints_per_decade: 20,
            out: None,
        }
    }
}

impl BanditSimConfig {
    pub fn policy_configs(&self) -> Vec<PolicyConfig> {
        self.policies
            .iter()
            .map(|p| match p {
                PolicyKind::UcbExtreme => PolicyConfig::UcbExtreme { c: self.c, gamma: self.gamma },
                PolicyKind::Ucb1 => PolicyConfig::Ucb1 { c: self.c },
                PolicyKind::EpsGreedy => PolicyConfig::EpsGreedy { epsilon: self.epsilon },
            })
            .collect()
    }

    pub fn bound_params(&self) -> BoundParams {
        BoundParams { c: self.c, gamma: self.gamma, c_override: self.c_override }
    }
}

/// Simulates the configured policies and writes the curves CSV to
/// `out/bandit.csv`, or to `sink` when no output directory is set.
pub fn cmd_bandit_sim<W: Write>(cfg: &BanditSimConfig, sink: W) -> Result<Vec<Curve>, CliError> {
    if cfg.policies.is_empty() {
        return Err(CliError::Config("at least one policy is required".into()));
    }
    let cps = log_checkpoints(cfg.horizon, cfg.checkpoints_per_decade);
    let curves = simulate(&cfg.arms, &cfg.policy_configs(), cfg.horizon, cfg.repeats, cfg.seed, &cps)?;
    match &cfg.out {
        Some(dir) => write_curves_csv(create_out_file(dir, "bandit.csv")?, &cfg.arms, &curves, cfg.bound_params())?,
        None => write_curves_csv(sink, &cfg.arms, &curves, cfg.bound_params())?,
    }
    Ok(curves)
}

/// Budget of the reward-distribution probe unless overridden.
pub const REWARD_DIST_BUDGET: u64 = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RewardSample {
    pub run: u64,
    pub source: Source,
    pub reward: f64,
}

#[derive(Clone, Debug)]
pub struct RewardDistribution {
    pub samples: Vec<RewardSample>,
    /// Likelihood fit of the tail parameter of rollout rewards.
    pub a_rollout: f64,
    /// Likelihood fit for mutation and crossover rewards, if any were scored.
    pub a_statejump: Option<f64>,
    /// KS fits over positive rewards as `(a, distance)`, for comparison.
    pub ks_rollout: Option<(f64, f64)>,
    pub ks_statejump: Option<(f64, f64)>,
}

impl RewardDistribution {
    pub fn rewards(&self, state_jump: bool) -> Vec<f64> {
        self.samples
            .iter()
            .filter(|s| (s.source != Source::Rollout) == state_jump)
            .map(|s| s.reward)
            .collect()
    }
}

/// Records every scored reward over `trials` runs with uniformly random node
/// selection (`ε = 1` unless overridden) and no early stop, then fits the
/// tail parameter per source. Writes `out/reward_samples.csv` when set.
pub fn cmd_reward_dist(cfg: &RunConfig) -> Result<RewardDistribution, CliError> {
    cfg.validate()?;
    let spec = require_benchmark(cfg)?;
    let probe = RunConfig {
        eps: Some(cfg.eps.unwrap_or(1.0)),
        budget: Some(cfg.budget.unwrap_or(REWARD_DIST_BUDGET)),
        ..cfg.clone()
    };
    let base = cfg.seed();
    let runs: Result<Vec<Vec<RewardSample>>, CliError> = (0..cfg.trials())
        .into_par_iter()
        .map(|run| {
            let seed = base + run;
            let data = spec.generate(seed)?;
            let mdp = probe.mdp_config(data.n_vars(), spec.constants_allowed);
            let search_cfg = mcts_sr::SearchConfig { seed, record_log: true, stop_on_exact: false, ..probe.search_config() };
            let outcome = search(&data, &mdp, &search_cfg)?;
            Ok(outcome
                .log
                .iter()
                .map(|r| RewardSample { run, source: r.source, reward: r.reward })
                .collect())
        })
        .collect();
    let samples: Vec<RewardSample> = runs?.into_iter().flatten().collect();
    let mut dist = RewardDistribution { samples, a_rollout: 0.0, a_statejump: None, ks_rollout: None, ks_statejump: None };
    let (rollout, jump) = (dist.rewards(false), dist.rewards(true));
    dist.a_rollout = fit_tail(&rollout)?;
    dist.a_statejump = fit_tail(&jump).ok();
    dist.ks_rollout = fit_tail_ks(&rollout).ok();
    dist.ks_statejump = fit_tail_ks(&jump).ok();
    if let Some(dir) = &cfg.out {
        let mut w = csv::Writer::from_writer(create_out_file(dir, "reward_samples.csv")?);
        for s in &dist.samples {
            w.serialize(s)?;
        }
        w.flush()?;
    }
    Ok(dist)
}
