use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mcts_sr_cli::{
    cmd_bandit_sim, cmd_bench, cmd_reward_dist, cmd_solve, BanditSimConfig, CliError, PolicyKind, RunConfig,
};

#[derive(Parser)]
#[command(name = "mcts-sr", version, about = "Symbolic regression by improved Monte Carlo tree search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one search and print the best expression.
    Solve(Shared),
    /// Measure the recovery rate of a benchmark over several trials.
    Bench(Shared),
    /// Simulate extreme-bandit policies and print gap/regret curves with their bounds.
    BanditSim(BanditArgs),
    /// Record reward samples by source and fit their tail parameter.
    RewardDist(Shared),
}

#[derive(Args, Clone, Default)]
struct Shared {
    /// Built-in benchmark name, e.g. Nguyen-5.
    #[arg(long)]
    benchmark: Option<String>,
    /// CSV file with a header; the last column is the target.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat JSON file with any of these settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    queue_size: Option<usize>,
    /// Base state-jump rate.
    #[arg(long)]
    gs: Option<f64>,
    /// Mutation share of state jumps.
    #[arg(long)]
    gm: Option<f64>,
    /// Random-exploration rate.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long)]
    max_constants: Option<usize>,
}

impl Shared {
    fn into_config(self) -> Result<RunConfig, CliError> {
        let base = match &self.config {
            Some(path) => RunConfig::from_json_file(path)?,
            None => RunConfig::default(),
        };
        Ok(base.overlay(RunConfig {
            benchmark: self.benchmark,
            data: self.data,
            budget: self.budget,
            trials: self.trials,
            seed: self.seed,
            out: self.out,
            c: self.c,
            gamma: self.gamma,
            queue_size: self.queue_size,
            gs: self.gs,
            gm: self.gm,
            eps: self.eps,
            max_depth: self.max_depth,
            max_constants: self.max_constants,
        }))
    }
}

#[derive(Args)]
struct BanditArgs {
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long)]
    repeats: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated subset of ucb-extreme, ucb1, eps-greedy.
    #[arg(long, value_delimiter = ',')]
    policies: Option<Vec<String>>,
    /// Exploration weight shared by UCB-extreme and UCB1.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    /// Constant used in the regret bound instead of the computed one.
    #[arg(long)]
    c_override: Option<f64>,
    /// Use the computed constant in the regret bound.
    #[arg(long, conflicts_with = "c_override")]
    computed_c: bool,
    /// Output directory; the CSV goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl BanditArgs {
    fn into_config(self) -> Result<BanditSimConfig, CliError> {
        let d = BanditSimConfig::default();
        let policies = match self.policies {
            Some(names) => names.iter().map(|s| s.parse()).collect::<Result<Vec<PolicyKind>, _>>()?,
            None => d.policies.clone(),
        };
        Ok(BanditSimConfig {
            policies,
            horizon: self.horizon.unwrap_or(d.horizon),
            repeats: self.repeats.unwrap_or(d.repeats),
            seed: self.seed.unwrap_or(d.seed),
            c: self.c.unwrap_or(d.c),
            gamma: self.gamma.unwrap_or(d.gamma),
            epsilon: self.eps.unwrap_or(d.epsilon),
            c_override: if self.computed_c { None } else { self.c_override.or(d.c_override) },
            out: self.out,
            ..d
        })
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(args) => {
            let r = cmd_solve(&args.into_config()?)?;
            println!("expression: {}", r.expression);
            println!("reward: {}", r.reward);
            println!("complexity: {}", r.complexity);
            println!("evaluations: {}", r.evaluations);
            if let Some(check) = r.recovery {
                println!(
                    "recovered: {} (symbolic: {}, numeric: {}, fresh nrmse: {:e})",
                    check.recovered, check.symbolic, check.numeric, check.fresh_nrmse
                );
            }
            if let Some(path) = r.log_path {
                println!("log: {}", path.display());
            }
        }
        Command::Bench(args) => {
            let report = cmd_bench(&args.into_config()?)?;
            for t in &report.trials {
                println!(
                    "trial {:>3} seed {:>3} recovered {:<5} reward {:.12} evals {:>8} {:>7.2}s  {}",
                    t.trial, t.seed, t.recovered, t.best_reward, t.evaluations, t.wall_seconds, t.expression
                );
            }
            match report.rate() {
                Some(rate) => println!(
                    "{}: recovered {}/{} (rate {rate:.3})",
                    report.benchmark,
                    report.recovered(),
                    report.trials.len()
                ),
                None => println!("{}: no trials, recovery rate undefined", report.benchmark),
            }
        }
        Command::BanditSim(args) => {
            let cfg = args.into_config()?;
            let stdout = std::io::stdout();
            let curves = cmd_bandit_sim(&cfg, stdout.lock())?;
            if cfg.out.is_some() {
                for c in &curves {
                    let last = c.t.len() - 1;
                    println!(
                        "{}: t={} G_hat={:.6} R_hat={:.6} (se {:.6})",
                        c.policy, c.t[last], c.g_hat[last], c.r_hat[last], c.r_se[last]
                    );
                }
            }
        }
        Command::RewardDist(args) => {
            let d = cmd_reward_dist(&args.into_config()?)?;
            println!("samples: {}", d.samples.len());
            println!("a_rollout: {:.1}", d.a_rollout);
            match d.a_statejump {
                Some(a) => println!("a_statejump: {a:.1}"),
                None => println!("a_statejump: no state-jump rewards"),
            }
            for (name, ks) in [("rollout", d.ks_rollout), ("statejump", d.ks_statejump)] {
                if let Some((a, dist)) = ks {
                    println!("ks fit {name} (positive rewards): a={a:.1} distance={dist:.3}");
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
