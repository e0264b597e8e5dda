//! Command-line front end: configuration, benchmark recovery harness,
//! bandit experiment driver and reward-distribution probe.

pub mod commands;
pub mod config;
pub mod recovery;
pub mod report;
pub mod tail;

pub use commands::{
    cmd_bandit_sim, cmd_bench, cmd_reward_dist, cmd_solve, BanditSimConfig, PolicyKind, RewardDistribution,
    SolveResult,
};
pub use config::RunConfig;
pub use recovery::{check_recovery, RecoveryCheck};
pub use report::{RecoveryReport, TrialResult};
pub use tail::{fit_tail, fit_tail_ks};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("no rewards to fit")]
    NoRewards,
    #[error(transparent)]
    Data(#[from] mcts_sr::benchdata::DataError),
    #[error(transparent)]
    Search(#[from] mcts_sr::search::SearchError),
    #[error(transparent)]
    Bandit(#[from] extreme_bandit::BanditError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
