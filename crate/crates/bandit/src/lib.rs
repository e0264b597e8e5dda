//! Extreme multi-armed bandits: arm distributions, selection policies,
//! Monte-Carlo gap and regret estimates, and their closed-form bounds.

pub mod arm;
pub mod bounds;
pub mod policy;
mod quad;
pub mod sim;

pub use arm::{sample_arm, ArmFamily, ArmSpec};
pub use bounds::{
    best_arm, bound_gap, bound_gap_lower_exponential, bound_regret, condition_holds, constant_c,
    expected_max_poly, kl_poly, pull_lower_bound,
};
pub use policy::{select_eps_greedy, select_ucb1, select_ucb_extreme, PolicyConfig};
pub use quad::integrate;
pub use sim::{log_checkpoints, play, run_bandit, simulate, write_curves_csv, BanditRun, BoundParams, Curve};

#[derive(Debug, thiserror::Error)]
pub enum BanditError {
    #[error("invalid arm parameters a={a}, b={b}")]
    InvalidArm { a: f64, b: f64 },
    #[error("invalid policy parameters {0:?}")]
    InvalidPolicy(PolicyConfig),
    #[error("no arms given")]
    NoArms,
    #[error("at least one repeat is required")]
    NoRepeats,
    #[error("horizon {horizon} is shorter than the {arms} arms")]
    InvalidHorizon { horizon: u64, arms: usize },
    #[error("checkpoints must be strictly increasing within 1..=horizon")]
    InvalidCheckpoints,
    #[error("hyperparameter condition fails for a1={a1}, c={c}, gamma={gamma}")]
    ConditionViolated { a1: f64, c: f64, gamma: f64 },
    #[error("regret bound undefined at T={t}")]
    Undefined { t: f64 },
    #[error("divergence is infinite: b_k={bk} exceeds b_1={b1}")]
    InfiniteDivergence { bk: f64, b1: f64 },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The four-arm configuration used for the bound-verification experiment:
/// `(a, b) ∈ {(3, 1), (4, 0.9), (2, 0.85), (1, 0.9)}`.
pub fn reference_arms() -> Vec<ArmSpec> {
    [(3.0, 1.0), (4.0, 0.9), (2.0, 0.85), (1.0, 0.9)]
        .into_iter()
        .map(|(a, b)| ArmSpec::poly(a, b).expect("valid reference arm"))
        .collect()
}

/// `c` such that `2c = (7/3)^{1/3}`, paired with `γ = 1/3`.
pub fn reference_c() -> f64 {
    0.5 * (7.0f64 / 3.0).cbrt()
}

pub const REFERENCE_GAMMA: f64 = 1.0 / 3.0;
