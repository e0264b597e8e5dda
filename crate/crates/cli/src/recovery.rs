//! Ground-truth recovery certificate.

use mcts_sr::expr::{evaluate, folds_to_zero, Evaluated, Token};
use mcts_sr::objective::nrmse;
use mcts_sr::{BenchmarkSpec, ExprTree};
use serde::Serialize;

/// Points in the held-out sample used by the numeric check.
pub const FRESH_SAMPLES: usize = 256;
/// Seed of the held-out sample. Training data use per-trial seeds from 0.
pub const FRESH_SEED: u64 = 0x9e37_79b9_7f4a_7c15;
pub const NRMSE_THRESHOLD: f64 = 1e-10;
pub const REWARD_TOLERANCE: f64 = 1e-12;

/// Both prongs of the certificate and the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RecoveryCheck {
    /// `candidate − target` simplifies to zero.
    pub symbolic: bool,
    /// Fresh-sample NRMSE within threshold and an exact training fit.
    pub numeric: bool,
    /// NRMSE on the held-out sample (`inf` if the candidate is non-finite there).
    pub fresh_nrmse: f64,
    pub recovered: bool,
}

/// `candidate` must carry its fitted constants. Either prong certifies
/// recovery, but never when the held-out NRMSE exceeds the threshold, so a
/// simplifier slip cannot produce a false positive.
pub fn check_recovery(candidate: &ExprTree, spec: &BenchmarkSpec, training_reward: f64) -> RecoveryCheck {
    let fresh_nrmse = fresh_nrmse(candidate, spec);
    let fresh_ok = fresh_nrmse <= NRMSE_THRESHOLD;
    let symbolic = symbolic_match(candidate, spec);
    let numeric = fresh_ok && training_reward >= 1.0 - REWARD_TOLERANCE;
    RecoveryCheck {
        symbolic,
        numeric,
        fresh_nrmse,
        recovered: fresh_ok && (symbolic || numeric),
    }
}

fn fresh_nrmse(candidate: &ExprTree, spec: &BenchmarkSpec) -> f64 {
    let Ok(data) = spec.generate_n(FRESH_SEED, FRESH_SAMPLES) else {
        return f64::INFINITY;
    };
    match evaluate(candidate, data.columns()) {
        Ok(Evaluated::Finite(pred)) => nrmse(&pred, data.targets()).unwrap_or(f64::INFINITY),
        _ => f64::INFINITY,
    }
}

fn symbolic_match(candidate: &ExprTree, spec: &BenchmarkSpec) -> bool {
    let Ok(target) = spec.target.to_tree() else { return false };
    if !candidate.is_bound() {
        return false;
    }
    let tokens: Vec<Token> = std::iter::once(Token::Sub).chain(candidate.tokens()).chain(target.tokens()).collect();
    let constants = candidate.constants().iter().chain(target.constants()).copied().collect();
    ExprTree::from_tokens(&tokens, constants).is_ok_and(|diff| folds_to_zero(&diff))
}
