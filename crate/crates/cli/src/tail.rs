//! Tail-parameter fits of reward samples against `P(x; a, 1) = 1 − (1 − x)^a`.

use crate::CliError;

pub const GRID_MIN: f64 = 1.0;
pub const GRID_MAX: f64 = 12.0;
pub const GRID_STEP: f64 = 0.1;

/// Rewards are clamped below 1 so that exact fits have finite likelihood.
const MAX_REWARD: f64 = 1.0 - 1e-12;

fn grid() -> impl Iterator<Item = f64> {
    let steps = ((GRID_MAX - GRID_MIN) / GRID_STEP).round() as usize;
    (0..=steps).map(|i| GRID_MIN + i as f64 * GRID_STEP)
}

fn argbest(scores: impl Iterator<Item = (f64, f64)>) -> f64 {
    scores.fold((GRID_MIN, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc }).0
}

/// Maximum-likelihood grid fit over every sample, zeros included
/// (a failed evaluation is a genuine reward of 0).
///
/// The log-likelihood is `n·ln a + (a − 1)·Σ ln(1 − x_i)`.
pub fn fit_tail(rewards: &[f64]) -> Result<f64, CliError> {
    if rewards.is_empty() {
        return Err(CliError::NoRewards);
    }
    let n = rewards.len() as f64;
    let s: f64 = rewards.iter().map(|&x| (-x.clamp(0.0, MAX_REWARD)).ln_1p()).sum();
    Ok(argbest(grid().map(|a| (a, -(n * a.ln() + (a - 1.0) * s)))))
}

/// Kolmogorov–Smirnov distance between sorted `xs` and `1 − (1 − x)^a`.
pub fn ks_distance(sorted: &[f64], a: f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = 1.0 - (1.0 - x.clamp(0.0, 1.0)).powf(a);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Grid value minimising the KS distance over the positive rewards, with
/// that distance. Reported alongside [`fit_tail`] as a goodness-of-fit check.
pub fn fit_tail_ks(rewards: &[f64]) -> Result<(f64, f64), CliError> {
    let mut xs: Vec<f64> = rewards.iter().copied().filter(|&r| r > 0.0 && r.is_finite()).collect();
    if xs.is_empty() {
        return Err(CliError::NoRewards);
    }
    xs.sort_by(f64::total_cmp);
    let a = argbest(grid().map(|a| (a, ks_distance(&xs, a))));
    Ok((a, ks_distance(&xs, a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn synthetic(a: f64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        (0..n).map(|_| 1.0 - (1.0 - rng.random::<f64>()).powf(1.0 / a)).collect()
    }

    #[test]
    fn likelihood_fit_recovers_synthetic_parameter() {
        let a = fit_tail(&synthetic(3.0, 20_000)).unwrap();
        assert!((2.5..=3.5).contains(&a), "{a}");
    }

    #[test]
    fn ks_fit_recovers_synthetic_parameter() {
        let (a, d) = fit_tail_ks(&synthetic(3.0, 20_000)).unwrap();
        assert!((2.5..=3.5).contains(&a), "{a}");
        assert!(d < 0.02);
    }

    #[test]
    fn likelihood_grid_matches_closed_form() {
        // Unconstrained maximiser is −n / Σ ln(1 − x).
        let xs = synthetic(5.0, 5000);
        let closed = -(xs.len() as f64) / xs.iter().map(|x| (-x).ln_1p()).sum::<f64>();
        assert!((fit_tail(&xs).unwrap() - closed).abs() <= 0.05 + 1e-9);
    }

    #[test]
    fn zeros_count_towards_a_steeper_tail() {
        let mut xs = synthetic(2.0, 4000);
        let base = fit_tail(&xs).unwrap();
        xs.extend(std::iter::repeat_n(0.0, 4000));
        assert!(fit_tail(&xs).unwrap() > base);
    }

    #[test]
    fn empty_samples_are_errors() {
        assert!(matches!(fit_tail(&[]), Err(CliError::NoRewards)));
        assert!(matches!(fit_tail_ks(&[0.0, 0.0]), Err(CliError::NoRewards)));
    }
}
