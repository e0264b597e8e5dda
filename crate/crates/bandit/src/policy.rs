use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::BanditError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PolicyConfig {
    /// Highest observed reward plus `2c·(ln T / T_k)^γ`.
    UcbExtreme { c: f64, gamma: f64 },
    /// Sample mean plus `c·sqrt(2 ln T / T_k)`.
    Ucb1 { c: f64 },
    /// Uniform arm with probability `ε`, otherwise the highest observed reward.
    EpsGreedy { epsilon: f64 },
}

impl PolicyConfig {
    pub fn name(&self) -> &'static str {
        match self {
            PolicyConfig::UcbExtreme { .. } => "ucb-extreme",
            PolicyConfig::Ucb1 { .. } => "ucb1",
            PolicyConfig::EpsGreedy { .. } => "eps-greedy",
        }
    }

    pub fn validate(&self) -> Result<(), BanditError> {
        let ok = match *self {
            PolicyConfig::UcbExtreme { c, gamma } => c > 0.0 && gamma > 0.0,
            PolicyConfig::Ucb1 { c } => c >= 0.0,
            PolicyConfig::EpsGreedy { epsilon } => (0.0..=1.0).contains(&epsilon),
        };
        if ok {
            Ok(())
        } else {
            Err(BanditError::InvalidPolicy(*self))
        }
    }
}

/// Index of the first unpulled arm, if any.
#[inline]
fn unpulled(pulls: &[u64]) -> Option<usize> {
    pulls.iter().position(|&n| n == 0)
}

/// Argmax with uniform tie-breaking.
fn argmax_random<R: Rng + ?Sized>(scores: impl Iterator<Item = f64> + Clone, rng: &mut R) -> usize {
    let best = scores.clone().fold(f64::NEG_INFINITY, f64::max);
    let ties = scores.clone().filter(|s| *s == best).count();
    let pick = if ties > 1 { rng.random_range(0..ties) } else { 0 };
    scores
        .enumerate()
        .filter(|(_, s)| *s == best)
        .nth(pick)
        .map(|(k, _)| k)
        .expect("non-empty arm set")
}

/// UCB-extreme choice. Unpulled arms go first, in index order.
pub fn select_ucb_extreme<R: Rng + ?Sized>(
    maxes: &[f64],
    pulls: &[u64],
    total: u64,
    c: f64,
    gamma: f64,
    rng: &mut R,
) -> usize {
    if let Some(k) = unpulled(pulls) {
        return k;
    }
    let ln_t = (total.max(1) as f64).ln();
    let scores = maxes
        .iter()
        .zip(pulls)
        .map(move |(&q, &n)| q + 2.0 * c * (ln_t / n as f64).powf(gamma));
    argmax_random(scores, rng)
}

/// UCB1 choice. Unpulled arms go first, in index order.
pub fn select_ucb1<R: Rng + ?Sized>(means: &[f64], pulls: &[u64], total: u64, c: f64, rng: &mut R) -> usize {
    if let Some(k) = unpulled(pulls) {
        return k;
    }
    let ln_t = (total.max(1) as f64).ln();
    let scores = means
        .iter()
        .zip(pulls)
        .map(move |(&m, &n)| m + c * (2.0 * ln_t / n as f64).sqrt());
    argmax_random(scores, rng)
}

/// ε-greedy over per-arm values (the per-arm maximum in the extreme setting).
pub fn select_eps_greedy<R: Rng + ?Sized>(values: &[f64], epsilon: f64, rng: &mut R) -> usize {
    if rng.random::<f64>() < epsilon {
        return rng.random_range(0..values.len());
    }
    argmax_random(values.iter().copied(), rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ucb_extreme_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(select_ucb_extreme(&[0.9, 0.5], &[5, 5], 10, 1.0, 0.5, &mut rng), 0);
        assert_eq!(select_ucb_extreme(&[0.5, 0.5], &[100, 1], 101, 1.0, 0.5, &mut rng), 1);
        assert_eq!(select_ucb_extreme(&[0.5, 0.0, 0.0], &[3, 0, 0], 3, 1.0, 0.5, &mut rng), 1);
    }

    #[test]
    fn ucb1_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(select_ucb1(&[0.5, 0.5], &[10, 3], 13, 1.0, &mut rng), 1);
        assert_eq!(select_ucb1(&[1.0, 0.0], &[5, 0], 5, 1.0, &mut rng), 1);
        assert_eq!(select_ucb1(&[1.0, 0.0], &[5000, 5000], 10_000, 1.0, &mut rng), 0);
    }

    #[test]
    fn eps_greedy_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(select_eps_greedy(&[0.3, 0.9], 0.0, &mut rng), 1);
        let mut seen = [0usize; 4];
        for _ in 0..4000 {
            seen[select_eps_greedy(&[0.0, 1.0, 0.0, 0.0], 1.0, &mut rng)] += 1;
        }
        assert!(seen.iter().all(|&n| n > 800));
    }

    #[test]
    fn ties_are_shared() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut seen = [0usize; 2];
        for _ in 0..1000 {
            seen[select_ucb_extreme(&[0.5, 0.5], &[4, 4], 8, 1.0, 0.5, &mut rng)] += 1;
        }
        assert!(seen[0] > 400 && seen[1] > 400);
    }
}
