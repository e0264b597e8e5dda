//! Monte-Carlo estimation of the performance gap and extreme regret.
//!
//! Each repeat owns one sample stream per arm: the j-th pull of arm k reads
//! the j-th draw of stream k, for every policy and for the single-arm
//! reference runs. Differences between a policy and a reference are therefore
//! paired, which keeps their standard errors small.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arm::ArmSpec;
use crate::bounds::{best_arm, bound_gap, bound_regret};
use crate::policy::{select_eps_greedy, select_ucb1, select_ucb_extreme, PolicyConfig};
use crate::BanditError;

/// Stream id reserved for a policy's own randomness (tie-breaks, exploration).
const POLICY_STREAM: u64 = 0x8000;

/// Complete record of one bandit run.
#[derive(Clone, Debug)]
pub struct BanditRun {
    pub choices: Vec<usize>,
    pub rewards: Vec<f64>,
    pub running_max: Vec<f64>,
    pub pulls: Vec<u64>,
    pub arm_max: Vec<f64>,
}

/// Estimated curves for one policy at the recorded checkpoints.
#[derive(Clone, Debug, Serialize)]
pub struct Curve {
    pub policy: String,
    pub t: Vec<u64>,
    pub g_hat: Vec<f64>,
    pub g_se: Vec<f64>,
    pub r_hat: Vec<f64>,
    pub r_se: Vec<f64>,
}

fn arm_stream(seed: u64, repeat: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((repeat << 16) | stream);
    rng
}

struct Streams {
    rngs: Vec<ChaCha8Rng>,
}

impl Streams {
    fn new(seed: u64, repeat: u64, k: usize) -> Self {
        Self { rngs: (0..k as u64).map(|s| arm_stream(seed, repeat, s)).collect() }
    }

    #[inline]
    fn pull(&mut self, arms: &[ArmSpec], k: usize) -> f64 {
        arms[k].sample(&mut self.rngs[k])
    }
}

fn validate(arms: &[ArmSpec], horizon: u64) -> Result<(), BanditError> {
    if arms.is_empty() {
        return Err(BanditError::NoArms);
    }
    if horizon < arms.len() as u64 {
        return Err(BanditError::InvalidHorizon { horizon, arms: arms.len() });
    }
    Ok(())
}

/// Plays `policy` for `horizon` rounds, calling `observe(t, arm, reward, max)`
/// after round `t` (1-based).
fn play_with(
    arms: &[ArmSpec],
    policy: &PolicyConfig,
    horizon: u64,
    streams: &mut Streams,
    rng: &mut ChaCha8Rng,
    mut observe: impl FnMut(u64, usize, f64, f64),
) -> (Vec<u64>, Vec<f64>) {
    let k = arms.len();
    let mut pulls = vec![0u64; k];
    let mut maxes = vec![0.0f64; k];
    let mut sums = vec![0.0f64; k];
    let mut means = vec![0.0f64; k];
    let mut best = f64::NEG_INFINITY;
    for t in 1..=horizon {
        let total = t - 1;
        let arm = match *policy {
            PolicyConfig::UcbExtreme { c, gamma } => select_ucb_extreme(&maxes, &pulls, total, c, gamma, rng),
            PolicyConfig::Ucb1 { c } => select_ucb1(&means, &pulls, total, c, rng),
            PolicyConfig::EpsGreedy { epsilon } => match pulls.iter().position(|&n| n == 0) {
                Some(first) => first,
                None => select_eps_greedy(&maxes, epsilon, rng),
            },
        };
        let x = streams.pull(arms, arm);
        pulls[arm] += 1;
        sums[arm] += x;
        means[arm] = sums[arm] / pulls[arm] as f64;
        if pulls[arm] == 1 || x > maxes[arm] {
            maxes[arm] = x;
        }
        best = best.max(x);
        observe(t, arm, x, best);
    }
    (pulls, maxes)
}

/// One fully recorded run of `policy`.
pub fn play(arms: &[ArmSpec], policy: &PolicyConfig, horizon: u64, seed: u64) -> Result<BanditRun, BanditError> {
    validate(arms, horizon)?;
    policy.validate()?;
    let mut streams = Streams::new(seed, 0, arms.len());
    let mut rng = arm_stream(seed, 0, POLICY_STREAM);
    let n = horizon as usize;
    let (mut choices, mut rewards, mut running_max) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    let (pulls, arm_max) = play_with(arms, policy, horizon, &mut streams, &mut rng, |_, a, x, m| {
        choices.push(a);
        rewards.push(x);
        running_max.push(m);
    });
    Ok(BanditRun { choices, rewards, running_max, pulls, arm_max })
}

/// About `per_decade` logarithmically spaced rounds in `1..=horizon`,
/// always including `horizon`.
pub fn log_checkpoints(horizon: u64, per_decade: usize) -> Vec<u64> {
    if horizon == 0 {
        return Vec::new();
    }
    let decades = (horizon as f64).log10();
    let n = ((decades * per_decade as f64).ceil() as usize).max(1);
    let mut out: Vec<u64> = (0..=n)
        .map(|i| 10f64.powf(decades * i as f64 / n as f64).round() as u64)
        .map(|t| t.clamp(1, horizon))
        .collect();
    out.push(horizon);
    out.dedup();
    out
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Simulates every policy on the same per-repeat streams and estimates
/// `Ĝ(t) = b₁ − max_k Ê[max_{s≤t} X_{k,s}]` and
/// `R̂(t) = max_k Ê[max_{s≤t} X_{k,s}] − Ê[max_{s≤t} X_{I_s,s}]`
/// at `checkpoints`. Standard errors of `R̂` use paired per-repeat differences.
pub fn simulate(
    arms: &[ArmSpec],
    policies: &[PolicyConfig],
    horizon: u64,
    repeats: u64,
    seed: u64,
    checkpoints: &[u64],
) -> Result<Vec<Curve>, BanditError> {
    validate(arms, horizon)?;
    for p in policies {
        p.validate()?;
    }
    if repeats == 0 {
        return Err(BanditError::NoRepeats);
    }
    if checkpoints.is_empty() || checkpoints.iter().any(|&t| t == 0 || t > horizon) || !checkpoints.windows(2).all(|w| w[0] < w[1]) {
        return Err(BanditError::InvalidCheckpoints);
    }
    let b1 = arms[best_arm(arms).expect("arms checked non-empty")].b;
    let (k, nc, nr) = (arms.len(), checkpoints.len(), repeats as usize);
    // reference[arm][checkpoint][repeat] and policy_max[policy][checkpoint][repeat]
    let mut reference = vec![vec![vec![0.0; nr]; nc]; k];
    let mut policy_max = vec![vec![vec![0.0; nr]; nc]; policies.len()];

    for r in 0..nr {
        let mut streams = Streams::new(seed, r as u64, k);
        for (arm, table) in reference.iter_mut().enumerate() {
            let mut m = f64::NEG_INFINITY;
            let mut next = 0;
            for t in 1..=horizon {
                m = m.max(streams.pull(arms, arm));
                if checkpoints[next] == t {
                    table[next][r] = m;
                    next += 1;
                    if next == nc {
                        break;
                    }
                }
            }
        }
        for (p, policy) in policies.iter().enumerate() {
            let mut streams = Streams::new(seed, r as u64, k);
            let mut rng = arm_stream(seed, r as u64, POLICY_STREAM + 1 + p as u64);
            let table = &mut policy_max[p];
            let mut next = 0;
            play_with(arms, policy, horizon, &mut streams, &mut rng, |t, _, _, m| {
                if next < nc && checkpoints[next] == t {
                    table[next][r] = m;
                    next += 1;
                }
            });
        }
    }

    // Best reference arm per checkpoint, by estimated mean.
    let best_ref: Vec<usize> = (0..nc)
        .map(|c| {
            (0..k)
                .map(|a| (a, mean_se(&reference[a][c]).0))
                .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc })
                .0
        })
        .collect();
    let g: Vec<(f64, f64)> = (0..nc).map(|c| mean_se(&reference[best_ref[c]][c])).collect();

    Ok(policies
        .iter()
        .enumerate()
        .map(|(p, policy)| {
            let mut curve = Curve {
                policy: policy.name().to_string(),
                t: checkpoints.to_vec(),
                g_hat: Vec::with_capacity(nc),
                g_se: Vec::with_capacity(nc),
                r_hat: Vec::with_capacity(nc),
                r_se: Vec::with_capacity(nc),
            };
            for c in 0..nc {
                let diffs: Vec<f64> = reference[best_ref[c]][c]
                    .iter()
                    .zip(&policy_max[p][c])
                    .map(|(a, b)| a - b)
                    .collect();
                let (r_hat, r_se) = mean_se(&diffs);
                curve.g_hat.push(b1 - g[c].0);
                curve.g_se.push(g[c].1);
                curve.r_hat.push(r_hat);
                curve.r_se.push(r_se);
            }
            curve
        })
        .collect())
}

/// Single-policy convenience wrapper over [`simulate`] with log-spaced checkpoints.
pub fn run_bandit(
    arms: &[ArmSpec],
    policy: PolicyConfig,
    horizon: u64,
    repeats: u64,
    seed: u64,
) -> Result<Curve, BanditError> {
    validate(arms, horizon)?;
    let cps = log_checkpoints(horizon, 20);
    Ok(simulate(arms, &[policy], horizon, repeats, seed, &cps)?.remove(0))
}

/// Bound settings for the CSV bound columns.
#[derive(Clone, Copy, Debug)]
pub struct BoundParams {
    pub c: f64,
    pub gamma: f64,
    pub c_override: Option<f64>,
}

/// Writes `t,policy,G_hat,R_hat,G_bound,R_bound` rows. `R_bound` is left
/// empty where the regret bound is undefined.
pub fn write_curves_csv<W: Write>(
    out: W,
    arms: &[ArmSpec],
    curves: &[Curve],
    bounds: BoundParams,
) -> Result<(), BanditError> {
    let best = best_arm(arms).ok_or(BanditError::NoArms)?;
    let (a1, b1) = (arms[best].a, arms[best].b);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "policy", "G_hat", "R_hat", "G_bound", "R_bound"])?;
    for curve in curves {
        for (i, &t) in curve.t.iter().enumerate() {
            let tf = t as f64;
            let r_bound = match bound_regret(arms, bounds.c, bounds.gamma, tf, bounds.c_override) {
                Ok(v) => v.to_string(),
                Err(BanditError::Undefined { .. }) => String::new(),
                Err(e) => return Err(e),
            };
            w.write_record([
                t.to_string(),
                curve.policy.clone(),
                curve.g_hat[i].to_string(),
                curve.r_hat[i].to_string(),
                bound_gap(a1, b1, tf).to_string(),
                r_bound,
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
