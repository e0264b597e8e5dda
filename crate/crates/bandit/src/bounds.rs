//! Closed-form performance-gap and regret bounds for polynomial-like arms.

use statrs::function::gamma::ln_gamma;

use crate::arm::ArmSpec;
use crate::quad::integrate;
use crate::BanditError;

/// Relative slack when checking the hyperparameter condition, so that the
/// exact-equality configuration is not rejected by rounding.
pub const CONDITION_RTOL: f64 = 1e-9;

/// `E[max of n draws]` from the polynomial-like arm `(a, b)`:
/// `b·(1 − Γ(1/a+1)·Γ(n+1)/Γ(1/a+n+1))`.
pub fn expected_max_poly(a: f64, b: f64, n: u64) -> f64 {
    let nf = n as f64;
    if a == 1.0 {
        return b * nf / (nf + 1.0);
    }
    let inv = 1.0 / a;
    let ln_f = ln_gamma(inv + 1.0) + ln_gamma(nf + 1.0) - ln_gamma(inv + nf + 1.0);
    b * -ln_f.exp_m1()
}

/// Upper bound on the gap `b₁ − E[max]`: `b₁ / (T + 1/a₁)^{1/a₁}`.
pub fn bound_gap(a1: f64, b1: f64, t: f64) -> f64 {
    b1 / (t + 1.0 / a1).powf(1.0 / a1)
}

/// Lower bound on the gap for exponential-like arms: `min{a₁b₁/(e·ln(T+1)), Δ_min}`.
pub fn bound_gap_lower_exponential(a1: f64, b1: f64, delta_min: f64, t: f64) -> f64 {
    let first = a1 * b1 / (std::f64::consts::E * t.ln_1p());
    first.min(delta_min)
}

/// `2^{a₁}·c^{1/γ}`, the quantity the second condition constrains.
pub fn condition_lhs(a1: f64, c: f64, gamma: f64) -> f64 {
    2f64.powf(a1) * c.powf(1.0 / gamma)
}

/// Whether `1/γ ≥ a₁` and `2^{a₁}c^{1/γ} ≥ 2 + 1/a₁`, up to [`CONDITION_RTOL`].
pub fn condition_holds(a1: f64, c: f64, gamma: f64) -> bool {
    let ge = |lhs: f64, rhs: f64| lhs >= rhs * (1.0 - CONDITION_RTOL);
    c > 0.0 && gamma > 0.0 && ge(1.0 / gamma, a1) && ge(condition_lhs(a1, c, gamma), 2.0 + 1.0 / a1)
}

/// Index of the best arm (largest `b`, first on ties).
pub fn best_arm(arms: &[ArmSpec]) -> Option<usize> {
    arms.iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (k, arm)| match best {
            Some((_, b)) if b >= arm.b => best,
            _ => Some((k, arm.b)),
        })
        .map(|(k, _)| k)
}

/// `C = Σ_{k≠best} (2c/Δ_k)^{1/γ}`. Infinite when a suboptimal arm has no gap.
pub fn constant_c(arms: &[ArmSpec], c: f64, gamma: f64) -> f64 {
    let Some(best) = best_arm(arms) else { return 0.0 };
    let b1 = arms[best].b;
    arms.iter()
        .enumerate()
        .filter(|(k, _)| *k != best)
        .map(|(_, arm)| (2.0 * c / (b1 - arm.b)).powf(1.0 / gamma))
        .sum()
}

/// Regret bound
/// `K²b₁·(L−1)/(L−2)·(C ln T + 2K)/(T − C ln T − K)^{1+1/a₁}` with `L = 2^{a₁}c^{1/γ}`.
///
/// `a₁` and `b₁` come from the best arm. `c_override` replaces the computed `C`.
/// The bound is undefined unless `T > C ln T + K`; the exact-equality case
/// `L = 2` (only reachable when `a₁` is large) is reported as undefined too.
pub fn bound_regret(
    arms: &[ArmSpec],
    c: f64,
    gamma: f64,
    t: f64,
    c_override: Option<f64>,
) -> Result<f64, BanditError> {
    let best = best_arm(arms).ok_or(BanditError::NoArms)?;
    let (a1, b1) = (arms[best].a, arms[best].b);
    if !condition_holds(a1, c, gamma) {
        return Err(BanditError::ConditionViolated { a1, c, gamma });
    }
    let k = arms.len() as f64;
    let cc = c_override.unwrap_or_else(|| constant_c(arms, c, gamma));
    let slack = t - cc * t.ln() - k;
    let l = condition_lhs(a1, c, gamma);
    if !(slack > 0.0) || !cc.is_finite() || l <= 2.0 {
        return Err(BanditError::Undefined { t });
    }
    Ok(k * k * b1 * (l - 1.0) / (l - 2.0) * (cc * t.ln() + 2.0 * k) / slack.powf(1.0 + 1.0 / a1))
}

/// `ln p(x; a, b)` for the polynomial-like density `(a/b)(1 − x/b)^{a−1}`.
#[inline]
fn ln_density(x: f64, a: f64, b: f64) -> f64 {
    (a / b).ln() + (a - 1.0) * (-x / b).ln_1p()
}

/// `KL[P(·; a_k, b_k) ‖ P(·; a₁, b₁)]` by adaptive quadrature over `[0, b_k]`.
pub fn kl_poly(ak: f64, bk: f64, a1: f64, b1: f64) -> Result<f64, BanditError> {
    if bk > b1 {
        return Err(BanditError::InfiniteDivergence { bk, b1 });
    }
    if ak == a1 && bk == b1 {
        return Ok(0.0);
    }
    let integrand = |x: f64| {
        let lp = ln_density(x, ak, bk);
        let p = lp.exp();
        if p == 0.0 {
            0.0
        } else {
            p * (lp - ln_density(x, a1, b1))
        }
    };
    Ok(integrate(integrand, 0.0, bk, 1e-12).max(0.0))
}

/// Asymptotic lower bound on the pulls of a suboptimal arm: `ln T / KL`.
pub fn pull_lower_bound(arm: &ArmSpec, best: &ArmSpec, t: f64) -> Result<f64, BanditError> {
    let kl = kl_poly(arm.a, arm.b, best.a, best.b)?;
    Ok(t.ln() / kl)
}
