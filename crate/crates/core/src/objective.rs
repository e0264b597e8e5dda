//! Loss, reward and constant fitting.
//!
//! The loss is the normalized root mean square error
//! `sqrt(Σ(f(xᵢ) − yᵢ)² / Σ(yᵢ − ȳ)²)` and the reward `1 / (1 + loss)`.
//! Expressions that evaluate to NaN or ±∞ anywhere get reward 0.
//!
//! Constants are fitted by BFGS on the sum of squared residuals with central
//! finite-difference gradients, starting from all ones.

use crate::benchdata::Dataset;
use crate::expr::{Evaluator, ExprError, ExprTree, Token};

/// Default iteration cap of the constant optimizer.
pub const DEFAULT_FIT_ITERATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ObjectiveError {
    #[error("targets have zero variance")]
    ZeroVariance,
    #[error("need at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("predictions ({predictions}) and targets ({targets}) differ in length")]
    LengthMismatch { predictions: usize, targets: usize },
}

fn residual_parts(predictions: &[f64], targets: &[f64]) -> Result<(f64, f64), ObjectiveError> {
    if predictions.len() != targets.len() {
        return Err(ObjectiveError::LengthMismatch {
            predictions: predictions.len(),
            targets: targets.len(),
        });
    }
    let n = targets.len();
    if n < 2 {
        return Err(ObjectiveError::TooFewPoints(n));
    }
    let mean = targets.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = targets.iter().map(|y| (y - mean).powi(2)).sum();
    if !(ss_tot > 0.0) {
        return Err(ObjectiveError::ZeroVariance);
    }
    let sse: f64 = predictions.iter().zip(targets).map(|(f, y)| (f - y).powi(2)).sum();
    Ok((sse, ss_tot))
}

pub fn nrmse(predictions: &[f64], targets: &[f64]) -> Result<f64, ObjectiveError> {
    let (sse, ss_tot) = residual_parts(predictions, targets)?;
    Ok((sse / ss_tot).sqrt())
}

/// Coefficient of determination, `1 − nrmse²`.
pub fn r_squared(predictions: &[f64], targets: &[f64]) -> Result<f64, ObjectiveError> {
    let (sse, ss_tot) = residual_parts(predictions, targets)?;
    Ok(1.0 - sse / ss_tot)
}

/// `1 / (1 + loss)`; a non-finite or negative loss maps to 0.
#[inline]
pub fn reward(loss: f64) -> f64 {
    if loss.is_finite() && loss >= 0.0 {
        1.0 / (1.0 + loss)
    } else {
        0.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub constants: Vec<f64>,
    /// NRMSE at the returned constants, `f64::INFINITY` if evaluation failed.
    pub loss: f64,
    pub reward: f64,
    /// Number of full passes of the expression over the dataset.
    pub evaluations_consumed: usize,
}

impl FitResult {
    fn invalid(constants: Vec<f64>, evaluations_consumed: usize) -> Self {
        Self {
            constants,
            loss: f64::INFINITY,
            reward: 0.0,
            evaluations_consumed,
        }
    }
}

/// Fits the constants of `tree` (ignoring any bound values) and scores it.
pub fn fit_constants(tree: &ExprTree, data: &Dataset, max_iter: usize) -> FitResult {
    Scorer::new(max_iter).score(&tree.token_vec(), data)
}

/// Reusable scoring context: owns the evaluation buffers.
pub struct Scorer {
    eval: Evaluator,
    out: Vec<f64>,
    max_iter: usize,
    evaluations: usize,
}

impl Default for Scorer {
    fn default() -> Self {
        Self::new(DEFAULT_FIT_ITERATIONS)
    }
}

impl Scorer {
    pub fn new(max_iter: usize) -> Self {
        Self {
            eval: Evaluator::new(),
            out: Vec::new(),
            max_iter,
            evaluations: 0,
        }
    }

    /// Sum of squared residuals at `constants`, `+∞` when any prediction is
    /// non-finite.
    pub fn sse(&mut self, tokens: &[Token], constants: &[f64], data: &Dataset) -> Result<f64, ExprError> {
        self.evaluations += 1;
        if !self.eval.eval_into(tokens, constants, data.columns(), &mut self.out)? {
            return Ok(f64::INFINITY);
        }
        let sse: f64 = self.out.iter().zip(data.targets()).map(|(f, y)| (f - y).powi(2)).sum();
        Ok(if sse.is_finite() { sse } else { f64::INFINITY })
    }

    /// Central-difference gradient of the SSE with step `1e-6·max(1, |cᵢ|)`.
    /// Falls back to a one-sided difference where one side is non-finite and
    /// to 0 where both are.
    pub fn sse_gradient(
        &mut self,
        tokens: &[Token],
        constants: &[f64],
        data: &Dataset,
        at_value: f64,
    ) -> Result<Vec<f64>, ExprError> {
        let mut probe = constants.to_vec();
        let mut grad = Vec::with_capacity(constants.len());
        for i in 0..constants.len() {
            let h = 1e-6 * constants[i].abs().max(1.0);
            probe[i] = constants[i] + h;
            let up = self.sse(tokens, &probe, data)?;
            probe[i] = constants[i] - h;
            let down = self.sse(tokens, &probe, data)?;
            probe[i] = constants[i];
            grad.push(match (up.is_finite(), down.is_finite()) {
                (true, true) => (up - down) / (2.0 * h),
                (true, false) => (up - at_value) / h,
                (false, true) => (at_value - down) / h,
                (false, false) => 0.0,
            });
        }
        Ok(grad)
    }

    /// Scores a complete token sequence. Constant placeholders are fitted;
    /// a constant-free expression is evaluated once.
    pub fn score(&mut self, tokens: &[Token], data: &Dataset) -> FitResult {
        self.evaluations = 0;
        let k = tokens.iter().filter(|t| **t == Token::Const).count();
        let (constants, sse) = match self.minimize(tokens, k, data) {
            Ok(Some(best)) => best,
            Ok(None) | Err(_) => {
                return FitResult::invalid(vec![1.0; k], self.evaluations);
            }
        };
        let loss = (sse / data.ss_tot()).sqrt();
        FitResult {
            constants,
            loss,
            reward: reward(loss),
            evaluations_consumed: self.evaluations,
        }
    }

    fn minimize(&mut self, tokens: &[Token], k: usize, data: &Dataset) -> Result<Option<(Vec<f64>, f64)>, ExprError> {
        let mut x = vec![1.0; k];
        let mut fx = self.sse(tokens, &x, data)?;
        if !fx.is_finite() {
            return Ok(None);
        }
        if k == 0 {
            return Ok(Some((x, fx)));
        }
        let mut g = self.sse_gradient(tokens, &x, data, fx)?;
        let mut h = identity(k);
        for _ in 0..self.max_iter {
            if fx == 0.0 || g.iter().all(|v| *v == 0.0) {
                break;
            }
            let mut p: Vec<f64> = mat_vec(&h, &g).into_iter().map(|v| -v).collect();
            let mut slope = dot(&p, &g);
            if !(slope < 0.0) {
                h = identity(k);
                p = g.iter().map(|v| -v).collect();
                slope = dot(&p, &g);
            }
            // Armijo backtracking
            let mut alpha = 1.0;
            let mut accepted = None;
            for _ in 0..60 {
                let trial: Vec<f64> = x.iter().zip(&p).map(|(xi, pi)| xi + alpha * pi).collect();
                let ft = self.sse(tokens, &trial, data)?;
                if ft.is_finite() && ft <= fx + 1e-4 * alpha * slope {
                    accepted = Some((trial, ft));
                    break;
                }
                alpha *= 0.5;
            }
            let Some((x_new, f_new)) = accepted else { break };
            if !(f_new < fx) {
                break;
            }
            let g_new = self.sse_gradient(tokens, &x_new, data, f_new)?;
            let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &y);
            if sy > 1e-300 {
                bfgs_update(&mut h, &s, &y, sy);
            }
            let step = s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let scale = x_new.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            x = x_new;
            let improvement = fx - f_new;
            fx = f_new;
            g = g_new;
            if step <= 1e-15 * scale || improvement <= 1e-16 * fx {
                break;
            }
        }
        Ok(Some((x, fx)))
    }
}

fn identity(k: usize) -> Vec<f64> {
    let mut m = vec![0.0; k * k];
    for i in 0..k {
        m[i * k + i] = 1.0;
    }
    m
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn mat_vec(m: &[f64], v: &[f64]) -> Vec<f64> {
    let k = v.len();
    (0..k).map(|i| dot(&m[i * k..(i + 1) * k], v)).collect()
}

/// Inverse-Hessian update `H ← (I − ρsyᵀ)H(I − ρysᵀ) + ρssᵀ`.
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64) {
    let k = s.len();
    let rho = 1.0 / sy;
    let hy = mat_vec(h, y);
    let yhy = dot(y, &hy);
    for i in 0..k {
        for j in 0..k {
            h[i * k + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}
