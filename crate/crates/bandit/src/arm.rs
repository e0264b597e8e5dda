use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::BanditError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArmFamily {
    /// CDF `1 − (1 − x/b)^a` on `[0, b]`, `a ≥ 1`.
    PolynomialLike,
    /// CDF `1 − exp(−a·x/(b − x))` on `[0, b)`, `a > 0`.
    ExponentialLike,
}

/// A reward distribution on `[0, b]` with tail parameter `a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmSpec {
    pub family: ArmFamily,
    pub a: f64,
    pub b: f64,
}

impl ArmSpec {
    pub fn new(family: ArmFamily, a: f64, b: f64) -> Result<Self, BanditError> {
        let a_ok = match family {
            ArmFamily::PolynomialLike => a >= 1.0,
            ArmFamily::ExponentialLike => a > 0.0,
        };
        if !a_ok || !a.is_finite() || !(b > 0.0 && b <= 1.0) {
            return Err(BanditError::InvalidArm { a, b });
        }
        Ok(Self { family, a, b })
    }

    pub fn poly(a: f64, b: f64) -> Result<Self, BanditError> {
        Self::new(ArmFamily::PolynomialLike, a, b)
    }

    pub fn exponential(a: f64, b: f64) -> Result<Self, BanditError> {
        Self::new(ArmFamily::ExponentialLike, a, b)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= self.b {
            return 1.0;
        }
        match self.family {
            ArmFamily::PolynomialLike => 1.0 - (1.0 - x / self.b).powf(self.a),
            ArmFamily::ExponentialLike => 1.0 - (-self.a * x / (self.b - x)).exp(),
        }
    }

    /// Inverse CDF at `u ∈ [0, 1)`.
    #[inline]
    pub fn quantile(&self, u: f64) -> f64 {
        match self.family {
            ArmFamily::PolynomialLike => self.b * (1.0 - (1.0 - u).powf(1.0 / self.a)),
            ArmFamily::ExponentialLike => {
                let l = -(-u).ln_1p();
                self.b * l / (self.a + l)
            }
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }
}

/// Draws one reward from `spec`.
pub fn sample_arm<R: Rng + ?Sized>(spec: &ArmSpec, rng: &mut R) -> f64 {
    spec.sample(rng)
}
