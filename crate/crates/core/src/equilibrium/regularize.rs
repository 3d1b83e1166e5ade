use std::f64::consts::{FRAC_1_PI, PI};

use crate::error::{Error, Result};

/// `y (1 - g(y)) -> K_PLUS` as `y -> +inf`.
pub const K_PLUS: f64 = FRAC_1_PI;
/// `-y g(y) -> K_MINUS` as `y -> -inf`.
pub const K_MINUS: f64 = FRAC_1_PI;

/// `g(y) = 1/2 + atan(y)/pi`.
#[inline]
pub fn g_eval(y: f64) -> f64 {
    0.5 + y.atan() * FRAC_1_PI
}

#[inline]
pub fn g_prime(y: f64) -> f64 {
    FRAC_1_PI / (1.0 + y * y)
}

pub fn g_inverse(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("g^-1 needs p in (0, 1), got {p}")));
    }
    Ok((PI * (p - 0.5)).tan())
}

/// Smoothing of the complementarity conditions at scale `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regularization {
    epsilon: f64,
}

impl Regularization {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(Regularization { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `g(f / eps)`.
    #[inline]
    pub fn apply(&self, f: f64) -> f64 {
        g_eval(f / self.epsilon)
    }

    /// `d/df g(f / eps)`.
    #[inline]
    pub fn derivative(&self, f: f64) -> f64 {
        g_prime(f / self.epsilon) / self.epsilon
    }
}
