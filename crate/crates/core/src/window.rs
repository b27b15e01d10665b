//! Smooth cutoff profiles built from e^{−1/t}.

use serde::{Deserialize, Serialize};

use crate::Scalar;

fn e_inv(t: Scalar) -> Scalar {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// C^∞ step rising from 0 at t ≤ 0 to 1 at t ≥ 1.
pub fn smooth_step(t: Scalar) -> Scalar {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = e_inv(t);
        a / (a + e_inv(1.0 - t))
    }
}

/// Plateau bump: 0 outside (lo, hi), 1 on [lo_flat, hi_flat].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub lo: Scalar,
    pub lo_flat: Scalar,
    pub hi_flat: Scalar,
    pub hi: Scalar,
}

impl Bump {
    pub const fn new(lo: Scalar, lo_flat: Scalar, hi_flat: Scalar, hi: Scalar) -> Self {
        Self { lo, lo_flat, hi_flat, hi }
    }

    /// Symmetric plateau on [−inner, inner] with support (−outer, outer).
    pub const fn centered(inner: Scalar, outer: Scalar) -> Self {
        Self::new(-outer, -inner, inner, outer)
    }

    pub fn eval(&self, x: Scalar) -> Scalar {
        if x <= self.lo || x >= self.hi {
            0.0
        } else if x < self.lo_flat {
            smooth_step((x - self.lo) / (self.lo_flat - self.lo))
        } else if x <= self.hi_flat {
            1.0
        } else {
            smooth_step((self.hi - x) / (self.hi - self.hi_flat))
        }
    }

    pub fn support(&self) -> (Scalar, Scalar) {
        (self.lo, self.hi)
    }

    pub fn validate(&self) -> bool {
        self.lo < self.lo_flat && self.lo_flat <= self.hi_flat && self.hi_flat < self.hi
    }
}

/// Upward step: 0 below `lo`, 1 above `hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ramp {
    pub lo: Scalar,
    pub hi: Scalar,
}

impl Ramp {
    pub fn eval(&self, x: Scalar) -> Scalar {
        smooth_step((x - self.lo) / (self.hi - self.lo))
    }
}

/// Tangential-frequency window ψ₁: support (1/2, 2), plateau [3/4, 3/2].
pub const PSI1: Bump = Bump::new(0.5, 0.75, 1.5, 2.0);
/// Time-frequency window ψ₂ (and χ₀): support (1/2, 5/2), plateau [1, 2].
pub const PSI2: Bump = Bump::new(0.5, 1.0, 2.0, 2.5);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_and_support() {
        assert_eq!(PSI1.eval(1.0), 1.0);
        assert_eq!(PSI1.eval(0.5), 0.0);
        assert_eq!(PSI2.eval(2.5), 0.0);
        assert!(PSI2.eval(0.7) > 0.0 && PSI2.eval(0.7) < 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
    }
}
