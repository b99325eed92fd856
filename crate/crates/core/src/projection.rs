//! Scalar projection operator and the partition of the parameter axis into
//! the regions used by the phase analysis.
//!
//! With `θ'_max < θ_max = θ'_max + ε₀`, the axis splits into
//!
//! ```text
//!  -θ_max   -θ_max+ξ₀        -θ'_max            θ'_max        θ_max
//!    |--B_L--|------B_U--------|--------A---------|----B_UPPER---|
//! ```
//!
//! `B_L` is closed at both ends, `B_U` is half-open on the right.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{MracError, Result};

/// Slack on `|θ| ≤ θ_max` before [`proj`] reports an invariant violation.
pub const THETA_BOUND_SLACK: f64 = 1e-9;

/// Projection bounds and adaptation gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionConfig {
    pub theta_max_prime: f64,
    pub theta_max: f64,
    pub epsilon0: f64,
    /// `ξ₀ / ε₀`.
    pub c: f64,
    /// Thickness of the `B_L` strip.
    pub xi0: f64,
    pub gamma: f64,
}

impl ProjectionConfig {
    /// Builds the configuration from `θ_max`, `ε₀`, the `B_L` thickness `ξ₀`
    /// and `γ`; `θ'_max = θ_max − ε₀` and `c = ξ₀/ε₀` follow.
    ///
    /// `ξ₀ ≥ ε₀` is accepted here so that it can be reported as a failed
    /// membership condition rather than a load error.
    pub fn new(theta_max: f64, epsilon0: f64, xi0: f64, gamma: f64) -> Result<Self> {
        let cfg = ProjectionConfig {
            theta_max_prime: theta_max - epsilon0,
            theta_max,
            epsilon0,
            c: xi0 / epsilon0,
            xi0,
            gamma,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Same as [`ProjectionConfig::new`] with `ξ₀ = c·ε₀`.
    pub fn with_ratio(theta_max: f64, epsilon0: f64, c: f64, gamma: f64) -> Result<Self> {
        ProjectionConfig::new(theta_max, epsilon0, c * epsilon0, gamma)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.theta_max_prime, self.theta_max, self.epsilon0, self.c, self.xi0, self.gamma];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(MracError::InvalidConfig("non-finite projection parameter".into()));
        }
        if self.epsilon0 <= 0.0 {
            return Err(MracError::InvalidConfig(format!("epsilon0 must be positive, got {}", self.epsilon0)));
        }
        if self.theta_max_prime <= 0.0 {
            return Err(MracError::InvalidConfig(format!(
                "theta_max' = theta_max - epsilon0 must be positive, got {}",
                self.theta_max_prime
            )));
        }
        if self.xi0 <= 0.0 || self.c <= 0.0 {
            return Err(MracError::InvalidConfig(format!("xi0 must be positive, got {}", self.xi0)));
        }
        if self.gamma <= 0.0 {
            return Err(MracError::InvalidConfig(format!("gamma must be positive, got {}", self.gamma)));
        }
        if ((self.theta_max - self.theta_max_prime - self.epsilon0) / self.theta_max).abs() > 1e-12 {
            return Err(MracError::InvalidConfig("theta_max must equal theta_max' + epsilon0".into()));
        }
        Ok(())
    }

    /// Upper edge of the `B_L` strip, `−θ_max + ξ₀`.
    pub fn lower_strip_edge(&self) -> f64 {
        -self.theta_max + self.xi0
    }

    fn scale_denominator(&self) -> f64 {
        self.theta_max * self.theta_max - self.theta_max_prime * self.theta_max_prime
    }
}

/// Region of the parameter axis occupied by `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ThetaRegion {
    #[serde(rename = "A")]
    A,
    #[serde(rename = "B_UPPER")]
    BUpper,
    #[serde(rename = "B_U")]
    BU,
    #[serde(rename = "B_L")]
    BL,
    #[serde(rename = "OUTSIDE")]
    Outside,
}

impl ThetaRegion {
    pub fn label(self) -> &'static str {
        match self {
            ThetaRegion::A => "A",
            ThetaRegion::BUpper => "B_UPPER",
            ThetaRegion::BU => "B_U",
            ThetaRegion::BL => "B_L",
            ThetaRegion::Outside => "OUTSIDE",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        [ThetaRegion::A, ThetaRegion::BUpper, ThetaRegion::BU, ThetaRegion::BL, ThetaRegion::Outside]
            .into_iter()
            .find(|r| r.label() == label)
    }

    /// Small integer code for plotting.
    pub fn code(self) -> i32 {
        match self {
            ThetaRegion::A => 0,
            ThetaRegion::BUpper => 1,
            ThetaRegion::BU => 2,
            ThetaRegion::BL => 3,
            ThetaRegion::Outside => 4,
        }
    }

    /// Member of the lower boundary region `B_U ∪ B_L`.
    pub fn is_lower_boundary(self) -> bool {
        matches!(self, ThetaRegion::BU | ThetaRegion::BL)
    }
}

impl fmt::Display for ThetaRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub fn region_of(theta: f64, cfg: &ProjectionConfig) -> ThetaRegion {
    if theta.abs() > cfg.theta_max || theta.is_nan() {
        ThetaRegion::Outside
    } else if theta.abs() <= cfg.theta_max_prime {
        ThetaRegion::A
    } else if theta > 0.0 {
        ThetaRegion::BUpper
    } else if theta <= cfg.lower_strip_edge() {
        ThetaRegion::BL
    } else {
        ThetaRegion::BU
    }
}

/// Projection operator: scales `y` by `(θ_max² − θ²)/(θ_max² − θ'_max²)`
/// when `θ` is outside `[−θ'_max, θ'_max]` and `y` pushes it outward.
pub fn proj(theta: f64, y: f64, cfg: &ProjectionConfig) -> Result<f64> {
    if theta.abs() > cfg.theta_max + THETA_BOUND_SLACK || theta.is_nan() {
        return Err(MracError::ProjectionViolation { theta, theta_max: cfg.theta_max });
    }
    Ok(proj_unchecked(theta, y, cfg))
}

/// [`proj`] without the bound check; the scale factor is floored at zero so
/// that an iterate marginally past `±θ_max` cannot be pushed further out.
#[inline]
pub fn proj_unchecked(theta: f64, y: f64, cfg: &ProjectionConfig) -> f64 {
    if theta.abs() > cfg.theta_max_prime && y * theta > 0.0 {
        let scale = (cfg.theta_max * cfg.theta_max - theta * theta) / cfg.scale_denominator();
        scale.max(0.0) * y
    } else {
        y
    }
}

/// Adaptive law `θ̇ = γ·Proj(θ, −x_p·e)`.
pub fn theta_dot(theta: f64, e: f64, x_p: f64, cfg: &ProjectionConfig) -> Result<f64> {
    Ok(cfg.gamma * proj(theta, -x_p * e, cfg)?)
}
