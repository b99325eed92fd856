use serde::{Deserialize, Serialize};

use crate::error::{MracError, Result};

/// First-order plant `ẋ_p = a_p x_p + k_p v` and reference model
/// `ẋ_m = a_m x_m + k_m r`, with control `u = θ x_p + k_r r`.
///
/// `a_p_interval` is the uncertainty set over which the fixed-gain loop must
/// be Hurwitz. It defaults to `[−ā, ā]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantSpec {
    pub a_p: f64,
    pub a_bar: f64,
    pub a_p_interval: [f64; 2],
    pub k_p: f64,
    pub a_m: f64,
    pub k_m: f64,
    pub k_r: f64,
}

impl PlantSpec {
    pub fn new(a_p: f64, a_bar: f64, k_p: f64, a_m: f64, k_m: f64, k_r: f64) -> Result<Self> {
        let plant = PlantSpec { a_p, a_bar, a_p_interval: [-a_bar, a_bar], k_p, a_m, k_m, k_r };
        plant.validate()?;
        Ok(plant)
    }

    /// Unit gains: `k_p = k_m = k_r = 1`.
    pub fn unit_gain(a_p: f64, a_bar: f64, a_m: f64) -> Result<Self> {
        PlantSpec::new(a_p, a_bar, 1.0, a_m, 1.0, 1.0)
    }

    /// Feedforward gain matched to the model, `k_r = k_m / k_p`.
    pub fn gain_matched(a_p: f64, a_bar: f64, k_p: f64, a_m: f64, k_m: f64) -> Result<Self> {
        PlantSpec::new(a_p, a_bar, k_p, a_m, k_m, k_m / k_p)
    }

    /// Narrows the uncertainty set to `[lo, hi] ⊆ [−ā, ā]`.
    pub fn with_interval(mut self, lo: f64, hi: f64) -> Result<Self> {
        self.a_p_interval = [lo, hi];
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.a_p, self.a_bar, self.k_p, self.a_m, self.k_m, self.k_r, self.a_p_interval[0], self.a_p_interval[1]];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(MracError::InvalidConfig("non-finite plant parameter".into()));
        }
        if self.a_m >= 0.0 {
            return Err(MracError::InvalidConfig(format!("reference model pole a_m must be negative, got {}", self.a_m)));
        }
        if self.k_p == 0.0 {
            return Err(MracError::InvalidConfig("plant gain k_p must be nonzero".into()));
        }
        if self.a_p.abs() > self.a_bar {
            return Err(MracError::InvalidConfig(format!("|a_p| = {} exceeds a_bar = {}", self.a_p.abs(), self.a_bar)));
        }
        let [lo, hi] = self.a_p_interval;
        if lo > hi || lo < -self.a_bar || hi > self.a_bar || self.a_p < lo || self.a_p > hi {
            return Err(MracError::InvalidConfig(format!(
                "a_p interval [{lo}, {hi}] must lie in [-a_bar, a_bar] and contain a_p = {}",
                self.a_p
            )));
        }
        Ok(())
    }

    /// Ideal matching gain `θ* = (a_m − a_p)/k_p`.
    pub fn theta_star(&self) -> f64 {
        (self.a_m - self.a_p) / self.k_p
    }

    /// `n` evenly spaced points over the uncertainty interval, endpoints
    /// included; a single point when the interval is degenerate.
    pub fn a_p_grid(&self, n: usize) -> Vec<f64> {
        let [lo, hi] = self.a_p_interval;
        if hi == lo || n < 2 {
            return vec![lo];
        }
        (0..n).map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect()
    }
}
