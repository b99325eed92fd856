//! The Rohrs example: first-order plant `2/(s − a_p)` with `a_p = −1`,
//! model `3/(s + 3)`, and a lightly damped actuator lag
//! `ω_n²/(s² + 2ζω_n s + ω_n²)`, `ζ = 0.9912`, `ω_n = 15.1327`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{MracError, Result};
use crate::lti::{realize_controllable, Matrix, StateSpace, TransferFunction};
use crate::plant::PlantSpec;
use crate::projection::ProjectionConfig;
use crate::simulator::{ReferenceSignal, Scenario};
use crate::synthesis::synthesize_xi0;

pub const ROHRS_ZETA: f64 = 0.9912;
pub const ROHRS_OMEGA_N: f64 = 15.1327;
pub const ROHRS_THETA_MAX: f64 = 16.7;
pub const ROHRS_EPSILON0: f64 = 1.7;
pub const ROHRS_THETA0: f64 = -0.65;
/// Presets use this fraction of the largest admissible `ξ₀`.
pub const XI0_FRACTION: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Preset {
    #[serde(rename = "rohrs_main")]
    RohrsMain,
    #[serde(rename = "rohrs_i")]
    RohrsI,
    #[serde(rename = "rohrs_ii")]
    RohrsII,
    #[serde(rename = "rohrs_iii")]
    RohrsIII,
    #[serde(rename = "rohrs_iv")]
    RohrsIV,
    #[serde(rename = "rohrs_unprotected")]
    RohrsUnprotected,
}

impl Preset {
    pub const ALL: [Preset; 6] =
        [Preset::RohrsMain, Preset::RohrsI, Preset::RohrsII, Preset::RohrsIII, Preset::RohrsIV, Preset::RohrsUnprotected];

    pub fn name(self) -> &'static str {
        match self {
            Preset::RohrsMain => "rohrs_main",
            Preset::RohrsI => "rohrs_i",
            Preset::RohrsII => "rohrs_ii",
            Preset::RohrsIII => "rohrs_iii",
            Preset::RohrsIV => "rohrs_iv",
            Preset::RohrsUnprotected => "rohrs_unprotected",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Preset::RohrsMain => "r = 0.3 + 1.85 sin(16.1 t), x_p(0) = 0, theta(0) = -0.65, 1500 s",
            Preset::RohrsI => "r = 0.3 + 2 sin(8 t), 60 s",
            Preset::RohrsII => "r = 12 for t <= 1 s, then 0, 60 s",
            Preset::RohrsIII => "r = 10, 60 s",
            Preset::RohrsIV => "r = 2 sin(w t), w swept 16.1 -> 2 rad/s over 60 s, six initial conditions",
            Preset::RohrsUnprotected => "rohrs_main without projection, 1500 s",
        }
    }

    pub fn signal(self) -> ReferenceSignal {
        match self {
            Preset::RohrsMain | Preset::RohrsUnprotected => {
                ReferenceSignal::BiasedSine { offset: 0.3, amplitude: 1.85, frequency: 16.1 }
            }
            Preset::RohrsI => ReferenceSignal::BiasedSine { offset: 0.3, amplitude: 2.0, frequency: 8.0 },
            Preset::RohrsII => ReferenceSignal::Pulse { level: 12.0, duration: 1.0 },
            Preset::RohrsIII => ReferenceSignal::Constant { value: 10.0 },
            Preset::RohrsIV => ReferenceSignal::Chirp {
                offset: 0.0,
                amplitude: 2.0,
                omega_start: 16.1,
                omega_end: 2.0,
                sweep_duration: 60.0,
            },
        }
    }

    pub fn t_end(self) -> f64 {
        match self {
            Preset::RohrsMain | Preset::RohrsUnprotected => 1500.0,
            _ => 60.0,
        }
    }

    /// Divergence is the expected outcome.
    pub fn expects_divergence(self) -> bool {
        self == Preset::RohrsUnprotected
    }

    pub fn scenario(self) -> Result<Scenario> {
        let mut s = rohrs_scenario(self.signal())?;
        s.t_end = self.t_end();
        s.projection_enabled = self != Preset::RohrsUnprotected;
        if self == Preset::RohrsIV {
            let (x_p0, theta0) = ROHRS_IV_INITIAL_CONDITIONS[0];
            s.x_p0 = x_p0;
            s.theta0 = theta0;
        }
        Ok(s)
    }

    /// `(x_p(0), θ(0))` pairs swept by the preset; a single pair except for
    /// the frequency sweep case.
    pub fn initial_conditions(self) -> Vec<(f64, f64)> {
        match self {
            Preset::RohrsIV => ROHRS_IV_INITIAL_CONDITIONS.to_vec(),
            _ => vec![(0.0, ROHRS_THETA0)],
        }
    }
}

/// Six `(x_p(0), θ(0))` pairs for the frequency sweep, ordered from
/// trajectories that stay in the lower boundary region to ones that never
/// leave `A`.
pub const ROHRS_IV_INITIAL_CONDITIONS: [(f64, f64); 6] =
    [(0.0, -16.0), (2.0, -15.5), (-2.0, -15.0), (0.0, -10.0), (0.0, -8.0), (1.0, 2.0)];

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = MracError;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
            MracError::InvalidConfig(format!("unknown preset `{s}` (expected one of {})", names.join(", ")))
        })
    }
}

/// Plant with `k_r = k_m/k_p = 1.5`, uncertainty set pinned at `a_p = −1`.
pub fn rohrs_plant() -> PlantSpec {
    PlantSpec::gain_matched(-1.0, 1.0, 2.0, -3.0, 3.0)
        .and_then(|p| p.with_interval(-1.0, -1.0))
        .expect("constant parameters are valid")
}

pub fn rohrs_unmodeled() -> StateSpace {
    realize_controllable(&TransferFunction::second_order_lag(ROHRS_ZETA, ROHRS_OMEGA_N).expect("valid lag"))
        .expect("proper transfer function")
}

/// `θ_max = 16.7`, `ε₀ = 1.7`, `γ = 1`, `ξ₀` synthesized with `Q = I`.
pub fn rohrs_config() -> Result<ProjectionConfig> {
    let xi0 = synthesize_xi0(&rohrs_plant(), &rohrs_unmodeled(), ROHRS_THETA_MAX, &Matrix::identity(3), XI0_FRACTION)?;
    ProjectionConfig::new(ROHRS_THETA_MAX, ROHRS_EPSILON0, xi0, 1.0)
}

pub fn rohrs_scenario(signal: ReferenceSignal) -> Result<Scenario> {
    let mut s = Scenario::new(rohrs_plant(), rohrs_unmodeled(), rohrs_config()?, signal);
    s.theta0 = ROHRS_THETA0;
    Ok(s)
}
