//! JSON scenario files and preset loading.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use mrac_core::lti::{realize_controllable, Matrix, Polynomial, StateSpace, TransferFunction};
use mrac_core::presets::{Preset, XI0_FRACTION};
use mrac_core::simulator::{ReferenceSignal, Scenario, DEFAULT_DT, DEFAULT_STRIDE};
use mrac_core::synthesis::synthesize_xi0;
use mrac_core::{PlantSpec, ProjectionConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub name: Option<String>,
    pub plant: PlantSection,
    #[serde(default)]
    pub unmodeled: UnmodeledSection,
    pub projection: ProjectionSection,
    pub signal: ReferenceSignal,
    #[serde(default)]
    pub initial: InitialSection,
    /// `[x_p(0), θ(0)]` pairs used by `sweep` when no grid is given.
    #[serde(default)]
    pub initial_conditions: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub simulation: SimulationSection,
    #[serde(default)]
    pub analysis: AnalysisSection,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PlantSection {
    pub a_p: f64,
    /// Defaults to `|a_p|`.
    #[serde(default)]
    pub a_bar: Option<f64>,
    pub k_p: f64,
    pub a_m: f64,
    pub k_m: f64,
    /// Defaults to `k_m / k_p`.
    #[serde(default)]
    pub k_r: Option<f64>,
    #[serde(default)]
    pub a_p_interval: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum UnmodeledSection {
    /// `G_η = 1`.
    #[default]
    None,
    SecondOrderLag { zeta: f64, omega_n: f64 },
    /// Coefficients in descending powers of `s`.
    TransferFunction { num: Vec<f64>, den: Vec<f64> },
    StateSpace {
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
        c: Vec<f64>,
        #[serde(default)]
        d: f64,
    },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionSection {
    pub theta_max: f64,
    pub epsilon0: f64,
    pub xi0: Xi0,
    #[serde(default = "one")]
    pub gamma: f64,
    /// Fraction of the largest admissible `ξ₀` used by `"auto"`.
    #[serde(default)]
    pub xi0_fraction: Option<f64>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Xi0 {
    Value(f64),
    Auto(AutoTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoTag {
    Auto,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    #[serde(default)]
    pub x_p: f64,
    #[serde(default)]
    pub x_m: f64,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub x_eta: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub stride: Option<usize>,
    pub projection_enabled: Option<bool>,
    pub clamp_theta: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    pub delta: Option<f64>,
    pub alpha: Option<f64>,
    #[serde(default)]
    pub q: QChoice,
}

/// `"identity"` or an explicit symmetric positive-definite matrix.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum QChoice {
    Named(QName),
    Matrix(Vec<Vec<f64>>),
}

impl Default for QChoice {
    fn default() -> Self {
        QChoice::Named(QName::Identity)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QName {
    Identity,
}

/// Command-line overrides applied on top of a preset or file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub gamma: Option<f64>,
    pub stride: Option<usize>,
    pub theta_max: Option<f64>,
    pub epsilon0: Option<f64>,
    pub xi0: Option<f64>,
    pub no_projection: bool,
}

/// A fully resolved run description.
#[derive(Debug, Clone)]
pub struct Setup {
    pub name: String,
    pub scenario: Scenario,
    pub q: Matrix,
    pub delta: Option<f64>,
    pub alpha: Option<f64>,
    pub initial_conditions: Vec<(f64, f64)>,
}

/// Everything needed to build a [`Setup`], before `ξ₀` is resolved.
struct Draft {
    name: String,
    plant: PlantSpec,
    unmodeled: StateSpace,
    theta_max: f64,
    epsilon0: f64,
    xi0: Xi0,
    xi0_fraction: f64,
    gamma: f64,
    signal: ReferenceSignal,
    x_p0: f64,
    x_m0: f64,
    theta0: f64,
    x_eta0: Option<Vec<f64>>,
    t_end: f64,
    dt: f64,
    stride: usize,
    projection_enabled: bool,
    clamp_theta: bool,
    q: Option<Matrix>,
    delta: Option<f64>,
    alpha: Option<f64>,
    initial_conditions: Option<Vec<(f64, f64)>>,
}

impl Draft {
    fn from_preset(preset: Preset) -> Result<Self> {
        let s = preset.scenario()?;
        let ics = preset.initial_conditions();
        Ok(Draft {
            name: preset.name().to_string(),
            plant: s.plant,
            unmodeled: s.unmodeled,
            theta_max: s.cfg.theta_max,
            epsilon0: s.cfg.epsilon0,
            xi0: Xi0::Value(s.cfg.xi0),
            xi0_fraction: XI0_FRACTION,
            gamma: s.cfg.gamma,
            signal: s.signal,
            x_p0: s.x_p0,
            x_m0: s.x_m0,
            theta0: s.theta0,
            x_eta0: Some(s.x_eta0),
            t_end: s.t_end,
            dt: s.dt,
            stride: s.stride,
            projection_enabled: s.projection_enabled,
            clamp_theta: s.clamp_theta,
            q: None,
            delta: None,
            alpha: None,
            initial_conditions: Some(ics),
        })
    }

    fn from_file(file: ScenarioFile, fallback_name: &str) -> Result<Self> {
        let p = &file.plant;
        let a_bar = p.a_bar.unwrap_or(p.a_p.abs());
        let k_r = p.k_r.unwrap_or(p.k_m / p.k_p);
        let mut plant = PlantSpec::new(p.a_p, a_bar, p.k_p, p.a_m, p.k_m, k_r)?;
        if let Some([lo, hi]) = p.a_p_interval {
            plant = plant.with_interval(lo, hi)?;
        }
        let q = match &file.analysis.q {
            QChoice::Named(QName::Identity) => None,
            QChoice::Matrix(rows) => Some(Matrix::from_rows(rows)?),
        };
        Ok(Draft {
            name: file.name.clone().unwrap_or_else(|| fallback_name.to_string()),
            plant,
            unmodeled: build_unmodeled(&file.unmodeled)?,
            theta_max: file.projection.theta_max,
            epsilon0: file.projection.epsilon0,
            xi0: file.projection.xi0,
            xi0_fraction: file.projection.xi0_fraction.unwrap_or(XI0_FRACTION),
            gamma: file.projection.gamma,
            signal: file.signal,
            x_p0: file.initial.x_p,
            x_m0: file.initial.x_m,
            theta0: file.initial.theta,
            x_eta0: file.initial.x_eta.clone(),
            t_end: file.simulation.t_end.unwrap_or(60.0),
            dt: file.simulation.dt.unwrap_or(DEFAULT_DT),
            stride: file.simulation.stride.unwrap_or(DEFAULT_STRIDE),
            projection_enabled: file.simulation.projection_enabled.unwrap_or(true),
            clamp_theta: file.simulation.clamp_theta.unwrap_or(true),
            q,
            delta: file.analysis.delta,
            alpha: file.analysis.alpha,
            initial_conditions: file.initial_conditions.map(|v| v.into_iter().map(|[x, t]| (x, t)).collect()),
        })
    }

    fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.dt {
            self.dt = v;
        }
        if let Some(v) = o.t_end {
            self.t_end = v;
        }
        if let Some(v) = o.gamma {
            self.gamma = v;
        }
        if let Some(v) = o.stride {
            self.stride = v;
        }
        if let Some(v) = o.theta_max {
            self.theta_max = v;
        }
        if let Some(v) = o.epsilon0 {
            self.epsilon0 = v;
        }
        if let Some(v) = o.xi0 {
            self.xi0 = Xi0::Value(v);
        }
        if o.no_projection {
            self.projection_enabled = false;
        }
    }

    fn resolve(self) -> Result<Setup> {
        let q = self.q.unwrap_or_else(|| Matrix::identity(self.unmodeled.order() + 1));
        let xi0 = match self.xi0 {
            Xi0::Value(v) => v,
            Xi0::Auto(_) => {
                if !(self.xi0_fraction > 0.0 && self.xi0_fraction < 1.0) {
                    bail!("xi0_fraction must lie in (0, 1), got {}", self.xi0_fraction);
                }
                synthesize_xi0(&self.plant, &self.unmodeled, self.theta_max, &q, self.xi0_fraction)
                    .context("cannot choose xi0 automatically")?
            }
        };
        let cfg = ProjectionConfig::new(self.theta_max, self.epsilon0, xi0, self.gamma)?;
        let mut s = Scenario::new(self.plant, self.unmodeled, cfg, self.signal);
        s.x_p0 = self.x_p0;
        s.x_m0 = self.x_m0;
        s.theta0 = self.theta0;
        if let Some(x) = self.x_eta0 {
            s.x_eta0 = x;
        }
        s.t_end = self.t_end;
        s.dt = self.dt;
        s.stride = self.stride;
        s.projection_enabled = self.projection_enabled;
        s.clamp_theta = self.clamp_theta;
        s.validate()?;
        let initial_conditions = self.initial_conditions.unwrap_or_else(|| vec![(s.x_p0, s.theta0)]);
        Ok(Setup { name: self.name, scenario: s, q, delta: self.delta, alpha: self.alpha, initial_conditions })
    }
}

fn build_unmodeled(section: &UnmodeledSection) -> Result<StateSpace> {
    Ok(match section {
        UnmodeledSection::None => StateSpace::pass_through(),
        UnmodeledSection::SecondOrderLag { zeta, omega_n } => {
            realize_controllable(&TransferFunction::second_order_lag(*zeta, *omega_n)?)?
        }
        UnmodeledSection::TransferFunction { num, den } => {
            let tf = TransferFunction::new(Polynomial::new(num.clone())?, Polynomial::new(den.clone())?)?;
            realize_controllable(&tf)?
        }
        UnmodeledSection::StateSpace { a, b, c, d } => StateSpace::new(Matrix::from_rows(a)?, b.clone(), c.clone(), *d)?,
    })
}

pub fn parse_scenario_file(text: &str) -> Result<ScenarioFile> {
    serde_json::from_str(text).map_err(|e| anyhow!("scenario schema error: {e}"))
}

/// Loads a preset or a scenario file and applies the overrides.
pub fn load(preset: Option<&str>, file: Option<&Path>, overrides: &Overrides) -> Result<Setup> {
    let mut draft = match (preset, file) {
        (Some(_), Some(_)) => bail!("--preset and --scenario are mutually exclusive"),
        (Some(name), None) => Draft::from_preset(name.parse()?)?,
        (None, Some(path)) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
            Draft::from_file(parse_scenario_file(&text)?, stem)?
        }
        (None, None) => bail!("one of --preset or --scenario is required"),
    };
    draft.apply(overrides);
    draft.resolve()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "plant": {"a_p": -1, "k_p": 2, "a_m": -3, "k_m": 3, "a_p_interval": [-1, -1]},
        "unmodeled": {"kind": "second_order_lag", "zeta": 0.9912, "omega_n": 15.1327},
        "projection": {"theta_max": 16.7, "epsilon0": 1.7, "xi0": "auto"},
        "signal": {"kind": "constant", "value": 1.0}
    }"#;

    #[test]
    fn minimal_file_resolves_with_defaults() {
        let draft = Draft::from_file(parse_scenario_file(MINIMAL).unwrap(), "x").unwrap();
        let setup = draft.resolve().unwrap();
        assert_eq!(setup.scenario.plant.k_r, 1.5);
        assert_eq!(setup.scenario.unmodeled.order(), 2);
        assert!(setup.scenario.cfg.xi0 > 0.0 && setup.scenario.cfg.xi0 < 1e-7);
        assert_eq!(setup.q, Matrix::identity(3));
        assert_eq!(setup.initial_conditions, vec![(0.0, 0.0)]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = MINIMAL.replace("\"k_m\": 3", "\"k_m\": 3, \"k_q\": 1");
        assert!(parse_scenario_file(&bad).is_err());
        let bad = MINIMAL.replace("\"auto\"", "\"automatic\"");
        assert!(parse_scenario_file(&bad).is_err());
        let q = MINIMAL.replace("\"signal\"", "\"analysis\": {\"q\": \"identity\"}, \"signal\"");
        assert!(parse_scenario_file(&q).is_ok());
        let q = MINIMAL.replace("\"signal\"", "\"analysis\": {\"q\": \"diagonal\"}, \"signal\"");
        assert!(parse_scenario_file(&q).is_err());
    }

    #[test]
    fn overrides_take_precedence() {
        let o = Overrides { dt: Some(1e-3), gamma: Some(5.0), no_projection: true, ..Overrides::default() };
        let setup = load(Some("rohrs_iii"), None, &o).unwrap();
        assert_eq!(setup.scenario.dt, 1e-3);
        assert_eq!(setup.scenario.cfg.gamma, 5.0);
        assert!(!setup.scenario.projection_enabled);
    }

    #[test]
    fn physical_invariants_are_enforced_at_load() {
        let bad = MINIMAL.replace("\"a_m\": -3", "\"a_m\": 3");
        let file = parse_scenario_file(&bad).unwrap();
        assert!(Draft::from_file(file, "x").is_err());
    }
}
