//! Fixed-step RK4 integration of the adaptive loop
//!
//! ```text
//! ẋ_p = a_p x_p + k_p v          v   = c_ηᵀ x_η + d u
//! ẋ_η = A_η x_η + b_η u          u   = θ x_p + k_r r
//! ẋ_m = a_m x_m + k_m r          θ̇  = γ Proj(θ, −x_p e),  e = x_p − x_m
//! ```
//!
//! `θ` is part of the RK4 state; the projection branch is re-evaluated at
//! every stage and a hard clamp onto `±θ_max` removes the residual overshoot.

mod reference;
mod trace;

pub use reference::ReferenceSignal;
pub use trace::{RunStats, SimTrace, CSV_HEADER};

use serde::Serialize;
use thiserror::Error;

use crate::error::{MracError, Result};
use crate::lti::StateSpace;
use crate::plant::PlantSpec;
use crate::projection::{proj_unchecked, region_of, ProjectionConfig};

pub const DEFAULT_DT: f64 = 1e-4;
pub const DEFAULT_STRIDE: usize = 10;
/// Any state component above this magnitude counts as divergence.
pub const BLOWUP_THRESHOLD: f64 = 1e9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub plant: PlantSpec,
    pub unmodeled: StateSpace,
    pub cfg: ProjectionConfig,
    pub signal: ReferenceSignal,
    pub x_p0: f64,
    pub x_m0: f64,
    pub x_eta0: Vec<f64>,
    pub theta0: f64,
    pub t_end: f64,
    pub dt: f64,
    /// Store every `stride`-th step.
    pub stride: usize,
    pub projection_enabled: bool,
    /// Clamp `θ` onto `[−θ_max, θ_max]` after each step (projection only).
    pub clamp_theta: bool,
}

impl Scenario {
    /// Zero initial conditions, 60 s horizon, default step and stride.
    pub fn new(plant: PlantSpec, unmodeled: StateSpace, cfg: ProjectionConfig, signal: ReferenceSignal) -> Self {
        let n = unmodeled.order();
        Scenario {
            plant,
            unmodeled,
            cfg,
            signal,
            x_p0: 0.0,
            x_m0: 0.0,
            x_eta0: vec![0.0; n],
            theta0: 0.0,
            t_end: 60.0,
            dt: DEFAULT_DT,
            stride: DEFAULT_STRIDE,
            projection_enabled: true,
            clamp_theta: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.plant.validate()?;
        self.cfg.validate()?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(MracError::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(MracError::InvalidConfig(format!("t_end must be positive, got {}", self.t_end)));
        }
        if self.stride == 0 {
            return Err(MracError::InvalidConfig("stride must be at least 1".into()));
        }
        if self.x_eta0.len() != self.unmodeled.order() {
            return Err(MracError::DimensionMismatch(format!(
                "x_eta0 has {} entries but the unmodeled dynamics have {} states",
                self.x_eta0.len(),
                self.unmodeled.order()
            )));
        }
        let ics = [self.x_p0, self.x_m0, self.theta0];
        if ics.iter().chain(&self.x_eta0).any(|v| !v.is_finite()) || !self.signal.is_finite() {
            return Err(MracError::InvalidConfig("non-finite initial condition or signal parameter".into()));
        }
        if self.projection_enabled && self.theta0.abs() > self.cfg.theta_max {
            return Err(MracError::InvalidConfig(format!(
                "|theta(0)| = {} exceeds theta_max = {}",
                self.theta0.abs(),
                self.cfg.theta_max
            )));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt + 1e-9).floor() as usize
    }

    /// Number of stored samples.
    pub fn sample_count(&self) -> usize {
        self.steps() / self.stride + 1
    }

    pub fn r_max(&self) -> f64 {
        self.signal.r_max()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Divergence {
    /// Time of the first step whose state crossed the blowup threshold.
    pub time: f64,
    pub max_abs_e: f64,
    /// Samples stored up to the last finite step.
    pub trace: SimTrace,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Invalid(#[from] MracError),
    #[error("state diverged at t = {:.4} s (max |e| = {:e})", .0.time, .0.max_abs_e)]
    Diverged(Box<Divergence>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum ThetaLaw {
    Projected,
    Gradient,
    Fixed,
}

struct Loop<'a> {
    a_p: f64,
    k_p: f64,
    a_m: f64,
    k_m: f64,
    k_r: f64,
    n: usize,
    a_eta: Vec<f64>,
    b_eta: &'a [f64],
    c_eta: &'a [f64],
    d_eta: f64,
    cfg: ProjectionConfig,
    signal: ReferenceSignal,
    law: ThetaLaw,
}

const XP: usize = 0;
const XM: usize = 1;
const TH: usize = 2;
const ETA: usize = 3;

impl<'a> Loop<'a> {
    fn new(s: &'a Scenario, law: ThetaLaw) -> Self {
        let n = s.unmodeled.order();
        let mut a_eta = Vec::with_capacity(n * n);
        for i in 0..n {
            a_eta.extend_from_slice(s.unmodeled.a.row(i));
        }
        Loop {
            a_p: s.plant.a_p,
            k_p: s.plant.k_p,
            a_m: s.plant.a_m,
            k_m: s.plant.k_m,
            k_r: s.plant.k_r,
            n,
            a_eta,
            b_eta: &s.unmodeled.b,
            c_eta: &s.unmodeled.c,
            d_eta: s.unmodeled.d,
            cfg: s.cfg,
            signal: s.signal,
            law,
        }
    }

    /// Returns `(r, u, v)` at state `x`.
    #[inline]
    fn signals(&self, t: f64, x: &[f64]) -> (f64, f64, f64) {
        let r = self.signal.eval(t);
        let u = x[TH] * x[XP] + self.k_r * r;
        let mut v = self.d_eta * u;
        for j in 0..self.n {
            v += self.c_eta[j] * x[ETA + j];
        }
        (r, u, v)
    }

    #[inline]
    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        let (r, u, v) = self.signals(t, x);
        let x_p = x[XP];
        let e = x_p - x[XM];
        dx[XP] = self.a_p * x_p + self.k_p * v;
        dx[XM] = self.a_m * x[XM] + self.k_m * r;
        dx[TH] = match self.law {
            ThetaLaw::Projected => self.cfg.gamma * proj_unchecked(x[TH], -x_p * e, &self.cfg),
            ThetaLaw::Gradient => -self.cfg.gamma * e * x_p,
            ThetaLaw::Fixed => 0.0,
        };
        for i in 0..self.n {
            let row = &self.a_eta[i * self.n..(i + 1) * self.n];
            let mut acc = self.b_eta[i] * u;
            for j in 0..self.n {
                acc += row[j] * x[ETA + j];
            }
            dx[ETA + i] = acc;
        }
    }
}

struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    fn new(dim: usize) -> Self {
        Rk4 { k1: vec![0.0; dim], k2: vec![0.0; dim], k3: vec![0.0; dim], k4: vec![0.0; dim], tmp: vec![0.0; dim] }
    }

    #[inline]
    fn step(&mut self, sys: &Loop<'_>, t: f64, h: f64, x: &mut [f64]) {
        let half = 0.5 * h;
        sys.rhs(t, x, &mut self.k1);
        for i in 0..x.len() {
            self.tmp[i] = x[i] + half * self.k1[i];
        }
        sys.rhs(t + half, &self.tmp, &mut self.k2);
        for i in 0..x.len() {
            self.tmp[i] = x[i] + half * self.k2[i];
        }
        sys.rhs(t + half, &self.tmp, &mut self.k3);
        for i in 0..x.len() {
            self.tmp[i] = x[i] + h * self.k3[i];
        }
        sys.rhs(t + h, &self.tmp, &mut self.k4);
        let sixth = h / 6.0;
        for i in 0..x.len() {
            x[i] += sixth * (self.k1[i] + 2.0 * (self.k2[i] + self.k3[i]) + self.k4[i]);
        }
    }
}

/// Integrates the adaptive loop over `[0, t_end]`.
pub fn simulate(scenario: &Scenario) -> std::result::Result<SimTrace, SimError> {
    let law = if scenario.projection_enabled { ThetaLaw::Projected } else { ThetaLaw::Gradient };
    run(scenario, law, scenario.theta0)
}

/// Integrates the loop with `θ` frozen at `theta_fixed`.
pub fn simulate_fixed_theta(scenario: &Scenario, theta_fixed: f64) -> std::result::Result<SimTrace, SimError> {
    run(scenario, ThetaLaw::Fixed, theta_fixed)
}

fn run(scenario: &Scenario, law: ThetaLaw, theta0: f64) -> std::result::Result<SimTrace, SimError> {
    let mut checked = scenario.clone();
    checked.theta0 = theta0;
    checked.validate()?;

    let sys = Loop::new(scenario, law);
    let dim = ETA + sys.n;
    let mut x = vec![0.0; dim];
    x[XP] = scenario.x_p0;
    x[XM] = scenario.x_m0;
    x[TH] = theta0;
    x[ETA..].copy_from_slice(&scenario.x_eta0);

    let steps = scenario.steps();
    let stride = scenario.stride;
    let dt = scenario.dt;
    let clamp = law == ThetaLaw::Projected && scenario.clamp_theta;
    let theta_max = scenario.cfg.theta_max;
    let cfg = scenario.cfg;

    let mut trace = SimTrace::with_capacity(scenario.sample_count());
    let mut stats = RunStats::default();
    let mut rk = Rk4::new(dim);

    let record = |trace: &mut SimTrace, t: f64, x: &[f64]| {
        let (r, u, v) = sys.signals(t, x);
        trace.push(t, r, u, v, x[XP], x[XM], x[TH], region_of(x[TH], &cfg));
    };
    let observe = |stats: &mut RunStats, x: &[f64]| {
        let e = x[XP] - x[XM];
        stats.max_abs_e = stats.max_abs_e.max(e.abs());
        stats.max_abs_theta = stats.max_abs_theta.max(x[TH].abs());
        stats.max_abs_e_x_p = stats.max_abs_e_x_p.max((e * x[XP]).abs());
    };

    observe(&mut stats, &x);
    record(&mut trace, 0.0, &x);
    for k in 0..steps {
        let t = k as f64 * dt;
        rk.step(&sys, t, dt, &mut x);
        if clamp && x[TH].abs() > theta_max {
            x[TH] = x[TH].clamp(-theta_max, theta_max);
            stats.clamp_events += 1;
        }
        let t_next = (k + 1) as f64 * dt;
        if x.iter().any(|v| !v.is_finite() || v.abs() > BLOWUP_THRESHOLD) {
            let e = (x[XP] - x[XM]).abs();
            let max_abs_e = if e.is_finite() { stats.max_abs_e.max(e) } else { f64::INFINITY };
            stats.steps = k as u64 + 1;
            trace.stats = stats;
            return Err(SimError::Diverged(Box::new(Divergence { time: t_next, max_abs_e, trace })));
        }
        observe(&mut stats, &x);
        if (k + 1) % stride == 0 {
            record(&mut trace, t_next, &x);
        }
    }
    stats.steps = steps as u64;
    trace.stats = stats;
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lti::{realize_controllable, TransferFunction};
    use crate::projection::ThetaRegion;

    fn rohrs(signal: ReferenceSignal) -> Scenario {
        let plant = PlantSpec::gain_matched(-1.0, 1.0, 2.0, -3.0, 3.0).unwrap().with_interval(-1.0, -1.0).unwrap();
        let lag = realize_controllable(&TransferFunction::second_order_lag(0.9912, 15.1327).unwrap()).unwrap();
        let cfg = ProjectionConfig::new(16.7, 1.7, 4e-8, 1.0).unwrap();
        let mut s = Scenario::new(plant, lag, cfg, signal);
        s.theta0 = -0.65;
        s
    }

    #[test]
    fn probe_at_origin() {
        let s = rohrs(ReferenceSignal::Constant { value: 0.3 });
        let sys = Loop::new(&s, ThetaLaw::Projected);
        let x = [0.0, 0.0, -0.65, 0.0, 0.0];
        let mut dx = [0.0; 5];
        sys.rhs(0.0, &x, &mut dx);
        let (_, u, _) = sys.signals(0.0, &x);
        assert!((u - 0.45).abs() < 1e-15);
        assert!((dx[XM] - 0.9).abs() < 1e-15);
        assert_eq!(dx[XP], 0.0);
        assert_eq!(dx[TH], 0.0);
        // b_η u enters the second lag state
        assert!((dx[ETA + 1] - 15.1327f64.powi(2) * 0.45).abs() < 1e-9);
    }

    #[test]
    fn zero_state_is_equilibrium() {
        let mut s = rohrs(ReferenceSignal::Constant { value: 0.0 });
        s.t_end = 1.0;
        s.dt = 1e-3;
        s.stride = 1;
        let tr = simulate_fixed_theta(&s, -16.7).unwrap();
        assert_eq!(tr.len(), 1001);
        assert!(tr.x_p.iter().chain(&tr.x_m).chain(&tr.u).all(|v| *v == 0.0));
    }

    #[test]
    fn exponential_decay_accuracy() {
        // ẋ_p = −x_p with G_η ≡ 1, θ = 0, r = 0.
        let plant = PlantSpec::unit_gain(-1.0, 1.0, -1.0).unwrap();
        let cfg = ProjectionConfig::new(2.0, 1.0, 0.5, 1.0).unwrap();
        let mut s = Scenario::new(plant, StateSpace::pass_through(), cfg, ReferenceSignal::Constant { value: 0.0 });
        s.x_p0 = 1.0;
        s.t_end = 1.0;
        s.dt = 1e-3;
        s.stride = 1;
        let tr = simulate_fixed_theta(&s, 0.0).unwrap();
        assert!((tr.x_p.last().unwrap() - (-1.0f64).exp()).abs() < 1e-9);
        assert_eq!(tr.t.len(), 1001);
    }

    #[test]
    fn sample_count_with_stride() {
        let mut s = rohrs(ReferenceSignal::Constant { value: 1.0 });
        s.t_end = 0.1;
        s.dt = 1e-4;
        s.stride = 10;
        assert_eq!(s.steps(), 1000);
        let tr = simulate(&s).unwrap();
        assert_eq!(tr.len(), 101);
        assert!((tr.t[100] - 0.1).abs() < 1e-12);
        for i in 0..tr.len() {
            assert_eq!(tr.e[i], tr.x_p[i] - tr.x_m[i]);
        }
    }

    #[test]
    fn fixed_theta_dc_gain() {
        let mut s = rohrs(ReferenceSignal::Constant { value: 1.0 });
        // slowest pole pair sits at −0.062 ± 16i
        s.t_end = 200.0;
        s.dt = 1e-3;
        s.plant.k_r = 1.0;
        let tr = simulate_fixed_theta(&s, -16.7).unwrap();
        let expect = 458.0 / 7877.6;
        assert!((tr.x_p.last().unwrap() - expect).abs() < 1e-4, "{}", tr.x_p.last().unwrap());
    }

    #[test]
    fn gradient_law_can_diverge() {
        let mut s = rohrs(ReferenceSignal::Constant { value: 0.0 });
        s.projection_enabled = false;
        s.x_p0 = 1.0;
        s.theta0 = 40.0;
        s.dt = 1e-3;
        s.t_end = 100.0;
        match simulate(&s) {
            Err(SimError::Diverged(d)) => {
                assert!(d.time > 0.0 && d.time < 100.0);
                assert!(!d.trace.is_empty());
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn projection_requires_theta0_in_bounds() {
        let mut s = rohrs(ReferenceSignal::Constant { value: 1.0 });
        s.theta0 = 17.0;
        assert!(matches!(simulate(&s), Err(SimError::Invalid(_))));
    }

    #[test]
    fn regions_are_recorded() {
        let mut s = rohrs(ReferenceSignal::Constant { value: 0.0 });
        s.theta0 = -16.0;
        s.t_end = 0.01;
        let tr = simulate(&s).unwrap();
        assert!(tr.region.iter().all(|r| *r == ThetaRegion::BU));
    }
}
