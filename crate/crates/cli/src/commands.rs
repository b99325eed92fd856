use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use mrac_core::phases::{classify_steady_state, detect_limit_cycle, detect_phases, LimitCycle, PhaseTimeline, SteadyState};
use mrac_core::simulator::{simulate, SimError, SimTrace};
use mrac_core::synthesis::{bound_ledger, check_membership, BoundLedger, LedgerInputs, MembershipReport};
use mrac_core::ThetaRegion;
use rayon::prelude::*;
use serde::Serialize;

use crate::scenario::Setup;

/// Process exit status of a successful invocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    VerdictFailed = 1,
    UnexpectedDivergence = 3,
}

/// Exit code for malformed input of any kind.
pub const EXIT_INPUT_ERROR: u8 = 2;

pub fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn ledger_for(setup: &Setup) -> mrac_core::Result<BoundLedger> {
    let s = &setup.scenario;
    let inputs = LedgerInputs {
        r_max: s.r_max(),
        x_p_init: s.x_p0,
        x_m_init: s.x_m0,
        delta: setup.delta,
        alpha: setup.alpha,
    };
    bound_ledger(&s.plant, &s.unmodeled, &s.cfg, &inputs, &setup.q)
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub scenario: String,
    pub verdict: bool,
    pub failed: Vec<String>,
    pub theta_bar_star: Option<f64>,
    pub xi0: f64,
    pub xi0_max: Option<f64>,
    pub membership: MembershipReport,
    pub ledger: Option<BoundLedger>,
    pub ledger_error: Option<String>,
}

fn failed_conditions(m: &MembershipReport) -> Vec<String> {
    let mut failed = Vec::new();
    if let Some(a) = &m.conditions_a {
        let suffix = if a.gain_variant { " b" } else { "" };
        for (name, pass) in [
            ("A-i", a.points.iter().all(|p| p.a_i.pass)),
            ("A-ii", a.points.iter().all(|p| p.a_ii.pass)),
            ("A-iii", a.points.iter().all(|p| p.a_iii.pass)),
        ] {
            if !pass {
                failed.push(format!("{name}{suffix}"));
            }
        }
    }
    for (name, check) in [("B-i", m.b_i), ("B-ii", m.b_ii), ("B-iii", m.b_iii)] {
        if !check.pass {
            failed.push(name.to_string());
        }
    }
    failed
}

pub fn verify(setup: &Setup) -> Result<VerifyReport> {
    let s = &setup.scenario;
    let membership = check_membership(&s.plant, &s.unmodeled, s.cfg.theta_max, s.cfg.epsilon0, s.cfg.c, &setup.q)?;
    let (ledger, ledger_error) = match ledger_for(setup) {
        Ok(l) => (Some(l), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(VerifyReport {
        scenario: setup.name.clone(),
        verdict: membership.verdict,
        failed: failed_conditions(&membership),
        theta_bar_star: membership.theta_bar_star,
        xi0: s.cfg.xi0,
        xi0_max: membership.xi0_max,
        membership,
        ledger,
        ledger_error,
    })
}

pub fn verify_status(report: &VerifyReport) -> Status {
    if report.verdict {
        Status::Ok
    } else {
        Status::VerdictFailed
    }
}

/// Simulation result that tolerates divergence.
pub struct Run {
    pub trace: SimTrace,
    pub divergence_time: Option<f64>,
    pub seconds: f64,
}

pub fn run(setup: &Setup) -> Result<Run> {
    let start = Instant::now();
    let (trace, divergence_time) = match simulate(&setup.scenario) {
        Ok(tr) => (tr, None),
        Err(SimError::Diverged(d)) => (d.trace, Some(d.time)),
        Err(SimError::Invalid(e)) => return Err(e.into()),
    };
    Ok(Run { trace, divergence_time, seconds: start.elapsed().as_secs_f64() })
}

/// Divergence with projection active contradicts the boundedness result.
pub fn run_status(setup: &Setup, run: &Run) -> Status {
    if run.divergence_time.is_some() && setup.scenario.projection_enabled {
        Status::UnexpectedDivergence
    } else {
        Status::Ok
    }
}

#[derive(Debug, Serialize)]
pub struct SimulateSummary {
    pub scenario: String,
    pub projection_enabled: bool,
    pub t_end: f64,
    pub dt: f64,
    pub samples: usize,
    pub max_abs_e: f64,
    pub max_abs_theta: f64,
    pub clamp_events: u64,
    pub final_region: Option<ThetaRegion>,
    pub diverged: bool,
    pub divergence_time: Option<f64>,
    pub runtime_s: f64,
}

pub fn simulate_summary(setup: &Setup, run: &Run) -> SimulateSummary {
    let s = &setup.scenario;
    SimulateSummary {
        scenario: setup.name.clone(),
        projection_enabled: s.projection_enabled,
        t_end: s.t_end,
        dt: s.dt,
        samples: run.trace.len(),
        max_abs_e: run.trace.stats.max_abs_e,
        max_abs_theta: run.trace.stats.max_abs_theta,
        clamp_events: run.trace.stats.clamp_events,
        final_region: run.trace.final_region(),
        diverged: run.divergence_time.is_some(),
        divergence_time: run.divergence_time,
        runtime_s: run.seconds,
    }
}

pub fn write_trace(trace: &SimTrace, path: &Path) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    trace.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_trace(path: &Path) -> Result<SimTrace> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(SimTrace::read_csv(BufReader::new(file))?)
}

#[derive(Debug, Serialize)]
pub struct PhasesReport {
    pub scenario: String,
    pub diverged: bool,
    pub divergence_time: Option<f64>,
    pub steady_state: SteadyState,
    pub limit_cycle: Option<LimitCycle>,
    pub timeline: PhaseTimeline,
}

pub fn phases(setup: &Setup, trace: &SimTrace, divergence_time: Option<f64>) -> Result<PhasesReport> {
    let ledger = ledger_for(setup).context("building the error-bound ledger")?;
    let timeline = detect_phases(trace, &ledger, &setup.scenario.cfg)?;
    let limit_cycle = detect_limit_cycle(&timeline);
    Ok(PhasesReport {
        scenario: setup.name.clone(),
        diverged: divergence_time.is_some(),
        divergence_time,
        steady_state: classify_steady_state(&timeline, limit_cycle.as_ref()),
        limit_cycle,
        timeline,
    })
}

/// `t,e,theta,region_code` for external plotting.
pub fn write_plot_csv(trace: &SimTrace, path: &Path) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "t,e,theta,region_code")?;
    for i in 0..trace.len() {
        writeln!(w, "{:?},{:?},{:?},{}", trace.t[i], trace.e[i], trace.theta[i], trace.region[i].code())?;
    }
    w.flush()?;
    Ok(())
}

/// One parameter axis of a sweep, e.g. `gamma=0.1,1,10`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamAxis {
    pub name: String,
    pub values: Vec<f64>,
}

pub const SWEEP_PARAMS: [&str; 6] = ["gamma", "theta_max", "epsilon0", "xi0", "dt", "t_end"];

pub fn parse_param_axis(text: &str) -> Result<ParamAxis> {
    let Some((name, values)) = text.split_once('=') else {
        bail!("parameter grid `{text}` must look like name=v1,v2,...");
    };
    let name = name.trim();
    if !SWEEP_PARAMS.contains(&name) {
        bail!("unknown sweep parameter `{name}` (expected one of {})", SWEEP_PARAMS.join(", "));
    }
    let values = parse_numbers(values)?;
    if values.is_empty() {
        bail!("parameter grid `{text}` has no values");
    }
    Ok(ParamAxis { name: name.to_string(), values })
}

fn parse_numbers(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .filter(|v| !v.trim().is_empty())
        .map(|v| v.trim().parse::<f64>().with_context(|| format!("`{v}` is not a number")))
        .collect()
}

/// `x_p0,theta0;x_p0,theta0;...`
pub fn parse_ic_grid(text: &str) -> Result<Vec<(f64, f64)>> {
    text.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|pair| match parse_numbers(pair)?.as_slice() {
            [x, t] => Ok((*x, *t)),
            _ => bail!("initial condition `{pair}` must be `x_p0,theta0`"),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub index: usize,
    pub x_p0: f64,
    pub theta0: f64,
    pub params: Vec<(String, f64)>,
}

#[derive(Debug, Serialize)]
pub struct SweepResult {
    #[serde(flatten)]
    pub point: SweepPoint,
    pub error: Option<String>,
    pub diverged: bool,
    pub divergence_time: Option<f64>,
    pub max_abs_e: Option<f64>,
    pub max_abs_theta: Option<f64>,
    pub final_region: Option<ThetaRegion>,
    pub steady_state: Option<SteadyState>,
    pub boundary_entries: Option<usize>,
    pub limit_cycle_period: Option<f64>,
}

pub fn sweep_points(ics: &[(f64, f64)], axes: &[ParamAxis]) -> Vec<SweepPoint> {
    let mut combos: Vec<Vec<(String, f64)>> = vec![Vec::new()];
    for axis in axes {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                axis.values.iter().map(move |&v| {
                    let mut c = c.clone();
                    c.push((axis.name.clone(), v));
                    c
                })
            })
            .collect();
    }
    let mut points = Vec::new();
    for &(x_p0, theta0) in ics {
        for params in &combos {
            points.push(SweepPoint { index: points.len(), x_p0, theta0, params: params.clone() });
        }
    }
    points
}

fn point_setup(base: &Setup, point: &SweepPoint) -> Result<Setup> {
    let mut setup = base.clone();
    let s = &mut setup.scenario;
    s.x_p0 = point.x_p0;
    s.theta0 = point.theta0;
    let mut cfg = s.cfg;
    for (name, v) in &point.params {
        match name.as_str() {
            "gamma" => cfg.gamma = *v,
            "theta_max" => cfg.theta_max = *v,
            "epsilon0" => cfg.epsilon0 = *v,
            "xi0" => cfg.xi0 = *v,
            "dt" => s.dt = *v,
            "t_end" => s.t_end = *v,
            other => bail!("unknown sweep parameter `{other}`"),
        }
    }
    s.cfg = mrac_core::ProjectionConfig::new(cfg.theta_max, cfg.epsilon0, cfg.xi0, cfg.gamma)?;
    s.validate()?;
    Ok(setup)
}

fn sweep_one(base: &Setup, point: &SweepPoint) -> SweepResult {
    let mut result = SweepResult {
        point: point.clone(),
        error: None,
        diverged: false,
        divergence_time: None,
        max_abs_e: None,
        max_abs_theta: None,
        final_region: None,
        steady_state: None,
        boundary_entries: None,
        limit_cycle_period: None,
    };
    let outcome = point_setup(base, point).and_then(|setup| {
        let run = run(&setup)?;
        let report = phases(&setup, &run.trace, run.divergence_time)?;
        Ok((run, report))
    });
    match outcome {
        Ok((run, report)) => {
            result.diverged = run.divergence_time.is_some();
            result.divergence_time = run.divergence_time;
            result.max_abs_e = Some(run.trace.stats.max_abs_e);
            result.max_abs_theta = Some(run.trace.stats.max_abs_theta);
            result.final_region = report.timeline.final_region;
            result.steady_state = Some(report.steady_state);
            result.boundary_entries = Some(report.timeline.events_of(mrac_core::phases::EventKind::EnterB).count());
            result.limit_cycle_period = report.limit_cycle.map(|c| c.period);
        }
        Err(e) => result.error = Some(format!("{e:#}")),
    }
    result
}

/// Thread count from `ROBUST_MRAC_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var("ROBUST_MRAC_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => bail!("ROBUST_MRAC_THREADS must be a positive integer, got `{v}`"),
        },
        Err(_) => Ok(None),
    }
}

/// Runs every point concurrently; results keep the point order.
pub fn sweep(base: &Setup, points: &[SweepPoint], threads: Option<usize>) -> Result<Vec<SweepResult>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build()?;
    Ok(pool.install(|| points.par_iter().map(|p| sweep_one(base, p)).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ic_grid_parses_negative_pairs() {
        assert_eq!(parse_ic_grid("0,-16; -2,-15.5;").unwrap(), vec![(0.0, -16.0), (-2.0, -15.5)]);
        assert!(parse_ic_grid("1,2,3").is_err());
    }

    #[test]
    fn param_axis_rejects_unknown_names() {
        let axis = parse_param_axis("gamma=0.1, 1,10").unwrap();
        assert_eq!(axis.values, vec![0.1, 1.0, 10.0]);
        assert!(parse_param_axis("beta=1").is_err());
        assert!(parse_param_axis("gamma").is_err());
    }

    #[test]
    fn sweep_points_form_a_product() {
        let axes = [
            ParamAxis { name: "gamma".into(), values: vec![1.0, 2.0] },
            ParamAxis { name: "dt".into(), values: vec![1e-3, 1e-4, 1e-5] },
        ];
        let pts = sweep_points(&[(0.0, 0.0), (1.0, -1.0)], &axes);
        assert_eq!(pts.len(), 12);
        assert_eq!(pts[11].index, 11);
        assert_eq!(pts[11].x_p0, 1.0);
        assert_eq!(pts[11].params, vec![("gamma".to_string(), 2.0), ("dt".to_string(), 1e-5)]);
    }
}
