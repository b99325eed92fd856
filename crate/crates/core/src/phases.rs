//! Post-hoc analysis of a simulated trajectory: where `θ` sits on the
//! parameter axis over time, the boundary-region events, the phase labels
//! built from them, and checks of the error bounds along the way.
//!
//! Only the lower boundary region `B_U ∪ B_L` takes part in the event
//! grammar; time spent in `B_UPPER` is reported but raises no events.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{MracError, Result};
use crate::projection::{region_of, ProjectionConfig, ThetaRegion};
use crate::simulator::SimTrace;
use crate::synthesis::BoundLedger;

/// Maximal stretch of consecutive samples in one region. Boundaries are
/// interpolated linearly between samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionRun {
    pub region: ThetaRegion,
    pub t_start: f64,
    pub t_end: f64,
    pub max_abs_e: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionTimeline {
    pub runs: Vec<RegionRun>,
}

impl RegionTimeline {
    pub fn total_time(&self, region: ThetaRegion) -> f64 {
        self.runs.iter().filter(|r| r.region == region).fold(0.0, |acc, r| acc + (r.t_end - r.t_start))
    }
}

/// Position on the parameter axis, ordered from `−∞` to `+∞`.
fn axis_slot(theta: f64, cfg: &ProjectionConfig) -> i32 {
    match region_of(theta, cfg) {
        ThetaRegion::Outside if theta < 0.0 => -1,
        ThetaRegion::BL => 0,
        ThetaRegion::BU => 1,
        ThetaRegion::A => 2,
        ThetaRegion::BUpper => 3,
        ThetaRegion::Outside => 4,
    }
}

fn slot_region(slot: i32) -> ThetaRegion {
    match slot {
        0 => ThetaRegion::BL,
        1 => ThetaRegion::BU,
        2 => ThetaRegion::A,
        3 => ThetaRegion::BUpper,
        _ => ThetaRegion::Outside,
    }
}

/// `θ` value separating slot `k` from slot `k + 1`.
fn slot_boundary(k: i32, cfg: &ProjectionConfig) -> f64 {
    match k {
        -1 => -cfg.theta_max,
        0 => cfg.lower_strip_edge(),
        1 => -cfg.theta_max_prime,
        2 => cfg.theta_max_prime,
        _ => cfg.theta_max,
    }
}

/// One region crossing: time, error and parameter at the crossing, and the
/// regions on either side.
#[derive(Debug, Clone, Copy)]
struct Crossing {
    t: f64,
    e: f64,
    theta: f64,
    from: ThetaRegion,
    to: ThetaRegion,
}

fn lerp(a: f64, b: f64, s: f64) -> f64 {
    a + (b - a) * s
}

fn walk_regions(trace: &SimTrace, cfg: &ProjectionConfig) -> (Vec<RegionRun>, Vec<Crossing>) {
    let mut runs = Vec::new();
    let mut crossings = Vec::new();
    if trace.is_empty() {
        return (runs, crossings);
    }
    let mut slot = axis_slot(trace.theta[0], cfg);
    let mut run = RegionRun { region: slot_region(slot), t_start: trace.t[0], t_end: trace.t[0], max_abs_e: trace.e[0].abs() };
    for i in 1..trace.len() {
        let next = axis_slot(trace.theta[i], cfg);
        if next != slot {
            let (th0, th1) = (trace.theta[i - 1], trace.theta[i]);
            let step = if next > slot { 1 } else { -1 };
            while slot != next {
                let boundary = slot_boundary(if step > 0 { slot } else { slot - 1 }, cfg);
                let s = if th1 != th0 { ((boundary - th0) / (th1 - th0)).clamp(0.0, 1.0) } else { 1.0 };
                let t = lerp(trace.t[i - 1], trace.t[i], s);
                let e = lerp(trace.e[i - 1], trace.e[i], s);
                run.t_end = t;
                run.max_abs_e = run.max_abs_e.max(e.abs());
                let from = run.region;
                slot += step;
                let to = slot_region(slot);
                runs.push(std::mem::replace(&mut run, RegionRun { region: to, t_start: t, t_end: t, max_abs_e: e.abs() }));
                crossings.push(Crossing { t, e, theta: boundary, from, to });
            }
        }
        run.t_end = trace.t[i];
        run.max_abs_e = run.max_abs_e.max(trace.e[i].abs());
    }
    runs.push(run);
    (runs, crossings)
}

/// Run-length encodes the region of `θ` along the trace.
pub fn classify_trace(trace: &SimTrace, cfg: &ProjectionConfig) -> RegionTimeline {
    RegionTimeline { runs: walk_regions(trace, cfg).0 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum EventKind {
    /// `|e|` rises through `ē − δ`.
    #[serde(rename = "E_THRESHOLD_HIT")]
    EThresholdHit,
    #[serde(rename = "ENTER_B")]
    EnterB,
    #[serde(rename = "ENTER_BL")]
    EnterBL,
    #[serde(rename = "EXIT_BL_TO_BU")]
    ExitBLToBU,
    #[serde(rename = "EXIT_B_TO_A")]
    ExitBToA,
    #[serde(rename = "REENTER_BL")]
    ReenterBL,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseEvent {
    pub kind: EventKind,
    #[serde(rename = "t")]
    pub time: f64,
    #[serde(rename = "e")]
    pub e_value: f64,
    #[serde(rename = "theta")]
    pub theta_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PhaseLabel {
    /// In `A`, never to enter the boundary region again.
    Nominal,
    /// Heading into the boundary region: `A` before an entry, or `B_U`
    /// before the first visit of `B_L`.
    I,
    /// In `B_L`.
    II,
    /// In `B_U` after a visit of `B_L`.
    III,
    UpperBoundary,
    Outside,
}

impl PhaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            PhaseLabel::Nominal => "Nominal",
            PhaseLabel::I => "I",
            PhaseLabel::II => "II",
            PhaseLabel::III => "III",
            PhaseLabel::UpperBoundary => "UpperBoundary",
            PhaseLabel::Outside => "Outside",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseInterval {
    pub label: PhaseLabel,
    pub t_start: f64,
    pub t_end: f64,
    pub max_abs_e: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The premise never occurred on this trace.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropositionCheck {
    pub name: &'static str,
    pub status: CheckStatus,
    pub checked: usize,
    pub violations: usize,
    pub detail: String,
}

impl PropositionCheck {
    fn tally(name: &'static str, checked: usize, violations: usize, detail: String) -> Self {
        let status = if checked == 0 {
            CheckStatus::Inconclusive
        } else if violations == 0 {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        PropositionCheck { name, status, checked, violations, detail }
    }
}

/// Repeat counts: returns to phase I after an exit to `A`, and returns to
/// phase II from `B_U`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Repeats {
    pub phase_i_returns: usize,
    pub phase_ii_returns: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionTimes {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B_UPPER")]
    pub b_upper: f64,
    #[serde(rename = "B_U")]
    pub b_u: f64,
    #[serde(rename = "B_L")]
    pub b_l: f64,
    #[serde(rename = "OUTSIDE")]
    pub outside: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseTimeline {
    pub events: Vec<PhaseEvent>,
    pub phases: Vec<PhaseInterval>,
    pub checks: Vec<PropositionCheck>,
    pub repeats: Repeats,
    pub max_abs_e_by_phase: BTreeMap<&'static str, f64>,
    pub time_by_region: RegionTimes,
    /// `|e| < ē − δ` over the whole trace.
    pub below_threshold: bool,
    pub final_region: Option<ThetaRegion>,
    pub max_abs_e: f64,
}

impl PhaseTimeline {
    pub fn events_of(&self, kind: EventKind) -> impl Iterator<Item = &PhaseEvent> + '_ {
        self.events.iter().filter(move |e| e.kind == kind)
    }

    pub fn check(&self, name: &str) -> Option<&PropositionCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn ensure_matches(ledger: &BoundLedger, cfg: &ProjectionConfig) -> Result<()> {
    let pairs = [
        ("theta_max", ledger.theta_max, cfg.theta_max),
        ("epsilon0", ledger.epsilon0, cfg.epsilon0),
        ("xi0", ledger.xi0, cfg.xi0),
        ("gamma", ledger.gamma, cfg.gamma),
    ];
    for (name, l, c) in pairs {
        if (l - c).abs() > 1e-12 * l.abs().max(c.abs()) {
            return Err(MracError::LedgerMismatch(format!("{name}: ledger has {l}, scenario has {c}")));
        }
    }
    Ok(())
}

/// Upward crossings of `|e|` through `level`.
fn threshold_hits(trace: &SimTrace, level: f64) -> Vec<PhaseEvent> {
    let mut hits = Vec::new();
    for i in 1..trace.len() {
        let (a0, a1) = (trace.e[i - 1].abs(), trace.e[i].abs());
        if a0 < level && a1 >= level {
            let s = (level - a0) / (a1 - a0);
            hits.push(PhaseEvent {
                kind: EventKind::EThresholdHit,
                time: lerp(trace.t[i - 1], trace.t[i], s),
                e_value: lerp(trace.e[i - 1], trace.e[i], s),
                theta_value: lerp(trace.theta[i - 1], trace.theta[i], s),
            });
        }
    }
    hits
}

/// Max of `|e|` over samples with `t` in `[lo, hi]` (or `(lo, hi]`).
fn window_max(trace: &SimTrace, lo: f64, hi: f64, open_left: bool) -> Option<f64> {
    let start = if open_left { trace.t.partition_point(|t| *t <= lo) } else { trace.t.partition_point(|t| *t < lo) };
    let end = trace.t.partition_point(|t| *t <= hi);
    (start < end).then(|| trace.e[start..end].iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

/// Builds the event list and phase labels of `trace`, and checks the error
/// bounds from `ledger` against it.
pub fn detect_phases(trace: &SimTrace, ledger: &BoundLedger, cfg: &ProjectionConfig) -> Result<PhaseTimeline> {
    ensure_matches(ledger, cfg)?;
    if trace.is_empty() {
        return Err(MracError::InvalidConfig("empty trace".into()));
    }
    let (runs, crossings) = walk_regions(trace, cfg);

    let mut events = Vec::new();
    let mut bl_visited = false;
    let mut repeats = Repeats::default();
    let mut entries = 0usize;
    if runs[0].region.is_lower_boundary() {
        entries += 1;
        bl_visited = runs[0].region == ThetaRegion::BL;
        events.push(PhaseEvent { kind: EventKind::EnterB, time: trace.t[0], e_value: trace.e[0], theta_value: trace.theta[0] });
    }
    for c in &crossings {
        let mut push = |kind| events.push(PhaseEvent { kind, time: c.t, e_value: c.e, theta_value: c.theta });
        match (c.from, c.to) {
            (from, to) if !from.is_lower_boundary() && to.is_lower_boundary() => {
                entries += 1;
                if entries > 1 {
                    repeats.phase_i_returns += 1;
                }
                // Only reachable from below −θ_max, i.e. without projection.
                bl_visited = to == ThetaRegion::BL;
                push(EventKind::EnterB);
            }
            (ThetaRegion::BU, ThetaRegion::BL) => {
                if bl_visited {
                    repeats.phase_ii_returns += 1;
                    push(EventKind::ReenterBL);
                } else {
                    bl_visited = true;
                    push(EventKind::EnterBL);
                }
            }
            (ThetaRegion::BL, ThetaRegion::BU) => push(EventKind::ExitBLToBU),
            (ThetaRegion::BU, ThetaRegion::A) => push(EventKind::ExitBToA),
            _ => {}
        }
    }

    let level = ledger.e_bar - ledger.delta;
    let hits = threshold_hits(trace, level);
    let below_threshold = hits.is_empty() && trace.e[0].abs() < level;
    events.extend(hits);
    events.sort_by(|a, b| a.time.total_cmp(&b.time));
    for i in 1..events.len() {
        let prev = events[i - 1].time;
        if events[i].time <= prev {
            events[i].time = prev + prev.abs().max(1.0) * f64::EPSILON;
        }
    }

    let phases = label_phases(&runs);
    let mut max_abs_e_by_phase = BTreeMap::new();
    for p in &phases {
        let slot = max_abs_e_by_phase.entry(p.label.as_str()).or_insert(0.0f64);
        *slot = slot.max(p.max_abs_e);
    }
    let timeline = RegionTimeline { runs };
    let time_by_region = RegionTimes {
        a: timeline.total_time(ThetaRegion::A),
        b_upper: timeline.total_time(ThetaRegion::BUpper),
        b_u: timeline.total_time(ThetaRegion::BU),
        b_l: timeline.total_time(ThetaRegion::BL),
        outside: timeline.total_time(ThetaRegion::Outside),
    };
    let max_abs_e = trace.stats.max_abs_e.max(trace.max_abs_e());
    let checks = proposition_checks(trace, &events, ledger, cfg, max_abs_e);

    Ok(PhaseTimeline {
        events,
        phases,
        checks,
        repeats,
        max_abs_e_by_phase,
        time_by_region,
        below_threshold,
        final_region: trace.final_region().map(|_| region_of(*trace.theta.last().unwrap(), cfg)),
        max_abs_e,
    })
}

fn label_phases(runs: &[RegionRun]) -> Vec<PhaseInterval> {
    let mut out: Vec<PhaseInterval> = Vec::new();
    let mut bl_visited = false;
    for (i, run) in runs.iter().enumerate() {
        let label = match run.region {
            ThetaRegion::A => {
                bl_visited = false;
                if runs[i + 1..].iter().any(|r| r.region.is_lower_boundary()) {
                    PhaseLabel::I
                } else {
                    PhaseLabel::Nominal
                }
            }
            ThetaRegion::BL => {
                bl_visited = true;
                PhaseLabel::II
            }
            ThetaRegion::BU if bl_visited => PhaseLabel::III,
            ThetaRegion::BU => PhaseLabel::I,
            ThetaRegion::BUpper => PhaseLabel::UpperBoundary,
            ThetaRegion::Outside => PhaseLabel::Outside,
        };
        match out.last_mut() {
            Some(last) if last.label == label => {
                last.t_end = run.t_end;
                last.max_abs_e = last.max_abs_e.max(run.max_abs_e);
            }
            _ => out.push(PhaseInterval { label, t_start: run.t_start, t_end: run.t_end, max_abs_e: run.max_abs_e }),
        }
    }
    out
}

fn proposition_checks(
    trace: &SimTrace,
    events: &[PhaseEvent],
    ledger: &BoundLedger,
    cfg: &ProjectionConfig,
    max_abs_e: f64,
) -> Vec<PropositionCheck> {
    let t_end = *trace.t.last().unwrap();
    let at = |t: f64| region_of(trace.theta[trace.t.partition_point(|s| *s < t).min(trace.len() - 1)], cfg);

    // The first pair of checks applies to threshold hits that start in A.
    let starts: Vec<&PhaseEvent> = events
        .iter()
        .filter(|e| e.kind == EventKind::EThresholdHit && at(e.time) == ThetaRegion::A)
        .filter(|e| e.time + ledger.delta_t <= t_end)
        .collect();
    let mut p1i = (0, 0, 0.0f64);
    let mut p1ii = (0, 0);
    for hit in &starts {
        if let Some(m) = window_max(trace, hit.time, hit.time + ledger.delta_t, false) {
            p1i.0 += 1;
            p1i.2 = p1i.2.max(m);
            if m > ledger.e_bar {
                p1i.1 += 1;
            }
        }
        p1ii.0 += 1;
        let reached = events
            .iter()
            .find(|e| e.time > hit.time && matches!(e.kind, EventKind::EnterBL | EventKind::ReenterBL))
            .map_or(false, |e| e.time - hit.time < ledger.delta_t);
        if !reached {
            p1ii.1 += 1;
        }
    }

    let exits_bl: Vec<&PhaseEvent> = events.iter().filter(|e| e.kind == EventKind::ExitBLToBU).collect();
    // A crossing is only known to lie between two samples; the claim holds if
    // it holds at either end of that bracket.
    let bracket_min = |t: f64| {
        let i = trace.t.partition_point(|s| *s < t).clamp(1, trace.len() - 1);
        trace.e[i - 1].abs().min(trace.e[i].abs())
    };
    let p2_viol = exits_bl.iter().filter(|e| bracket_min(e.time) > ledger.x_m_bar).count();

    let mut p3 = (0, 0);
    let mut last_td: Option<f64> = None;
    for ev in events {
        match ev.kind {
            EventKind::EnterB => last_td = None,
            EventKind::ExitBLToBU => last_td = Some(ev.time),
            EventKind::ExitBToA => {
                if let Some(td) = last_td {
                    p3.0 += 1;
                    if window_max(trace, td, ev.time, true).map_or(false, |m| m >= ledger.x_m_bar) {
                        p3.1 += 1;
                    }
                }
                last_td = None;
            }
            _ => {}
        }
    }

    // Within a B_U stay that starts at t_d, a rise of |e| to
    // ē₃ − δ at t_d' must be followed by B_L within ΔT'.
    let hits3 = threshold_hits(trace, ledger.e_bar3 - ledger.delta);
    let mut p4 = (0, 0);
    for (i, td) in events.iter().enumerate().filter(|(_, e)| e.kind == EventKind::ExitBLToBU) {
        let leave = events[i + 1..]
            .iter()
            .find(|e| matches!(e.kind, EventKind::ReenterBL | EventKind::ExitBToA | EventKind::EnterB));
        let stay_end = leave.map_or(t_end, |e| e.time);
        let Some(hit) = hits3.iter().find(|h| h.time > td.time && h.time < stay_end) else { continue };
        if hit.time + ledger.delta_t_prime > t_end {
            continue;
        }
        p4.0 += 1;
        let bounded =
            window_max(trace, hit.time, hit.time + ledger.delta_t_prime, false).map_or(true, |m| m <= ledger.e_bar3);
        let reached = leave.map_or(false, |e| e.kind == EventKind::ReenterBL && e.time - hit.time < ledger.delta_t_prime);
        if !(bounded && reached) {
            p4.1 += 1;
        }
    }

    vec![
        PropositionCheck::tally(
            "prop1_i",
            p1i.0,
            p1i.1,
            format!("max |e| on [t_a, t_a + Delta_T] = {:e}, bound e_bar = {:e}", p1i.2, ledger.e_bar),
        ),
        PropositionCheck::tally(
            "prop1_ii",
            p1ii.0,
            p1ii.1,
            format!("B_L reached within Delta_T = {:e} s of each threshold hit", ledger.delta_t),
        ),
        PropositionCheck::tally(
            "prop2",
            exits_bl.len(),
            p2_viol,
            format!("|e(t_d)| <= x_m_bar = {:e} at each B_L -> B_U exit (bracketing samples)", ledger.x_m_bar),
        ),
        PropositionCheck::tally("prop3", p3.0, p3.1, format!("|e| < x_m_bar = {:e} on (t_d, t_e]", ledger.x_m_bar)),
        PropositionCheck::tally(
            "prop4",
            p4.0,
            p4.1,
            format!("|e| <= e_bar3 = {:e} and B_L reached within Delta_T' = {:e} s", ledger.e_bar3, ledger.delta_t_prime),
        ),
        PropositionCheck::tally(
            "theorem_bound",
            1,
            usize::from(!(max_abs_e <= ledger.theorem_bound)),
            format!("max |e| = {:e} <= max(e_bar, e_bar2, e_bar3) = {:e}", max_abs_e, ledger.theorem_bound),
        ),
    ]
}

/// Crossing point shown in phase-plane plots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanePoint {
    pub t: f64,
    pub e: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitCycle {
    pub period: f64,
    /// Entry error value that recurs with the period.
    pub section_e: f64,
    /// Entries into the boundary region that land on the section.
    pub recurrences: usize,
    pub enter_points: Vec<PlanePoint>,
    pub exit_points: Vec<PlanePoint>,
}

/// Relative agreement required between recurrence intervals, and the
/// section tolerance as a fraction of the spread of entry errors.
pub const CYCLE_TOLERANCE: f64 = 0.05;

/// Looks for boundary-region entries that recur with a fixed period.
///
/// Entries are grouped by their error value (within 5% of the spread of all
/// entry errors). A group of at least three entries whose spacings agree
/// within 5% of their mean is a cycle; the first spacing is ignored as a
/// transient once three or more are available. The shortest such period
/// wins.
pub fn detect_limit_cycle(timeline: &PhaseTimeline) -> Option<LimitCycle> {
    let entries: Vec<&PhaseEvent> = timeline.events_of(EventKind::EnterB).collect();
    if entries.len() < 3 {
        return None;
    }
    let (lo, hi) = entries.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| (lo.min(e.e_value), hi.max(e.e_value)));
    let tol = CYCLE_TOLERANCE * (hi - lo);

    let mut best: Option<(f64, f64, usize)> = None;
    for candidate in &entries {
        let times: Vec<f64> =
            entries.iter().filter(|e| (e.e_value - candidate.e_value).abs() <= tol).map(|e| e.time).collect();
        if times.len() < 3 {
            continue;
        }
        let mut gaps: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
        if gaps.len() >= 3 {
            gaps.remove(0);
        }
        let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
        if mean > 0.0 && gaps.iter().all(|g| (g - mean).abs() <= CYCLE_TOLERANCE * mean) {
            if best.map_or(true, |(p, _, _)| mean < p) {
                best = Some((mean, candidate.e_value, times.len()));
            }
        }
    }
    let (period, section_e, recurrences) = best?;
    let point = |e: &PhaseEvent| PlanePoint { t: e.time, e: e.e_value, theta: e.theta_value };
    Some(LimitCycle {
        period,
        section_e,
        recurrences,
        enter_points: entries.iter().map(|e| point(e)).collect(),
        exit_points: timeline.events_of(EventKind::ExitBToA).map(point).collect(),
    })
}

/// Long-run behaviour of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SteadyState {
    /// Never left `A`.
    StayedInA,
    /// Visited the boundary region a finite number of times, ended in `A`.
    SettledInA,
    /// Ended in `B_U ∪ B_L` without a recurring pattern.
    SettledInB,
    LimitCycle,
    UpperBoundary,
    Outside,
}

pub fn classify_steady_state(timeline: &PhaseTimeline, cycle: Option<&LimitCycle>) -> SteadyState {
    if cycle.is_some() {
        return SteadyState::LimitCycle;
    }
    let entered = timeline.events_of(EventKind::EnterB).next().is_some();
    match timeline.final_region {
        Some(ThetaRegion::A) | None if !entered => SteadyState::StayedInA,
        Some(ThetaRegion::A) | None => SteadyState::SettledInA,
        Some(ThetaRegion::BU | ThetaRegion::BL) => SteadyState::SettledInB,
        Some(ThetaRegion::BUpper) => SteadyState::UpperBoundary,
        Some(ThetaRegion::Outside) => SteadyState::Outside,
    }
}

/// Checks the ordering rules of the event list; returns the first violation.
pub fn check_event_grammar(events: &[PhaseEvent]) -> std::result::Result<(), String> {
    let mut entered = false;
    let mut left_bl = false;
    let mut last_t = f64::NEG_INFINITY;
    for (i, ev) in events.iter().enumerate() {
        if ev.time <= last_t {
            return Err(format!("event {i} at t = {} does not follow t = {last_t}", ev.time));
        }
        last_t = ev.time;
        match ev.kind {
            EventKind::EnterB => {
                entered = true;
                left_bl = false;
            }
            EventKind::EnterBL | EventKind::ReenterBL if !entered => {
                return Err(format!("event {i}: {:?} before any ENTER_B", ev.kind));
            }
            EventKind::ExitBLToBU => left_bl = true,
            EventKind::ExitBToA => {
                if !entered && !left_bl {
                    return Err(format!("event {i}: EXIT_B_TO_A without a preceding entry"));
                }
                entered = false;
                left_bl = false;
            }
            _ => {}
        }
    }
    Ok(())
}
