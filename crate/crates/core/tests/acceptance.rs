//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

mod common;

use std::fmt::Write as _;

use common::{abscissa, companion, random_hurwitz, random_spd, random_unmodeled, rel_close};
use mrac_core::lti::{
    characteristic_polynomial, closed_loop_qc, lyapunov_residual, lyapunov_solve, roots_in_lhp, Matrix, Polynomial,
};
use mrac_core::phases::{detect_limit_cycle, detect_phases, EventKind, PhaseTimeline};
use mrac_core::plant::PlantSpec;
use mrac_core::presets::{rohrs_plant, rohrs_unmodeled, Preset, ROHRS_OMEGA_N, ROHRS_ZETA};
use mrac_core::projection::{proj, region_of, ProjectionConfig, ThetaRegion};
use mrac_core::simulator::{simulate, simulate_fixed_theta, ReferenceSignal, Scenario, SimError, SimTrace};
use mrac_core::synthesis::{
    build_abar_at, check_conditions_a, check_membership, scenario_ledger, theta_bar_star, xi0_upper_bound,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(id: u32, name: &'static str, pass: bool, detail: String) -> Outcome {
    Outcome { id, name, pass, detail }
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn within_pct(value: f64, target: f64, pct: f64) -> bool {
    (value - target).abs() <= pct * target.abs()
}

fn q3() -> Matrix {
    Matrix::identity(3)
}

fn timeline(s: &Scenario, trace: &SimTrace) -> PhaseTimeline {
    let ledger = scenario_ledger(s, None, None, &q3()).expect("ledger");
    detect_phases(trace, &ledger, &s.cfg).expect("phases")
}

fn c1_theta_bar_star() -> Outcome {
    let v = theta_bar_star(ROHRS_ZETA, ROHRS_OMEGA_N, -1.0);
    outcome(1, "window width", within(v, 35.06, 0.01), format!("theta_bar_star = {v:.5}, target 35.06 +/- 0.01"))
}

fn c2_closed_loop_poly() -> Outcome {
    let tf = rohrs_unmodeled().transfer_function();
    let plant = rohrs_plant();
    let qc = closed_loop_qc(tf.den(), tf.num(), plant.a_p, plant.k_p, 16.7);
    let target = [1.0, 31.0, 259.0, 229.0 + 458.0 * 16.7];
    let ok = qc.coeffs().len() == 4 && qc.coeffs().iter().zip(target).all(|(a, b)| within(*a, b, 0.5));
    outcome(2, "closed-loop polynomial", ok, format!("q_c = {qc}, target s^3 + 31s^2 + 259s + 7877.6 (+/- 0.5 each)"))
}

fn c3_xi0_pipeline() -> Outcome {
    let literal = xi0_upper_bound(1.0, 47773.6, 229.0);
    let cfg = Preset::RohrsMain.scenario().unwrap().cfg;
    let report = check_membership(&rohrs_plant(), &rohrs_unmodeled(), 16.7, cfg.epsilon0, cfg.c, &q3()).unwrap();
    let own = report.xi0_max.unwrap_or(f64::NAN);
    let ok = within(literal, 4.57e-8, 1e-10) && own > 0.0 && report.verdict;
    outcome(
        3,
        "xi0 pipeline",
        ok,
        format!(
            "from reference inputs {literal:.4e} (target 4.57e-8 +/- 1e-10); self-computed lambda_Pmax = {:.1}, k = {:.3}, xi0_max = {own:.4e}, verdict {}",
            report.lambda_p_max.unwrap_or(f64::NAN),
            report.k,
            report.verdict
        ),
    )
}

fn c4_stability_window() -> Outcome {
    let plant = rohrs_plant();
    let good = check_conditions_a(ROHRS_ZETA, ROHRS_OMEGA_N, &plant, 16.7);
    let bad = check_conditions_a(ROHRS_ZETA, ROHRS_OMEGA_N, &plant, 17.2);
    let edge = good.points[0].theta_max_upper;
    let ok = good.all_pass && !bad.all_pass && !bad.points[0].a_iii.pass && within(edge, 17.03, 0.02);
    outcome(
        4,
        "stability window",
        ok,
        format!("16.7 passes: {}, 17.2 passes: {}, window edge {edge:.4} (target 17.03 +/- 0.02)", good.all_pass, bad.all_pass),
    )
}

fn c5_unprotected(result: &Result<SimTrace, SimError>, t_end: f64) -> Outcome {
    let (ok, detail) = match result {
        Err(SimError::Diverged(d)) => (d.time < t_end, format!("blowup at t = {:.3} s (horizon {t_end} s)", d.time)),
        Err(e) => (false, format!("unexpected error: {e}")),
        Ok(tr) => (false, format!("no divergence, max |e| = {:.3}", tr.stats.max_abs_e)),
    };
    outcome(5, "divergence without projection", ok, detail)
}

fn c6_main(s: &Scenario, result: &Result<SimTrace, SimError>) -> (Outcome, Option<f64>) {
    let tr = match result {
        Ok(tr) => tr,
        Err(e) => return (outcome(6, "bounded with projection", false, format!("simulation failed: {e}")), None),
    };
    let tl = timeline(s, tr);
    let entries: Vec<f64> = tl.events_of(EventKind::EnterB).map(|e| e.time).collect();
    let exits = tl.events_of(EventKind::ExitBToA).count();
    let finite = tr.x_p.iter().chain(&tr.e).chain(&tr.theta).all(|v| v.is_finite());
    let theta_ok = tr.stats.max_abs_theta <= 16.7 + 1e-3;
    let ends_in_b = tl.final_region.is_some_and(|r| r.is_lower_boundary());
    let ok = finite && theta_ok && entries.len() == 1 && exits == 0 && ends_in_b && entries[0] > 0.0 && entries[0] < s.t_end;
    let detail = format!(
        "max |theta| = {:.9}, boundary entries at {:?} s (calibration target 1377.5 s), exits to A: {exits}, final region {:?}, max |e| = {:.3}",
        tr.stats.max_abs_theta,
        entries,
        tl.final_region,
        tr.stats.max_abs_e
    );
    (outcome(6, "bounded with projection", ok, detail), Some(tr.stats.max_abs_e))
}

fn c7_case_i(s: &Scenario, tr: &SimTrace) -> Outcome {
    let tl = timeline(s, tr);
    let in_b = tl.time_by_region.b_u + tl.time_by_region.b_l;
    let ok = tr.stats.max_abs_e < 1.0 && tl.events_of(EventKind::EnterB).next().is_none() && in_b == 0.0;
    outcome(7, "sinusoid at 8 rad/s", ok, format!("max |e| = {:.4} (< 1), time in lower boundary {in_b} s", tr.stats.max_abs_e))
}

fn c8_case_iii(s: &Scenario, tr: &SimTrace) -> Outcome {
    let tl = timeline(s, tr);
    let cycle = detect_limit_cycle(&tl);
    let first_entry = tl.events_of(EventKind::EnterB).next().map(|e| e.time);
    let first_exit = tl.events_of(EventKind::ExitBToA).next().map(|e| e.time);
    let reentry = first_exit.and_then(|t| tl.events_of(EventKind::EnterB).find(|e| e.time > t).map(|e| e.time));
    let times_ok = first_entry.is_some_and(|t| within_pct(t, 1.80, 0.25))
        && first_exit.is_some_and(|t| within_pct(t, 9.82, 0.25))
        && reentry.is_some_and(|t| within_pct(t, 9.84, 0.25));
    let ok = cycle.is_some() && times_ok;
    let detail = format!(
        "cycle period {:?} s over {} recurrences; first entry {first_entry:?} (1.80), first exit {first_exit:?} (9.82), re-entry {reentry:?} (9.84), +/- 25%",
        cycle.as_ref().map(|c| c.period),
        cycle.as_ref().map_or(0, |c| c.recurrences)
    );
    outcome(8, "constant reference limit cycle", ok, detail)
}

fn random_scenario(rng: &mut ChaCha8Rng) -> Scenario {
    let a_bar = rng.gen_range(0.2..3.0);
    let a_p = rng.gen_range(-a_bar..=a_bar);
    let k_p = rng.gen_range(0.5..3.0);
    let plant = PlantSpec::gain_matched(a_p, a_bar, k_p, rng.gen_range(-5.0..-0.5), rng.gen_range(0.5..4.0)).unwrap();
    let theta_max = rng.gen_range(1.0..20.0);
    let epsilon0 = 0.1 * theta_max;
    let cfg = ProjectionConfig::with_ratio(theta_max, epsilon0, rng.gen_range(0.05..0.95), rng.gen_range(0.1..10.0)).unwrap();
    let signal = match rng.gen_range(0..3) {
        0 => ReferenceSignal::Constant { value: rng.gen_range(-10.0..10.0) },
        1 => ReferenceSignal::BiasedSine {
            offset: rng.gen_range(-1.0..1.0),
            amplitude: rng.gen_range(0.0..5.0),
            frequency: rng.gen_range(0.5..20.0),
        },
        _ => ReferenceSignal::Pulse { level: rng.gen_range(-12.0..12.0), duration: rng.gen_range(0.1..3.0) },
    };
    let mut s = Scenario::new(plant, random_unmodeled(rng), cfg, signal);
    s.theta0 = rng.gen_range(-theta_max..=theta_max);
    s.x_p0 = rng.gen_range(-2.0..2.0);
    s.t_end = 10.0;
    s.dt = 1e-3;
    s.stride = 100;
    s.clamp_theta = false;
    s
}

fn c9_parameter_bound_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0;
    let mut diverged = 0;
    for _ in 0..100 {
        let s = random_scenario(&mut rng);
        let stats = match simulate(&s) {
            Ok(tr) => tr.stats,
            Err(SimError::Diverged(d)) => {
                diverged += 1;
                d.trace.stats
            }
            Err(e) => panic!("invalid random scenario: {e}"),
        };
        let bound = s.cfg.theta_max + 10.0 * s.cfg.gamma * s.dt * stats.max_abs_e_x_p;
        worst = worst.max(stats.max_abs_theta - s.cfg.theta_max);
        if stats.max_abs_theta > bound {
            violations += 1;
        }
    }
    outcome(
        9,
        "parameter bound on random loops",
        violations == 0,
        format!("100 runs (clamp off, {diverged} hit the state blowup limit), {violations} violations, worst overshoot {worst:.3e}"),
    )
}

fn random_poly(rng: &mut ChaCha8Rng, degree: usize) -> Polynomial {
    // Mix of root-built (mostly stable) and raw-coefficient polynomials.
    if rng.gen_bool(0.5) {
        let mut p = Polynomial::constant(1.0);
        let mut k = 0;
        while k < degree {
            if degree - k >= 2 && rng.gen_bool(0.5) {
                let re = rng.gen_range(-5.0..1.0);
                let im = rng.gen_range(0.1..10.0);
                p = p.mul(&Polynomial::new(vec![1.0, -2.0 * re, re * re + im * im]).unwrap());
                k += 2;
            } else {
                p = p.mul(&Polynomial::monomial_root(rng.gen_range(-8.0..1.0)));
                k += 1;
            }
        }
        p
    } else {
        let mut c = vec![1.0];
        c.extend((0..degree).map(|_| rng.gen_range(-2.0..40.0)));
        Polynomial::new(c).unwrap()
    }
}

fn c10_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut routh_mismatch = 0;
    let mut ambiguous = 0;
    for i in 0..1000 {
        let p = random_poly(&mut rng, 3 + i % 2);
        let eig = abscissa(&companion(&p));
        if eig.abs() < 1e-7 {
            ambiguous += 1;
            continue;
        }
        let routh = roots_in_lhp(&p).unwrap().hurwitz;
        let cubic = if p.degree() == 3 {
            let c = p.coeffs();
            mrac_core::lti::cubic_hurwitz(c[1], c[2], c[3])
        } else {
            routh
        };
        if routh != (eig < 0.0) || cubic != routh {
            routh_mismatch += 1;
        }
    }

    let mut worst_residual = 0.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(1..7);
        let a = random_hurwitz(&mut rng, n, 0.1);
        let q = random_spd(&mut rng, n);
        let p = lyapunov_solve(&a, &q).unwrap();
        worst_residual = worst_residual.max(lyapunov_residual(&a, &p, &q) / q.frobenius_norm());
    }

    let abar = build_abar_at(-1.0, 2.0, &rohrs_unmodeled(), 16.7);
    let rohrs_residual = lyapunov_residual(&abar, &lyapunov_solve(&abar, &q3()).unwrap(), &q3()) / q3().frobenius_norm();
    worst_residual = worst_residual.max(rohrs_residual);

    let mut charpoly_mismatch = 0;
    for _ in 0..200 {
        let g = random_unmodeled(&mut rng);
        let a_p = rng.gen_range(-3.0..3.0);
        let k_p = rng.gen_range(0.2..4.0) * if rng.gen_bool(0.2) { -1.0 } else { 1.0 };
        let theta = rng.gen_range(0.0..20.0);
        let tf = g.transfer_function();
        let qc = closed_loop_qc(tf.den(), tf.num(), a_p, k_p, theta);
        let cp = characteristic_polynomial(&build_abar_at(a_p, k_p, &g, theta));
        let same = qc.degree() == cp.degree()
            && qc.coeffs().iter().zip(cp.coeffs()).all(|(a, b)| rel_close(*a, *b, 1e-9));
        if !same {
            charpoly_mismatch += 1;
        }
    }

    let ok = routh_mismatch == 0 && worst_residual <= 1e-10 && charpoly_mismatch == 0;
    outcome(
        10,
        "oracle equivalence",
        ok,
        format!(
            "Routh vs eigenvalues: {routh_mismatch} mismatches in {} decided cases; worst Lyapunov residual/|Q| = {worst_residual:.2e} (example loop {rohrs_residual:.2e}); char-poly mismatches {charpoly_mismatch}/200",
            1000 - ambiguous
        ),
    )
}

fn c11_projection_floor() -> Outcome {
    let configs = [Preset::RohrsMain.scenario().unwrap().cfg, ProjectionConfig::new(2.0, 1.0, 0.5, 1.0).unwrap()];
    let mut checked = 0;
    let mut violations = 0;
    for cfg in configs {
        let lo = cfg.lower_strip_edge();
        let hi = -cfg.theta_max_prime;
        for i in 0..=2000 {
            let theta = lo + (hi - lo) * i as f64 / 2001.0;
            if region_of(theta, &cfg) != ThetaRegion::BU {
                continue;
            }
            for y in [-100.0, -1.0, -1e-3, 1e-3, 1.0, 100.0] {
                checked += 1;
                if !(proj(theta, y, &cfg).unwrap().abs() > cfg.c * y.abs()) {
                    violations += 1;
                }
            }
        }
    }
    outcome(11, "projection lower bound", violations == 0, format!("{checked} grid points, {violations} violations"))
}

fn c12_bound_check(runs: &[(String, Scenario, f64)]) -> Outcome {
    let mut text = String::new();
    let mut ok = true;
    for (name, s, max_e) in runs {
        let report = check_membership(&s.plant, &s.unmodeled, s.cfg.theta_max, s.cfg.epsilon0, s.cfg.c, &q3()).unwrap();
        if !report.verdict {
            continue;
        }
        let ledger = scenario_ledger(s, None, None, &q3()).unwrap();
        let pass = *max_e <= ledger.theorem_bound;
        ok &= pass;
        let _ = write!(text, "{name}: {max_e:.3} <= {:.3e}{}; ", ledger.theorem_bound, if pass { "" } else { " VIOLATED" });
    }
    outcome(12, "error bound on bounded runs", ok, text.trim_end_matches("; ").to_string())
}

fn c13_rk4_order() -> Outcome {
    let mut s = Preset::RohrsMain.scenario().unwrap();
    s.t_end = 2.0;
    s.stride = 1;
    let terminal = |dt: f64| {
        let mut s = s.clone();
        s.dt = dt;
        let tr = simulate_fixed_theta(&s, -16.7).unwrap();
        let i = tr.len() - 1;
        [tr.x_p[i], tr.x_m[i], tr.v[i]]
    };
    let h = 0.01;
    let reference = terminal(h / 8.0);
    let err = |x: [f64; 3]| x.iter().zip(&reference).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let (e1, e2) = (err(terminal(h)), err(terminal(h / 2.0)));
    let ratio = e1 / e2;
    outcome(13, "RK4 order", (12.0..=20.0).contains(&ratio), format!("error ratio {ratio:.3} (errors {e1:.3e}, {e2:.3e})"))
}

fn main() {
    let main = Preset::RohrsMain.scenario().unwrap();
    let unprotected = Preset::RohrsUnprotected.scenario().unwrap();
    let case_i = Preset::RohrsI.scenario().unwrap();
    let case_ii = Preset::RohrsII.scenario().unwrap();
    let case_iii = Preset::RohrsIII.scenario().unwrap();
    let case_iv: Vec<Scenario> = Preset::RohrsIV
        .initial_conditions()
        .into_iter()
        .map(|(x_p0, theta0)| {
            let mut s = Preset::RohrsIV.scenario().unwrap();
            s.x_p0 = x_p0;
            s.theta0 = theta0;
            s
        })
        .collect();

    let (main_run, unprotected_run, short_runs, iv_runs) = std::thread::scope(|scope| {
        let m = scope.spawn(|| simulate(&main));
        let u = scope.spawn(|| simulate(&unprotected));
        let short = scope.spawn(|| [&case_i, &case_ii, &case_iii].map(|s| simulate(s).unwrap()));
        let iv = scope.spawn(|| case_iv.iter().map(|s| simulate(s).unwrap()).collect::<Vec<_>>());
        (m.join().unwrap(), u.join().unwrap(), short.join().unwrap(), iv.join().unwrap())
    });
    let [tr_i, tr_ii, tr_iii] = short_runs;

    let (c6, main_max_e) = c6_main(&main, &main_run);
    let mut bounded = vec![
        ("rohrs_i".to_string(), case_i.clone(), tr_i.stats.max_abs_e),
        ("rohrs_ii".to_string(), case_ii.clone(), tr_ii.stats.max_abs_e),
        ("rohrs_iii".to_string(), case_iii.clone(), tr_iii.stats.max_abs_e),
    ];
    if let Some(e) = main_max_e {
        bounded.insert(0, ("rohrs_main".to_string(), main.clone(), e));
    }
    for (k, (s, tr)) in case_iv.iter().zip(&iv_runs).enumerate() {
        bounded.push((format!("rohrs_iv#{}", k + 1), s.clone(), tr.stats.max_abs_e));
    }

    let results = vec![
        c1_theta_bar_star(),
        c2_closed_loop_poly(),
        c3_xi0_pipeline(),
        c4_stability_window(),
        c5_unprotected(&unprotected_run, unprotected.t_end),
        c6,
        c7_case_i(&case_i, &tr_i),
        c8_case_iii(&case_iii, &tr_iii),
        c9_parameter_bound_suite(),
        c10_oracles(),
        c11_projection_floor(),
        c12_bound_check(&bounded),
        c13_rk4_order(),
    ];

    for r in &results {
        println!("criterion {:>2} {:<34} {}  {}", r.id, r.name, if r.pass { "PASS" } else { "FAIL" }, r.detail);
    }
    let failed: Vec<u32> = results.iter().filter(|r| !r.pass).map(|r| r.id).collect();
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("all {} criteria passed", results.len());
}
