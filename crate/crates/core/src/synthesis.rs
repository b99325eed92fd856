//! Selection and verification of the projection parameters.
//!
//! Three layers:
//!
//! * closed-form conditions on a second-order lag `ω_n²/(s² + 2ζω_n s + ω_n²)`
//!   ([`check_conditions_a`], [`theta_bar_star`]);
//! * membership of general unmodeled dynamics in the admissible class
//!   ([`check_membership`]): Hurwitz loop over the `a_p` uncertainty set, a
//!   Lyapunov margin for the strip thickness `ξ₀`;
//! * the explicit constants that bound `|e(t)|` ([`bound_ledger`]).
//!
//! The plant gain `k_p` enters the fixed-gain loop through the plant row of
//! `Ā`, so the perturbation caused by `θ = −θ_max + ξ` only touches the
//! unmodeled-dynamics input column and `k = ‖b_η‖` as for unit gains.

use serde::Serialize;

use crate::error::{MracError, Result};
use crate::lti::{
    closed_loop_qc, hinf_norm, lyapunov_solve, roots_in_lhp, spectral_abscissa, sym_eig_extrema, Matrix, StateSpace,
};
use crate::plant::PlantSpec;
use crate::projection::ProjectionConfig;
use crate::simulator::Scenario;

/// Number of `a_p` samples used for the interval Hurwitz check.
pub const A_P_GRID_POINTS: usize = 21;

/// Pass/fail with a signed margin (positive when satisfied).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Check {
    pub pass: bool,
    pub margin: f64,
}

impl Check {
    fn strict(margin: f64) -> Self {
        Check { pass: margin > 0.0, margin }
    }
}

/// `ā + |a_m|`, the strict lower bound on `θ'_max`.
pub fn theta_max_prime_lower(a_bar: f64, a_m: f64) -> f64 {
    a_bar + a_m.abs()
}

/// Width of the admissible `θ_max` window above `a_p` for a second-order lag.
pub fn theta_bar_star(zeta: f64, omega_n: f64, a_p: f64) -> f64 {
    (2.0 * zeta * omega_n - a_p) * (1.0 - 2.0 * zeta * a_p / omega_n)
}

/// Conditions A-i..A-iii evaluated at one plant pole.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionsAtPoint {
    pub a_p: f64,
    pub a_i: Check,
    pub a_ii: Check,
    pub a_iii: Check,
    pub theta_bar_star: f64,
    /// Upper end of the `θ_max` window, `(a_p + θ̄*)/k_p`.
    pub theta_max_upper: f64,
    /// Lower end of the `θ_max` window, `a_p/k_p`.
    pub theta_max_lower: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionsAReport {
    pub zeta: f64,
    pub omega_n: f64,
    pub theta_max: f64,
    /// The `b` variants (gain-scaled) were used because `k_p ≠ 1`.
    pub gain_variant: bool,
    pub points: Vec<ConditionsAtPoint>,
    pub all_pass: bool,
}

/// Necessary and sufficient Hurwitz conditions for the loop closed around a
/// second-order lag, checked at the ends of the `a_p` interval and at `a_p`.
pub fn check_conditions_a(zeta: f64, omega_n: f64, plant: &PlantSpec, theta_max: f64) -> ConditionsAReport {
    let mut poles = vec![plant.a_p_interval[0], plant.a_p_interval[1], plant.a_p];
    poles.sort_by(f64::total_cmp);
    poles.dedup();

    let k_p = plant.k_p;
    let points: Vec<ConditionsAtPoint> = poles
        .into_iter()
        .map(|a_p| {
            let upper = -4.0 * a_p * zeta * zeta + 2.0 * zeta * a_p * a_p / omega_n + 2.0 * zeta * omega_n;
            ConditionsAtPoint {
                a_p,
                a_i: Check::strict((2.0 * zeta * omega_n).min(omega_n / (2.0 * zeta)) - a_p),
                a_ii: Check::strict((k_p * theta_max - a_p) / k_p.abs()),
                a_iii: Check::strict((upper - k_p * theta_max) / k_p.abs()),
                theta_bar_star: theta_bar_star(zeta, omega_n, a_p),
                theta_max_upper: upper / k_p,
                theta_max_lower: a_p / k_p,
            }
        })
        .collect();
    let all_pass = points.iter().all(|p| p.a_i.pass && p.a_ii.pass && p.a_iii.pass);
    ConditionsAReport { zeta, omega_n, theta_max, gain_variant: k_p != 1.0, points, all_pass }
}

/// Closed-loop matrix for `θ ≡ −θ_max` at plant pole `a_p`, state `[x_p, x_η]`:
///
/// ```text
/// Ā = [ a_p − k_p d θ_max   k_p cᵀ ]
///     [ −b θ_max            A_η    ]
/// ```
pub fn build_abar_at(a_p: f64, k_p: f64, unmodeled: &StateSpace, theta_max: f64) -> Matrix {
    let n = unmodeled.order();
    let mut m = Matrix::zeros(n + 1, n + 1);
    m[(0, 0)] = a_p - k_p * unmodeled.d * theta_max;
    for j in 0..n {
        m[(0, j + 1)] = k_p * unmodeled.c[j];
        m[(j + 1, 0)] = -unmodeled.b[j] * theta_max;
        for k in 0..n {
            m[(j + 1, k + 1)] = unmodeled.a[(j, k)];
        }
    }
    m
}

/// [`build_abar_at`] at the plant's nominal pole.
pub fn build_abar(plant: &PlantSpec, unmodeled: &StateSpace, theta_max: f64) -> Matrix {
    build_abar_at(plant.a_p, plant.k_p, unmodeled, theta_max)
}

/// Norm of the column through which `θ` perturbs the loop, `‖[k_p d; b_η]‖`.
pub fn perturbation_gain(k_p: f64, unmodeled: &StateSpace) -> f64 {
    let head = k_p * unmodeled.d;
    (head * head + unmodeled.b.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

/// One sample of the interval Hurwitz check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub a_p: f64,
    pub hurwitz: bool,
    /// Distance of the rightmost closed-loop root from the imaginary axis
    /// (negative when unstable).
    pub margin: f64,
}

/// Membership of the unmodeled dynamics in the admissible class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipReport {
    pub theta_max: f64,
    pub epsilon0: f64,
    pub xi0: f64,
    /// Present when the unmodeled dynamics are a unit-gain second-order lag.
    pub conditions_a: Option<ConditionsAReport>,
    pub theta_bar_star: Option<f64>,
    pub theta_max_prime_lower: f64,
    pub theta_max_prime_ok: bool,
    pub grid: Vec<GridPoint>,
    pub worst_a_p: f64,
    pub min_margin: f64,
    pub b_i: Check,
    pub b_ii: Check,
    pub b_iii: Check,
    pub lambda_q_min: f64,
    pub lambda_p_max: Option<f64>,
    /// `‖b_η‖` (with the feedthrough term when present).
    pub k: f64,
    pub xi0_max: Option<f64>,
    pub verdict: bool,
}

/// Checks B-i (Hurwitz over the `a_p` interval), B-ii (`ξ₀ < ε₀`) and
/// B-iii (`ξ₀ < λ_Qmin / (2 k λ_Pmax)`), with `ξ₀ = c·ε₀`.
///
/// `P` is solved at the grid point with the smallest stability margin.
pub fn check_membership(
    plant: &PlantSpec,
    unmodeled: &StateSpace,
    theta_max: f64,
    epsilon0: f64,
    c: f64,
    q: &Matrix,
) -> Result<MembershipReport> {
    if !unmodeled.is_hurwitz() {
        return Err(MracError::Unstable("unmodeled dynamics A matrix is not Hurwitz".into()));
    }
    let (lambda_q_min, _) = sym_eig_extrema(q)?;
    if lambda_q_min <= 0.0 {
        return Err(MracError::InvalidConfig("Q must be positive definite".into()));
    }
    if q.rows() != unmodeled.order() + 1 {
        return Err(MracError::DimensionMismatch(format!(
            "Q is {}x{} but the closed loop has {} states",
            q.rows(),
            q.cols(),
            unmodeled.order() + 1
        )));
    }
    let xi0 = c * epsilon0;
    let tf = unmodeled.transfer_function();

    let grid = plant
        .a_p_grid(A_P_GRID_POINTS)
        .into_iter()
        .map(|a_p| {
            let qc = closed_loop_qc(tf.den(), tf.num(), a_p, plant.k_p, theta_max);
            let hurwitz = roots_in_lhp(&qc)?.hurwitz;
            let margin = -spectral_abscissa(&qc)?;
            Ok(GridPoint { a_p, hurwitz, margin })
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = grid
        .iter()
        .copied()
        .reduce(|w, p| if p.margin < w.margin { p } else { w })
        .expect("grid has at least one point");
    let b_i = Check { pass: grid.iter().all(|p| p.hurwitz), margin: worst.margin };

    let k = perturbation_gain(plant.k_p, unmodeled);
    let lambda_p_max = if b_i.pass {
        let abar = build_abar_at(worst.a_p, plant.k_p, unmodeled, theta_max);
        let p = lyapunov_solve(&abar, q)?;
        let (lo, hi) = sym_eig_extrema(&p)?;
        Some(lo.abs().max(hi.abs()))
    } else {
        None
    };
    let xi0_max = lambda_p_max.map(|lp| lambda_q_min / (2.0 * k * lp));

    let b_ii = Check::strict(epsilon0 - xi0);
    let b_iii = match xi0_max {
        Some(max) => Check::strict(max - xi0),
        None => Check { pass: false, margin: f64::NAN },
    };

    let conditions_a = tf
        .as_second_order_lag()
        .filter(|_| unmodeled.d == 0.0)
        .map(|(zeta, omega_n)| check_conditions_a(zeta, omega_n, plant, theta_max));
    let theta_bar_star = conditions_a.as_ref().map(|r| theta_bar_star(r.zeta, r.omega_n, plant.a_p));
    let lower = theta_max_prime_lower(plant.a_bar, plant.a_m);

    Ok(MembershipReport {
        theta_max,
        epsilon0,
        xi0,
        conditions_a,
        theta_bar_star,
        theta_max_prime_lower: lower,
        theta_max_prime_ok: theta_max - epsilon0 > lower,
        grid,
        worst_a_p: worst.a_p,
        min_margin: worst.margin,
        verdict: b_i.pass && b_ii.pass && b_iii.pass,
        b_i,
        b_ii,
        b_iii,
        lambda_q_min,
        lambda_p_max,
        k,
        xi0_max,
    })
}

/// Largest admissible `ξ₀` from condition B-iii, `λ_Qmin / (2 k λ_Pmax)`.
pub fn xi0_upper_bound(lambda_q_min: f64, lambda_p_max: f64, k: f64) -> f64 {
    lambda_q_min / (2.0 * k * lambda_p_max)
}

/// `λ̄ = λ_Qmin − 2 λ_Pmax k ξ₀`.
pub fn lambda_bar(lambda_q_min: f64, lambda_p_max: f64, k: f64, xi0: f64) -> f64 {
    lambda_q_min - 2.0 * lambda_p_max * k * xi0
}

/// Ultimate bound `x₀ = 2 λ_Pmax ‖b̄‖ r_max / λ̄` on `‖[x_p, x_η]‖` while `θ` sits in `B_L`.
pub fn x0_bound(lambda_p_max: f64, b_bar_norm: f64, r_max: f64, lambda_q_min: f64, k: f64, xi0: f64) -> Result<f64> {
    let lb = lambda_bar(lambda_q_min, lambda_p_max, k, xi0);
    if lb <= 0.0 {
        return Err(MracError::NonPositiveLambdaBar { lambda_bar: lb });
    }
    Ok(2.0 * lambda_p_max * b_bar_norm * r_max / lb)
}

/// Scenario-dependent inputs to [`bound_ledger`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LedgerInputs {
    pub r_max: f64,
    pub x_p_init: f64,
    pub x_m_init: f64,
    /// Defaults to `x̄_m / 2`.
    pub delta: Option<f64>,
    /// Defaults to `ε₀`.
    pub alpha: Option<f64>,
}

/// Every constant entering the bound on `|e(t)|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundLedger {
    pub theta_max: f64,
    pub epsilon0: f64,
    pub xi0: f64,
    pub c: f64,
    pub gamma: f64,
    pub k_eta: f64,
    pub x_m_bar: f64,
    pub r_max: f64,
    pub delta: f64,
    pub alpha: f64,
    pub c_bar: f64,
    pub c_bar2: f64,
    pub b0: f64,
    pub b1: f64,
    pub e0: f64,
    pub e1: f64,
    pub e_bar: f64,
    #[serde(rename = "Delta_T")]
    pub delta_t: f64,
    #[serde(rename = "Delta_T_B")]
    pub delta_t_b: f64,
    #[serde(rename = "Delta_T_BL")]
    pub delta_t_bl: f64,
    #[serde(rename = "Delta_T_prime")]
    pub delta_t_prime: f64,
    pub lambda_q_min: f64,
    pub lambda_p_max: f64,
    pub k: f64,
    pub b_bar_norm: f64,
    pub lambda_bar: f64,
    pub x0: f64,
    pub e_bar2: f64,
    pub e2: f64,
    pub e3: f64,
    pub e_bar3: f64,
    pub theta_star: f64,
    /// `|η| ≤ eta_gain·|e| + eta_offset`.
    pub eta_gain: f64,
    pub eta_offset: f64,
    /// `max{ē, ē₂, ē₃}`.
    pub theorem_bound: f64,
}

/// Positive root of `x² − c b₀ x − c b₁ = 0`.
fn quadratic_root(c: f64, b0: f64, b1: f64) -> f64 {
    0.5 * (c * b0 + (c * c * b0 * b0 + 4.0 * c * b1).sqrt())
}

/// Model-output envelope `max_t |x_m(0)| e^{a_m t} + |k_m| r_max / |a_m|`.
pub fn model_output_bound(plant: &PlantSpec, r_max: f64, x_m_init: f64) -> f64 {
    x_m_init.abs() + plant.k_m.abs() * r_max / plant.a_m.abs()
}

pub fn bound_ledger(
    plant: &PlantSpec,
    unmodeled: &StateSpace,
    cfg: &ProjectionConfig,
    inputs: &LedgerInputs,
    q: &Matrix,
) -> Result<BoundLedger> {
    let x_m_bar = model_output_bound(plant, inputs.r_max, inputs.x_m_init);
    let delta = inputs.delta.unwrap_or(0.5 * x_m_bar);
    if !(delta > 0.0 && delta < x_m_bar) {
        return Err(MracError::DeltaOutOfRange { delta, x_m_bar });
    }
    let alpha = inputs.alpha.unwrap_or(cfg.epsilon0);
    if !(alpha > 0.0 && alpha <= cfg.epsilon0) {
        return Err(MracError::InvalidConfig(format!("alpha = {alpha} must lie in (0, epsilon0 = {}]", cfg.epsilon0)));
    }
    if cfg.c >= 1.0 {
        return Err(MracError::InvalidConfig(format!("c = xi0/epsilon0 = {} must be below 1", cfg.c)));
    }

    let membership = check_membership(plant, unmodeled, cfg.theta_max, cfg.epsilon0, cfg.c, q)?;
    let lambda_p_max = membership
        .lambda_p_max
        .ok_or_else(|| MracError::Unstable("fixed-gain loop is not Hurwitz over the a_p interval".into()))?;
    let lambda_q_min = membership.lambda_q_min;
    let k = membership.k;
    let b_bar_norm = plant.k_r.abs() * k;
    let lambda_bar = lambda_bar(lambda_q_min, lambda_p_max, k, cfg.xi0);
    let x0 = x0_bound(lambda_p_max, b_bar_norm, inputs.r_max, lambda_q_min, k, cfg.xi0)?;

    let k_eta = hinf_norm(&unmodeled.transfer_function())?;
    let theta_max = cfg.theta_max;
    let gamma = cfg.gamma;
    let theta_star = plant.theta_star();

    let c_bar = (2.0 * cfg.theta_max_prime + alpha + cfg.epsilon0 / cfg.c) / (delta * gamma);
    let c_bar2 = (1.0 - cfg.c) * cfg.epsilon0 / (delta * gamma * cfg.c);
    let b0 = plant.a_m.abs() + (k_eta + 2.0) * theta_max + theta_star.abs();
    let b1 = ((k_eta + 2.0) * theta_max + theta_star.abs()) * x_m_bar + (k_eta + 2.0) * inputs.r_max;

    let e0 = inputs.x_p_init.abs() + x_m_bar + 2.0 * delta;
    let e1 = quadratic_root(c_bar, b0, b1);
    let e_bar = e0.max(e1);
    let delta_t = delta / (b0 * e_bar + b1);
    let drive = (e_bar - 2.0 * delta) * (e_bar - 2.0 * delta - x_m_bar);
    let delta_t_b = (2.0 * theta_max - cfg.epsilon0 + alpha) / (gamma * drive);
    let delta_t_bl = (1.0 - cfg.c) * cfg.epsilon0 / (gamma * cfg.c * drive);

    let e_bar2 = x0 + x_m_bar;
    let e2 = 2.0 * x_m_bar + 2.0 * delta;
    let e3 = quadratic_root(c_bar2, b0, b1);
    let e_bar3 = e2.max(e3);
    let delta_t_prime = delta / (b0 * e_bar3 + b1);

    let ledger = BoundLedger {
        theta_max,
        epsilon0: cfg.epsilon0,
        xi0: cfg.xi0,
        c: cfg.c,
        gamma,
        k_eta,
        x_m_bar,
        r_max: inputs.r_max,
        delta,
        alpha,
        c_bar,
        c_bar2,
        b0,
        b1,
        e0,
        e1,
        e_bar,
        delta_t,
        delta_t_b,
        delta_t_bl,
        delta_t_prime,
        lambda_q_min,
        lambda_p_max,
        k,
        b_bar_norm,
        lambda_bar,
        x0,
        e_bar2,
        e2,
        e3,
        e_bar3,
        theta_star,
        eta_gain: (k_eta + 1.0) * theta_max,
        eta_offset: (k_eta + 1.0) * theta_max * x_m_bar + (k_eta + 1.0) * inputs.r_max,
        theorem_bound: e_bar.max(e_bar2).max(e_bar3),
    };
    debug_assert!(ledger.delta_t * ledger.b0 < 1.0);
    Ok(ledger)
}

/// [`bound_ledger`] with the signal bound and initial conditions of `scenario`.
pub fn scenario_ledger(scenario: &Scenario, delta: Option<f64>, alpha: Option<f64>, q: &Matrix) -> Result<BoundLedger> {
    let inputs = LedgerInputs {
        r_max: scenario.r_max(),
        x_p_init: scenario.x_p0,
        x_m_init: scenario.x_m0,
        delta,
        alpha,
    };
    bound_ledger(&scenario.plant, &scenario.unmodeled, &scenario.cfg, &inputs, q)
}

/// Picks `ξ₀ = fraction · ξ₀_max` for the given loop and returns it.
pub fn synthesize_xi0(plant: &PlantSpec, unmodeled: &StateSpace, theta_max: f64, q: &Matrix, fraction: f64) -> Result<f64> {
    // ξ₀_max does not depend on the trial c.
    let report = check_membership(plant, unmodeled, theta_max, 1.0, 0.5, q)?;
    report
        .xi0_max
        .map(|m| fraction * m)
        .ok_or_else(|| MracError::Unstable("fixed-gain loop is not Hurwitz over the a_p interval".into()))
}
