use serde::Serialize;

use super::poly::Polynomial;
use crate::error::{MracError, Result};

/// Value substituted for an isolated zero pivot in the Routh first column.
pub const ROUTH_EPSILON: f64 = 1e-12;

/// Outcome of a Routh–Hurwitz tabulation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouthReport {
    /// All roots strictly in the open left half-plane.
    pub hurwitz: bool,
    /// First column of the Routh array, normalized by the leading coefficient's sign.
    pub first_column: Vec<f64>,
    /// Index of the first row whose pivot is not strictly positive.
    pub first_failing_row: Option<usize>,
    /// Sign changes in the first column (right-half-plane root count when no zero row occurs).
    pub sign_changes: usize,
    /// A whole row vanished: roots symmetric about the origin, e.g. on the imaginary axis.
    pub zero_row: Option<usize>,
    /// An isolated zero pivot was replaced by [`ROUTH_EPSILON`].
    pub epsilon_substituted: bool,
}

/// Full Routh array test for roots strictly inside ℂ⁻.
pub fn roots_in_lhp(p: &Polynomial) -> Result<RouthReport> {
    let lead = p.leading();
    if lead == 0.0 || !lead.is_finite() {
        return Err(MracError::InvalidPolynomial("zero leading coefficient".into()));
    }
    if p.degree() == 0 {
        return Err(MracError::InvalidPolynomial("degree must be at least 1".into()));
    }
    let sign = lead.signum();
    let coeffs: Vec<f64> = p.coeffs().iter().map(|c| c * sign).collect();
    let n = p.degree();
    let width = n / 2 + 1;

    let mut prev: Vec<f64> = (0..width).map(|j| coeffs.get(2 * j).copied().unwrap_or(0.0)).collect();
    let mut cur: Vec<f64> = (0..width).map(|j| coeffs.get(2 * j + 1).copied().unwrap_or(0.0)).collect();
    let mut first_column = vec![prev[0]];
    let mut zero_row = None;
    let mut epsilon_substituted = false;

    for row in 1..=n {
        let scale = prev.iter().chain(&cur).fold(0.0_f64, |acc, v| acc.max(v.abs()));
        let tol = 1e-13 * scale;
        if cur.iter().all(|v| v.abs() <= tol) {
            if zero_row.is_none() {
                zero_row = Some(row);
            }
            // Replace by the derivative of the auxiliary polynomial built from `prev`.
            let order = n + 1 - row;
            cur = prev
                .iter()
                .enumerate()
                .map(|(j, v)| v * order.saturating_sub(2 * j) as f64)
                .collect();
            if cur.iter().all(|v| *v == 0.0) {
                cur[0] = ROUTH_EPSILON;
            }
        }
        if cur[0].abs() <= tol {
            cur[0] = ROUTH_EPSILON;
            epsilon_substituted = true;
        }
        first_column.push(cur[0]);
        if row == n {
            break;
        }
        let next: Vec<f64> = (0..width)
            .map(|j| {
                let a = prev.get(j + 1).copied().unwrap_or(0.0);
                let b = cur.get(j + 1).copied().unwrap_or(0.0);
                (cur[0] * a - prev[0] * b) / cur[0]
            })
            .collect();
        prev = std::mem::replace(&mut cur, next);
    }

    let first_failing_row = first_column.iter().position(|v| *v <= 0.0 || *v == ROUTH_EPSILON);
    let sign_changes = first_column.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
    let hurwitz = first_failing_row.is_none() && zero_row.is_none() && !epsilon_substituted;
    Ok(RouthReport { hurwitz, first_column, first_failing_row, sign_changes, zero_row, epsilon_substituted })
}

/// Hurwitz test for the monic cubic `s³ + a1 s² + a2 s + a3`.
pub fn cubic_hurwitz(a1: f64, a2: f64, a3: f64) -> bool {
    a1 > 0.0 && a3 > 0.0 && a1 * a2 > a3
}

/// Largest real part among the roots, located by bisecting on the shift
/// `σ` for which `p(s + σ)` is Hurwitz. Resolution is about `1e-12` of the
/// Cauchy root bound.
pub fn spectral_abscissa(p: &Polynomial) -> Result<f64> {
    if p.degree() == 0 {
        return Err(MracError::InvalidPolynomial("degree must be at least 1".into()));
    }
    let bound = p.cauchy_bound();
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if roots_in_lhp(&p.shifted(mid))?.hurwitz {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-12 * bound {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
