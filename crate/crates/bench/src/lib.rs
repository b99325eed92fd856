//! Shared fixtures for the benchmarks.

use mrac_core::lti::{Matrix, Polynomial};
use mrac_core::presets::Preset;
use mrac_core::simulator::Scenario;

/// A preset shortened to `t_end` seconds.
pub fn short_scenario(preset: Preset, t_end: f64) -> Scenario {
    let mut s = preset.scenario().expect("presets are valid");
    s.t_end = t_end;
    s
}

/// Diagonally dominant stable matrix `−(n+1)I + (i+j) mod 3 − 1`.
pub fn stable_matrix(n: usize) -> Matrix {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { -(n as f64 + 1.0) } else { ((i + j) % 3) as f64 - 1.0 }).collect())
        .collect();
    Matrix::from_rows(&rows).expect("square")
}

/// `(s + 1)(s + 2)…(s + n)`.
pub fn stable_polynomial(n: usize) -> Polynomial {
    (1..=n).fold(Polynomial::constant(1.0), |p, k| p.mul(&Polynomial::monomial_root(-(k as f64))))
}
