//! Small dense linear-systems numerics: polynomials, realizations,
//! Routh–Hurwitz, Lyapunov solves, symmetric eigenvalues and peak gain.

mod eigen;
mod hinf;
mod lyapunov;
mod matrix;
mod poly;
mod stability;
mod statespace;

pub use eigen::{sym_eig_extrema, sym_eigenvalues};
pub use hinf::hinf_norm;
pub use lyapunov::{lyapunov_residual, lyapunov_solve};
pub use matrix::{solve_linear, Matrix};
pub use poly::{poly_mul, Polynomial};
pub use stability::{cubic_hurwitz, roots_in_lhp, spectral_abscissa, RouthReport, ROUTH_EPSILON};
pub use statespace::{characteristic_polynomial, realize_controllable, StateSpace, TransferFunction};

/// `q_η(s)(s − a_p) + k_p·θ_max·p_η(s)`: characteristic polynomial of the
/// loop closed with the fixed gain `θ = −θ_max`.
pub fn closed_loop_qc(q_eta: &Polynomial, p_eta: &Polynomial, a_p: f64, k_p: f64, theta_max: f64) -> Polynomial {
    q_eta.mul(&Polynomial::monomial_root(a_p)).add(&p_eta.scale(k_p * theta_max))
}
