#![allow(dead_code)]

use mrac_core::lti::{realize_controllable, Matrix, Polynomial, StateSpace, TransferFunction};
use nalgebra::DMatrix;
use rand::Rng;

/// Companion matrix of a monic polynomial, as a nalgebra matrix.
pub fn companion(p: &Polynomial) -> DMatrix<f64> {
    let c = p.monic();
    let c = c.coeffs();
    let n = c.len() - 1;
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n.saturating_sub(1) {
        m[(i, i + 1)] = 1.0;
    }
    for j in 0..n {
        m[(n - 1, j)] = -c[n - j];
    }
    m
}

pub fn to_na(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

pub fn from_na(m: &DMatrix<f64>) -> Matrix {
    let rows: Vec<Vec<f64>> = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect();
    Matrix::from_rows(&rows).unwrap()
}

/// Largest real part among the eigenvalues.
pub fn abscissa(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

/// Random stable unmodeled dynamics: a second-order lag, a first-order lag or
/// a random Hurwitz realization.
pub fn random_unmodeled<R: Rng>(rng: &mut R) -> StateSpace {
    match rng.gen_range(0..3) {
        0 => {
            let zeta = rng.gen_range(0.2..1.5);
            let omega = rng.gen_range(2.0..30.0);
            realize_controllable(&TransferFunction::second_order_lag(zeta, omega).unwrap()).unwrap()
        }
        1 => {
            let pole = rng.gen_range(0.5..20.0);
            let tf = TransferFunction::new(Polynomial::constant(pole), Polynomial::new(vec![1.0, pole]).unwrap()).unwrap();
            realize_controllable(&tf).unwrap()
        }
        _ => {
            let n = rng.gen_range(1..4);
            let a = random_hurwitz(rng, n, 0.5);
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            StateSpace::new(a, b, c, 0.0).unwrap()
        }
    }
}

/// Random matrix shifted so that its spectral abscissa is `-margin` or less.
pub fn random_hurwitz<R: Rng>(rng: &mut R, n: usize, margin: f64) -> Matrix {
    let mut m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-3.0..3.0));
    let shift = abscissa(&m) + margin + rng.gen_range(0.0..2.0);
    for i in 0..n {
        m[(i, i)] -= shift;
    }
    from_na(&m)
}

/// Random symmetric positive-definite matrix `BBᵀ + I`.
pub fn random_spd<R: Rng>(rng: &mut R, n: usize) -> Matrix {
    let b = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    from_na(&(&b * b.transpose() + DMatrix::identity(n, n)))
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
