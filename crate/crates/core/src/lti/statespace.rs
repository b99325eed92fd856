use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use super::poly::Polynomial;
use super::stability::roots_in_lhp;
use crate::error::{MracError, Result};

/// Rational transfer function with a monic denominator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferFunction {
    num: Polynomial,
    den: Polynomial,
}

impl TransferFunction {
    /// Normalizes the denominator to be monic; rejects improper ratios.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if !num.is_zero() && num.degree() > den.degree() {
            return Err(MracError::ImproperTransferFunction {
                num_degree: num.degree(),
                den_degree: den.degree(),
            });
        }
        let lead = den.leading();
        Ok(TransferFunction { num: num.scale(1.0 / lead), den: den.scale(1.0 / lead) })
    }

    /// `ω_n² / (s² + 2ζω_n s + ω_n²)`.
    pub fn second_order_lag(zeta: f64, omega_n: f64) -> Result<Self> {
        if !(zeta > 0.0 && omega_n > 0.0) {
            return Err(MracError::InvalidConfig(format!(
                "second-order lag needs zeta > 0 and omega_n > 0 (got {zeta}, {omega_n})"
            )));
        }
        let w2 = omega_n * omega_n;
        TransferFunction::new(
            Polynomial::constant(w2),
            Polynomial::new(vec![1.0, 2.0 * zeta * omega_n, w2])?,
        )
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.num.eval_complex(s) / self.den.eval_complex(s)
    }

    pub fn frequency_response(&self, omega: f64) -> Complex64 {
        self.eval(Complex64::new(0.0, omega))
    }

    pub fn dc_gain(&self) -> f64 {
        self.num.eval(0.0) / self.den.eval(0.0)
    }

    pub fn is_stable(&self) -> bool {
        self.den.degree() == 0 || roots_in_lhp(&self.den).map(|r| r.hurwitz).unwrap_or(false)
    }

    /// Recovers `(ζ, ω_n)` when this is exactly a unit-DC-gain second-order lag.
    pub fn as_second_order_lag(&self) -> Option<(f64, f64)> {
        if self.den.degree() != 2 || self.num.degree() != 0 {
            return None;
        }
        let [_, a1, a0] = [self.den.coeffs()[0], self.den.coeffs()[1], self.den.coeffs()[2]];
        let k = self.num.coeffs()[0];
        if a0 <= 0.0 || a1 <= 0.0 || ((k - a0) / a0).abs() > 1e-12 {
            return None;
        }
        let omega_n = a0.sqrt();
        Some((a1 / (2.0 * omega_n), omega_n))
    }
}

/// State-space realization `ẋ = A x + b u`, `y = cᵀx + d u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSpace {
    pub a: Matrix,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    #[serde(default)]
    pub d: f64,
}

impl StateSpace {
    pub fn new(a: Matrix, b: Vec<f64>, c: Vec<f64>, d: f64) -> Result<Self> {
        let n = a.rows();
        if !a.is_square() || b.len() != n || c.len() != n {
            return Err(MracError::DimensionMismatch(format!(
                "A is {}x{}, b has {} entries, c has {}",
                a.rows(),
                a.cols(),
                b.len(),
                c.len()
            )));
        }
        if !a.is_finite() || b.iter().chain(&c).any(|v| !v.is_finite()) || !d.is_finite() {
            return Err(MracError::InvalidConfig("non-finite state-space entry".into()));
        }
        Ok(StateSpace { a, b, c, d })
    }

    /// Static unit gain with no states (`G ≡ 1`).
    pub fn pass_through() -> Self {
        StateSpace { a: Matrix::zeros(0, 0), b: vec![], c: vec![], d: 1.0 }
    }

    pub fn order(&self) -> usize {
        self.a.rows()
    }

    /// Characteristic polynomial `det(sI − A)` and transfer function,
    /// via the Faddeev–LeVerrier recursion.
    pub fn transfer_function(&self) -> TransferFunction {
        let n = self.order();
        let (charpoly, adjugate_terms) = faddeev_leverrier(&self.a);
        // numerator = cᵀ adj(sI−A) b + d det(sI−A)
        let mut num = vec![0.0; n + 1];
        for (k, m) in adjugate_terms.iter().enumerate() {
            let mb = m.mul_vec(&self.b);
            num[k + 1] = self.c.iter().zip(&mb).map(|(x, y)| x * y).sum();
        }
        for (slot, coeff) in num.iter_mut().zip(charpoly.coeffs()) {
            *slot += self.d * coeff;
        }
        let num = Polynomial::new(num).unwrap_or_else(|_| Polynomial::constant(0.0));
        TransferFunction { num, den: charpoly }
    }

    /// Hurwitz test on the characteristic polynomial.
    pub fn is_hurwitz(&self) -> bool {
        self.order() == 0 || roots_in_lhp(&characteristic_polynomial(&self.a)).map(|r| r.hurwitz).unwrap_or(false)
    }
}

/// `det(sI − A)`, monic.
pub fn characteristic_polynomial(a: &Matrix) -> Polynomial {
    faddeev_leverrier(a).0
}

/// Returns the characteristic polynomial and the matrices `M_1..M_n` with
/// `adj(sI − A) = Σ_k M_k s^{n−k}`.
fn faddeev_leverrier(a: &Matrix) -> (Polynomial, Vec<Matrix>) {
    let n = a.rows();
    let mut coeffs = vec![1.0];
    let mut terms = Vec::with_capacity(n);
    let mut m = Matrix::zeros(n, n);
    let identity = Matrix::identity(n);
    for k in 1..=n {
        let prev = *coeffs.last().expect("leading coefficient present");
        m = a.matmul(&m).expect("square").add(&identity.scale(prev));
        let am = a.matmul(&m).expect("square");
        coeffs.push(-am.trace() / k as f64);
        terms.push(m.clone());
    }
    (Polynomial::new(coeffs).expect("monic"), terms)
}

/// Controllable canonical realization.
///
/// The companion matrix carries the denominator in its last row and the
/// input enters the last state. The strictly proper numerator `r(s)` is split
/// as `g · r̃(s)` with `g` its highest-order nonzero coefficient: `b = g·e_n`
/// and `c` holds `r̃` in ascending powers. For `ω_n²/(s² + 2ζω_n s + ω_n²)`
/// this yields `b = [0, ω_n²]`, `c = [1, 0]`.
pub fn realize_controllable(tf: &TransferFunction) -> Result<StateSpace> {
    let den = tf.den().monic();
    let num = tf.num().scale(1.0 / tf.den().leading());
    let n = den.degree();
    if !num.is_zero() && num.degree() > n {
        return Err(MracError::ImproperTransferFunction { num_degree: num.degree(), den_degree: n });
    }
    if n == 0 {
        return StateSpace::new(Matrix::zeros(0, 0), vec![], vec![], num.eval(0.0));
    }

    let d = num.coeff_of_power(n);
    let remainder: Vec<f64> = (0..n).map(|k| num.coeff_of_power(k) - d * den.coeff_of_power(k)).collect();
    let g = remainder.iter().rev().copied().find(|v| *v != 0.0).unwrap_or(1.0);

    let mut a = Matrix::zeros(n, n);
    for i in 0..n - 1 {
        a[(i, i + 1)] = 1.0;
    }
    for j in 0..n {
        a[(n - 1, j)] = -den.coeff_of_power(j);
    }
    let mut b = vec![0.0; n];
    b[n - 1] = g;
    let c = remainder.iter().map(|v| v / g).collect();
    StateSpace::new(a, b, c, d)
}
