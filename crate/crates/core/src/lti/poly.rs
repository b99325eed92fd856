use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{MracError, Result};

/// Real polynomial with coefficients in descending degree order.
///
/// Constructed polynomials have a nonzero leading coefficient. Arithmetic
/// may cancel down to the zero polynomial, which is represented as `[0.0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(MracError::InvalidPolynomial("no coefficients".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(MracError::InvalidPolynomial("non-finite coefficient".into()));
        }
        let p = Polynomial::trimmed(coeffs);
        if p.is_zero() {
            return Err(MracError::InvalidPolynomial("all coefficients are zero".into()));
        }
        Ok(p)
    }

    /// The constant polynomial `c`.
    pub fn constant(c: f64) -> Self {
        Polynomial { coeffs: vec![c] }
    }

    /// `s − root`.
    pub fn monomial_root(root: f64) -> Self {
        Polynomial { coeffs: vec![1.0, -root] }
    }

    fn trimmed(mut coeffs: Vec<f64>) -> Self {
        let lead = coeffs.iter().position(|c| *c != 0.0).unwrap_or(coeffs.len() - 1);
        coeffs.drain(..lead);
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0.0)
    }

    /// Coefficient of `s^k` (zero beyond the degree).
    pub fn coeff_of_power(&self, k: usize) -> f64 {
        if k > self.degree() {
            0.0
        } else {
            self.coeffs[self.degree() - k]
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn eval_complex(&self, s: Complex64) -> Complex64 {
        self.coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, c| acc * s + c)
    }

    pub fn scale(&self, k: f64) -> Polynomial {
        Polynomial::trimmed(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let out = (0..n)
            .rev()
            .map(|k| self.coeff_of_power(k) + other.coeff_of_power(k))
            .collect();
        Polynomial::trimmed(out)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        poly_mul(self, other)
    }

    /// Divides every coefficient by the leading one.
    pub fn monic(&self) -> Polynomial {
        self.scale(1.0 / self.leading())
    }

    /// `p(s + shift)`, by repeated synthetic division.
    pub fn shifted(&self, shift: f64) -> Polynomial {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in 1..(n - i) {
                c[j] += shift * c[j - 1];
            }
        }
        Polynomial::trimmed(c)
    }

    /// Bound on root magnitudes (Cauchy).
    pub fn cauchy_bound(&self) -> f64 {
        let lead = self.leading().abs();
        1.0 + self.coeffs[1..].iter().fold(0.0_f64, |acc, c| acc.max(c.abs() / lead))
    }
}

/// Exact coefficient convolution.
pub fn poly_mul(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let mut out = vec![0.0; a.coeffs.len() + b.coeffs.len() - 1];
    for (i, x) in a.coeffs.iter().enumerate() {
        for (j, y) in b.coeffs.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    Polynomial::trimmed(out)
}

impl TryFrom<Vec<f64>> for Polynomial {
    type Error = MracError;

    fn try_from(coeffs: Vec<f64>) -> Result<Self> {
        Polynomial::new(coeffs)
    }
}

impl From<Polynomial> for Vec<f64> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            let power = n - i;
            if *c == 0.0 && n > 0 {
                continue;
            }
            let sign = if *c < 0.0 { "-" } else { "+" };
            if first {
                if *c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            match power {
                0 => write!(f, "{mag}")?,
                _ => {
                    if mag != 1.0 {
                        write!(f, "{mag}")?;
                    }
                    if power == 1 {
                        write!(f, "s")?;
                    } else {
                        write!(f, "s^{power}")?;
                    }
                }
            }
        }
        Ok(())
    }
}
