use super::matrix::Matrix;
use crate::error::{MracError, Result};

const MAX_SWEEPS: usize = 100;

/// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations,
/// iterated until the off-diagonal norm is at most `1e-12·‖M‖_F`.
/// Returned in ascending order.
pub fn sym_eigenvalues(m: &Matrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(MracError::DimensionMismatch(format!("{}x{} matrix is not square", m.rows(), m.cols())));
    }
    let asymmetry = m.relative_asymmetry();
    if asymmetry > 1e-12 {
        return Err(MracError::NotSymmetric { asymmetry });
    }
    let n = m.rows();
    let mut a = m.clone();
    let target = 1e-12 * m.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, p, q, c, s);
            }
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// Algebraically smallest and largest eigenvalue of a symmetric matrix.
pub fn sym_eig_extrema(m: &Matrix) -> Result<(f64, f64)> {
    let eig = sym_eigenvalues(m)?;
    match (eig.first(), eig.last()) {
        (Some(lo), Some(hi)) => Ok((*lo, *hi)),
        _ => Err(MracError::DimensionMismatch("empty matrix has no eigenvalues".into())),
    }
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

// A ← JᵀAJ with J the (p, q) Givens rotation that zeroes a_pq.
fn rotate(a: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity() {
        for n in 1..6 {
            assert_eq!(sym_eig_extrema(&Matrix::identity(n)).unwrap(), (1.0, 1.0));
        }
    }

    #[test]
    fn diagonal() {
        assert_eq!(sym_eig_extrema(&Matrix::diag(&[0.5, 0.25])).unwrap(), (0.25, 0.5));
    }

    #[test]
    fn two_by_two_closed_form() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let (lo, hi) = sym_eig_extrema(&m).unwrap();
        assert!((lo - 1.0).abs() < 1e-14 && (hi - 3.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_asymmetric() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(sym_eig_extrema(&m), Err(MracError::NotSymmetric { .. })));
    }
}
