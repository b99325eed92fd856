use super::matrix::{solve_linear, Matrix};
use crate::error::{MracError, Result};

/// Solves `AᵀP + PA = −Q` for symmetric `P`.
///
/// The equation is vectorized over the `n(n+1)/2` upper-triangular entries of
/// `P` and solved as one dense linear system. The system is singular exactly
/// when two eigenvalues of `A` sum to zero, which never happens for Hurwitz `A`.
pub fn lyapunov_solve(a: &Matrix, q: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    if !a.is_square() || q.rows() != n || q.cols() != n {
        return Err(MracError::DimensionMismatch(format!(
            "Lyapunov solve needs square A and Q of equal size (A {}x{}, Q {}x{})",
            a.rows(),
            a.cols(),
            q.rows(),
            q.cols()
        )));
    }
    let asym = q.relative_asymmetry();
    if asym > 1e-12 {
        return Err(MracError::NotSymmetric { asymmetry: asym });
    }

    let index = |i: usize, j: usize| {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        lo * n - lo * (lo + 1) / 2 + hi
    };
    let m = n * (n + 1) / 2;
    let mut system = Matrix::zeros(m, m);
    let mut rhs = vec![0.0; m];

    for i in 0..n {
        for j in i..n {
            let row = index(i, j);
            // (AᵀP)_ij = Σ_k A_ki P_kj ; (PA)_ij = Σ_k P_ik A_kj
            for k in 0..n {
                system[(row, index(k, j))] += a[(k, i)];
                system[(row, index(i, k))] += a[(k, j)];
            }
            rhs[row] = -q[(i, j)];
        }
    }

    let x = solve_linear(&system, &rhs)
        .map_err(|_| MracError::SingularSystem("Lyapunov operator is singular; A is not Hurwitz".into()))?;
    let mut p = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            p[(i, j)] = x[index(i, j)];
            p[(j, i)] = x[index(i, j)];
        }
    }
    Ok(p)
}

/// Frobenius norm of `AᵀP + PA + Q`.
pub fn lyapunov_residual(a: &Matrix, p: &Matrix, q: &Matrix) -> f64 {
    let at_p = a.transpose().matmul(p).expect("square");
    let p_a = p.matmul(a).expect("square");
    at_p.add(&p_a).add(q).frobenius_norm()
}
