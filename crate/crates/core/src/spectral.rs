//! Dense symmetric and generalized symmetric-definite eigensolvers.
//!
//! `sym_eig` is a cyclic Jacobi solver; `gen_eig` reduces `E v = λ I v` to a
//! standard symmetric problem by Cholesky whitening of `I`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::DenseMatrix;

/// Maximum number of full Jacobi sweeps.
pub const MAX_SWEEPS: usize = 100;
/// Off-diagonal Frobenius norm, relative to `‖A‖_F`, below which Jacobi stops.
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;

/// Eigenvalues sorted non-increasing with matching eigenvector columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

impl EigenPairs {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn off_diagonal_norm(a: &DenseMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for c in 0..n {
        for r in 0..n {
            if r != c {
                s += a[(r, c)] * a[(r, c)];
            }
        }
    }
    s.sqrt()
}

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// The input is symmetrized as `(A + Aᵀ)/2` first. Eigenvalues come back in
/// descending order (ties keep the solver's diagonal order) and every
/// eigenvector is signed so that its largest-magnitude entry is positive.
pub fn sym_eig(a: &DenseMatrix) -> Result<EigenPairs> {
    if !a.is_square() {
        return Err(Error::arg(format!("sym_eig needs a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    if a.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::numeric("sym_eig input contains non-finite entries"));
    }
    let n = a.rows();
    let mut a = a.symmetrized();
    let mut v = DenseMatrix::identity(n);
    let threshold = OFF_DIAGONAL_TOL * a.frobenius();

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, &mut v, p, q, c, s);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > threshold {
        return Err(Error::Numeric {
            message: format!("Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps"),
            iterations: Some(MAX_SWEEPS),
        });
    }

    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    Ok(sorted_pairs(&diag, &v))
}

// A <- Jᵀ A J and V <- V J for the plane rotation J acting on (p, q).
fn rotate(a: &mut DenseMatrix, v: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64) {
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
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

fn sorted_pairs(values: &[f64], vectors: &DenseMatrix) -> EigenPairs {
    let mut order: Vec<usize> = (0..values.len()).collect();
    // stable: equal eigenvalues keep their diagonal order
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let n = vectors.rows();
    let mut out = DenseMatrix::zeros(n, order.len());
    for (dst, &src) in order.iter().enumerate() {
        let col = out.column_mut(dst);
        col.copy_from_slice(vectors.column(src));
        fix_sign(col);
    }
    EigenPairs { values: order.iter().map(|&i| values[i]).collect(), vectors: out }
}

fn fix_sign(col: &mut [f64]) {
    let mut best = 0;
    for (i, x) in col.iter().enumerate() {
        if x.abs() > col[best].abs() {
            best = i;
        }
    }
    if col[best] < 0.0 {
        col.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`.
pub fn cholesky(a: &DenseMatrix) -> Result<DenseMatrix> {
    if !a.is_square() {
        return Err(Error::arg(format!("cholesky needs a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    let n = a.rows();
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::numeric(format!(
                "matrix is not positive-definite (pivot {j} = {d:e}); increase the regularizer lambda"
            )));
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = 0.5 * (a[(i, j)] + a[(j, i)]);
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

// Solves L X = B in place, column by column.
fn forward_solve(l: &DenseMatrix, b: &mut DenseMatrix) {
    let n = l.rows();
    for c in 0..b.cols() {
        let col = b.column_mut(c);
        for i in 0..n {
            let mut s = col[i];
            for k in 0..i {
                s -= l[(i, k)] * col[k];
            }
            col[i] = s / l[(i, i)];
        }
    }
}

// Solves Lᵀ X = B in place.
fn backward_solve_transposed(l: &DenseMatrix, b: &mut DenseMatrix) {
    let n = l.rows();
    for c in 0..b.cols() {
        let col = b.column_mut(c);
        for i in (0..n).rev() {
            let mut s = col[i];
            for k in (i + 1)..n {
                s -= l[(k, i)] * col[k];
            }
            col[i] = s / l[(i, i)];
        }
    }
}

/// Solves `E v = λ I v` for symmetric `E` and symmetric positive-definite `I`.
///
/// Factor `I = L Lᵀ`, diagonalize `L⁻¹ E L⁻ᵀ`, and map eigenvectors back with
/// `v = L⁻ᵀ w`, which makes them `I`-orthonormal (`Vᵀ I V = 1`).
pub fn gen_eig(e: &DenseMatrix, i: &DenseMatrix) -> Result<EigenPairs> {
    if !e.is_square() || !i.is_square() || e.rows() != i.rows() {
        return Err(Error::arg(format!(
            "gen_eig needs two square matrices of equal size, got {}x{} and {}x{}",
            e.rows(),
            e.cols(),
            i.rows(),
            i.cols()
        )));
    }
    let l = cholesky(i)?;
    // X = L⁻¹ E, then C = L⁻¹ Xᵀ = L⁻¹ E L⁻ᵀ
    let mut x = e.symmetrized();
    forward_solve(&l, &mut x);
    let mut c = x.transpose();
    forward_solve(&l, &mut c);
    let EigenPairs { values, mut vectors } = sym_eig(&c)?;
    backward_solve_transposed(&l, &mut vectors);
    Ok(EigenPairs { values, vectors })
}
