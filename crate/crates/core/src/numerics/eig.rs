//! Cyclic Jacobi eigensolver for dense real symmetric matrices.

use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored as columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SymEig<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Matrix<T>,
}

impl<T: Real> SymEig<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Q diag(λ) Qᵀ`
    pub fn reconstruct(&self) -> Matrix<T> {
        let q = &self.eigenvectors;
        let n = self.dim();
        Matrix::from_fn(n, n, |i, j| {
            (0..n).fold(T::zero(), |s, k| s + q[(i, k)] * self.eigenvalues[k] * q[(j, k)])
        })
    }
}

/// Checks squareness and symmetry to `1e-12` relative to the largest entry.
pub fn check_symmetric<T: Real>(a: &Matrix<T>) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let tol = lit::<T>(1e-12) * a.max_abs().max(T::min_positive_value());
    for j in 0..a.cols() {
        for i in j + 1..a.rows() {
            if (a[(i, j)] - a[(j, i)]).abs() > tol {
                return Err(Error::NotSymmetric {
                    row: i,
                    col: j,
                    value: a[(i, j)].to_f64().unwrap_or(f64::NAN),
                    mirror: a[(j, i)].to_f64().unwrap_or(f64::NAN),
                });
            }
        }
    }
    Ok(())
}

/// Decomposes a symmetric matrix with cyclic Jacobi rotations.
///
/// The strictly lower triangle is mirrored from the upper one before
/// iterating, so tiny asymmetries within tolerance do not bias the result.
/// Eigenvectors are sign-normalized so that their first non-negligible
/// component is positive, which makes the output deterministic.
pub fn sym_eigendecompose<T: Real>(a: &Matrix<T>) -> Result<SymEig<T>> {
    check_symmetric(a)?;
    let n = a.rows();
    let mut m = Matrix::from_fn(n, n, |i, j| if i <= j { a[(i, j)] } else { a[(j, i)] });
    let mut q = Matrix::identity(n);
    let scale = m.frobenius();
    const MAX_SWEEPS: usize = 100;
    if scale > T::zero() {
        for _ in 0..MAX_SWEEPS {
            let off = off_diagonal_norm(&m);
            if off <= T::epsilon() * lit(0.1) * scale {
                break;
            }
            for p in 0..n {
                for r in p + 1..n {
                    rotate(&mut m, &mut q, p, r);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).expect("finite eigenvalues"));
    let eigenvalues = order.iter().map(|&i| m[(i, i)]).collect();
    let mut eigenvectors = q.select_cols(&order);
    let eps = lit::<T>(1e-8);
    for j in 0..n {
        let col = eigenvectors.col_mut(j);
        if let Some(&first) = col.iter().find(|v| v.abs() > eps) {
            if first < T::zero() {
                col.iter_mut().for_each(|v| *v = -*v);
            }
        }
    }
    Ok(SymEig {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm<T: Real>(m: &Matrix<T>) -> T {
    let n = m.rows();
    let mut s = T::zero();
    for j in 0..n {
        for i in 0..n {
            if i != j {
                s = s + m[(i, j)] * m[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Applies the rotation that annihilates `m[(p, r)]`.
fn rotate<T: Real>(m: &mut Matrix<T>, q: &mut Matrix<T>, p: usize, r: usize) {
    let apr = m[(p, r)];
    if apr == T::zero() {
        return;
    }
    let app = m[(p, p)];
    let arr = m[(r, r)];
    let theta = (arr - app) / (lit::<T>(2.0) * apr);
    let t = if theta.is_infinite() {
        T::zero()
    } else {
        let sign = if theta >= T::zero() { T::one() } else { -T::one() };
        sign / (theta.abs() + (theta * theta + T::one()).sqrt())
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    let n = m.rows();
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkr = m[(k, r)];
        m[(k, p)] = c * mkp - s * mkr;
        m[(k, r)] = s * mkp + c * mkr;
    }
    for k in 0..n {
        let mpk = m[(p, k)];
        let mrk = m[(r, k)];
        m[(p, k)] = c * mpk - s * mrk;
        m[(r, k)] = s * mpk + c * mrk;
    }
    m[(p, r)] = T::zero();
    m[(r, p)] = T::zero();
    for k in 0..n {
        let qkp = q[(k, p)];
        let qkr = q[(k, r)];
        q[(k, p)] = c * qkp - s * qkr;
        q[(k, r)] = s * qkp + c * qkr;
    }
}
