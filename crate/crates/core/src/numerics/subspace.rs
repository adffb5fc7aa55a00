//! Rank-revealing orthonormalization and principal angles, both on top of a
//! one-sided (Hestenes) Jacobi SVD.

use super::matrix::{dot, norm2, Matrix};
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Default relative rank tolerance.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Thin SVD `a = U diag(σ) Vᵀ` with σ descending.
#[derive(Clone, Debug)]
pub struct Svd<T> {
    pub u: Matrix<T>,
    pub sigma: Vec<T>,
    pub v: Matrix<T>,
}

/// One-sided Jacobi SVD of a matrix with at least as many rows as columns.
fn svd_tall<T: Real>(a: &Matrix<T>) -> Svd<T> {
    let n = a.cols();
    let mut u = a.clone();
    let mut v = Matrix::identity(n);
    let tol = T::epsilon() * lit(4.0);
    for _ in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(u.col(p), u.col(p));
                let beta = dot(u.col(q), u.col(q));
                let gamma = dot(u.col(p), u.col(q));
                if gamma == T::zero() || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (lit::<T>(2.0) * gamma);
                let sign = if zeta >= T::zero() { T::one() } else { -T::one() };
                let t = sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate_cols(&mut u, p, q, c, s);
                rotate_cols(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sigma: Vec<T> = u.columns().map(norm2).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).expect("finite singular values"));
    let mut u = u.select_cols(&order);
    let v = v.select_cols(&order);
    sigma = order.iter().map(|&i| sigma[i]).collect();
    for (j, &s) in sigma.iter().enumerate() {
        if s > T::zero() {
            u.col_mut(j).iter_mut().for_each(|x| *x = *x / s);
        }
    }
    Svd { u, sigma, v }
}

fn rotate_cols<T: Real>(m: &mut Matrix<T>, p: usize, q: usize, c: T, s: T) {
    for k in 0..m.rows() {
        let a = m[(k, p)];
        let b = m[(k, q)];
        m[(k, p)] = c * a - s * b;
        m[(k, q)] = s * a + c * b;
    }
}

/// Thin SVD of any shape; the shorter side is orthogonalized.
pub fn svd<T: Real>(a: &Matrix<T>) -> Svd<T> {
    if a.rows() >= a.cols() {
        svd_tall(a)
    } else {
        let t = svd_tall(&a.transpose());
        Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        }
    }
}

pub fn singular_values<T: Real>(a: &Matrix<T>) -> Vec<T> {
    svd(a).sigma
}

/// Orthonormal basis of a numerically determined span.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<T> {
    ambient_dim: usize,
    basis: Matrix<T>,
    tol: T,
}

impl<T: Real> Subspace<T> {
    pub fn zero(ambient_dim: usize, tol: T) -> Self {
        Self {
            ambient_dim,
            basis: Matrix::zeros(ambient_dim, 0),
            tol,
        }
    }

    /// Wraps columns that are already orthonormal.
    pub fn from_orthonormal(basis: Matrix<T>, tol: T) -> Self {
        Self {
            ambient_dim: basis.rows(),
            basis,
            tol,
        }
    }

    pub fn full(ambient_dim: usize, tol: T) -> Self {
        Self::from_orthonormal(Matrix::identity(ambient_dim), tol)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Matrix<T> {
        &self.basis
    }

    pub fn tol(&self) -> T {
        self.tol
    }

    /// Coordinates of the orthogonal projection of `v` in the basis.
    pub fn coords(&self, v: &[T]) -> Vec<T> {
        self.basis.tr_mul_vec(v)
    }

    pub fn project(&self, v: &[T]) -> Vec<T> {
        self.basis.mul_vec(&self.coords(v))
    }

    pub fn projection_norm(&self, v: &[T]) -> T {
        norm2(&self.coords(v))
    }

    /// Norm of the component of `v` orthogonal to the subspace.
    pub fn residual_norm(&self, v: &[T]) -> T {
        let p = self.project(v);
        v.iter().zip(&p).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>().sqrt()
    }

    /// Orthogonal complement in the ambient space.
    pub fn complement(&self) -> Self {
        let n = self.ambient_dim;
        let cols: Vec<Vec<T>> = (0..n)
            .map(|i| {
                let mut e = vec![T::zero(); n];
                e[i] = T::one();
                let p = self.project(&e);
                e.iter().zip(&p).map(|(&a, &b)| a - b).collect()
            })
            .collect();
        let mut c = orthonormal_basis(&Matrix::from_columns(&cols), lit(1e-6));
        // The complement of a rank-r subspace has rank n - r exactly.
        let want = n - self.rank();
        if c.rank() > want {
            c.basis = c.basis.truncate_cols(want);
        }
        c.tol = self.tol;
        c
    }

    /// Largest `‖(I − P) A P‖` over the basis: invariance defect under `a`.
    pub fn invariance_defect(&self, a: &Matrix<T>) -> T {
        self.basis
            .columns()
            .map(|q| self.residual_norm(&a.mul_vec(q)))
            .fold(T::zero(), T::max)
    }
}

/// Orthonormal basis of the span of the columns of `vectors`.
///
/// Rank is the number of singular values above `tol · σ_max`. An empty
/// family yields the zero subspace.
pub fn orthonormal_basis<T: Real>(vectors: &Matrix<T>, tol: T) -> Subspace<T> {
    let n = vectors.rows();
    if vectors.cols() == 0 || n == 0 {
        return Subspace::zero(n, tol);
    }
    let d = svd(vectors);
    let smax = d.sigma.first().copied().unwrap_or(T::zero());
    if smax == T::zero() {
        return Subspace::zero(n, tol);
    }
    let rank = d.sigma.iter().take_while(|&&s| s > tol * smax).count();
    Subspace {
        ambient_dim: n,
        basis: d.u.truncate_cols(rank),
        tol,
    }
}

/// Principal angles in ascending order, `min(rank₁, rank₂)` of them.
///
/// Angles come from the clamped arccos of the cross-Gram singular values,
/// except below π/4 where the arcsin of the singular values of the residual
/// `(I − P₂) Q₁` is used; arccos alone cannot resolve angles under ~1e-8.
pub fn principal_angles<T: Real>(s1: &Subspace<T>, s2: &Subspace<T>) -> Result<Vec<T>> {
    if s1.ambient_dim != s2.ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: s1.ambient_dim,
            actual: s2.ambient_dim,
        });
    }
    if s1.rank() == 0 || s2.rank() == 0 {
        return Ok(Vec::new());
    }
    let (small, large) = if s1.rank() <= s2.rank() { (s1, s2) } else { (s2, s1) };
    let k = small.rank();
    let cosines = singular_values(&large.basis.tr_mul(&small.basis));
    let residual = {
        let coords = large.basis.tr_mul(&small.basis);
        let proj = &large.basis * &coords;
        small.basis.sub(&proj)
    };
    let mut sines = singular_values(&residual);
    sines.reverse();
    let half = lit::<T>(0.5);
    Ok((0..k)
        .map(|i| {
            let c = cosines[i].max(T::zero()).min(T::one());
            if c * c < half {
                c.acos()
            } else {
                sines[i].max(T::zero()).min(T::one()).asin()
            }
        })
        .collect())
}

/// Largest principal angle, or `π/2` when either subspace is trivial.
pub fn largest_angle<T: Real>(s1: &Subspace<T>, s2: &Subspace<T>) -> Result<T> {
    Ok(principal_angles(s1, s2)?
        .last()
        .copied()
        .unwrap_or(T::FRAC_PI_2()))
}

/// Largest angle between a unit vector of `target` and the subspace
/// `space`: `asin ‖(I − P_space) Q_target‖₂`. It is `π/2` when `target` has
/// larger rank, and zero only if `target ⊂ space`.
pub fn containment_angle<T: Real>(target: &Subspace<T>, space: &Subspace<T>) -> Result<T> {
    if target.ambient_dim != space.ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: target.ambient_dim,
            actual: space.ambient_dim,
        });
    }
    if target.rank() == 0 {
        return Ok(T::zero());
    }
    if target.rank() > space.rank() {
        return Ok(T::FRAC_PI_2());
    }
    let coords = space.basis.tr_mul(&target.basis);
    let residual = target.basis.sub(&(&space.basis * &coords));
    let s = singular_values(&residual).first().copied().unwrap_or(T::zero());
    Ok(s.max(T::zero()).min(T::one()).asin())
}
