//! The two boundary-triple backends: the Dirichlet Laplacian on `[0, 1]`
//! (analytic spectral data) and a finite-dimensional mock triple built from
//! an SPD matrix, a defect space `K` and a complement `V`.
//!
//! States are stored in hybrid form: spectral coefficients of a `Dom L`
//! part plus coordinates over the `K` basis. For waves of the boundary
//! controlled system this is exactly the split `u = −f + u_L`.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::func::SmoothFn;
use crate::numerics::quadrature::{GL4_NODES, GL4_WEIGHTS};
use crate::numerics::matrix::{cholesky, cholesky_solve, dot, solve_linear};
use crate::numerics::{sym_eigendecompose, Matrix};
use crate::scalar::{lit, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Interval,
    Mock,
}

/// Element of `H`: `Σ spectral[n] e_n + Σ k_part[j] h_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    pub spectral: Vec<T>,
    pub k_part: Vec<T>,
}

impl<T: Real> StateVector<T> {
    pub fn zeros(n_modes: usize, k_dim: usize) -> Self {
        Self {
            spectral: vec![T::zero(); n_modes],
            k_part: vec![T::zero(); k_dim],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.spectral.iter().chain(&self.k_part).all(|v| *v == T::zero())
    }

    pub fn has_k_part(&self) -> bool {
        self.k_part.iter().any(|v| *v != T::zero())
    }

    pub fn scale(&self, c: T) -> Self {
        Self {
            spectral: self.spectral.iter().map(|&v| v * c).collect(),
            k_part: self.k_part.iter().map(|&v| v * c).collect(),
        }
    }

    /// `self += c · other`
    pub fn axpy(&mut self, c: T, other: &Self) {
        assert_eq!(self.spectral.len(), other.spectral.len());
        assert_eq!(self.k_part.len(), other.k_part.len());
        for (a, &b) in self.spectral.iter_mut().zip(&other.spectral) {
            *a = *a + c * b;
        }
        for (a, &b) in self.k_part.iter_mut().zip(&other.k_part) {
            *a = *a + c * b;
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(T::one(), other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-T::one(), other);
        out
    }
}

/// Scalar functions `φ(λ)` applied through the spectral calculus of `L`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectralFn<T> {
    /// `1/λ`
    Inv,
    /// `1/√λ`
    InvSqrt,
    /// `√λ`
    Sqrt,
    /// `λ`
    Multiply,
    /// `sin(t√λ)/√λ`
    SinTSqrt(T),
    /// `cos(t√λ)`
    CosTSqrt(T),
    /// `sin(t√λ)/(t√λ)`, one at `t = 0`
    SincTSqrt(T),
    /// `(1 − cos(t√λ))/λ`
    OneMinusCosOver(T),
}

impl<T: Real> SpectralFn<T> {
    pub fn eval(&self, lambda: T) -> T {
        let w = lambda.sqrt();
        match *self {
            Self::Inv => T::one() / lambda,
            Self::InvSqrt => T::one() / w,
            Self::Sqrt => w,
            Self::Multiply => lambda,
            Self::SinTSqrt(t) => (t * w).sin() / w,
            Self::CosTSqrt(t) => (t * w).cos(),
            Self::SincTSqrt(t) => {
                if t == T::zero() {
                    T::one()
                } else {
                    (t * w).sin() / (t * w)
                }
            }
            Self::OneMinusCosOver(t) => {
                // 2 sin²(x/2) avoids cancellation for small t√λ
                let h = (t * w / lit(2.0)).sin();
                lit::<T>(2.0) * h * h / lambda
            }
        }
    }

    /// Parses `tag` or `tag:t`, e.g. `inv`, `sin_t_sqrt:0.25`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (tag, t) = match spec.split_once(':') {
            Some((tag, t)) => {
                let t: f64 = t.trim().parse().map_err(|_| Error::UnknownTag(spec.to_string()))?;
                (tag.trim(), Some(T::lit(t)))
            }
            None => (spec.trim(), None),
        };
        let need_t = |f: fn(T) -> Self| t.map(f).ok_or_else(|| Error::UnknownTag(spec.to_string()));
        match tag {
            "inv" => Ok(Self::Inv),
            "inv_sqrt" => Ok(Self::InvSqrt),
            "sqrt" => Ok(Self::Sqrt),
            "multiply" => Ok(Self::Multiply),
            "sin_t_sqrt" => need_t(Self::SinTSqrt),
            "cos_t_sqrt" => need_t(Self::CosTSqrt),
            "sinc_t_sqrt" => need_t(Self::SincTSqrt),
            "one_minus_cos_t_sqrt_over" => need_t(Self::OneMinusCosOver),
            _ => Err(Error::UnknownTag(spec.to_string())),
        }
    }
}

impl<T: Real> FromStr for SpectralFn<T> {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

#[derive(Clone, Debug)]
struct MockData<T> {
    l: Matrix<T>,
    eigenvectors: Matrix<T>,
    k_basis: Matrix<T>,
    complement: Matrix<T>,
    /// `[V | K]`, square and invertible.
    combined: Matrix<T>,
}

/// A concrete boundary triple with its spectral data.
#[derive(Clone, Debug)]
pub struct Model<T> {
    kind: ModelKind,
    eigenvalues: Vec<T>,
    /// `(h_j, e_n)` as an `n_modes × k_dim` matrix.
    k_coeffs: Matrix<T>,
    k_gram: Matrix<T>,
    k_gram_chol: Matrix<T>,
    /// Lower Cholesky factor of `Gram(K) − CᵀC`: the part of `K` the
    /// truncated eigenbasis misses. Absent when the expansion is exact.
    tail_chol: Option<Matrix<T>>,
    mock: Option<MockData<T>>,
}

impl<T: Real> Model<T> {
    /// Dirichlet Laplacian on `[0, 1]`: `λ_n = (nπ)²`, `e_n = √2 sin(nπx)`,
    /// `K = span{1 − x, x}`.
    pub fn interval(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::Precondition("n_modes >= 1".into()));
        }
        let pi = T::PI();
        let sqrt2 = lit::<T>(2.0).sqrt();
        let eigenvalues = (1..=n_modes)
            .map(|n| {
                let w = T::from_usize_lossy(n) * pi;
                w * w
            })
            .collect();
        let k_coeffs = Matrix::from_fn(n_modes, 2, |i, j| {
            let n = i + 1;
            let base = sqrt2 / (T::from_usize_lossy(n) * pi);
            if j == 0 || n % 2 == 1 {
                base
            } else {
                -base
            }
        });
        let third = T::one() / lit(3.0);
        let sixth = T::one() / lit(6.0);
        let k_gram = Matrix::from_rows(&[vec![third, sixth], vec![sixth, third]]);
        let k_gram_chol = cholesky(&k_gram).ok_or(Error::NotPositiveDefinite)?;
        let cc = k_coeffs.tr_mul(&k_coeffs);
        let tail = k_gram.sub(&cc);
        let tail_chol = cholesky(&tail);
        Ok(Self {
            kind: ModelKind::Interval,
            eigenvalues,
            k_coeffs,
            k_gram,
            k_gram_chol,
            tail_chol,
            mock: None,
        })
    }

    /// Finite-dimensional triple. `l` must be SPD; the columns of
    /// `k_basis` and `complement` together must form a basis of the ambient
    /// space.
    pub fn mock(l: Matrix<T>, k_basis: Matrix<T>, complement: Matrix<T>) -> Result<Self> {
        let eig = sym_eigendecompose(&l)?;
        let n = l.rows();
        if eig.eigenvalues.first().is_some_and(|&g| g <= T::zero()) {
            return Err(Error::NotPositiveDefinite);
        }
        if k_basis.rows() != n || complement.rows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: if k_basis.rows() != n { k_basis.rows() } else { complement.rows() },
            });
        }
        if k_basis.cols() == 0 || k_basis.cols() + complement.cols() != n {
            return Err(Error::NoSplitting);
        }
        let combined = complement.hcat(&k_basis);
        let probe: Vec<T> = (0..n).map(|i| T::one() + T::from_usize_lossy(i)).collect();
        if solve_linear(&combined, &probe, lit(1e-10)).is_none() {
            return Err(Error::NoSplitting);
        }
        let k_gram = k_basis.tr_mul(&k_basis);
        let k_gram_chol = cholesky(&k_gram).ok_or(Error::NoSplitting)?;
        let k_coeffs = eig.eigenvectors.tr_mul(&k_basis);
        Ok(Self {
            kind: ModelKind::Mock,
            eigenvalues: eig.eigenvalues,
            k_coeffs,
            k_gram,
            k_gram_chol,
            tail_chol: None,
            mock: Some(MockData {
                l,
                eigenvectors: eig.eigenvectors,
                k_basis,
                complement,
                combined,
            }),
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn n_modes(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn k_dim(&self) -> usize {
        self.k_gram.rows()
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    /// Lower bound `γ` of the spectrum.
    pub fn gamma(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn k_coeffs(&self) -> &Matrix<T> {
        &self.k_coeffs
    }

    pub fn k_gram(&self) -> &Matrix<T> {
        &self.k_gram
    }

    /// Filling time `T_* = inf{r : Ω^r = Ω}`; interval only.
    pub fn filling_time(&self) -> Option<T> {
        (self.kind == ModelKind::Interval).then(|| lit(0.5))
    }

    pub fn zero_state(&self) -> StateVector<T> {
        StateVector::zeros(self.n_modes(), self.k_dim())
    }

    /// Element `Σ κ_j h_j` of `K`.
    pub fn k_state(&self, kappa: &[T]) -> StateVector<T> {
        assert_eq!(kappa.len(), self.k_dim());
        StateVector {
            spectral: vec![T::zero(); self.n_modes()],
            k_part: kappa.to_vec(),
        }
    }

    pub fn spectral_state(&self, coeffs: Vec<T>) -> StateVector<T> {
        assert_eq!(coeffs.len(), self.n_modes());
        StateVector {
            spectral: coeffs,
            k_part: vec![T::zero(); self.k_dim()],
        }
    }

    /// The `n`-th normalized eigenvector (zero based).
    pub fn eigenvector(&self, n: usize) -> StateVector<T> {
        let mut c = vec![T::zero(); self.n_modes()];
        c[n] = T::one();
        self.spectral_state(c)
    }

    fn check(&self, y: &StateVector<T>) -> Result<()> {
        if y.spectral.len() != self.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes(),
                actual: y.spectral.len(),
            });
        }
        if y.k_part.len() != self.k_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.k_dim(),
                actual: y.k_part.len(),
            });
        }
        Ok(())
    }

    /// `(u, v)` in `H`, exact for the hybrid representation. Computed from
    /// frame coordinates, which keeps the norm of small differences of
    /// states with large `K` parts accurate.
    pub fn inner(&self, u: &StateVector<T>, v: &StateVector<T>) -> Result<T> {
        Ok(dot(&self.frame_coords(u)?, &self.frame_coords(v)?))
    }

    pub fn norm(&self, y: &StateVector<T>) -> Result<T> {
        Ok(crate::numerics::norm2(&self.frame_coords(y)?))
    }

    /// Inner products `(y, h_j)` with the `K` basis.
    pub fn k_moments(&self, y: &StateVector<T>) -> Result<Vec<T>> {
        self.check(y)?;
        let a = self.k_coeffs.tr_mul_vec(&y.spectral);
        let b = self.k_gram.mul_vec(&y.k_part);
        Ok(a.iter().zip(&b).map(|(&x, &z)| x + z).collect())
    }

    /// Coordinates over the `K` basis of the orthogonal projection `P y`.
    pub fn k_project(&self, y: &StateVector<T>) -> Result<Vec<T>> {
        Ok(cholesky_solve(&self.k_gram_chol, &self.k_moments(y)?))
    }

    /// Expands the `K` part into the (truncated) eigenbasis. Returns the
    /// new state and the `H`-norm of what the truncation dropped.
    pub fn absorb_k(&self, y: &StateVector<T>) -> Result<(StateVector<T>, T)> {
        self.check(y)?;
        let mut spectral = y.spectral.clone();
        let extra = self.k_coeffs.mul_vec(&y.k_part);
        for (a, b) in spectral.iter_mut().zip(extra) {
            *a = *a + b;
        }
        let dropped = self.tail_coords(&y.k_part).iter().map(|&v| v * v).sum::<T>().sqrt();
        Ok((self.spectral_state(spectral), dropped))
    }

    fn tail_coords(&self, kappa: &[T]) -> Vec<T> {
        match &self.tail_chol {
            Some(r) => r.tr_mul_vec(kappa),
            None => Vec::new(),
        }
    }

    /// `φ(L) y`. A nonzero `K` part is first expanded in the eigenbasis.
    pub fn apply(&self, phi: SpectralFn<T>, y: &StateVector<T>) -> Result<StateVector<T>> {
        Ok(self.apply_with_truncation(phi, y)?.0)
    }

    pub fn apply_with_truncation(
        &self,
        phi: SpectralFn<T>,
        y: &StateVector<T>,
    ) -> Result<(StateVector<T>, T)> {
        let (mut z, dropped) = if y.has_k_part() {
            self.absorb_k(y)?
        } else {
            self.check(y)?;
            (y.clone(), T::zero())
        };
        for (c, &lam) in z.spectral.iter_mut().zip(&self.eigenvalues) {
            *c = *c * phi.eval(lam);
        }
        Ok((z, dropped))
    }

    /// `Γ₁ y = −h` for the hybrid split `y = y' + h`.
    pub fn gamma1(&self, y: &StateVector<T>) -> Result<Vec<T>> {
        self.check(y)?;
        Ok(y.k_part.iter().map(|&v| -v).collect())
    }

    /// `Γ₂ y = P L y'` for the `Dom L` part `y'`.
    pub fn gamma2(&self, y: &StateVector<T>) -> Result<Vec<T>> {
        self.check(y)?;
        let ly: Vec<T> = y.spectral.iter().zip(&self.eigenvalues).map(|(&c, &l)| c * l).collect();
        let moments = self.k_coeffs.tr_mul_vec(&ly);
        Ok(cholesky_solve(&self.k_gram_chol, &moments))
    }

    /// `H`-norm of a `K` element given by basis coordinates.
    pub fn k_norm(&self, kappa: &[T]) -> T {
        dot(kappa, &self.k_gram.mul_vec(kappa)).max(T::zero()).sqrt()
    }

    /// `(a, b)` for two `K` elements.
    pub fn k_inner(&self, a: &[T], b: &[T]) -> T {
        dot(a, &self.k_gram.mul_vec(b))
    }

    /// Orthonormal coordinates of a state: `c + Cκ` followed, on the
    /// interval, by the tail coordinates of `κ`. Inner products of states
    /// equal Euclidean products of these vectors.
    pub fn frame_coords(&self, y: &StateVector<T>) -> Result<Vec<T>> {
        let (z, _) = self.absorb_k(y)?;
        let mut out = z.spectral;
        out.extend(self.tail_coords(&y.k_part));
        Ok(out)
    }

    pub fn frame_dim(&self) -> usize {
        self.n_modes() + self.tail_chol.as_ref().map_or(0, Matrix::cols)
    }

    // ---- interval backend -------------------------------------------------

    fn require(&self, kind: ModelKind, what: &str) -> Result<()> {
        if self.kind != kind {
            return Err(Error::WrongBackend(what.to_string()));
        }
        Ok(())
    }

    /// Hybrid representation of a function on `[0, 1]`: the `K` part is the
    /// linear interpolant of the endpoint values, the remainder is expanded
    /// in the sine basis by composite Gauss–Legendre quadrature.
    pub fn project_profile(&self, y: &SmoothFn<T>) -> Result<StateVector<T>> {
        self.require(ModelKind::Interval, "profile projection needs the interval model")?;
        let k0 = y.value(T::zero());
        let k1 = y.value(T::one());
        let n = self.n_modes();
        let panels = (8 * n).max(512);
        let coeffs = sine_coefficients(n, panels, |x| y.value(x) - k0 * (T::one() - x) - k1 * x);
        Ok(StateVector {
            spectral: coeffs,
            k_part: vec![k0, k1],
        })
    }

    /// Pointwise values `Σ c_n √2 sin(nπx) + κ₀(1−x) + κ₁x`.
    pub fn evaluate_on_grid(&self, y: &StateVector<T>, xs: &[T]) -> Result<Vec<T>> {
        self.require(ModelKind::Interval, "no spatial grid in mock model")?;
        self.check(y)?;
        Ok(xs.iter().map(|&x| eval_point(&y.spectral, &y.k_part, x)).collect())
    }

    // ---- mock backend -----------------------------------------------------

    fn mock_data(&self) -> Result<&MockData<T>> {
        self.mock
            .as_ref()
            .ok_or_else(|| Error::WrongBackend("operation needs the mock model".into()))
    }

    pub fn l_matrix(&self) -> Result<&Matrix<T>> {
        Ok(&self.mock_data()?.l)
    }

    pub fn k_basis(&self) -> Result<&Matrix<T>> {
        Ok(&self.mock_data()?.k_basis)
    }

    pub fn complement_basis(&self) -> Result<&Matrix<T>> {
        Ok(&self.mock_data()?.complement)
    }

    pub fn eigenvectors(&self) -> Result<&Matrix<T>> {
        Ok(&self.mock_data()?.eigenvectors)
    }

    /// Ambient coordinates `Q c + K κ`.
    pub fn to_ambient(&self, y: &StateVector<T>) -> Result<Vec<T>> {
        let m = self.mock_data()?;
        self.check(y)?;
        let a = m.eigenvectors.mul_vec(&y.spectral);
        let b = m.k_basis.mul_vec(&y.k_part);
        Ok(a.iter().zip(&b).map(|(&x, &z)| x + z).collect())
    }

    /// Spectral-only state of an ambient vector.
    pub fn from_ambient(&self, v: &[T]) -> Result<StateVector<T>> {
        let m = self.mock_data()?;
        if v.len() != self.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes(),
                actual: v.len(),
            });
        }
        Ok(self.spectral_state(m.eigenvectors.tr_mul_vec(v)))
    }

    /// Oblique split `v = v_V + h`, `v_V ∈ V`, `h ∈ K`. Returns `v_V` as an
    /// ambient vector and `h` as `K` coordinates.
    pub fn oblique_split(&self, v: &[T]) -> Result<(Vec<T>, Vec<T>)> {
        let m = self.mock_data()?;
        let z = solve_linear(&m.combined, v, lit(1e-12)).ok_or(Error::NoSplitting)?;
        let nv = m.complement.cols();
        let v_part = m.complement.mul_vec(&z[..nv]);
        Ok((v_part, z[nv..].to_vec()))
    }
}

/// Sine coefficients `∫₀¹ g(x) √2 sin(nπx) dx`, `n = 1..=n_modes`, by
/// four-point Gauss–Legendre on `panels` equal panels.
pub(crate) fn sine_coefficients<T: Real>(
    n_modes: usize,
    panels: usize,
    g: impl Fn(T) -> T,
) -> Vec<T> {
    let h = T::one() / T::from_usize_lossy(panels);
    let sqrt2 = lit::<T>(2.0).sqrt();
    let mut out = vec![T::zero(); n_modes];
    for p in 0..panels {
        let mid = (T::from_usize_lossy(p) + lit(0.5)) * h;
        for (xi, wi) in GL4_NODES.iter().zip(GL4_WEIGHTS) {
            let x = mid + lit::<T>(*xi) * h / lit(2.0);
            let gx = g(x);
            if gx == T::zero() {
                continue;
            }
            let w = lit::<T>(wi) * h / lit(2.0) * gx * sqrt2;
            for_each_sine(n_modes, x, |n, s| out[n] = out[n] + w * s);
        }
    }
    out
}

/// Calls `f(n-1, sin(nπx))` for `n = 1..=n_modes` via the Chebyshev
/// recurrence.
pub(crate) fn for_each_sine<T: Real>(n_modes: usize, x: T, mut f: impl FnMut(usize, T)) {
    let theta = T::PI() * x;
    let two_c = lit::<T>(2.0) * theta.cos();
    let mut prev = T::zero();
    let mut cur = theta.sin();
    for n in 0..n_modes {
        f(n, cur);
        let next = two_c * cur - prev;
        prev = cur;
        cur = next;
    }
}

fn eval_point<T: Real>(spectral: &[T], k_part: &[T], x: T) -> T {
    let sqrt2 = lit::<T>(2.0).sqrt();
    let mut s = T::zero();
    for_each_sine(spectral.len(), x, |n, v| s = s + spectral[n] * v);
    s * sqrt2 + k_part[0] * (T::one() - x) + k_part[1] * x
}

/// Cell-midpoint grid on `[0, 1]` with a cached sine table, used to
/// measure supports and build layer subspaces.
#[derive(Clone, Debug)]
pub struct SpatialGrid<T> {
    n_cells: usize,
    n_modes: usize,
    /// `√2 sin(nπ x_i)`, row `i`, column `n`.
    table: Matrix<T>,
}

impl<T: Real> SpatialGrid<T> {
    pub fn new(n_cells: usize, n_modes: usize) -> Self {
        let sqrt2 = lit::<T>(2.0).sqrt();
        let mut table = Matrix::zeros(n_cells, n_modes);
        for i in 0..n_cells {
            let x = Self::midpoint_of(i, n_cells);
            for_each_sine(n_modes, x, |n, s| table[(i, n)] = sqrt2 * s);
        }
        Self {
            n_cells,
            n_modes,
            table,
        }
    }

    fn midpoint_of(i: usize, n: usize) -> T {
        (T::from_usize_lossy(i) + lit(0.5)) / T::from_usize_lossy(n)
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn dx(&self) -> T {
        T::one() / T::from_usize_lossy(self.n_cells)
    }

    pub fn midpoint(&self, i: usize) -> T {
        Self::midpoint_of(i, self.n_cells)
    }

    pub fn midpoints(&self) -> Vec<T> {
        (0..self.n_cells).map(|i| self.midpoint(i)).collect()
    }

    /// Values at the cell midpoints.
    pub fn values(&self, y: &StateVector<T>) -> Vec<T> {
        assert_eq!(y.spectral.len(), self.n_modes, "grid built for another mode count");
        let mut v = self.table.mul_vec(&y.spectral);
        for (i, vi) in v.iter_mut().enumerate() {
            let x = self.midpoint(i);
            *vi = *vi + y.k_part[0] * (T::one() - x) + y.k_part[1] * x;
        }
        v
    }

    /// `√dx`-weighted values: Euclidean products approximate `L²` ones.
    pub fn coords(&self, y: &StateVector<T>) -> Vec<T> {
        let w = self.dx().sqrt();
        self.values(y).into_iter().map(|v| v * w).collect()
    }

    /// Distance of cell `i`'s midpoint to the boundary `{0, 1}`.
    pub fn boundary_distance(&self, i: usize) -> T {
        let x = self.midpoint(i);
        x.min(T::one() - x)
    }

    /// Cells of the layer `Ω^r = {dist(x, Γ) < r}` widened by `margin`
    /// cells. `r <= 0` gives the empty layer.
    pub fn layer_cells(&self, r: T, margin: usize) -> Vec<usize> {
        if r <= T::zero() {
            return Vec::new();
        }
        let reach = r + self.dx() * T::from_usize_lossy(margin);
        (0..self.n_cells).filter(|&i| self.boundary_distance(i) < reach).collect()
    }
}
