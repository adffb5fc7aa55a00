//! Trajectories of the boundary controlled system `α` and the source driven
//! system `β`, the propagator `I^t = L^{-1/2} sin(t L^{1/2})`, and an exact
//! D'Alembert solution for the string used as an oracle.
//!
//! Time convolutions against `sin(ω(t − s))` and `cos(ω(t − s))` use
//! Filon–Simpson product integration so that high modes stay accurate at
//! time steps much larger than their period.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::func::SmoothFn;
use crate::model::{Model, SpectralFn, StateVector};
use crate::numerics::quadrature::{add_cosine_convolution, add_sine_convolution, simpson_prefix};
use crate::numerics::{FilonWeights, QuadratureGrid};
use crate::scalar::{lit, Real};

/// `K`-valued control `f(t) = Σ κ_i φ_i(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Control<T> {
    k_dim: usize,
    terms: Vec<(Vec<T>, SmoothFn<T>)>,
}

impl<T: Real> Control<T> {
    pub fn zero(k_dim: usize) -> Self {
        Self { k_dim, terms: Vec::new() }
    }

    pub fn single(kappa: Vec<T>, profile: SmoothFn<T>) -> Self {
        Self {
            k_dim: kappa.len(),
            terms: vec![(kappa, profile)],
        }
    }

    pub fn with_term(mut self, kappa: Vec<T>, profile: SmoothFn<T>) -> Self {
        assert_eq!(kappa.len(), self.k_dim, "control term has wrong K dimension");
        self.terms.push((kappa, profile));
        self
    }

    pub fn k_dim(&self) -> usize {
        self.k_dim
    }

    pub fn terms(&self) -> &[(Vec<T>, SmoothFn<T>)] {
        &self.terms
    }

    /// `f^{(order)}(t)` as `K` coordinates.
    pub fn eval(&self, t: T, order: usize) -> Vec<T> {
        let mut out = vec![T::zero(); self.k_dim];
        for (kappa, phi) in &self.terms {
            let v = phi.eval(t, order);
            for (o, &k) in out.iter_mut().zip(kappa) {
                *o = *o + k * v;
            }
        }
        out
    }

    pub fn value(&self, t: T) -> Vec<T> {
        self.eval(t, 0)
    }

    fn map(&self, f: impl Fn(SmoothFn<T>) -> SmoothFn<T>) -> Self {
        Self {
            k_dim: self.k_dim,
            terms: self.terms.iter().map(|(k, p)| (k.clone(), f(p.clone()))).collect(),
        }
    }

    /// `(T_τ f)(t) = f(t − τ)`, zero for `t < τ`.
    pub fn delayed(&self, tau: T) -> Self {
        self.map(|p| p.delayed(tau))
    }

    pub fn derivative(&self, order: usize) -> Self {
        self.map(|p| p.derivative(order))
    }

    pub fn scaled(&self, c: T) -> Self {
        self.map(|p| p.scaled(c))
    }

    /// Scalar component `j`: `Σ κ_i[j] φ_i`.
    pub fn component(&self, j: usize) -> SmoothFn<T> {
        SmoothFn::Sum(self.terms.iter().map(|(k, p)| p.clone().scaled(k[j])).collect())
    }

    pub fn is_class_m(&self) -> bool {
        self.terms.iter().all(|(_, p)| p.is_class_m())
    }
}

/// `H`-valued source `ψ(t) = Σ y_i φ_i(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Source<T> {
    terms: Vec<(StateVector<T>, SmoothFn<T>)>,
}

impl<T: Real> Default for Source<T> {
    fn default() -> Self {
        Self { terms: Vec::new() }
    }
}

impl<T: Real> Source<T> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(y: StateVector<T>, profile: SmoothFn<T>) -> Self {
        Self {
            terms: vec![(y, profile)],
        }
    }

    pub fn with_term(mut self, y: StateVector<T>, profile: SmoothFn<T>) -> Self {
        self.terms.push((y, profile));
        self
    }

    pub fn terms(&self) -> &[(StateVector<T>, SmoothFn<T>)] {
        &self.terms
    }

    pub fn value(&self, model: &Model<T>, t: T) -> StateVector<T> {
        let mut out = model.zero_state();
        for (y, p) in &self.terms {
            out.axpy(p.value(t), y);
        }
        out
    }

    pub fn map_states(&self, mut f: impl FnMut(&StateVector<T>) -> StateVector<T>) -> Self {
        Self {
            terms: self.terms.iter().map(|(y, p)| (f(y), p.clone())).collect(),
        }
    }
}

/// States on the nodes of a time grid.
#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    pub grid: QuadratureGrid<T>,
    pub states: Vec<StateVector<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn state(&self, i: usize) -> &StateVector<T> {
        &self.states[i]
    }

    /// State at the node nearest to `t`.
    pub fn at(&self, t: T) -> &StateVector<T> {
        &self.states[self.grid.nearest_index(t)]
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `(y(t_{i+1}) − y(t_{i-1})) / 2dt`
    pub fn central_difference(&self, i: usize) -> StateVector<T> {
        let dt = self.grid.dt();
        self.states[i + 1].sub(&self.states[i - 1]).scale(T::one() / (lit::<T>(2.0) * dt))
    }

    /// `(y(t_{i+1}) − 2y(t_i) + y(t_{i-1})) / dt²`
    pub fn second_difference(&self, i: usize) -> StateVector<T> {
        let dt = self.grid.dt();
        let mut d = self.states[i + 1].add(&self.states[i - 1]);
        d.axpy(-lit::<T>(2.0), &self.states[i]);
        d.scale(T::one() / (dt * dt))
    }

    /// Largest `‖Γ₁ y(t)‖` over the nodes.
    pub fn gamma1_max(&self, model: &Model<T>) -> Result<T> {
        let mut m = T::zero();
        for s in &self.states {
            m = m.max(model.k_norm(&model.gamma1(s)?));
        }
        Ok(m)
    }
}

/// Which of the two equivalent representations of `u^f` to evaluate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AlphaForm {
    /// `L^{-1/2} ∫ sin((t−s)√L) f̈(s) ds`
    #[default]
    Sine,
    /// `∫ L^{-1}(1 − cos((t−s)√L)) f⃛(s) ds`
    OneMinusCos,
}

#[derive(Clone, Copy)]
enum Kernel {
    /// `sin(ω(t−s))/ω`
    SinOverOmega,
    /// `(1 − cos(ω(t−s)))/ω²`
    OneMinusCos,
}

/// Spectral coefficients of `Σ_i a_i[n] ∫_0^t k_n(t−s) g_i(s) ds` at the
/// nodes listed in `keep`.
fn convolve_modes<T: Real>(
    model: &Model<T>,
    grid: &QuadratureGrid<T>,
    coeffs: &[Vec<T>],
    samples: &[Vec<T>],
    kernel: Kernel,
    keep: &[usize],
) -> Result<Vec<Vec<T>>> {
    let n_modes = model.n_modes();
    let n_nodes = grid.n_nodes();
    let dt = grid.dt();
    let per_mode: Vec<Result<Vec<T>>> = model
        .eigenvalues()
        .par_iter()
        .enumerate()
        .map(|(n, &lam)| {
            let omega = lam.sqrt();
            let w = FilonWeights::new(omega, dt);
            // the convolution is linear: combine the terms first
            let mut g = vec![T::zero(); n_nodes];
            let mut any = false;
            for (a, samp) in coeffs.iter().zip(samples) {
                if a[n] == T::zero() {
                    continue;
                }
                any = true;
                for (o, &v) in g.iter_mut().zip(samp) {
                    *o = *o + a[n] * v;
                }
            }
            if !any {
                return Ok(vec![T::zero(); keep.len()]);
            }
            let mut acc = vec![T::zero(); n_nodes];
            match kernel {
                Kernel::SinOverOmega => add_sine_convolution(grid, &w, &g, T::one() / omega, &mut acc)?,
                Kernel::OneMinusCos => {
                    for (o, p) in acc.iter_mut().zip(simpson_prefix(grid, &g)?) {
                        *o = p / lam;
                    }
                    add_cosine_convolution(grid, &w, &g, -T::one() / lam, &mut acc)?;
                }
            }
            Ok(keep.iter().map(|&j| acc[j]).collect())
        })
        .collect();
    let mut states = vec![vec![T::zero(); n_modes]; keep.len()];
    for (n, col) in per_mode.into_iter().enumerate() {
        for (j, v) in col?.into_iter().enumerate() {
            states[j][n] = v;
        }
    }
    Ok(states)
}

fn check_k<T: Real>(model: &Model<T>, f: &Control<T>) -> Result<()> {
    if f.k_dim() != model.k_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.k_dim(),
            actual: f.k_dim(),
        });
    }
    Ok(())
}

/// `u^f` on every node of `grid`, which must start at zero.
pub fn solve_alpha<T: Real>(
    model: &Model<T>,
    f: &Control<T>,
    grid: &QuadratureGrid<T>,
    form: AlphaForm,
) -> Result<Trajectory<T>> {
    let all: Vec<usize> = (0..grid.n_nodes()).collect();
    Ok(Trajectory {
        grid: *grid,
        states: solve_alpha_at(model, f, grid, form, &all)?,
    })
}

/// `u^f` at the listed nodes of `grid` only.
pub fn solve_alpha_at<T: Real>(
    model: &Model<T>,
    f: &Control<T>,
    grid: &QuadratureGrid<T>,
    form: AlphaForm,
    keep: &[usize],
) -> Result<Vec<StateVector<T>>> {
    check_k(model, f)?;
    if !f.is_class_m() {
        return Err(Error::NotClassM);
    }
    if grid.t0() != T::zero() {
        return Err(Error::InvalidGrid("trajectories start at t = 0".into()));
    }
    if let Some(&j) = keep.iter().find(|&&j| j >= grid.n_nodes()) {
        return Err(Error::Precondition(format!("node {j} outside the grid")));
    }
    let order = match form {
        AlphaForm::Sine => 2,
        AlphaForm::OneMinusCos => 3,
    };
    let nodes = grid.nodes();
    let coeffs: Vec<Vec<T>> = f.terms().iter().map(|(k, _)| model.k_coeffs().mul_vec(k)).collect();
    let samples: Vec<Vec<T>> = f
        .terms()
        .iter()
        .map(|(_, p)| nodes.iter().map(|&t| p.eval(t, order)).collect())
        .collect();
    let kernel = match form {
        AlphaForm::Sine => Kernel::SinOverOmega,
        AlphaForm::OneMinusCos => Kernel::OneMinusCos,
    };
    let spectral = convolve_modes(model, grid, &coeffs, &samples, kernel, keep)?;
    Ok(spectral
        .into_iter()
        .zip(keep)
        .map(|(c, &j)| StateVector {
            spectral: c,
            k_part: f.value(nodes[j]).into_iter().map(|v| -v).collect(),
        })
        .collect())
}

/// `v^ψ` on every node of `grid`. `K` parts of the source states are first
/// expanded in the eigenbasis, so every state lies in `Dom L`.
pub fn solve_beta<T: Real>(
    model: &Model<T>,
    psi: &Source<T>,
    grid: &QuadratureGrid<T>,
) -> Result<Trajectory<T>> {
    if grid.t0() != T::zero() {
        return Err(Error::InvalidGrid("trajectories start at t = 0".into()));
    }
    let nodes = grid.nodes();
    let mut coeffs = Vec::with_capacity(psi.terms().len());
    for (y, _) in psi.terms() {
        coeffs.push(model.absorb_k(y)?.0.spectral);
    }
    let samples: Vec<Vec<T>> = psi
        .terms()
        .iter()
        .map(|(_, p)| nodes.iter().map(|&t| p.value(t)).collect())
        .collect();
    let all: Vec<usize> = (0..grid.n_nodes()).collect();
    let spectral = convolve_modes(model, grid, &coeffs, &samples, Kernel::SinOverOmega, &all)?;
    Ok(Trajectory {
        grid: *grid,
        states: spectral.into_iter().map(|c| model.spectral_state(c)).collect(),
    })
}

/// `v^y(t) = I^t y = L^{-1/2} sin(t L^{1/2}) y`.
pub fn solve_beta_impulse<T: Real>(model: &Model<T>, y: &StateVector<T>, t: T) -> Result<StateVector<T>> {
    if t < T::zero() {
        return Err(Error::NegativeTime(t.to_f64().unwrap_or(f64::NAN)));
    }
    model.apply(SpectralFn::SinTSqrt(t), y)
}

/// `v̇^y(t) = cos(t L^{1/2}) y`.
pub fn beta_impulse_velocity<T: Real>(model: &Model<T>, y: &StateVector<T>, t: T) -> Result<StateVector<T>> {
    if t < T::zero() {
        return Err(Error::NegativeTime(t.to_f64().unwrap_or(f64::NAN)));
    }
    model.apply(SpectralFn::CosTSqrt(t), y)
}

/// `‖L^{1/2} v^y(t)‖² + ‖v̇^y(t)‖²`
pub fn impulse_energy<T: Real>(model: &Model<T>, y: &StateVector<T>, t: T) -> Result<T> {
    let v = solve_beta_impulse(model, y, t)?;
    let p = model.apply(SpectralFn::Sqrt, &v)?;
    let q = beta_impulse_velocity(model, y, t)?;
    Ok(model.inner(&p, &p)? + model.inner(&q, &q)?)
}

/// `L₀* y` for a state whose `Dom L` part is `y.spectral`: `L₀*` kills `K`.
pub fn l0star_state<T: Real>(model: &Model<T>, y: &StateVector<T>) -> Result<StateVector<T>> {
    model.apply(SpectralFn::Multiply, &model.spectral_state(y.spectral.clone()))
}

/// Largest time the D'Alembert oracle supports.
pub const DALEMBERT_MAX_TIME: f64 = 2.0;

/// Exact solution at time `t` of the string `u_tt = u_xx` on `[0, 1]` with
/// zero Cauchy data and Dirichlet data `u(0,t) = −f0(t)`, `u(1,t) = −f1(t)`.
/// Both data must vanish for `t <= 0`.
pub fn dalembert_oracle<T: Real>(f0: &SmoothFn<T>, f1: &SmoothFn<T>, t: T, xs: &[T]) -> Result<Vec<T>> {
    if t < T::zero() {
        return Err(Error::NegativeTime(t.to_f64().unwrap_or(f64::NAN)));
    }
    if t > lit(DALEMBERT_MAX_TIME) {
        return Err(Error::BeyondReflections {
            t: t.to_f64().unwrap_or(f64::NAN),
            max: DALEMBERT_MAX_TIME,
        });
    }
    let causal = |f: &SmoothFn<T>, s: T| if s <= T::zero() { T::zero() } else { f.value(s) };
    let two = lit::<T>(2.0);
    Ok(xs
        .iter()
        .map(|&x| {
            let mut u = T::zero();
            for k in 0..2 {
                let shift = two * T::from_usize_lossy(k);
                u = u - causal(f0, t - x - shift) + causal(f0, t - two + x - shift);
                let y = T::one() - x;
                u = u - causal(f1, t - y - shift) + causal(f1, t - two + y - shift);
            }
            u
        })
        .collect())
}

/// Residuals of the steady-state relations `u^{T_τ f}(t) = u^f(t − τ)` and
/// `u^{ḟ}(t) = u̇^f(t)` (the latter against a central difference).
#[derive(Clone, Copy, Debug)]
pub struct SteadyState<T> {
    pub shift: T,
    pub derivative: T,
}

impl<T: Real> SteadyState<T> {
    pub fn max(&self) -> T {
        self.shift.max(self.derivative)
    }
}

/// `t` and `τ` are rounded to nodes of the grid with step `dt` on `[0, t + dt]`.
pub fn steady_state_residual<T: Real>(
    model: &Model<T>,
    f: &Control<T>,
    tau: T,
    t: T,
    dt: T,
) -> Result<SteadyState<T>> {
    if t < T::zero() || tau < T::zero() {
        return Err(Error::NegativeTime(t.min(tau).to_f64().unwrap_or(f64::NAN)));
    }
    let grid = QuadratureGrid::with_max_step(t + lit::<T>(2.0) * dt, dt)?;
    let i = grid.nearest_index(t);
    let base = solve_alpha(model, f, &grid, AlphaForm::Sine)?;
    let shifted = solve_alpha(model, &f.delayed(tau), &grid, AlphaForm::Sine)?;
    let lhs = shifted.state(i);
    let back = t - tau;
    let rhs = if back < T::zero() {
        model.zero_state()
    } else {
        base.state(grid.nearest_index(back)).clone()
    };
    let shift = model.norm(&lhs.sub(&rhs))?;
    let deriv = solve_alpha(model, &f.derivative(1), &grid, AlphaForm::Sine)?;
    let derivative = if i == 0 {
        model.norm(deriv.state(0))?
    } else {
        model.norm(&deriv.state(i).sub(&base.central_difference(i)))?
    };
    Ok(SteadyState { shift, derivative })
}

/// Scalar check of the sign in `L^{-1/2} u^f(τ) = ∓∫_0^τ sin((τ−s)√λ) f(s) ds`
/// on the one-dimensional triple with `K = H`, `L = λ`. The wave is obtained
/// independently by RK4 stepping of `ü_L + λ u_L = f̈`, `u = −f + u_L`.
#[derive(Clone, Copy, Debug)]
pub struct SignCheck {
    /// `λ^{-1/2} u^f(τ)` from time stepping.
    pub stepped: f64,
    /// `−∫ sin((τ−s)√λ) f(s) ds`
    pub minus_form: f64,
    /// `+∫ sin((τ−s)√λ) f(s) ds`
    pub plus_form: f64,
}

impl SignCheck {
    /// `−1` when the minus form matches the stepped value, `+1` for the plus
    /// form, `0` if neither does within `tol`.
    pub fn resolved_sign(&self, tol: f64) -> i32 {
        if (self.stepped - self.minus_form).abs() <= tol {
            -1
        } else if (self.stepped - self.plus_form).abs() <= tol {
            1
        } else {
            0
        }
    }
}

pub fn lemma_sign_oracle(lambda: f64, f: &SmoothFn<f64>, tau: f64, steps: usize) -> SignCheck {
    let h = tau / steps as f64;
    let rhs = |t: f64, y: [f64; 2]| [y[1], f.eval(t, 2) - lambda * y[0]];
    let mut y = [0.0, 0.0];
    for k in 0..steps {
        let t = k as f64 * h;
        let k1 = rhs(t, y);
        let k2 = rhs(t + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
        let k3 = rhs(t + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
        let k4 = rhs(t + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        y[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        y[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    }
    let w = lambda.sqrt();
    let u = -f.value(tau) + y[0];
    let integral = crate::numerics::quadrature::gauss_legendre(0.0, tau, 4 * steps, |s| {
        (w * (tau - s)).sin() * f.value(s)
    });
    SignCheck {
        stepped: u / w,
        minus_form: -integral,
        plus_form: integral,
    }
}
