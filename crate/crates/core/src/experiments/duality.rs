use crate::dynamics::{solve_alpha, solve_alpha_at, solve_beta, solve_beta_impulse, AlphaForm, Control, Source};
use crate::error::{Error, Result};
use crate::model::{Model, ModelKind, SpatialGrid, StateVector};
use crate::numerics::{simpson, QuadratureGrid};
use crate::scalar::{lit, Real};

use super::{masked_norm, norm, ratio};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualityReport<T> {
    pub lhs: T,
    pub rhs: T,
    pub residual: T,
}

impl<T: Real> DualityReport<T> {
    fn new(lhs: T, rhs: T) -> Self {
        Self {
            lhs,
            rhs,
            residual: (lhs - rhs).abs(),
        }
    }
}

/// `(u^f(T), y)` against `−∫_0^T (f(t), Γ₂ v^y(T − t)) dt` for `y ∈ Dom L`.
/// The right side evaluates `Γ₂ v^y = P L I^s y` by the functional calculus
/// at every node and integrates with Simpson's rule.
pub fn duality_residual<T: Real>(
    model: &Model<T>,
    f: &Control<T>,
    y: &StateVector<T>,
    t_final: T,
    dt: T,
) -> Result<DualityReport<T>> {
    if y.has_k_part() {
        return Err(Error::Precondition("y must lie in Dom L (no K part)".into()));
    }
    if t_final <= T::zero() {
        return Err(Error::Precondition("requires T > 0".into()));
    }
    let grid = QuadratureGrid::with_max_step(t_final, dt)?;
    let last = grid.n_intervals();
    let u = solve_alpha_at(model, f, &grid, AlphaForm::Sine, &[last])?;
    let lhs = model.inner(&u[0], y)?;
    let mut integrand = Vec::with_capacity(grid.n_nodes());
    for t in grid.nodes() {
        let v = solve_beta_impulse(model, y, grid.t1() - t)?;
        integrand.push(model.k_inner(&f.value(t), &model.gamma2(&v)?));
    }
    let rhs = -simpson(&grid, &integrand)?;
    Ok(DualityReport::new(lhs, rhs))
}

/// `∫_0^T (u^f(t), ψ(T − t)) dt` against `−∫_0^T (f(t), Γ₂ v^ψ(T − t)) dt`.
pub fn source_duality_residual<T: Real>(
    model: &Model<T>,
    f: &Control<T>,
    psi: &Source<T>,
    t_final: T,
    dt: T,
) -> Result<DualityReport<T>> {
    if t_final <= T::zero() {
        return Err(Error::Precondition("requires T > 0".into()));
    }
    let grid = QuadratureGrid::with_max_step(t_final, dt)?;
    let u = solve_alpha(model, f, &grid, AlphaForm::Sine)?;
    let v = solve_beta(model, psi, &grid)?;
    let n = grid.n_intervals();
    let nodes = grid.nodes();
    let mut left = Vec::with_capacity(n + 1);
    let mut right = Vec::with_capacity(n + 1);
    for (j, &t) in nodes.iter().enumerate() {
        let p = psi.value(model, grid.t1() - t);
        left.push(model.inner(u.state(j), &p)?);
        right.push(model.k_inner(&f.value(t), &model.gamma2(v.state(n - j))?));
    }
    Ok(DualityReport::new(simpson(&grid, &left)?, -simpson(&grid, &right)?))
}

/// What `Γ₂` is tracked for in [`gamma2_vanishing_check`].
#[derive(Clone, Debug)]
pub enum Gamma2Input<T> {
    /// `v^ψ(t)` for a source.
    Source(Source<T>),
    /// `v^y(t) = I^t y` for an impulse.
    State(StateVector<T>),
}

/// Largest `‖Γ₂ v(t)‖` over `t ∈ [0, σ]` for an input acting from outside
/// `Ω^σ`. The input is first checked on a midpoint grid: its relative norm
/// inside `Ω^σ` (less `margin` cells) must not exceed `overlap_tol`.
pub fn gamma2_vanishing_check<T: Real>(
    model: &Model<T>,
    input: &Gamma2Input<T>,
    sigma: T,
    dt: T,
    n_cells: usize,
    overlap_tol: T,
) -> Result<T> {
    if model.kind() != ModelKind::Interval {
        return Err(Error::WrongBackend("Γ₂ vanishing check needs the interval model".into()));
    }
    if sigma <= T::zero() {
        return Ok(T::zero());
    }
    let space = SpatialGrid::new(n_cells, model.n_modes());
    let lo = sigma - space.dx() * lit(2.0);
    let states: Vec<&StateVector<T>> = match input {
        Gamma2Input::Source(psi) => psi.terms().iter().map(|(y, _)| y).collect(),
        Gamma2Input::State(y) => vec![y],
    };
    for y in states {
        let c = space.coords(y);
        let overlap = ratio(masked_norm(&space, &c, |d| d < lo), norm(&c));
        if overlap > overlap_tol {
            return Err(Error::Precondition(format!(
                "input is not orthogonal to the σ-layer: relative overlap {overlap:.3e}"
            )));
        }
    }
    let grid = QuadratureGrid::with_max_step(sigma, dt)?;
    let mut worst = T::zero();
    match input {
        Gamma2Input::Source(psi) => {
            let v = solve_beta(model, psi, &grid)?;
            for s in &v.states {
                worst = worst.max(model.k_norm(&model.gamma2(s)?));
            }
        }
        Gamma2Input::State(y) => {
            for t in grid.nodes() {
                let v = solve_beta_impulse(model, y, t)?;
                worst = worst.max(model.k_norm(&model.gamma2(&v)?));
            }
        }
    }
    Ok(worst)
}
