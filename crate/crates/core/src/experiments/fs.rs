use crate::dynamics::{solve_beta, Source};
use crate::error::{Error, Result};
use crate::func::SmoothFn;
use crate::model::{Model, ModelKind, SpatialGrid};
use crate::numerics::QuadratureGrid;
use crate::scalar::{lit, Real};

use super::{masked_norm, norm, ratio};

/// Why the membership experiment is refused on the mock model.
pub const TRIVIAL_GROWTH: &str = "the mock model has no positive growth points: its reachable \
sets do not depend on τ, so the finite-speed statement holds but is trivial";

#[derive(Clone, Debug, PartialEq)]
pub struct FsParams<T> {
    pub sigma: T,
    pub tau: T,
    pub times: Vec<T>,
    pub dt: T,
    pub n_cells: usize,
    pub margin: usize,
    /// Power of the polynomial window of the spatial source profile.
    pub window_power: usize,
    pub time_profile: SmoothFn<T>,
}

impl<T: Real> FsParams<T> {
    pub fn new(sigma: T, tau: T, times: Vec<T>) -> Self {
        Self {
            sigma,
            tau,
            times,
            dt: lit(1e-3),
            n_cells: 2048,
            margin: 2,
            window_power: 3,
            time_profile: SmoothFn::ramp_trig(lit(1e-3), lit(0.02), &[(T::one(), lit(30.0), lit(0.3))]),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FsReport<T> {
    pub sigma: T,
    pub tau: T,
    pub times: Vec<T>,
    /// Norm of `v^ψ(t)` inside `Ω^{σ−t}`, relative to `total_norm`.
    pub leakage_inner: Vec<T>,
    /// Norm of `v^ψ(t)` outside `Ω^{τ+t}`, relative to `total_norm`.
    pub leakage_outer: Vec<T>,
    pub total_norm: Vec<T>,
    /// Relative norm of the projected source profile inside `Ω^σ`.
    pub source_overlap: T,
}

/// Source acting from the layer `Ω^τ ∖ Ω^σ`: polynomial windows on
/// `[σ, τ]` and `[1 − τ, 1 − σ]` times a scalar time profile.
pub fn fs_source<T: Real>(
    model: &Model<T>,
    sigma: T,
    tau: T,
    power: usize,
    time_profile: SmoothFn<T>,
) -> Result<Source<T>> {
    let profile = SmoothFn::Sum(vec![
        SmoothFn::PolyWindow { a: sigma, b: tau, power },
        SmoothFn::PolyWindow { a: T::one() - tau, b: T::one() - sigma, power },
    ]);
    Ok(Source::single(model.project_profile(&profile)?, time_profile))
}

pub fn fs_membership<T: Real>(model: &Model<T>, p: &FsParams<T>) -> Result<FsReport<T>> {
    if model.kind() == ModelKind::Mock {
        return Err(Error::Precondition(TRIVIAL_GROWTH.into()));
    }
    if !(p.sigma > T::zero() && p.sigma < p.tau) {
        return Err(Error::Precondition("requires 0 < σ < τ".into()));
    }
    let t_star = model.filling_time().unwrap_or(T::infinity());
    if p.tau >= t_star {
        return Err(Error::Precondition("requires τ < T_*".into()));
    }
    if p.times.iter().any(|&t| t < T::zero()) {
        return Err(Error::Precondition("times must be nonnegative".into()));
    }
    let psi = fs_source(model, p.sigma, p.tau, p.window_power, p.time_profile.clone())?;
    let space = SpatialGrid::new(p.n_cells, model.n_modes());
    let reach = space.dx() * T::from_usize_lossy(p.margin);

    let y = space.coords(&psi.terms()[0].0);
    let source_overlap = ratio(masked_norm(&space, &y, |d| d < p.sigma - reach), norm(&y));

    let t_max = p.times.iter().copied().fold(T::zero(), T::max);
    let (mut inner, mut outer, mut total) = (Vec::new(), Vec::new(), Vec::new());
    let traj = if t_max > T::zero() {
        Some(solve_beta(model, &psi, &QuadratureGrid::with_max_step(t_max, p.dt)?)?)
    } else {
        None
    };
    for &t in &p.times {
        let state = match &traj {
            Some(tr) => tr.at(t).clone(),
            None => model.zero_state(),
        };
        let c = space.coords(&state);
        let tot = norm(&c);
        let lo = p.sigma - t - reach;
        let li = if lo > T::zero() {
            masked_norm(&space, &c, |d| d < lo)
        } else {
            T::zero()
        };
        let hi = p.tau + t + reach;
        let lo_out = masked_norm(&space, &c, |d| d > hi);
        inner.push(ratio(li, tot));
        outer.push(ratio(lo_out, tot));
        total.push(tot);
    }
    Ok(FsReport {
        sigma: p.sigma,
        tau: p.tau,
        times: p.times.clone(),
        leakage_inner: inner,
        leakage_outer: outer,
        total_norm: total,
        source_overlap,
    })
}
