use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynamics::{solve_beta, solve_beta_impulse, Source};
use crate::error::{Error, Result};
use crate::func::SmoothFn;
use crate::model::{Model, ModelKind, SpatialGrid, StateVector};
use crate::numerics::{containment_angle, orthonormal_basis, Matrix, QuadratureGrid, DEFAULT_RANK_TOL};
use crate::scalar::{lit, Real};

use super::{masked_norm, norm, ratio};

#[derive(Clone, Debug, PartialEq)]
pub struct CompletenessParams<T> {
    pub tau: T,
    pub t: T,
    pub n_sources: usize,
    pub seed: u64,
    pub dt: T,
    /// Width of the regularized `δ` in time steps.
    pub reg_width_steps: usize,
    pub n_cells: usize,
    /// Source profiles per boundary side.
    pub n_basis: usize,
    /// Target functions per boundary side.
    pub n_targets: usize,
    pub margin: usize,
    /// Relative singular value cutoff for the wave span. The waves are
    /// strongly graded, so the cutoff sits well below the usual default.
    pub rank_tol: T,
}

impl<T: Real> CompletenessParams<T> {
    pub fn new(tau: T, t: T, n_sources: usize, seed: u64) -> Self {
        Self {
            tau,
            t,
            n_sources,
            seed,
            dt: lit(1e-3),
            reg_width_steps: 4,
            n_cells: 2048,
            n_basis: 12,
            n_targets: 6,
            margin: 2,
            rank_tol: lit(1e-10),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompletenessReport<T> {
    pub n_sources: usize,
    /// Largest angle between a target in `H^{τ+t}` and the wave span.
    pub largest_angle: T,
    pub wave_rank: usize,
    pub target_rank: usize,
    /// `τ + t ≥ T_*`: the target layer is the whole space.
    pub target_is_whole_space: bool,
    /// Relative norm of `I^t y` outside `Ω^{τ+t}` for a single `y ∈ H^τ`.
    pub impulse_leakage: T,
}

/// Profiles supported in `[0, τ]`: `((x)(τ − x))² cos(kπx/τ)` and mirrors.
fn layer_profiles<T: Real>(tau: T, per_side: usize) -> Vec<SmoothFn<T>> {
    let mut out = Vec::with_capacity(2 * per_side);
    for k in 0..per_side {
        let omega = T::from_usize_lossy(k) * T::PI() / tau;
        let left = SmoothFn::Product(vec![
            SmoothFn::PolyWindow { a: T::zero(), b: tau, power: 2 },
            SmoothFn::Sin { omega, phase: T::FRAC_PI_2() },
        ]);
        let right = SmoothFn::Product(vec![
            SmoothFn::PolyWindow { a: T::one() - tau, b: T::one(), power: 2 },
            SmoothFn::Sin { omega, phase: T::FRAC_PI_2() - omega * (T::one() - tau) },
        ]);
        out.push(left);
        out.push(right);
    }
    out
}

/// Grid coordinates of `sin(mπx/r)` on `[0, r]` and its mirror, clipped to
/// the domain.
fn target_coords<T: Real>(grid: &SpatialGrid<T>, r: T, per_side: usize) -> Matrix<T> {
    let r = r.min(T::one());
    let w = grid.dx().sqrt();
    let mut cols = Vec::with_capacity(2 * per_side);
    for m in 1..=per_side {
        let k = T::from_usize_lossy(m) * T::PI() / r;
        let f = |x: T| if x < r { (k * x).sin() } else { T::zero() };
        cols.push((0..grid.n_cells()).map(|i| w * f(grid.midpoint(i))).collect());
        cols.push((0..grid.n_cells()).map(|i| w * f(T::one() - grid.midpoint(i))).collect());
    }
    Matrix::from_columns(&cols)
}

/// Normalized Gaussian of width `w` at `s0`, or its derivative.
fn regularized_delta<T: Real>(s0: T, w: T, derivative: bool) -> SmoothFn<T> {
    let g = SmoothFn::Gaussian { center: s0, width: w }.scaled(T::one() / (w * (T::lit(2.0) * T::PI()).sqrt()));
    if derivative {
        g.derivative(1)
    } else {
        g
    }
}

/// Waves `v^{ψ_i}(t)` for sources `ψ_i = y_i δ(· − s_i)` and `y_i δ̇(· − s_i)`
/// (alternating, regularized) with `y_i` drawn from `H^τ`; reports how well
/// their span fills `H^{τ+t}`.
pub fn completeness_experiment<T: Real>(
    model: &Model<T>,
    p: &CompletenessParams<T>,
) -> Result<CompletenessReport<T>> {
    if model.kind() != ModelKind::Interval {
        return Err(Error::WrongBackend("completeness experiment needs the interval model".into()));
    }
    if !(p.tau > T::zero() && p.t > T::zero()) {
        return Err(Error::Precondition("requires τ > 0 and t > 0".into()));
    }
    if p.n_sources == 0 || p.n_basis == 0 {
        return Err(Error::Precondition("requires at least one source".into()));
    }
    let t_star = model.filling_time().unwrap_or(T::infinity());
    let whole = p.tau + p.t >= t_star;

    let basis: Vec<StateVector<T>> = layer_profiles(p.tau, p.n_basis)
        .par_iter()
        .map(|f| model.project_profile(f))
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let width = p.dt * T::from_usize_lossy(p.reg_width_steps);
    // Stratified release times: one per slot of `[0, t)`, jittered.
    let slot = p.t / T::from_usize_lossy(p.n_sources);
    let draws: Vec<(StateVector<T>, T)> = (0..p.n_sources)
        .map(|i| {
            let mut y = model.zero_state();
            for b in &basis {
                y.axpy(T::lit(rng.gen_range(-1.0..1.0)), b);
            }
            (y, (T::from_usize_lossy(i) + T::lit(rng.gen_range(0.0..1.0))) * slot)
        })
        .collect();

    let grid = QuadratureGrid::with_max_step(p.t, p.dt)?;
    let last = grid.n_nodes() - 1;
    let waves: Vec<StateVector<T>> = draws
        .par_iter()
        .enumerate()
        .map(|(i, (y, s0))| {
            let psi = Source::single(y.clone(), regularized_delta(*s0, width, i % 2 == 1));
            Ok(solve_beta(model, &psi, &grid)?.states.swap_remove(last))
        })
        .collect::<Result<_>>()?;

    let space = SpatialGrid::new(p.n_cells, model.n_modes());
    let tol = lit(DEFAULT_RANK_TOL);
    let span = crate::reachable::grid_span(&space, &waves, p.rank_tol);
    let target = if whole {
        crate::numerics::Subspace::full(p.n_cells, tol)
    } else {
        orthonormal_basis(&target_coords(&space, p.tau + p.t, p.n_targets), tol)
    };
    let largest_angle = containment_angle(&target, &span)?;

    let impulse = solve_beta_impulse(model, &draws[0].0, p.t)?;
    let coords = space.coords(&impulse);
    let reach = p.tau + p.t + T::from_usize_lossy(p.margin) * space.dx();
    let outside = masked_norm(&space, &coords, |d| d > reach);
    Ok(CompletenessReport {
        n_sources: p.n_sources,
        largest_angle,
        wave_rank: span.rank(),
        target_rank: target.rank(),
        target_is_whole_space: whole,
        impulse_leakage: ratio(outside, norm(&coords)),
    })
}
