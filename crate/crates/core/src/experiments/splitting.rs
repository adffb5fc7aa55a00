use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{solve_beta, Source};
use crate::error::{Error, Result};
use crate::func::SmoothFn;
use crate::model::{Model, ModelKind};
use crate::numerics::{QuadratureGrid, Subspace};
use crate::reachable::krylov_span;
use crate::scalar::Real;

/// Which part of `H = overline{U} ⊕ D` the source acts from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Placement {
    U,
    D,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitRow<T> {
    pub t: T,
    pub norm_in_u: T,
    pub norm_in_d: T,
}

/// Component norms of `v^ψ(t)` in `u_space` and its complement at every
/// node of `grid`. Subspaces are in frame coordinates.
pub fn splitting_norms<T: Real>(
    model: &Model<T>,
    u_space: &Subspace<T>,
    psi: &Source<T>,
    grid: &QuadratureGrid<T>,
) -> Result<Vec<SplitRow<T>>> {
    let d_space = u_space.complement();
    let v = solve_beta(model, psi, grid)?;
    v.states
        .iter()
        .zip(grid.nodes())
        .map(|(s, t)| {
            let c = model.frame_coords(s)?;
            Ok(SplitRow {
                t,
                norm_in_u: u_space.projection_norm(&c),
                norm_in_d: d_space.projection_norm(&c),
            })
        })
        .collect()
}

/// Mock model with a nontrivial defect: the source `ψ(t) = y·φ(t)` takes a
/// seeded random `y` from `overline{U}` (the Krylov span of `K`) or from `D`.
pub fn splitting_experiment<T: Real>(
    model: &Model<T>,
    placement: Placement,
    t_final: T,
    n_intervals: usize,
    seed: u64,
) -> Result<Vec<SplitRow<T>>> {
    if model.kind() != ModelKind::Mock {
        return Err(Error::WrongBackend("splitting experiment needs the mock model".into()));
    }
    let (u, _) = krylov_span(model, T::lit(crate::numerics::DEFAULT_RANK_TOL))?;
    let d = u.complement();
    if d.rank() == 0 {
        return Err(Error::Precondition("system β_D is absent: D = {0}".into()));
    }
    let from = match placement {
        Placement::U => &u,
        Placement::D => &d,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<T> = (0..from.rank()).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect();
    let y = from.basis().mul_vec(&weights);
    let psi = Source::single(
        model.spectral_state(y),
        SmoothFn::ramp_trig(T::lit(0.01), T::lit(0.2), &[(T::one(), T::lit(2.0), T::lit(0.5))]),
    );
    let grid = QuadratureGrid::new(T::zero(), t_final, n_intervals)?;
    splitting_norms(model, &u, &psi, &grid)
}
