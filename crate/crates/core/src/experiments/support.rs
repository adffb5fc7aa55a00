use crate::dynamics::{solve_alpha_at, AlphaForm, Control};
use crate::error::{Error, Result};
use crate::model::{Model, ModelKind, SpatialGrid};
use crate::numerics::QuadratureGrid;
use crate::scalar::Real;

use super::{masked_norm, norm, ratio};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupportRow<T> {
    pub t: T,
    /// Energy of `u^f(·, t)` on cells farther than `t + margin·dx` from the
    /// boundary, relative to the total.
    pub outside_energy: T,
    pub total_energy: T,
}

/// Energy of boundary-driven waves outside `Ω^t` on a midpoint grid.
pub fn wave_support<T: Real>(
    model: &Model<T>,
    f: &Control<T>,
    times: &[T],
    dt: T,
    n_cells: usize,
    margin: usize,
) -> Result<Vec<SupportRow<T>>> {
    if model.kind() != ModelKind::Interval {
        return Err(Error::WrongBackend("wave support needs the interval model".into()));
    }
    let t_max = times.iter().copied().fold(T::zero(), T::max);
    let grid = QuadratureGrid::with_max_step(t_max, dt)?;
    let keep: Vec<usize> = times.iter().map(|&t| grid.nearest_index(t)).collect();
    let states = solve_alpha_at(model, f, &grid, AlphaForm::Sine, &keep)?;
    let space = SpatialGrid::new(n_cells, model.n_modes());
    let reach = space.dx() * T::from_usize_lossy(margin);
    Ok(times
        .iter()
        .zip(&states)
        .map(|(&t, s)| {
            let c = space.coords(s);
            let total = norm(&c);
            let out = masked_norm(&space, &c, |d| d > t + reach);
            SupportRow {
                t,
                outside_energy: ratio(out * out, total * total),
                total_energy: total * total,
            }
        })
        .collect())
}
