//! Sampled reachable subspaces `U^τ`, growth profiles, defect subspaces and
//! the layer subspaces `H^r` of the interval.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynamics::{solve_alpha_at, AlphaForm, Control};
use crate::error::{Error, Result};
use crate::func::SmoothFn;
use crate::model::{Model, ModelKind, SpatialGrid, StateVector};
use crate::numerics::{orthonormal_basis, Matrix, QuadratureGrid, Subspace};
use crate::scalar::{lit, Real};

/// Random class-M controls: for every `K` direction an independent profile
/// `exp(−δ/(t − t₀)) Σ a_m sin(ω_m t + φ_m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlSampler {
    pub omega_max: f64,
    pub n_terms: usize,
    pub onset: f64,
    pub ramp_width: f64,
}

impl Default for ControlSampler {
    fn default() -> Self {
        Self {
            omega_max: 60.0,
            n_terms: 8,
            onset: 1e-3,
            ramp_width: 0.1,
        }
    }
}

impl ControlSampler {
    pub fn sample<T: Real>(&self, k_dim: usize, rng: &mut ChaCha8Rng) -> Control<T> {
        let mut f = Control::zero(k_dim);
        for j in 0..k_dim {
            let terms: Vec<(T, T, T)> = (0..self.n_terms)
                .map(|_| {
                    let a = rng.gen_range(-1.0..1.0);
                    let w = rng.gen_range(0.0..self.omega_max);
                    let p = rng.gen_range(0.0..std::f64::consts::TAU);
                    (T::lit(a), T::lit(w), T::lit(p))
                })
                .collect();
            let mut kappa = vec![T::zero(); k_dim];
            kappa[j] = T::one();
            let profile = SmoothFn::ramp_trig(T::lit(self.onset), T::lit(self.ramp_width), &terms);
            f = f.with_term(kappa, profile);
        }
        f
    }

    /// `n` controls from a ChaCha stream seeded with `seed`; the stream is
    /// consumed sequentially so the family depends only on the seed.
    pub fn sample_many<T: Real>(&self, k_dim: usize, n: usize, seed: u64) -> Vec<Control<T>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.sample(k_dim, &mut rng)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReachableOptions {
    pub sampler: ControlSampler,
    /// Largest time step of the trajectory grid.
    pub dt: f64,
    pub rank_tol: f64,
}

impl Default for ReachableOptions {
    fn default() -> Self {
        Self {
            sampler: ControlSampler::default(),
            dt: 1e-3,
            rank_tol: crate::numerics::DEFAULT_RANK_TOL,
        }
    }
}

fn time_grid<T: Real>(t_max: T, dt: f64) -> Result<QuadratureGrid<T>> {
    QuadratureGrid::with_max_step(t_max, T::lit(dt))
}

/// Waves `u^{f_i}(τ_j)`; the outer index runs over `taus`. Every control is
/// solved once on a grid covering the largest time.
pub fn reachable_states<T: Real>(
    model: &Model<T>,
    taus: &[T],
    controls: &[Control<T>],
    dt: f64,
) -> Result<Vec<Vec<StateVector<T>>>> {
    let t_max = taus.iter().copied().fold(T::zero(), T::max);
    if t_max <= T::zero() {
        return Err(Error::Precondition("reachable sets need τ > 0".into()));
    }
    let grid = time_grid(t_max, dt)?;
    let idx: Vec<usize> = taus.iter().map(|&t| grid.nearest_index(t)).collect();
    let per_control: Vec<Vec<StateVector<T>>> = controls
        .par_iter()
        .map(|f| {
            solve_alpha_at(model, f, &grid, AlphaForm::Sine, &idx)
        })
        .collect::<Result<_>>()?;
    Ok((0..taus.len())
        .map(|j| per_control.iter().map(|s| s[j].clone()).collect())
        .collect())
}

/// Span of states in the model's orthonormal frame.
pub fn frame_span<T: Real>(model: &Model<T>, states: &[StateVector<T>], tol: T) -> Result<Subspace<T>> {
    let cols = states
        .iter()
        .map(|s| model.frame_coords(s))
        .collect::<Result<Vec<_>>>()?;
    if cols.is_empty() {
        return Ok(Subspace::zero(model.frame_dim(), tol));
    }
    Ok(orthonormal_basis(&Matrix::from_columns(&cols), tol))
}

/// Span of states evaluated on a spatial grid (interval only).
pub fn grid_span<T: Real>(grid: &SpatialGrid<T>, states: &[StateVector<T>], tol: T) -> Subspace<T> {
    if states.is_empty() {
        return Subspace::zero(grid.n_cells(), tol);
    }
    let cols: Vec<Vec<T>> = states.par_iter().map(|s| grid.coords(s)).collect();
    orthonormal_basis(&Matrix::from_columns(&cols), tol)
}

/// `overline{U^τ}` from `n_samples` seeded controls, in frame coordinates.
pub fn reachable_subspace<T: Real>(
    model: &Model<T>,
    tau: T,
    n_samples: usize,
    seed: u64,
    opts: &ReachableOptions,
) -> Result<Subspace<T>> {
    if tau <= T::zero() || n_samples == 0 {
        return Err(Error::Precondition("requires τ > 0 and n_samples ≥ 1".into()));
    }
    let controls = opts.sampler.sample_many(model.k_dim(), n_samples, seed);
    let states = reachable_states(model, &[tau], &controls, opts.dt)?;
    frame_span(model, &states[0], T::lit(opts.rank_tol))
}

/// Numerical ranks of `overline{U^τ}` for ascending `taus`, all from the
/// same control family.
pub fn growth_profile<T: Real>(
    model: &Model<T>,
    taus: &[T],
    n_samples: usize,
    seed: u64,
    opts: &ReachableOptions,
) -> Result<Vec<(T, usize)>> {
    if taus.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("τ list must be strictly ascending".into()));
    }
    let controls = opts.sampler.sample_many(model.k_dim(), n_samples, seed);
    let states = reachable_states(model, taus, &controls, opts.dt)?;
    let tol = T::lit(opts.rank_tol);
    states
        .par_iter()
        .zip(taus)
        .map(|(s, &t)| Ok((t, frame_span(model, s, tol)?.rank())))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DefectMethod<T> {
    /// Complement of the sampled `overline{U^τ}` at the given time.
    Sampled { tau: T },
    /// Complement of `span{L^k K : k ≥ 1}` (mock only).
    Krylov,
}

/// `span{L^k K : k ≥ 1}` in frame coordinates, by power iteration with
/// re-orthonormalization. Stops once the rank is unchanged for two
/// consecutive powers. Returns the span and the number of powers used.
pub fn krylov_span<T: Real>(model: &Model<T>, tol: T) -> Result<(Subspace<T>, usize)> {
    if model.kind() != ModelKind::Mock {
        return Err(Error::WrongBackend("Krylov span needs the mock model".into()));
    }
    let n = model.n_modes();
    let lam = model.eigenvalues();
    let mut block: Vec<Vec<T>> = model.k_coeffs().columns().map(<[T]>::to_vec).collect();
    let mut all: Vec<Vec<T>> = Vec::new();
    let mut rank = 0;
    let mut stable = 0;
    let mut k = 0;
    while stable < 2 && k < 2 * n + 2 {
        k += 1;
        for v in &mut block {
            for (x, &l) in v.iter_mut().zip(lam) {
                *x = *x * l;
            }
            let s = crate::numerics::norm2(v);
            if s > T::zero() {
                v.iter_mut().for_each(|x| *x = *x / s);
            }
        }
        all.extend(block.iter().cloned());
        let span = orthonormal_basis(&Matrix::from_columns(&all), tol);
        if span.rank() == rank {
            stable += 1;
        } else {
            stable = 0;
            rank = span.rank();
        }
        // keep the accumulated family well conditioned
        all = span.basis().columns().map(<[T]>::to_vec).collect();
    }
    Ok((orthonormal_basis(&Matrix::from_columns(&all), tol), k))
}

/// `D = H ⊖ overline{U}` in frame coordinates.
pub fn defect_subspace<T: Real>(
    model: &Model<T>,
    method: DefectMethod<T>,
    n_samples: usize,
    seed: u64,
    opts: &ReachableOptions,
) -> Result<Subspace<T>> {
    let u = match method {
        DefectMethod::Sampled { tau } => reachable_subspace(model, tau, n_samples, seed, opts)?,
        DefectMethod::Krylov => krylov_span(model, T::lit(opts.rank_tol))?.0,
    };
    Ok(u.complement())
}

/// `L` in the frame coordinates of the mock model: `diag(λ)`.
pub fn frame_operator<T: Real>(model: &Model<T>) -> Result<Matrix<T>> {
    if model.kind() != ModelKind::Mock {
        return Err(Error::WrongBackend("frame operator needs the mock model".into()));
    }
    Ok(Matrix::diagonal(model.eigenvalues()))
}

/// Layer subspace `H^r` on a midpoint grid: cells within `r` of the boundary
/// plus `margin` cells, as coordinate unit vectors.
pub fn layer_subspace<T: Real>(grid: &SpatialGrid<T>, r: T, margin: usize) -> Subspace<T> {
    let cells = grid.layer_cells(r, margin);
    let mut basis = Matrix::zeros(grid.n_cells(), cells.len());
    for (j, &i) in cells.iter().enumerate() {
        basis[(i, j)] = T::one();
    }
    Subspace::from_orthonormal(basis, lit(crate::numerics::DEFAULT_RANK_TOL))
}

/// Default widening of layer subspaces, in cells.
pub const LAYER_MARGIN: usize = 2;

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_mock(k: Vec<f64>) -> Model<f64> {
        let n = k.len();
        // complement: coordinate vectors not parallel to k
        let skip = k.iter().position(|v| *v != 0.0).unwrap();
        let cols: Vec<Vec<f64>> = (0..n)
            .filter(|&i| i != skip)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
        let diag: Vec<f64> = (1..=n).map(|i| i as f64).collect();
        Model::mock(Matrix::diagonal(&diag), Matrix::from_columns(&[k]), Matrix::from_columns(&cols)).unwrap()
    }

    #[test]
    fn sampler_is_deterministic_and_class_m() {
        let s = ControlSampler::default();
        let a: Vec<Control<f64>> = s.sample_many(2, 3, 7);
        let b: Vec<Control<f64>> = s.sample_many(2, 3, 7);
        assert_eq!(a, b);
        assert!(a.iter().all(Control::is_class_m));
        let c: Vec<Control<f64>> = s.sample_many(2, 3, 8);
        assert_ne!(a, c);
    }

    #[test]
    fn mock_eigen_direction_reaches_one_dimension() {
        let m = diag_mock(vec![1.0, 0.0, 0.0]);
        let opts = ReachableOptions::default();
        for tau in [0.1, 0.5, 1.0] {
            let u = reachable_subspace(&m, tau, 8, 3, &opts).unwrap();
            assert_eq!(u.rank(), 1);
        }
        let d = defect_subspace(&m, DefectMethod::Krylov, 0, 0, &opts).unwrap();
        assert_eq!(d.rank(), 2);
        // D = span{e₂, e₃} in eigen coordinates
        assert!(d.residual_norm(&[0.0, 1.0, 0.0]) < 1e-12);
        assert!(d.residual_norm(&[0.0, 0.0, 1.0]) < 1e-12);
    }

    #[test]
    fn mock_cyclic_vector_has_no_defect() {
        let m = diag_mock(vec![1.0, 1.0, 1.0]);
        let opts = ReachableOptions::default();
        let d = defect_subspace(&m, DefectMethod::Krylov, 0, 0, &opts).unwrap();
        assert_eq!(d.rank(), 0);
        let d = defect_subspace(&m, DefectMethod::Sampled { tau: 1.0 }, 12, 1, &opts).unwrap();
        assert_eq!(d.rank(), 0);
    }

    #[test]
    fn mock_invariance_of_u_and_d() {
        let m = diag_mock(vec![1.0, 0.0, 1.0]);
        let opts = ReachableOptions::default();
        let u = reachable_subspace(&m, 0.7, 10, 5, &opts).unwrap();
        let (k, _) = krylov_span(&m, 1e-8).unwrap();
        assert_eq!(u.rank(), k.rank());
        assert_eq!(u.rank(), 2);
        let l = frame_operator(&m).unwrap();
        assert!(u.invariance_defect(&l) < 1e-10);
        assert!(u.complement().invariance_defect(&l) < 1e-10);
    }

    #[test]
    fn mock_growth_is_flat() {
        let m = Model::mock(
            Matrix::diagonal(&[1.0, 4.0, 9.0]),
            Matrix::from_columns(&[vec![1.0, 1.0, 1.0]]),
            Matrix::from_columns(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]),
        )
        .unwrap();
        let g = growth_profile(&m, &[0.1, 0.5, 1.0], 12, 9, &ReachableOptions::default()).unwrap();
        assert!(g.iter().all(|&(_, r)| r == 3), "{g:?}");
    }

    #[test]
    fn interval_growth_small_model() {
        let m = Model::<f64>::interval(48).unwrap();
        let opts = ReachableOptions {
            sampler: ControlSampler {
                omega_max: 48.0 * std::f64::consts::PI,
                n_terms: 16,
                onset: 1e-3,
                ramp_width: 0.01,
            },
            dt: 2.5e-4,
            ..ReachableOptions::default()
        };
        let taus = [0.1, 0.2, 0.3, 0.4, 0.6, 0.8];
        let g = growth_profile(&m, &taus, 120, 11, &opts).unwrap();
        for w in g.windows(2) {
            assert!(w[0].1 <= w[1].1, "{g:?}");
        }
        assert!(g[0].1 < g[3].1, "{g:?}");
        assert_eq!(g[4].1, m.frame_dim(), "{g:?}");
    }

    #[test]
    fn layer_subspace_counts_cells() {
        let g = SpatialGrid::<f64>::new(100, 4);
        let h = layer_subspace(&g, 0.1, 0);
        assert_eq!(h.rank(), 20);
        assert_eq!(layer_subspace(&g, 0.0, 2).rank(), 0);
    }
}
