use crate::dynamics::{solve_alpha_at, solve_beta, AlphaForm, Control, Source};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::numerics::quadrature::simpson_any;
use crate::numerics::{dot, Matrix, QuadratureGrid};
use crate::scalar::{lit, Real};

/// `b(s, t) = (v^ψ(s), u^f(t))` and the right side
/// `F(s, t) = −(Γ₂ v^ψ(s), f(t)) − (ψ(s), u^f(t))` of `b_tt − b_ss = F` on a
/// uniform square grid; rows index `s`, columns `t`.
#[derive(Clone, Debug)]
pub struct ConeField<T> {
    pub h: T,
    pub b: Matrix<T>,
    pub f: Matrix<T>,
}

impl<T: Real> ConeField<T> {
    pub fn n_intervals(&self) -> usize {
        self.b.rows() - 1
    }

    /// `max_s |b(s, 0)|` and `max_s |b(s, h)| / h`: the Cauchy data on the
    /// bottom `t = 0`, to grid accuracy.
    pub fn cauchy_defect(&self) -> (T, T) {
        let n = self.n_intervals();
        let mut v0 = T::zero();
        let mut v1 = T::zero();
        for i in 0..=n {
            v0 = v0.max(self.b[(i, 0)].abs());
            v1 = v1.max(self.b[(i, 1)].abs() / self.h);
        }
        (v0, v1)
    }

    /// Largest `|D_tt b − D_ss b − F|` over interior nodes.
    pub fn pde_residual(&self) -> T {
        let n = self.n_intervals();
        let h2 = self.h * self.h;
        let two = lit::<T>(2.0);
        let mut worst = T::zero();
        for i in 1..n {
            for j in 1..n {
                let btt = (self.b[(i, j + 1)] - two * self.b[(i, j)] + self.b[(i, j - 1)]) / h2;
                let bss = (self.b[(i + 1, j)] - two * self.b[(i, j)] + self.b[(i - 1, j)]) / h2;
                worst = worst.max((btt - bss - self.f[(i, j)]).abs());
            }
        }
        worst
    }

    /// `∫_{C_{s,t}} F` over the backward cone with `s` as the space
    /// variable: rows `η = t_k`, `ξ ∈ [s − (t − η), s + (t − η)]`.
    pub fn cone_integral(&self, i: usize, j: usize) -> T {
        let rows: Vec<T> = (0..=j)
            .map(|k| {
                let w = j - k;
                let row: Vec<T> = (i - w..=i + w).map(|r| self.f[(r, k)]).collect();
                simpson_any(self.h, &row)
            })
            .collect();
        simpson_any(self.h, &rows)
    }

    /// `∫_{C'_{s,t}} F` over the cone with the roles of `s` and `t`
    /// exchanged: rows `ξ = s_k`, `η ∈ [t − (s − ξ), t + (s − ξ)]`.
    pub fn cone_integral_swapped(&self, i: usize, j: usize) -> T {
        let rows: Vec<T> = (0..=i)
            .map(|k| {
                let w = i - k;
                let row: Vec<T> = (j - w..=j + w).map(|c| self.f[(k, c)]).collect();
                simpson_any(self.h, &row)
            })
            .collect();
        simpson_any(self.h, &rows)
    }
}

/// Builds the field. Trajectories are computed on a grid `2·refine` times
/// finer and subsampled on even nodes.
pub fn cone_field<T: Real>(
    model: &Model<T>,
    psi: &Source<T>,
    f: &Control<T>,
    s_grid: &QuadratureGrid<T>,
    t_grid: &QuadratureGrid<T>,
    refine: usize,
) -> Result<ConeField<T>> {
    if s_grid != t_grid || s_grid.t0() != T::zero() {
        return Err(Error::InvalidGrid(
            "s and t grids must coincide and start at zero".into(),
        ));
    }
    let n = s_grid.n_intervals();
    let m = 2 * refine.max(1);
    let fine = QuadratureGrid::new(T::zero(), s_grid.t1(), n * m)?;
    let keep: Vec<usize> = (0..=n).map(|i| i * m).collect();
    let u = solve_alpha_at(model, f, &fine, AlphaForm::Sine, &keep)?;
    let v_all = solve_beta(model, psi, &fine)?;
    let nodes = s_grid.nodes();

    let fu: Vec<Vec<T>> = u.iter().map(|s| model.frame_coords(s)).collect::<Result<_>>()?;
    let mut fv = Vec::with_capacity(n + 1);
    let mut g2v = Vec::with_capacity(n + 1);
    let mut fpsi = Vec::with_capacity(n + 1);
    for (i, &s) in nodes.iter().enumerate() {
        let v = v_all.state(keep[i]);
        fv.push(model.frame_coords(v)?);
        g2v.push(model.gamma2(v)?);
        fpsi.push(model.frame_coords(&psi.value(model, s))?);
    }
    let fk: Vec<Vec<T>> = nodes.iter().map(|&t| f.value(t)).collect();
    let b = Matrix::from_fn(n + 1, n + 1, |i, j| dot(&fv[i], &fu[j]));
    let ff = Matrix::from_fn(n + 1, n + 1, |i, j| {
        -model.k_inner(&g2v[i], &fk[j]) - dot(&fpsi[i], &fu[j])
    });
    Ok(ConeField { h: s_grid.dt(), b, f: ff })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlagoveshchenskiiReport<T> {
    pub pde_residual: T,
    /// `max |b(s,t) − ½∫_C F|` over sampled `t ≤ s`.
    pub cone_residual_c: T,
    /// `max |b(s,t) + ½∫_{C'} F|` over sampled `s ≤ t`.
    pub cone_residual_cprime: T,
    /// The same residuals with the opposite sign in front of the integral.
    pub cone_residual_c_flipped: T,
    pub cone_residual_cprime_flipped: T,
    /// Largest `|b|` over the sampled points, for scale.
    pub b_scale: T,
    pub cauchy_value: T,
    pub cauchy_slope: T,
}

/// PDE residual of the field and D'Alembert residuals on both cones at
/// every `stride`-th node inside the admissible region `i + j ≤ n`.
pub fn blagoveshchenskii_residual<T: Real>(
    model: &Model<T>,
    psi: &Source<T>,
    f: &Control<T>,
    s_grid: &QuadratureGrid<T>,
    t_grid: &QuadratureGrid<T>,
    stride: usize,
) -> Result<BlagoveshchenskiiReport<T>> {
    let field = cone_field(model, psi, f, s_grid, t_grid, 2)?;
    let n = field.n_intervals();
    let half = lit::<T>(0.5);
    let stride = stride.max(1);
    let (mut c, mut cf, mut cp, mut cpf, mut scale) = (T::zero(), T::zero(), T::zero(), T::zero(), T::zero());
    for i in (stride..=n).step_by(stride) {
        for j in (stride..=n - i).step_by(stride) {
            let bij = field.b[(i, j)];
            scale = scale.max(bij.abs());
            if j <= i {
                let int = field.cone_integral(i, j);
                c = c.max((bij - half * int).abs());
                cf = cf.max((bij + half * int).abs());
            }
            if i <= j {
                let int = field.cone_integral_swapped(i, j);
                cp = cp.max((bij + half * int).abs());
                cpf = cpf.max((bij - half * int).abs());
            }
        }
    }
    let (cauchy_value, cauchy_slope) = field.cauchy_defect();
    Ok(BlagoveshchenskiiReport {
        pde_residual: field.pde_residual(),
        cone_residual_c: c,
        cone_residual_cprime: cp,
        cone_residual_c_flipped: cf,
        cone_residual_cprime_flipped: cpf,
        b_scale: scale,
        cauchy_value,
        cauchy_slope,
    })
}
