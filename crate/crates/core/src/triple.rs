//! Vishik decomposition `y = y₀ + L⁻¹g + h`, the boundary operators
//! `Γ₁y = −h`, `Γ₂y = g`, Green's form and domain classification.

use crate::error::{Error, Result};
use crate::func::SmoothFn;
use crate::model::{Model, ModelKind, StateVector};
use crate::numerics::matrix::{cholesky, cholesky_solve, dot, norm2};
use crate::numerics::quadrature::gauss_legendre;
use crate::scalar::{lit, Real};

/// Default tolerance of [`classify_domain`].
pub const DOMAIN_TOL: f64 = 1e-8;

/// Element of `Dom L₀*`. On the interval a closed-form profile whose value,
/// first and second derivative can be evaluated anywhere on `[0, 1]`; in the
/// mock model any ambient vector.
#[derive(Clone, Debug, PartialEq)]
pub enum DomainElement<T> {
    Profile(SmoothFn<T>),
    Ambient(Vec<T>),
}

impl<T: Real> DomainElement<T> {
    pub fn poly(coeffs: Vec<T>) -> Self {
        Self::Profile(SmoothFn::Poly(coeffs))
    }
}

/// Output of [`vishik_decompose`]. `g` is given by coordinates over the
/// `K` basis, like `h.k_part`.
#[derive(Clone, Debug)]
pub struct VishikComponents<T> {
    pub y0: StateVector<T>,
    pub w: StateVector<T>,
    pub h: StateVector<T>,
    pub g: Vec<T>,
    /// Closed form of `y₀` on the interval.
    pub y0_profile: Option<SmoothFn<T>>,
    /// Closed form of `w` on the interval.
    pub w_profile: Option<SmoothFn<T>>,
}

impl<T: Real> VishikComponents<T> {
    pub fn h_coords(&self) -> &[T] {
        &self.h.k_part
    }

    pub fn reconstruct(&self) -> StateVector<T> {
        self.y0.add(&self.w).add(&self.h)
    }
}

fn profile<'a, T: Real>(model: &Model<T>, y: &'a DomainElement<T>) -> Result<&'a SmoothFn<T>> {
    match (model.kind(), y) {
        (ModelKind::Interval, DomainElement::Profile(f)) => Ok(f),
        _ => Err(Error::NotRepresentable(
            "interval model needs a profile with closed-form derivatives".into(),
        )),
    }
}

fn ambient<'a, T: Real>(model: &Model<T>, y: &'a DomainElement<T>) -> Result<&'a [T]> {
    match (model.kind(), y) {
        (ModelKind::Mock, DomainElement::Ambient(v)) if v.len() == model.n_modes() => Ok(v),
        (ModelKind::Mock, DomainElement::Ambient(v)) => Err(Error::DimensionMismatch {
            expected: model.n_modes(),
            actual: v.len(),
        }),
        _ => Err(Error::NotRepresentable("mock model needs an ambient vector".into())),
    }
}

fn check_finite<T: Real>(vals: &[T]) -> Result<()> {
    if vals.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NotRepresentable("non-finite boundary data".into()))
    }
}

/// Interval data: `h` endpoint values, the cubic coefficients `(a, b)` of
/// `w = x(1−x)(a + bx)` and `g` at both endpoints.
struct IntervalData<T> {
    kappa: [T; 2],
    a: T,
    b: T,
    g: [T; 2],
}

fn interval_data<T: Real>(y: &SmoothFn<T>) -> Result<IntervalData<T>> {
    let y0 = y.derivs(T::zero(), 1);
    let y1 = y.derivs(T::one(), 1);
    check_finite(&[y0[0], y0[1], y1[0], y1[1]])?;
    let slope = y1[0] - y0[0];
    // w' = (y − h)' at both ends; w'(0) = a, w'(1) = −(a + b)
    let a = y0[1] - slope;
    let b = -(y1[1] - slope) - a;
    // g = −w'' = 2(a − b) + 6bx
    let two = lit::<T>(2.0);
    let g0 = two * (a - b);
    let g1 = g0 + lit::<T>(6.0) * b;
    Ok(IntervalData {
        kappa: [y0[0], y1[0]],
        a,
        b,
        g: [g0, g1],
    })
}

fn cubic<T: Real>(a: T, b: T) -> SmoothFn<T> {
    // x(1−x)(a + bx) = a x + (b − a) x² − b x³
    SmoothFn::Poly(vec![T::zero(), a, b - a, -b])
}

fn linear<T: Real>(k0: T, k1: T) -> SmoothFn<T> {
    SmoothFn::Poly(vec![k0, k1 - k0])
}

pub fn vishik_decompose<T: Real>(
    model: &Model<T>,
    y: &DomainElement<T>,
) -> Result<VishikComponents<T>> {
    match model.kind() {
        ModelKind::Interval => {
            let f = profile(model, y)?;
            let d = interval_data(f)?;
            let w_fn = cubic(d.a, d.b);
            let h_fn = linear(d.kappa[0], d.kappa[1]);
            let y0_fn = SmoothFn::Sum(vec![f.clone(), h_fn.scaled(-T::one()), w_fn.clone().scaled(-T::one())]);
            let y_state = model.project_profile(f)?;
            let w = model.project_profile(&w_fn)?;
            let h = model.k_state(&d.kappa);
            let y0 = y_state.sub(&w).sub(&h);
            Ok(VishikComponents {
                y0,
                w,
                h,
                g: d.g.to_vec(),
                y0_profile: Some(y0_fn),
                w_profile: Some(w_fn),
            })
        }
        ModelKind::Mock => {
            let v = ambient(model, y)?;
            check_finite(v)?;
            let (y_v, kappa) = model.oblique_split(v)?;
            let g = mock_g(model, &y_v)?;
            let kg = model.k_basis()?.mul_vec(&g);
            let w_amb = solve_l(model, &kg)?;
            let y0_amb: Vec<T> = y_v.iter().zip(&w_amb).map(|(&a, &b)| a - b).collect();
            Ok(VishikComponents {
                y0: model.from_ambient(&y0_amb)?,
                w: model.from_ambient(&w_amb)?,
                h: model.k_state(&kappa),
                g,
                y0_profile: None,
                w_profile: None,
            })
        }
    }
}

/// `P L y_V` as `K` coordinates.
fn mock_g<T: Real>(model: &Model<T>, y_v: &[T]) -> Result<Vec<T>> {
    let ly = model.l_matrix()?.mul_vec(y_v);
    let moments = model.k_basis()?.tr_mul_vec(&ly);
    let chol = cholesky(model.k_gram()).ok_or(Error::NoSplitting)?;
    Ok(cholesky_solve(&chol, &moments))
}

fn solve_l<T: Real>(model: &Model<T>, v: &[T]) -> Result<Vec<T>> {
    let q = model.eigenvectors()?;
    let mut c = q.tr_mul_vec(v);
    for (ci, &l) in c.iter_mut().zip(model.eigenvalues()) {
        *ci = *ci / l;
    }
    Ok(q.mul_vec(&c))
}

/// `(Γ₁y, Γ₂y) = (−h, g)` as `K` coordinates.
pub fn boundary_operators<T: Real>(
    model: &Model<T>,
    y: &DomainElement<T>,
) -> Result<(Vec<T>, Vec<T>)> {
    match model.kind() {
        ModelKind::Interval => {
            let d = interval_data(profile(model, y)?)?;
            Ok((vec![-d.kappa[0], -d.kappa[1]], d.g.to_vec()))
        }
        ModelKind::Mock => {
            let v = ambient(model, y)?;
            check_finite(v)?;
            let (y_v, kappa) = model.oblique_split(v)?;
            Ok((kappa.iter().map(|&k| -k).collect(), mock_g(model, &y_v)?))
        }
    }
}

/// Panels of the Gauss–Legendre rule used for `L²(0, 1)` products of
/// profiles.
const GREEN_PANELS: usize = 256;

/// `(L₀*u, v)` for two elements.
fn l0star_pairing<T: Real>(model: &Model<T>, u: &DomainElement<T>, v: &DomainElement<T>) -> Result<T> {
    match model.kind() {
        ModelKind::Interval => {
            let (fu, fv) = (profile(model, u)?, profile(model, v)?);
            Ok(gauss_legendre(T::zero(), T::one(), GREEN_PANELS, |x| -fu.eval(x, 2) * fv.value(x)))
        }
        ModelKind::Mock => Ok(dot(&mock_l0star(model, ambient(model, u)?)?, ambient(model, v)?)),
    }
}

/// Mock `L₀*y = L y_V`.
pub fn mock_l0star<T: Real>(model: &Model<T>, y: &[T]) -> Result<Vec<T>> {
    let (y_v, _) = model.oblique_split(y)?;
    Ok(model.l_matrix()?.mul_vec(&y_v))
}

/// `|(L₀*u, v) − (u, L₀*v) − (Γ₁u, Γ₂v) + (Γ₂u, Γ₁v)|`
pub fn green_residual<T: Real>(
    model: &Model<T>,
    u: &DomainElement<T>,
    v: &DomainElement<T>,
) -> Result<T> {
    let lhs = l0star_pairing(model, u, v)? - l0star_pairing(model, v, u)?;
    let (g1u, g2u) = boundary_operators(model, u)?;
    let (g1v, g2v) = boundary_operators(model, v)?;
    let rhs = model.k_inner(&g1u, &g2v) - model.k_inner(&g2u, &g1v);
    Ok((lhs - rhs).abs())
}

/// Both sides of Green's formula, for reporting.
pub fn green_sides<T: Real>(
    model: &Model<T>,
    u: &DomainElement<T>,
    v: &DomainElement<T>,
) -> Result<(T, T)> {
    let lhs = l0star_pairing(model, u, v)? - l0star_pairing(model, v, u)?;
    let (g1u, g2u) = boundary_operators(model, u)?;
    let (g1v, g2v) = boundary_operators(model, v)?;
    Ok((lhs, model.k_inner(&g1u, &g2v) - model.k_inner(&g2u, &g1v)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DomainFlags {
    pub in_dom_l0: bool,
    pub in_dom_l: bool,
    pub in_ker_l0star: bool,
}

/// `‖L₀*y‖` in `H`.
pub fn l0star_norm<T: Real>(model: &Model<T>, y: &DomainElement<T>) -> Result<T> {
    match model.kind() {
        ModelKind::Interval => {
            let f = profile(model, y)?;
            let sq = gauss_legendre(T::zero(), T::one(), GREEN_PANELS, |x| {
                let d = f.eval(x, 2);
                d * d
            });
            Ok(sq.sqrt())
        }
        ModelKind::Mock => Ok(norm2(&mock_l0star(model, ambient(model, y)?)?)),
    }
}

pub fn classify_domain<T: Real>(model: &Model<T>, y: &DomainElement<T>, tol: T) -> Result<DomainFlags> {
    let (g1, g2) = boundary_operators(model, y)?;
    let g1_small = model.k_norm(&g1) <= tol;
    let g2_small = model.k_norm(&g2) <= tol;
    Ok(DomainFlags {
        in_dom_l0: g1_small && g2_small,
        in_dom_l: g1_small,
        in_ker_l0star: l0star_norm(model, y)? <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Matrix;
    use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

    fn mock2() -> Model<f64> {
        Model::mock(
            Matrix::diagonal(&[1.0, 2.0]),
            Matrix::from_columns(&[vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]]),
            Matrix::from_columns(&[vec![1.0, 0.0]]),
        )
        .unwrap()
    }

    #[test]
    fn interval_parabola() {
        let m = Model::<f64>::interval(512).unwrap();
        let y = DomainElement::poly(vec![0.0, 1.0, -1.0]);
        let c = vishik_decompose(&m, &y).unwrap();
        assert_eq!(c.h.k_part, vec![0.0, 0.0]);
        assert!((c.g[0] - 2.0).abs() < 1e-14 && (c.g[1] - 2.0).abs() < 1e-14);
        assert!(m.norm(&c.y0).unwrap() < 1e-10);
        let w = c.w_profile.unwrap();
        assert!((w.value(0.3) - 0.21).abs() < 1e-15);
        let (g1, g2) = boundary_operators(&m, &y).unwrap();
        assert_eq!(g1, vec![0.0, 0.0]);
        assert!((g2[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn interval_k_element() {
        let m = Model::<f64>::interval(64).unwrap();
        let y = DomainElement::poly(vec![1.0, -1.0]);
        let c = vishik_decompose(&m, &y).unwrap();
        assert_eq!(c.h.k_part, vec![1.0, 0.0]);
        assert_eq!(c.g, vec![0.0, 0.0]);
        assert!(m.norm(&c.y0).unwrap() < 1e-12);
        let (g1, g2) = boundary_operators(&m, &y).unwrap();
        assert_eq!((g1, g2), (vec![-1.0, -0.0], vec![0.0, 0.0]));
        let flags = classify_domain(&m, &y, DOMAIN_TOL).unwrap();
        assert!(flags.in_ker_l0star && !flags.in_dom_l);
    }

    #[test]
    fn interval_windowed_eigenfunction() {
        let m = Model::<f64>::interval(256).unwrap();
        let e1 = SmoothFn::Sin { omega: PI, phase: 0.0 }.scaled(SQRT_2);
        let y = DomainElement::Profile(SmoothFn::Product(vec![SmoothFn::bump(0.1, 0.9), e1]));
        let c = vishik_decompose(&m, &y).unwrap();
        assert!(c.h.k_part.iter().all(|v| v.abs() < 1e-14));
        assert!(c.g.iter().all(|v| v.abs() < 1e-14));
        assert!(m.norm(&c.w).unwrap() < 1e-14);
        let flags = classify_domain(&m, &y, DOMAIN_TOL).unwrap();
        assert!(flags.in_dom_l0 && flags.in_dom_l && !flags.in_ker_l0star);
    }

    #[test]
    fn y0_has_zero_cauchy_data() {
        let m = Model::<f64>::interval(32).unwrap();
        let y = DomainElement::Profile(SmoothFn::Sum(vec![
            SmoothFn::Poly(vec![0.3, -1.0, 2.0, 0.5]),
            SmoothFn::Sin { omega: 2.3, phase: 0.4 },
        ]));
        let c = vishik_decompose(&m, &y).unwrap();
        let y0 = c.y0_profile.unwrap();
        for x in [0.0, 1.0] {
            let d = y0.derivs(x, 1);
            assert!(d[0].abs() < 1e-14 && d[1].abs() < 1e-13, "{d:?}");
        }
    }

    #[test]
    fn interval_parabola_classification() {
        let m = Model::<f64>::interval(16).unwrap();
        let flags = classify_domain(&m, &DomainElement::poly(vec![0.0, 1.0, -1.0]), DOMAIN_TOL).unwrap();
        assert!(flags.in_dom_l && !flags.in_dom_l0 && !flags.in_ker_l0star);
    }

    #[test]
    fn mock_fixture() {
        let m = mock2();
        let y = DomainElement::Ambient(vec![2.0, 3.0]);
        let (g1, g2) = boundary_operators(&m, &y).unwrap();
        // K coordinates over (1,1)/√2: −h = (−3,−3), g = (−1/2,−1/2)
        let k = m.k_basis().unwrap();
        let g1a = k.mul_vec(&g1);
        let g2a = k.mul_vec(&g2);
        assert!((g1a[0] + 3.0).abs() < 1e-14 && (g1a[1] + 3.0).abs() < 1e-14);
        assert!((g2a[0] + 0.5).abs() < 1e-14 && (g2a[1] + 0.5).abs() < 1e-14);
        let c = vishik_decompose(&m, &y).unwrap();
        let back = m.to_ambient(&c.reconstruct()).unwrap();
        assert!((back[0] - 2.0).abs() < 1e-13 && (back[1] - 3.0).abs() < 1e-13);
    }

    #[test]
    fn green_fixtures() {
        let m = Model::<f64>::interval(8).unwrap();
        let u = DomainElement::poly(vec![0.0, 1.0, -1.0]);
        let v = DomainElement::poly(vec![0.0, 1.0]);
        let (l, r) = green_sides(&m, &u, &v).unwrap();
        assert!((l - 1.0).abs() < 1e-13 && (r - 1.0).abs() < 1e-13);
        assert!(green_residual(&m, &u, &v).unwrap() <= 1e-12);
        assert_eq!(green_residual(&m, &u, &u).unwrap(), 0.0);

        let m = mock2();
        let u = DomainElement::Ambient(vec![2.0, 3.0]);
        let v = DomainElement::Ambient(vec![0.0, 1.0]);
        let (l, r) = green_sides(&m, &u, &v).unwrap();
        assert!((l - 2.0).abs() < 1e-13 && (r - 2.0).abs() < 1e-13);
        assert!(green_residual(&m, &u, &v).unwrap() <= 1e-13);
    }

    #[test]
    fn mock_l0star_kills_k() {
        let m = mock2();
        let h = m.k_basis().unwrap().col(0).to_vec();
        assert_eq!(norm2(&mock_l0star(&m, &h).unwrap()), 0.0);
    }

    #[test]
    fn wrong_representation_rejected() {
        let m = mock2();
        assert!(vishik_decompose(&m, &DomainElement::poly(vec![1.0])).is_err());
        let i = Model::<f64>::interval(4).unwrap();
        assert!(vishik_decompose(&i, &DomainElement::Ambient(vec![1.0])).is_err());
    }
}
