use crate::dynamics::beta_impulse_velocity;
use crate::error::{Error, Result};
use crate::func::SmoothFn;
use crate::model::{Model, ModelKind};
use crate::scalar::{lit, Real};
use crate::triple::{boundary_operators, classify_domain, DomainElement, DomainFlags, DOMAIN_TOL};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InteriorReport<T> {
    pub flags: DomainFlags,
    /// `‖Γ₂ y‖` from the Vishik decomposition.
    pub gamma2_norm: T,
    /// `‖Γ₂ v̇^y(t)‖` at a small `t > 0` through the spectral expansion.
    pub gamma2_velocity_norm: T,
}

/// Points checked for the support margin on each side.
const MARGIN_SAMPLES: usize = 512;

/// Domain classification of a profile supported in `Ω ∖ Ω^τ`.
pub fn interior_domain_check<T: Real>(model: &Model<T>, y: &SmoothFn<T>, tau: T) -> Result<InteriorReport<T>> {
    if model.kind() != ModelKind::Interval {
        return Err(Error::WrongBackend("interior check needs the interval model".into()));
    }
    if tau <= T::zero() {
        return Err(Error::Precondition("support margin τ must be positive".into()));
    }
    let scale = (0..=MARGIN_SAMPLES)
        .map(|k| y.value(T::from_usize_lossy(k) / T::from_usize_lossy(MARGIN_SAMPLES)).abs())
        .fold(T::zero(), T::max);
    let tiny = lit::<T>(1e-14) * scale.max(T::min_positive_value());
    for k in 0..=MARGIN_SAMPLES {
        let x = tau * T::from_usize_lossy(k) / T::from_usize_lossy(MARGIN_SAMPLES);
        for p in [x, T::one() - x] {
            if y.derivs(p, 2).iter().any(|v| v.abs() > tiny) {
                return Err(Error::Precondition(
                    "support not separated from the boundary by τ".into(),
                ));
            }
        }
    }
    let elem = DomainElement::Profile(y.clone());
    let flags = classify_domain(model, &elem, lit(DOMAIN_TOL))?;
    let (_, g2) = boundary_operators(model, &elem)?;
    let state = model.project_profile(y)?;
    let vdot = beta_impulse_velocity(model, &state, lit(1e-6))?;
    Ok(InteriorReport {
        flags,
        gamma2_norm: model.k_norm(&g2),
        gamma2_velocity_norm: model.k_norm(&model.gamma2(&vdot)?),
    })
}
