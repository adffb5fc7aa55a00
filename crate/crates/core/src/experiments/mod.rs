//! Executable checks of the structural theorems: finite-speed membership,
//! duality relations, the cone identities for `b(s,t) = (v^ψ(s), u^f(t))`,
//! splitting along `U ⊕ D`, completeness of source-generated waves, the
//! interior-support domain check and the support of boundary-driven waves.

mod completeness;
mod cone;
mod duality;
mod fs;
mod interior;
mod splitting;
mod support;

pub use completeness::{completeness_experiment, CompletenessParams, CompletenessReport};
pub use cone::{blagoveshchenskii_residual, cone_field, BlagoveshchenskiiReport, ConeField};
pub use duality::{
    duality_residual, gamma2_vanishing_check, source_duality_residual, DualityReport, Gamma2Input,
};
pub use fs::{fs_membership, fs_source, FsParams, FsReport, TRIVIAL_GROWTH};
pub use interior::{interior_domain_check, InteriorReport};
pub use splitting::{splitting_experiment, splitting_norms, Placement, SplitRow};
pub use support::{wave_support, SupportRow};

use crate::model::SpatialGrid;
use crate::scalar::Real;

/// Euclidean norm of grid coordinates restricted to cells satisfying `keep`.
fn masked_norm<T: Real>(grid: &SpatialGrid<T>, coords: &[T], keep: impl Fn(T) -> bool) -> T {
    coords
        .iter()
        .enumerate()
        .filter(|(i, _)| keep(grid.boundary_distance(*i)))
        .map(|(_, &v)| v * v)
        .sum::<T>()
        .sqrt()
}

fn norm<T: Real>(v: &[T]) -> T {
    v.iter().map(|&x| x * x).sum::<T>().sqrt()
}

/// `a / b`, zero when `b` is zero.
fn ratio<T: Real>(a: T, b: T) -> T {
    if b == T::zero() {
        T::zero()
    } else {
        a / b
    }
}
