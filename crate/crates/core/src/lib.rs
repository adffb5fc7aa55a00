pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod func;
pub mod model;
pub mod numerics;
pub mod reachable;
pub mod scalar;
pub mod triple;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Model = model::Model<f64>;
pub type StateVector = model::StateVector<f64>;
pub type SmoothFn = func::SmoothFn<f64>;
pub type Control = dynamics::Control<f64>;
pub type Source = dynamics::Source<f64>;
pub type Trajectory = dynamics::Trajectory<f64>;
pub type Matrix = numerics::Matrix<f64>;
pub type Subspace = numerics::Subspace<f64>;
pub type QuadratureGrid = numerics::QuadratureGrid<f64>;
