//! Numerical kernels shared by the physics modules: adaptive quadrature on
//! semi-infinite and dephasing-weighted integrands, scalar fixed points, and
//! Volterra stepping for memory-kernel equations. All functions are pure.

pub mod fixed_point;
pub mod quadrature;
pub mod volterra;

pub use fixed_point::{
    bisect_fixed_point, solve_fixed_point, FixedPoint, FixedPointMethod, FixedPointSpec,
};
pub use quadrature::{
    integrate_partition, integrate_semi_infinite, integrate_semi_infinite_from, integrate_windowed,
    Estimate, QuadratureSpec, SemiInfiniteMap, WindowDomain,
};
pub use volterra::{volterra_solve_sampled, volterra_step};
