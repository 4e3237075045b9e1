//! Shared numerical kernels: grids, quadrature, ODE integration, Fourier
//! pairs, interpolation and kernel SVD.

pub mod fourier;
pub mod grid;
pub mod interp;
pub mod ode;
pub mod quad;
pub mod svd;

pub use fourier::{fourier_at, fourier_pair, fourier_transform, Direction, FourierResult};
pub use grid::{Grid2D, SpectralGrid, TimeGrid, UniformAxis};
pub use ode::{ode_solve, rk4_step, OdeOptions, OdeState, Trajectory};
pub use quad::{gregory_weight, integrate_1d, QuadError, QuadOptions, QuadValue};
pub use svd::{svd_kernel, KernelSvd};
