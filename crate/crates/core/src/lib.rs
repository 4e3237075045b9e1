//! Photon-pair generation by spontaneous four-wave mixing in a lossy
//! microring resonator side-coupled to a bus waveguide.
//!
//! Two routes compute the biphoton output. [`sfwm`] gives the weak-pump
//! frequency-domain solution (pump-pair function, response kernels, joint
//! spectral intensity, singles and coincidences). [`propagator`] integrates
//! the 2×2 Green function of the linearised signal/idler equations under a
//! classical pump, including cross-phase modulation, and assembles the same
//! pair amplitude in the time domain.

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod model;
pub mod numerics;
pub mod propagator;
pub mod pump;
pub mod scenario;
pub mod sfwm;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use model::{
    derive_rates_with_tol, estimate_nonlinear_couplings, singles_ratio_closed_form, DerivedRates, MaterialEstimate, Mode,
    ModeParams, ModeRates, NonlinearCouplings, Port, RingSystem,
};
