//! Weak-pump frequency-domain solution for pair generation (no SPM/XPM).

mod kernels;
mod observables;
mod pair_function;

pub use kernels::{ensure_same_axes, linear_response, pair_amplitude, port_pair_amplitude, response_kernels, ResponseKernels};
pub use observables::{
    amplitude_summary, integrate_grid, jsi_closed_form, jsi_moments, marginal_fwhms, observables, observables_unchecked,
    points_per_width, schmidt_analysis, AmplitudeSummary, Jsi, JsiMoments, ObservableOptions, PairObservables,
    SchmidtAnalysis,
};
pub use pair_function::{pump_pair_function, PairFunctionEvaluator, PumpPairFunction};
