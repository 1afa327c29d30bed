//! Age (internal-time) spectral analysis for quantum states with diagonal
//! singularity, discretized on an energy continuum `[0, e_max]`.
//!
//! States and observables carry a diagonal part (a density along the energy
//! diagonal) plus a Hilbert-Schmidt correlation kernel. In the rotated chart
//!
//! ```text
//! lambda = (E + E')/2,    nu = E - E',    |nu| <= 2*lambda,
//! ```
//!
//! the Liouvillian acts as multiplication by `nu` and the internal-time
//! (age) superoperator as `i d/dnu`, so each lambda-slice decomposes into
//! periodic Fourier modes `exp(-i*s*nu)` of age `s = n*pi/(2*lambda)`. On
//! that basis the library provides:
//!
//! - [`grid`]: the chart, quadrature, and kernel sampling/interpolation;
//! - [`algebra`]: observables, state functionals, their pairing (generalized
//!   trace), and embeddings of ordinary pure/mixed states as well as
//!   generalized sharp-energy states;
//! - [`evolution`]: Liouville-von Neumann evolution, mean-value
//!   trajectories, and the weak (diagonal) limit;
//! - [`ageop`]: the age decomposition, the `T+`/`L+` superoperators, the
//!   cumulative spectral measure, and defect metrics for the defining
//!   identities `[T+, L+] = i*Ic+` and the shift law;
//! - [`lyapunov`]: positive decreasing age profiles `A(s)`, the non-unitary
//!   transform they generate, and the Lyapunov variable `L(t)` computed both
//!   directly and spectrally.
//!
//! All values are immutable after construction and every operation is a pure
//! function of its inputs; sums are accumulated in a fixed order so repeated
//! runs are bit-identical.

pub mod ageop;
pub mod algebra;
pub mod error;
pub mod evolution;
pub mod grid;
pub mod lyapunov;

pub use ageop::{
    age_decompose, age_reconstruct, apply_age, apply_liouvillian, commutator_defect, eigen_defect,
    project_below, shift_defect, synthesize_mode, AgeSpectrum, DefectReport, EigenCheck,
};
pub use algebra::{
    check_observable, check_state, make_energy_state, make_mixed_state, make_observable,
    make_pure_state, pair, pair_parts, Observable, StateFunctional, ValidationReport,
};
pub use error::{Error, Result};
pub use evolution::{evolve, evolve_observable, mean_trajectory, weak_limit, Trajectory};
pub use grid::{build_chart, integrate_kernel, CorrelationKernel, EnergyGrid, LambdaNuChart};
pub use lyapunov::{
    lambda_transform, lyapunov_direct, lyapunov_series, lyapunov_spectral, lyapunov_spectral_from,
    make_profile, AgeProfile, LyapunovPoint, LyapunovSeries, ProfileKind,
};

/// Complex sample type used throughout.
pub type C64 = num_complex::Complex64;

/// Shorthand complex constructor.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
