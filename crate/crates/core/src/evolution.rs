//! Liouville-von Neumann time evolution and the weak limit.
//!
//! Evolution never touches diagonal parts. Stored state kernels pick up the
//! phase `exp(-i*nu*t)` so that after the conjugation inside the pairing the
//! mean value carries `exp(+i*(E-E')*t)`; observable kernels carry
//! `exp(+i*nu*t)` directly (Heisenberg picture). The two conventions are
//! tied together by the duality `(U_t rho | O) = (rho | U_t^+ O)`.
//!
//! For kernels that are smooth in nu the correlation contribution to any
//! mean value dephases (Riemann-Lebesgue); its diagonal part is the weak
//! limit.

use crate::algebra::{pair_parts, Observable, StateFunctional};
use crate::error::{Error, Result};
use crate::grid::CorrelationKernel;
use crate::C64;

fn phased(kernel: &CorrelationKernel, t: f64, sign: f64) -> CorrelationKernel {
    if t == 0.0 {
        // exact group identity
        return kernel.clone();
    }
    kernel.map_with_coords(|_, nu, v| C64::from_polar(1.0, sign * nu * t) * v)
}

/// Schroedinger-picture evolution: diagonal untouched, kernel sample at
/// `(lambda, nu)` multiplied by `exp(-i*nu*t)`. `evolve(rho, 0)` is the
/// identity, and composition obeys the group law to machine precision.
pub fn evolve(state: &StateFunctional, t: f64) -> StateFunctional {
    state.with_corr(phased(state.corr(), t, -1.0))
}

/// Heisenberg-picture evolution of an observable: kernel multiplied by
/// `exp(+i*nu*t)`; dual to [`evolve`] under the pairing.
pub fn evolve_observable(obs: &Observable, t: f64) -> Observable {
    obs.with_corr(phased(obs.corr(), t, 1.0))
}

/// Mean values of one observable along a list of times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    means: Vec<C64>,
    offdiag_magnitude: Vec<f64>,
}

impl Trajectory {
    #[inline]
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// `(rho_t | O)` per time.
    #[inline]
    pub fn means(&self) -> &[C64] {
        &self.means
    }

    /// Modulus of the correlation contribution alone, per time.
    #[inline]
    pub fn offdiag_magnitude(&self) -> &[f64] {
        &self.offdiag_magnitude
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

pub(crate) fn require_increasing(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidTimes("empty time list".into()));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidTimes("non-finite time".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidTimes(
            "times must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Evaluates `(rho_t|O)` at the given strictly increasing times, recording
/// the correlation contribution separately.
pub fn mean_trajectory(
    state: &StateFunctional,
    obs: &Observable,
    times: &[f64],
) -> Result<Trajectory> {
    require_increasing(times)?;
    let mut means = Vec::with_capacity(times.len());
    let mut offdiag = Vec::with_capacity(times.len());
    for &t in times {
        let (d, c) = pair_parts(&evolve(state, t), obs)?;
        means.push(d + c);
        offdiag.push(c.norm());
    }
    Ok(Trajectory {
        times: times.to_vec(),
        means,
        offdiag_magnitude: offdiag,
    })
}

/// The t -> infinity weak limit: the diagonal functional with the same
/// diagonal coefficients and no correlations.
pub fn weak_limit(state: &StateFunctional) -> StateFunctional {
    state.with_corr(CorrelationKernel::zero(state.chart()))
}
