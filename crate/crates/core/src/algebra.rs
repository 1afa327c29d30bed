//! Observables with diagonal singularity, state functionals, and their
//! pairing.
//!
//! An observable is a real diagonal profile `O_E` on the lambda-grid plus a
//! Hermitian correlation kernel `O(lambda,nu)`; a state is a real diagonal
//! density `rho_E` (unit generalized trace) plus a correlation kernel stored
//! un-conjugated. The pairing
//!
//! ```text
//! (rho|O) = sum_j dl*rho_E(l_j)*O_E(l_j)
//!         + sum_jk dl*(4 l_j/m)*conj(rho(l_j,nu_k))*O(l_j,nu_k)
//! ```
//!
//! applies the conjugation itself, so constructors stay WYSIWYG with the
//! coefficient functions. Ordinary pure/mixed embeddings tie `rho_E` to the
//! kernel diagonal `rho(lambda, 0)`; generalized sharp-energy states break
//! that tie on purpose, which is what lets `(E|` have finite trace and zero
//! energy variance at once.

use crate::error::{Error, Result};
use crate::grid::{CorrelationKernel, LambdaNuChart};
use crate::{c64, C64};

/// Hermiticity tolerance imposed on sampled constructor inputs.
pub const CONSTRUCTOR_HERMITICITY_TOL: f64 = 1e-12;
/// Defect tolerance for [`ValidationReport::passes`].
pub const VALIDATION_TOL: f64 = 1e-10;

/// Observable with diagonal part and Hilbert-Schmidt correlation kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    diag: Vec<f64>,
    corr: CorrelationKernel,
}

/// State functional with diagonal density and correlation kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct StateFunctional {
    diag: Vec<f64>,
    corr: CorrelationKernel,
}

macro_rules! parts_accessors {
    ($ty:ty) => {
        impl $ty {
            #[inline]
            pub fn chart(&self) -> &LambdaNuChart {
                self.corr.chart()
            }

            /// Diagonal profile on the lambda-grid.
            #[inline]
            pub fn diag(&self) -> &[f64] {
                &self.diag
            }

            /// Correlation kernel.
            #[inline]
            pub fn corr(&self) -> &CorrelationKernel {
                &self.corr
            }

            /// Assemble from raw parts without any validation. Intended for
            /// diagnostics and tests that need to plant defects; everything
            /// built this way should be run through the `check_*` functions.
            pub fn from_parts_unchecked(diag: Vec<f64>, corr: CorrelationKernel) -> Self {
                Self { diag, corr }
            }

            /// Replace the kernel, keeping the diagonal.
            pub(crate) fn with_corr(&self, corr: CorrelationKernel) -> Self {
                Self {
                    diag: self.diag.clone(),
                    corr,
                }
            }
        }
    };
}

parts_accessors!(Observable);
parts_accessors!(StateFunctional);

impl Observable {
    /// Observable with zero diagonal carrying the given kernel.
    pub(crate) fn with_zero_diag(corr: CorrelationKernel) -> Self {
        Self {
            diag: vec![0.0; corr.chart().n_lambda()],
            corr,
        }
    }

    /// The identity observable: `O_E = 1`, no correlations.
    pub fn identity(chart: &LambdaNuChart) -> Self {
        Self {
            diag: vec![1.0; chart.n_lambda()],
            corr: CorrelationKernel::zero(chart),
        }
    }

    /// The Hamiltonian as an observable: `O_E = E`, no correlations.
    pub fn hamiltonian(chart: &LambdaNuChart) -> Self {
        Self {
            diag: chart.grid().nodes().to_vec(),
            corr: CorrelationKernel::zero(chart),
        }
    }
}

impl StateFunctional {
    /// Generalized trace `sum_j dl * rho_E(lambda_j)`.
    pub fn generalized_trace(&self) -> f64 {
        let step = self.chart().grid().step();
        self.diag.iter().map(|&d| step * d).sum()
    }

    /// Convex mixture `alpha*a + (1-alpha)*b`; preserves the unit trace.
    pub fn mix(alpha: f64, a: &Self, b: &Self) -> Result<Self> {
        if a.chart() != b.chart() {
            return Err(Error::ChartMismatch);
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidProfile(format!(
                "mixture weight {alpha} outside [0,1]"
            )));
        }
        let diag = a
            .diag
            .iter()
            .zip(&b.diag)
            .map(|(&x, &y)| alpha * x + (1.0 - alpha) * y)
            .collect();
        let corr = b
            .corr
            .scaled(c64(1.0 - alpha, 0.0))
            .add_scaled(c64(alpha, 0.0), &a.corr)?;
        Ok(Self { diag, corr })
    }
}

fn sample_diag(chart: &LambdaNuChart, f: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
    let diag: Vec<f64> = chart.grid().nodes().iter().map(|&e| f(e)).collect();
    if let Some(j) = diag.iter().position(|d| !d.is_finite()) {
        return Err(Error::NonFinite(format!("diagonal sample at node {j}")));
    }
    Ok(diag)
}

fn require_hermitian(kernel: &CorrelationKernel) -> Result<()> {
    if !kernel.hs_norm_sq().is_finite() {
        return Err(Error::NonFinite("sampled kernel".into()));
    }
    let defect = kernel.hermiticity_defect();
    if defect > CONSTRUCTOR_HERMITICITY_TOL {
        return Err(Error::NotHermitian {
            defect,
            tol: CONSTRUCTOR_HERMITICITY_TOL,
        });
    }
    Ok(())
}

/// Builds an observable from a real diagonal profile and a Hermitian
/// correlation function of `(E, E')`; kernel samples falling outside the
/// energy square are zero. Rejects non-finite diagonal samples and sampled
/// kernels whose Hermiticity defect exceeds 1e-12.
pub fn make_observable(
    chart: &LambdaNuChart,
    diag_fn: impl Fn(f64) -> f64,
    corr_fn: impl Fn(f64, f64) -> C64,
) -> Result<Observable> {
    let diag = sample_diag(chart, diag_fn)?;
    let corr = CorrelationKernel::from_energy_fn(chart, corr_fn);
    require_hermitian(&corr)?;
    Ok(Observable { diag, corr })
}

/// Embeds an ordinary pure state `|Psi>` as a functional: diagonal
/// `|psi(lambda)|^2 / Z` and kernel `psi(E) conj(psi(E')) / Z`, with `Z` the
/// chart-quadrature norm, so the generalized trace is 1.
pub fn make_pure_state(chart: &LambdaNuChart, psi: impl Fn(f64) -> C64) -> Result<StateFunctional> {
    let amplitudes: Vec<C64> = chart.grid().nodes().iter().map(|&e| psi(e)).collect();
    if let Some(j) = amplitudes
        .iter()
        .position(|a| !a.re.is_finite() || !a.im.is_finite())
    {
        return Err(Error::NonFinite(format!(
            "wave function sample at node {j}"
        )));
    }
    let step = chart.grid().step();
    let z: f64 = amplitudes.iter().map(|a| step * (a * a.conj()).re).sum();
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::ZeroNorm);
    }
    // scale by a shared reciprocal so the factored mixed-state construction
    // produces bit-identical samples
    let recip = 1.0 / z;
    let diag = amplitudes
        .iter()
        .map(|a| (a * a.conj()).re * recip)
        .collect();
    let corr = CorrelationKernel::from_energy_fn(chart, |e, ep| psi(e) * psi(ep).conj())
        .scaled(c64(recip, 0.0));
    if !corr.hs_norm_sq().is_finite() {
        return Err(Error::NonFinite("sampled kernel".into()));
    }
    Ok(StateFunctional { diag, corr })
}

/// Walks `1/step` by ulps until `step * w` rounds to exactly 1, so delta
/// states pair with the identity bit-exactly.
fn exact_reciprocal(step: f64) -> f64 {
    let v = 1.0 / step;
    let mut best = v;
    let mut best_err = (step * v - 1.0).abs();
    if best_err == 0.0 {
        return v;
    }
    for dir in [1i64, -1] {
        let mut u = v;
        for _ in 0..4 {
            u = f64::from_bits((u.to_bits() as i64 + dir) as u64);
            let err = (step * u - 1.0).abs();
            if err < best_err {
                best = u;
                best_err = err;
                if err == 0.0 {
                    return u;
                }
            }
        }
    }
    best
}

/// The generalized sharp-energy state `(E_0|`: a discrete delta of weight
/// `1/dl` at the node nearest `e0`, no correlations. Its generalized trace
/// is exactly 1 and `(E|H^n) = E_0^n` exactly at nodes.
pub fn make_energy_state(chart: &LambdaNuChart, e0: f64) -> Result<StateFunctional> {
    if !(e0.is_finite() && e0 > 0.0 && e0 < chart.e_max()) {
        return Err(Error::EnergyOutOfRange(e0));
    }
    let j = chart.grid().nearest_node(e0);
    let mut diag = vec![0.0; chart.n_lambda()];
    diag[j] = exact_reciprocal(chart.grid().step());
    Ok(StateFunctional {
        diag,
        corr: CorrelationKernel::zero(chart),
    })
}

/// Embeds an ordinary mixture given its density kernel `rho(E, E')`:
/// diagonal `rho(lambda,lambda)/Z`, kernel `rho/Z`. Rejects non-Hermitian
/// kernels and non-positive traces.
pub fn make_mixed_state(
    chart: &LambdaNuChart,
    rho_fn: impl Fn(f64, f64) -> C64,
) -> Result<StateFunctional> {
    let corr = CorrelationKernel::from_energy_fn(chart, &rho_fn);
    require_hermitian(&corr)?;
    let step = chart.grid().step();
    let raw_diag: Vec<C64> = chart.grid().nodes().iter().map(|&e| rho_fn(e, e)).collect();
    if let Some(j) = raw_diag
        .iter()
        .position(|d| !d.re.is_finite() || d.im.abs() > CONSTRUCTOR_HERMITICITY_TOL)
    {
        return Err(Error::NonFinite(format!(
            "density diagonal at node {j} is not finite real"
        )));
    }
    let z: f64 = raw_diag.iter().map(|d| step * d.re).sum();
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let recip = 1.0 / z;
    let diag = raw_diag.iter().map(|d| d.re * recip).collect();
    let corr = corr.scaled(c64(recip, 0.0));
    Ok(StateFunctional { diag, corr })
}

/// Diagonal and correlation contributions to the pairing `(rho|O)`,
/// returned separately. The diagonal accumulation order `(dl*rho)*O` is
/// part of the contract: it keeps delta-state pairings bit-exact.
pub fn pair_parts(state: &StateFunctional, obs: &Observable) -> Result<(C64, C64)> {
    let chart = state.chart();
    if chart != obs.chart() {
        return Err(Error::ChartMismatch);
    }
    let step = chart.grid().step();
    let mut diag_term = 0.0;
    for (rho, o) in state.diag.iter().zip(&obs.diag) {
        diag_term += (step * rho) * o;
    }
    let mut corr_term = C64::ZERO;
    for j in 0..chart.n_lambda() {
        let w = chart.sample_weight(j);
        let mut row = C64::ZERO;
        for k in 0..chart.m_nu() {
            row += state.corr[(j, k)].conj() * obs.corr[(j, k)];
        }
        corr_term += w * row;
    }
    Ok((c64(diag_term, 0.0), corr_term))
}

/// Mean value `(rho|O)`; real to ~1e-10 whenever both arguments satisfy
/// their Hermiticity invariants.
pub fn pair(state: &StateFunctional, obs: &Observable) -> Result<C64> {
    let (d, c) = pair_parts(state, obs)?;
    Ok(d + c)
}

/// Defect report produced by [`check_state`] / [`check_observable`].
/// Reports, never errors.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// Non-finite diagonal entries count as an infinite defect; real storage
    /// otherwise enforces reality structurally.
    pub diag_reality_defect: f64,
    /// Max-abs defect of `K(lambda,-nu) = conj(K(lambda,nu))` over samples.
    pub hermiticity_defect: f64,
    /// `|generalized trace - 1|`; `None` for observables.
    pub trace_defect: Option<f64>,
    /// Chart Hilbert-Schmidt norm of the kernel.
    pub hs_norm: f64,
    /// Max over nodes of `|rho_E(lambda) - K(lambda, 0)|`. Ordinary
    /// (pure/mixed) embeddings keep this at zero; generalized states do not.
    /// Informational: does not affect `passes`.
    pub diag_kernel_gap: Option<f64>,
    /// Smallest diagonal entry. States are only required to be real and
    /// normalized, not positive; a negative density is reported here, never
    /// rejected. `None` for observables.
    pub diag_min: Option<f64>,
    /// Tolerance used by `passes`.
    pub tolerance: f64,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.diag_reality_defect <= self.tolerance
            && self.hermiticity_defect <= self.tolerance
            && self.trace_defect.unwrap_or(0.0) <= self.tolerance
            && self.hs_norm.is_finite()
    }

    /// Whether the functional looks like an ordinary (pure/mixed) embedding,
    /// i.e. its diagonal agrees with the kernel diagonal.
    pub fn is_ordinary(&self) -> Option<bool> {
        self.diag_kernel_gap.map(|g| g <= self.tolerance)
    }
}

fn diag_reality_defect(diag: &[f64]) -> f64 {
    if diag.iter().all(|d| d.is_finite()) {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Validation report for a state: reality, Hermiticity, trace, and the
/// ordinary-vs-generalized diagnostic.
pub fn check_state(state: &StateFunctional) -> ValidationReport {
    let chart = state.chart();
    let k0 = chart.m_nu() / 2;
    let gap = (0..chart.n_lambda())
        .map(|j| (state.corr[(j, k0)] - c64(state.diag[j], 0.0)).norm())
        .fold(0.0f64, f64::max);
    ValidationReport {
        diag_reality_defect: diag_reality_defect(&state.diag),
        hermiticity_defect: state.corr.hermiticity_defect(),
        trace_defect: Some((state.generalized_trace() - 1.0).abs()),
        hs_norm: state.corr.hs_norm_sq().sqrt(),
        diag_kernel_gap: Some(gap),
        diag_min: state
            .diag
            .iter()
            .copied()
            .fold(None, |acc: Option<f64>, d| {
                Some(acc.map_or(d, |a| a.min(d)))
            }),
        tolerance: VALIDATION_TOL,
    }
}

/// Validation report for an observable: reality and Hermiticity.
pub fn check_observable(obs: &Observable) -> ValidationReport {
    ValidationReport {
        diag_reality_defect: diag_reality_defect(&obs.diag),
        hermiticity_defect: obs.corr.hermiticity_defect(),
        trace_defect: None,
        hs_norm: obs.corr.hs_norm_sq().sqrt(),
        diag_kernel_gap: None,
        diag_min: None,
        tolerance: VALIDATION_TOL,
    }
}
