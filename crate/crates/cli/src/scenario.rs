//! Builds core objects from a validated configuration, and carries the
//! closed-form oracle for the Gaussian scenario family.

use crate::config::{
    ConfigError, DiagConfig, KernelConfig, ProfileKindConfig, ScenarioConfig, StateConfig,
};
use num_complex::Complex64 as C64;
use qage::{
    build_chart, make_energy_state, make_mixed_state, make_observable, make_profile,
    make_pure_state, synthesize_mode, AgeProfile, LambdaNuChart, Observable, ProfileKind,
    StateFunctional,
};
use std::f64::consts::PI;

pub struct BuiltScenario {
    pub chart: LambdaNuChart,
    pub state: StateFunctional,
    pub observable: Observable,
    pub profile: AgeProfile,
    pub times: Vec<f64>,
}

fn core_err(e: qage::Error) -> ConfigError {
    ConfigError(e.to_string())
}

pub fn build_state(
    chart: &LambdaNuChart,
    config: &StateConfig,
) -> Result<StateFunctional, ConfigError> {
    match *config {
        StateConfig::PureGaussian { center, width } => make_pure_state(chart, move |e| {
            C64::new((-((e - center) / (2.0 * width)).powi(2)).exp(), 0.0)
        })
        .map_err(core_err),
        StateConfig::Energy { e0 } => make_energy_state(chart, e0).map_err(core_err),
        StateConfig::MixedGaussianRidge {
            center,
            lambda_width,
            nu_width,
        } => make_mixed_state(chart, move |e, ep| {
            let l = 0.5 * (e + ep);
            let nu = e - ep;
            C64::new(
                (-0.5 * ((l - center) / lambda_width).powi(2) - 0.5 * (nu / nu_width).powi(2))
                    .exp(),
                0.0,
            )
        })
        .map_err(core_err),
    }
}

pub fn build_observable(
    chart: &LambdaNuChart,
    diag: &DiagConfig,
    kernel: &KernelConfig,
) -> Result<Observable, ConfigError> {
    let coeffs: Vec<f64> = match diag {
        DiagConfig::Polynomial { coeffs } => coeffs.clone(),
        DiagConfig::None => vec![],
    };
    let diag_fn = move |e: f64| coeffs.iter().rev().fold(0.0, |acc, &c| acc * e + c);
    match *kernel {
        KernelConfig::GaussianRidge {
            lambda_center,
            lambda_width,
            nu_width,
            amplitude,
        } => make_observable(chart, diag_fn, move |e, ep| {
            let l = 0.5 * (e + ep);
            let nu = e - ep;
            C64::new(
                amplitude
                    * (-0.5 * ((l - lambda_center) / lambda_width).powi(2)
                        - 0.5 * (nu / nu_width).powi(2))
                    .exp(),
                0.0,
            )
        })
        .map_err(core_err),
        KernelConfig::PureMode { slice, mode } => {
            let corr = synthesize_mode(chart, slice, mode);
            let diag_samples: Vec<f64> = chart.grid().nodes().iter().map(|&e| diag_fn(e)).collect();
            Ok(Observable::from_parts_unchecked(diag_samples, corr))
        }
        KernelConfig::None => make_observable(chart, diag_fn, |_, _| C64::ZERO).map_err(core_err),
    }
}

pub fn build_profile(config: &crate::config::ProfileConfig) -> Result<AgeProfile, ConfigError> {
    let kind = match config.kind {
        ProfileKindConfig::Logistic => ProfileKind::Logistic,
        ProfileKindConfig::ExponentialTail => ProfileKind::ExponentialTail,
    };
    make_profile(kind, config.beta).map_err(core_err)
}

pub fn build_scenario(config: &ScenarioConfig) -> Result<BuiltScenario, ConfigError> {
    config.validate()?;
    let chart =
        build_chart(config.grid.e_max, config.grid.n_lambda, config.grid.m_nu).map_err(core_err)?;
    let state = build_state(&chart, &config.state)?;
    let observable = build_observable(&chart, &config.observable.diag, &config.observable.kernel)?;
    let profile = build_profile(&config.profile)?;
    let times = config.times.materialize();
    Ok(BuiltScenario {
        chart,
        state,
        observable,
        profile,
        times,
    })
}

/// Closed-form description of the correlation mean-value term for the
/// Gaussian family (pure Gaussian state against a Gaussian-ridge kernel):
/// `M(t) = peak * exp(-t^2 / (4a))`.
#[derive(Debug, Clone, Copy)]
pub struct EnvelopeOracle {
    /// `M(0)`.
    pub peak: f64,
    /// Decay parameter `a` (the product kernel is `exp(-a nu^2)` in nu).
    pub a: f64,
    /// Combined lambda-concentration exponent `b` (product is
    /// `exp(-b (lambda - center)^2)` in lambda).
    pub b: f64,
    /// Common center energy.
    pub center: f64,
}

impl EnvelopeOracle {
    /// Available when both the state and the kernel are the Gaussian
    /// families sharing one center (the demo scenario shape).
    pub fn from_config(config: &ScenarioConfig) -> Option<Self> {
        let (sc, sw) = match config.state {
            StateConfig::PureGaussian { center, width } => (center, width),
            _ => return None,
        };
        let (kc, klw, knw, amp) = match config.observable.kernel {
            KernelConfig::GaussianRidge {
                lambda_center,
                lambda_width,
                nu_width,
                amplitude,
            } => (lambda_center, lambda_width, nu_width, amplitude),
            _ => return None,
        };
        // state kernel: exp(-(l-sc)^2/(2 sw^2)) * exp(-nu^2/(8 sw^2))
        let p = 1.0 / (2.0 * sw * sw);
        let q = 1.0 / (2.0 * klw * klw);
        let a = 1.0 / (8.0 * sw * sw) + 1.0 / (2.0 * knw * knw);
        let z = sw * (2.0 * PI).sqrt();
        let i_lambda = (PI / (p + q)).sqrt() * (-(p * q) * (sc - kc).powi(2) / (p + q)).exp();
        let i_nu = (PI / a).sqrt();
        let peak = (amp * i_lambda * i_nu / z).abs();
        Some(Self {
            peak,
            a,
            b: p + q,
            center: 0.5 * (sc + kc),
        })
    }

    /// `|M(t)|`.
    pub fn amplitude(&self, t: f64) -> f64 {
        self.peak * (-t * t / (4.0 * self.a)).exp()
    }

    /// Upper bound on the discrete sum's recurrence (alias) contamination
    /// at time `t`: each slice's nu-sum is periodic with period
    /// `P_j = pi*m/(2 lambda_j)`, so aliases sit at `|t - q P_j|` with the
    /// slice's lambda-weight in front.
    pub fn alias_bound(&self, chart: &LambdaNuChart, t: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..chart.n_lambda() {
            let lambda = chart.lambda(j);
            let weight = (-self.b * (lambda - self.center).powi(2)).exp();
            if weight < 1e-300 {
                continue;
            }
            let period = PI * chart.m_nu() as f64 / (2.0 * lambda);
            let q = (t / period).round().max(1.0);
            for qq in [q - 1.0, q, q + 1.0] {
                if qq >= 1.0 {
                    let dist = (t - qq * period).abs();
                    worst = worst.max(weight * (-dist * dist / (4.0 * self.a)).exp());
                }
            }
        }
        self.peak * worst
    }

    /// Largest horizon `T` such that tracking `M(t)` against the analytic
    /// envelope at mixed tolerance `rtol*M(t) + atol` stays alias-clean on
    /// this chart. `None` if even small times are contaminated.
    pub fn tracking_horizon(&self, chart: &LambdaNuChart, rtol: f64, atol: f64) -> Option<f64> {
        let t_floor = (4.0 * self.a * (self.peak.max(1e-300) / (0.5 * atol)).ln()).sqrt();
        let steps = 400;
        let mut horizon = None;
        for i in 0..=steps {
            let t = t_floor * i as f64 / steps as f64;
            if self.alias_bound(chart, t) > 0.25 * (rtol * self.amplitude(t) + atol) {
                break;
            }
            horizon = Some(t);
        }
        horizon.filter(|&t| t > 0.0)
    }

    /// A time where the total correlation remnant (envelope + aliases) is
    /// provably below `target`; `None` when the chart cannot reach it.
    pub fn settle_time(&self, chart: &LambdaNuChart, target: f64) -> Option<f64> {
        let t_env = (4.0 * self.a * (self.peak.max(1e-300) / (0.25 * target)).ln()).sqrt();
        let steps = 400;
        (0..=steps)
            .map(|i| t_env + t_env * i as f64 / steps as f64)
            .find(|&t| self.amplitude(t) + self.alias_bound(chart, t) <= 0.5 * target)
    }
}
