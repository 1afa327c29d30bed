//! Scenario configuration: a single JSON document selecting grid sizes, a
//! state, an observable, times, an age profile, and output options. Every
//! family is a closed enum with an analytic oracle behind it.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub grid: GridConfig,
    #[serde(default = "StateConfig::demo")]
    pub state: StateConfig,
    #[serde(default = "ObservableConfig::demo")]
    pub observable: ObservableConfig,
    #[serde(default = "TimesConfig::demo")]
    pub times: TimesConfig,
    #[serde(default = "ProfileConfig::demo")]
    pub profile: ProfileConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
}

impl Default for ScenarioConfig {
    /// The Gaussian demo scenario: 64x64 chart on `[0, 20]`, pure Gaussian
    /// state at E = 4, Hamiltonian diagonal with a Gaussian-ridge kernel,
    /// logistic profile.
    fn default() -> Self {
        Self {
            grid: GridConfig {
                e_max: 20.0,
                n_lambda: 64,
                m_nu: 64,
            },
            state: StateConfig::demo(),
            observable: ObservableConfig::demo(),
            times: TimesConfig::demo(),
            profile: ProfileConfig::demo(),
            outputs: OutputConfig::default(),
            tolerances: ToleranceConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub e_max: f64,
    pub n_lambda: usize,
    pub m_nu: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateConfig {
    /// `psi(E) = exp(-((E-center)/(2 width))^2)`, normalized on the chart.
    PureGaussian { center: f64, width: f64 },
    /// Sharp-energy generalized state at the node nearest `e0`.
    Energy { e0: f64 },
    /// Density kernel
    /// `exp(-(lambda-center)^2/(2 lambda_width^2) - nu^2/(2 nu_width^2))`.
    MixedGaussianRidge {
        center: f64,
        lambda_width: f64,
        nu_width: f64,
    },
}

impl StateConfig {
    pub fn demo() -> Self {
        Self::PureGaussian {
            center: 4.0,
            width: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableConfig {
    pub diag: DiagConfig,
    pub kernel: KernelConfig,
}

impl ObservableConfig {
    pub fn demo() -> Self {
        Self {
            diag: DiagConfig::Polynomial {
                coeffs: vec![0.0, 1.0],
            },
            kernel: KernelConfig::GaussianRidge {
                lambda_center: 4.0,
                lambda_width: 0.5,
                nu_width: 1.0,
                amplitude: 1.0,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DiagConfig {
    /// `O_E = sum_i coeffs[i] * E^i`.
    Polynomial { coeffs: Vec<f64> },
    /// No diagonal part.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelConfig {
    /// `amplitude * exp(-(lambda-lambda_center)^2/(2 lambda_width^2)
    ///                  - nu^2/(2 nu_width^2))`.
    GaussianRidge {
        lambda_center: f64,
        lambda_width: f64,
        nu_width: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    /// The discrete eigenmode `exp(-i s nu)` on one slice.
    PureMode { slice: usize, mode: i64 },
    /// No correlation part.
    None,
}

fn default_amplitude() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum TimesConfig {
    Range { start: f64, stop: f64, count: usize },
    List { list: Vec<f64> },
}

impl TimesConfig {
    pub fn demo() -> Self {
        Self::Range {
            start: 0.0,
            stop: 12.0,
            count: 61,
        }
    }

    pub fn materialize(&self) -> Vec<f64> {
        match self {
            Self::Range { start, stop, count } => {
                if *count == 1 {
                    vec![*start]
                } else {
                    (0..*count)
                        .map(|i| start + (stop - start) * i as f64 / (*count as f64 - 1.0))
                        .collect()
                }
            }
            Self::List { list } => list.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub kind: ProfileKindConfig,
    pub beta: f64,
}

impl ProfileConfig {
    pub fn demo() -> Self {
        Self {
            kind: ProfileKindConfig::Logistic,
            beta: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKindConfig {
    Logistic,
    ExponentialTail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: String,
    #[serde(default)]
    pub format: TableFormat,
    #[serde(default)]
    pub plot: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            format: TableFormat::Csv,
            plot: false,
        }
    }
}

fn default_dir() -> String {
    "out".into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    /// Multiplies every check tolerance in `verify`.
    #[serde(default = "default_scale")]
    pub scale: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            scale: default_scale(),
        }
    }
}

fn default_scale() -> f64 {
    1.0
}

/// A configuration problem: reported on stderr and mapped to exit code 1.
#[derive(Debug, thiserror::Error)]
#[error("config error: {0}")]
pub struct ConfigError(pub String);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), ConfigError> {
    if cond {
        Ok(())
    } else {
        Err(ConfigError(msg.into()))
    }
}

fn positive_finite(x: f64, what: &str) -> Result<(), ConfigError> {
    ensure(
        x.is_finite() && x > 0.0,
        format!("{what} must be positive and finite, got {x}"),
    )
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let g = &self.grid;
        positive_finite(g.e_max, "grid.e_max")?;
        ensure(g.n_lambda >= 1, "grid.n_lambda must be at least 1")?;
        ensure(g.m_nu >= 4, "grid.m_nu must be at least 4")?;
        ensure(
            g.m_nu.is_multiple_of(2),
            format!("grid.m_nu must be even, got {}", g.m_nu),
        )?;

        match &self.state {
            StateConfig::PureGaussian { center, width } => {
                positive_finite(*width, "state.width")?;
                ensure(
                    center.is_finite() && *center > 0.0 && *center < g.e_max,
                    format!("state.center must lie inside (0, e_max), got {center}"),
                )?;
            }
            StateConfig::Energy { e0 } => {
                ensure(
                    e0.is_finite() && *e0 > 0.0 && *e0 < g.e_max,
                    format!("state.e0 must lie inside (0, e_max), got {e0}"),
                )?;
            }
            StateConfig::MixedGaussianRidge {
                center,
                lambda_width,
                nu_width,
            } => {
                positive_finite(*lambda_width, "state.lambda_width")?;
                positive_finite(*nu_width, "state.nu_width")?;
                ensure(
                    center.is_finite() && *center > 0.0 && *center < g.e_max,
                    format!("state.center must lie inside (0, e_max), got {center}"),
                )?;
            }
        }

        match &self.observable.diag {
            DiagConfig::Polynomial { coeffs } => {
                ensure(
                    !coeffs.is_empty(),
                    "observable.diag.coeffs must not be empty",
                )?;
                ensure(
                    coeffs.len() <= 8,
                    "observable.diag.coeffs supports degree at most 7",
                )?;
                ensure(
                    coeffs.iter().all(|c| c.is_finite()),
                    "observable.diag.coeffs must be finite",
                )?;
            }
            DiagConfig::None => {}
        }
        match &self.observable.kernel {
            KernelConfig::GaussianRidge {
                lambda_center,
                lambda_width,
                nu_width,
                amplitude,
            } => {
                positive_finite(*lambda_width, "observable.kernel.lambda_width")?;
                positive_finite(*nu_width, "observable.kernel.nu_width")?;
                ensure(
                    lambda_center.is_finite() && *lambda_center > 0.0 && *lambda_center < g.e_max,
                    "observable.kernel.lambda_center must lie inside (0, e_max)",
                )?;
                ensure(
                    amplitude.is_finite(),
                    "observable.kernel.amplitude must be finite",
                )?;
            }
            KernelConfig::PureMode { slice, mode } => {
                ensure(
                    *slice < g.n_lambda,
                    format!("kernel slice {slice} out of range"),
                )?;
                ensure(
                    (mode.unsigned_abs() as usize) < g.m_nu / 2,
                    format!("kernel mode {mode} at or beyond the band edge"),
                )?;
            }
            KernelConfig::None => {}
        }

        let times = self.times.materialize();
        ensure(!times.is_empty(), "times must not be empty")?;
        ensure(times.iter().all(|t| t.is_finite()), "times must be finite")?;
        ensure(
            times.windows(2).all(|w| w[1] > w[0]),
            "times must be strictly increasing",
        )?;

        positive_finite(self.profile.beta, "profile.beta")?;
        positive_finite(self.tolerances.scale, "tolerances.scale")?;
        ensure(
            !self.outputs.dir.is_empty(),
            "outputs.dir must not be empty",
        )?;
        Ok(())
    }
}
