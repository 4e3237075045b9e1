//! Scenario file schema. Every dimensional field carries its SI unit in
//! its name; rates are angular (s⁻¹, no factor 2π).

use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModeParams, RingSystem};
use crate::numerics::SpectralGrid;
use crate::pump::PumpSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub description: Option<String>,
    pub system: SystemConfig,
    pub pump: PumpConfig,
    #[serde(default)]
    pub grids: GridConfig,
    #[serde(default)]
    pub pipeline: Pipeline,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub outputs: OutputConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub omega_rad_per_s: f64,
    pub v_m_per_s: f64,
    /// Phantom-channel speed; defaults to `v_m_per_s`.
    #[serde(default)]
    pub u_m_per_s: Option<f64>,
    /// Γ = |γ|²/(2v).
    pub channel_rate_per_s: f64,
    /// M = |μ|²/(2u).
    #[serde(default)]
    pub loss_rate_per_s: f64,
    #[serde(default)]
    pub gamma_phase_rad: f64,
    #[serde(default)]
    pub mu_phase_rad: f64,
}

impl ModeConfig {
    pub fn build(&self) -> Result<ModeParams> {
        let v = self.v_m_per_s;
        let mut m = ModeParams::from_rates(self.omega_rad_per_s, v, self.u_m_per_s.unwrap_or(v), self.channel_rate_per_s, self.loss_rate_per_s)?;
        m.gamma *= Complex64::from_polar(1.0, self.gamma_phase_rad);
        m.mu *= Complex64::from_polar(1.0, self.mu_phase_rad);
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub pump: ModeConfig,
    pub signal: ModeConfig,
    pub idler: ModeConfig,
    /// |λ|, rad/s per intracavity photon.
    pub lambda_rad_per_s: f64,
    #[serde(default)]
    pub lambda_phase_rad: f64,
    /// Pump self-phase modulation η, rad/s.
    #[serde(default)]
    pub eta_rad_per_s: f64,
    /// Cross-phase modulation ζ on signal and idler, rad/s.
    #[serde(default)]
    pub zeta_rad_per_s: f64,
}

impl SystemConfig {
    pub fn build(&self) -> Result<RingSystem> {
        RingSystem::new(
            self.pump.build()?,
            self.signal.build()?,
            self.idler.build()?,
            Complex64::from_polar(self.lambda_rad_per_s, self.lambda_phase_rad),
            self.eta_rad_per_s,
            self.zeta_rad_per_s,
        )
    }
}

/// Incoming pump. The amplitude ᾱ_P is in m^{1/2}, so that ∫|α_P(κ)|²dκ
/// is the mean number of incoming pump photons.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PumpConfig {
    Gaussian {
        amplitude_sqrt_m: f64,
        #[serde(default)]
        amplitude_phase_rad: f64,
        duration_s: f64,
    },
    /// Samples of α_P(κ)/ᾱ_P on a symmetric odd-length axis.
    Tabulated {
        amplitude_sqrt_m: f64,
        #[serde(default)]
        amplitude_phase_rad: f64,
        half_width_rad_per_m: f64,
        values_re: Vec<f64>,
        #[serde(default)]
        values_im: Vec<f64>,
    },
}

impl PumpConfig {
    pub fn build(&self) -> Result<PumpSpec> {
        match self {
            PumpConfig::Gaussian {
                amplitude_sqrt_m,
                amplitude_phase_rad,
                duration_s,
            } => PumpSpec::gaussian(Complex64::from_polar(*amplitude_sqrt_m, *amplitude_phase_rad), *duration_s),
            PumpConfig::Tabulated {
                amplitude_sqrt_m,
                amplitude_phase_rad,
                half_width_rad_per_m,
                values_re,
                values_im,
            } => {
                if !values_im.is_empty() && values_im.len() != values_re.len() {
                    return Err(Error::Config {
                        field: "pump.values_im".into(),
                        reason: format!("{} entries for {} real parts", values_im.len(), values_re.len()),
                    });
                }
                let values = values_re
                    .iter()
                    .enumerate()
                    .map(|(k, &re)| Complex64::new(re, values_im.get(k).copied().unwrap_or(0.0)))
                    .collect();
                let grid = SpectralGrid::new(*half_width_rad_per_m, values_re.len())?;
                PumpSpec::tabulated(Complex64::from_polar(*amplitude_sqrt_m, *amplitude_phase_rad), grid, values)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Points per spectral axis; odd counts include κ = 0.
    pub spectral_points: usize,
    /// Axis half-width in units of Γ̄/v of the mode on that axis.
    pub half_width_linewidths: f64,
    /// Fixed half-width for both axes, overriding the linewidth rule.
    pub half_width_rad_per_m: Option<f64>,
    /// Propagator steps; the pump is solved on a grid four times finer.
    pub time_steps: usize,
    /// Lifetimes of the slowest mode simulated after the pulse.
    pub tail_lifetimes: f64,
    /// Explicit time span; required for tabulated pumps in time-domain runs.
    pub time_start_s: Option<f64>,
    pub time_end_s: Option<f64>,
    /// Samples of the intracavity pump spectrum when it comes from the
    /// time-domain pump solution (η ≠ 0).
    pub pump_spectral_points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            spectral_points: 201,
            half_width_linewidths: 10.0,
            half_width_rad_per_m: None,
            time_steps: 2048,
            tail_lifetimes: 20.0,
            time_start_s: None,
            time_end_s: None,
            pump_spectral_points: 513,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Pipeline {
    #[default]
    Perturbative,
    Propagator,
    Both,
}

impl Pipeline {
    pub fn perturbative(self) -> bool {
        matches!(self, Pipeline::Perturbative | Pipeline::Both)
    }
    pub fn propagator(self) -> bool {
        matches!(self, Pipeline::Propagator | Pipeline::Both)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Relative quadrature tolerance for the pump-pair function.
    pub pair_function_rel: f64,
    /// Numeric against closed-form singles ratio.
    pub r_rel: f64,
    /// Change of P_coincidences when the spectral step is doubled.
    pub resolution_rel: f64,
    /// Relative L² change of the time-domain amplitude under step doubling.
    pub time_domain_rel: f64,
    /// Time-domain against perturbative amplitude, relative to the peak.
    pub path_peak_rel: f64,
    /// Time-domain against perturbative amplitude, relative L² norm.
    pub path_l2_rel: f64,
    pub min_points_per_width: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            pair_function_rel: 1e-8,
            r_rel: 5e-3,
            resolution_rel: 1e-3,
            time_domain_rel: 1e-3,
            path_peak_rel: 1e-2,
            path_l2_rel: 2e-2,
            min_points_per_width: 8.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Output directory, relative to the working directory.
    pub dir: Option<PathBuf>,
    pub jsi: bool,
    pub pair_amplitude: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: None,
            jsi: true,
            pair_amplitude: true,
        }
    }
}

/// One-parameter sweep. Every listed field is set to the same value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Dotted paths into the scenario, e.g. `system.signal.loss_rate_per_s`.
    pub variables: Vec<String>,
    pub values: Vec<f64>,
}

impl Scenario {
    /// Parses JSON, reporting the offending field path and position.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let field = e.path().to_string();
            let inner = e.into_inner();
            Error::Config {
                field,
                reason: format!("{inner}"),
            }
        })
    }

    pub fn from_value(value: serde_json::Value) -> Result<Self> {
        serde_path_to_error::deserialize(value).map_err(|e| Error::Config {
            field: e.path().to_string(),
            reason: e.into_inner().to_string(),
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Scenario::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn system(&self) -> Result<RingSystem> {
        self.system.build()
    }

    pub fn pump_spec(&self) -> Result<PumpSpec> {
        self.pump.build()
    }
}
