//! Scenario files: sectioned `key = value` text (TOML) or the same layout
//! as JSON.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thermofringe::params::{
    ExperimentSpec, KerrSpec, LightSpec, LossSpec, Mirrors, PhysicalConstants, RegimeThresholds,
    SampleSpec,
};
use thermofringe::MeasurementModel;

use crate::grid::Spacing;
use crate::{CliError, Output};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<ConstantsSection>,
    pub sample: SampleSection,
    pub light: LightSection,
    #[serde(default)]
    pub kerr: KerrSection,
    #[serde(default)]
    pub loss: LossSection,
    #[serde(default)]
    pub setup: SetupSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<ThresholdSection>,
    pub temperature: TemperatureSection,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSection {
    pub hbar: f64,
    pub boltzmann: f64,
    pub light_speed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSection {
    pub mass: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LightSection {
    pub omega_p: f64,
    pub photon_number: f64,
    #[serde(default = "one")]
    pub refractive_index: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KerrSection {
    #[serde(default)]
    pub chi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossSection {
    #[serde(default = "one")]
    pub eta_detect: f64,
    #[serde(default = "one")]
    pub eta_reflect: f64,
}

impl Default for LossSection {
    fn default() -> Self {
        Self {
            eta_detect: 1.0,
            eta_reflect: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetupSection {
    #[serde(default)]
    pub mirrors: MirrorCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MirrorCount {
    #[default]
    One,
    Two,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSection {
    pub high: f64,
    pub low: f64,
}

/// Either one temperature (`value` in K or `thermal_energy` in J) or a grid.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemperatureSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thermal_energy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<Spacing>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    /// `auto` or a model name.
    #[serde(default = "auto")]
    pub model: String,
    /// Output column groups; empty means all.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<String>,
    /// A published resolution to compare against (K).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed_delta_t: Option<f64>,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            model: auto(),
            outputs: Vec::new(),
            claimed_delta_t: None,
        }
    }
}

fn one() -> f64 {
    1.0
}

fn auto() -> String {
    "auto".into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelChoice {
    Auto,
    Fixed(MeasurementModel),
}

/// A parsed scenario with everything resolved except validation.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub spec: ExperimentSpec,
    pub temperatures: Vec<f64>,
    pub model: ModelChoice,
    pub outputs: Vec<Output>,
    pub claimed_delta_t: Option<f64>,
}

pub fn load(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
    parse(&text, json)
}

pub fn parse(text: &str, json: bool) -> Result<Scenario, CliError> {
    let file: ScenarioFile = if json {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?
    } else {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?
    };
    resolve(file)
}

pub fn resolve(file: ScenarioFile) -> Result<Scenario, CliError> {
    let constants = match &file.constants {
        Some(c) => PhysicalConstants {
            hbar: c.hbar,
            boltzmann: c.boltzmann,
            light_speed: c.light_speed,
        },
        None => PhysicalConstants::SI,
    };
    let spec = ExperimentSpec {
        constants,
        sample: SampleSpec {
            mass: file.sample.mass,
            omega: file.sample.omega,
        },
        light: LightSpec {
            omega_p: file.light.omega_p,
            photon_number: file.light.photon_number,
            refractive_index: file.light.refractive_index,
        },
        kerr: KerrSpec { chi: file.kerr.chi },
        loss: LossSpec {
            eta_detect: file.loss.eta_detect,
            eta_reflect: file.loss.eta_reflect,
        },
        mirrors: match file.setup.mirrors {
            MirrorCount::One => Mirrors::OneThermal,
            MirrorCount::Two => Mirrors::TwoThermal,
        },
        thresholds: file
            .thresholds
            .as_ref()
            .map(|t| RegimeThresholds {
                high: t.high,
                low: t.low,
            })
            .unwrap_or_default(),
    };
    let temperatures = temperatures(&file.temperature, &constants)?;
    let model = match file.run.model.as_str() {
        "auto" => ModelChoice::Auto,
        name => ModelChoice::Fixed(name.parse().map_err(CliError::Parse)?),
    };
    let outputs = if file.run.outputs.is_empty() {
        Output::ALL.to_vec()
    } else {
        file.run
            .outputs
            .iter()
            .map(|s| s.parse())
            .collect::<Result<_, _>>()?
    };
    Ok(Scenario {
        spec,
        temperatures,
        model,
        outputs,
        claimed_delta_t: file.run.claimed_delta_t,
        file,
    })
}

fn temperatures(t: &TemperatureSection, c: &PhysicalConstants) -> Result<Vec<f64>, CliError> {
    let single = match (t.value, t.thermal_energy) {
        (Some(_), Some(_)) => {
            return Err(CliError::Parse(
                "temperature: give either `value` or `thermal_energy`, not both".into(),
            ))
        }
        (Some(v), None) => Some(v),
        (None, Some(e)) => Some(e / c.boltzmann),
        (None, None) => None,
    };
    let ranged = t.start.is_some() || t.stop.is_some() || t.points.is_some();
    match (single, ranged) {
        (Some(_), true) => Err(CliError::Parse(
            "temperature: a single value and a range are mutually exclusive".into(),
        )),
        (Some(v), false) => Ok(vec![v]),
        (None, true) => {
            let (Some(start), Some(stop), Some(points)) = (t.start, t.stop, t.points) else {
                return Err(CliError::Parse(
                    "temperature range needs `start`, `stop` and `points`".into(),
                ));
            };
            crate::grid::Grid::Range {
                spacing: t.spacing.unwrap_or(Spacing::Log),
                start,
                stop,
                points,
            }
            .values()
        }
        (None, false) => Err(CliError::Parse("temperature section is empty".into())),
    }
}

/// Normalised scenario text in the same format family as the input.
pub fn render(file: &ScenarioFile, json: bool) -> Result<String, CliError> {
    if json {
        serde_json::to_string_pretty(file).map_err(|e| CliError::Parse(e.to_string()))
    } else {
        toml::to_string(file).map_err(|e| CliError::Parse(e.to_string()))
    }
}
