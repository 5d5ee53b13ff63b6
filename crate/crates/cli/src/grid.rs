//! Sweep grids and the parameters they can vary.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thermofringe::ExperimentSpec;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Lin,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Range {
        spacing: Spacing,
        start: f64,
        stop: f64,
        points: usize,
    },
    List(Vec<f64>),
}

impl Grid {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        match *self {
            Grid::List(ref v) => {
                if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
                    return Err(CliError::Parse("grid list must hold finite numbers".into()));
                }
                Ok(v.clone())
            }
            Grid::Range {
                spacing,
                start,
                stop,
                points,
            } => {
                if points < 2 {
                    return Err(CliError::Parse(format!(
                        "a range needs at least 2 points, got {points}"
                    )));
                }
                if !start.is_finite() || !stop.is_finite() {
                    return Err(CliError::Parse("range endpoints must be finite".into()));
                }
                let last = (points - 1) as f64;
                match spacing {
                    Spacing::Lin => Ok((0..points)
                        .map(|i| start + (stop - start) * i as f64 / last)
                        .collect()),
                    Spacing::Log => {
                        if start <= 0.0 || stop <= 0.0 {
                            return Err(CliError::Parse(
                                "log range endpoints must be positive".into(),
                            ));
                        }
                        let (a, b) = (start.ln(), stop.ln());
                        let mut v: Vec<f64> = (0..points)
                            .map(|i| (a + (b - a) * i as f64 / last).exp())
                            .collect();
                        // pin the endpoints against exp/ln round-off
                        v[0] = start;
                        v[points - 1] = stop;
                        Ok(v)
                    }
                }
            }
        }
    }
}

/// `log:start:stop:points`, `lin:start:stop:points` or `v1,v2,...`.
impl FromStr for Grid {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = |what: &str| CliError::Parse(format!("grid `{s}`: {what}"));
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| bad(&format!("`{t}` is not a number")))
        };
        let spacing = if let Some(rest) = s.strip_prefix("log:") {
            Some((Spacing::Log, rest))
        } else {
            s.strip_prefix("lin:").map(|rest| (Spacing::Lin, rest))
        };
        match spacing {
            Some((spacing, rest)) => {
                let parts: Vec<&str> = rest.split(':').collect();
                let [start, stop, points] = parts[..] else {
                    return Err(bad("expected start:stop:points"));
                };
                let points = points
                    .trim()
                    .parse()
                    .map_err(|_| bad("point count must be an integer"))?;
                Ok(Grid::Range {
                    spacing,
                    start: num(start)?,
                    stop: num(stop)?,
                    points,
                })
            }
            None => Ok(Grid::List(s.split(',').map(num).collect::<Result<_, _>>()?)),
        }
    }
}

/// Parameters a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    Temperature,
    PhotonNumber,
    OmegaP,
    Chi,
    /// Combined efficiency: sets the detector efficiency, reflectivity 1.
    Eta,
    Omega,
    Mass,
}

impl Param {
    pub const ALL: [Param; 7] = [
        Param::Temperature,
        Param::PhotonNumber,
        Param::OmegaP,
        Param::Chi,
        Param::Eta,
        Param::Omega,
        Param::Mass,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::Temperature => "T",
            Param::PhotonNumber => "N",
            Param::OmegaP => "omega_p",
            Param::Chi => "chi",
            Param::Eta => "eta",
            Param::Omega => "omega",
            Param::Mass => "m",
        }
    }

    /// Column header with unit suffix.
    pub fn header(self) -> &'static str {
        match self {
            Param::Temperature => "T_K",
            Param::PhotonNumber => "N",
            Param::OmegaP => "omega_p_rad_s",
            Param::Chi => "chi",
            Param::Eta => "eta",
            Param::Omega => "omega_rad_s",
            Param::Mass => "m_kg",
        }
    }

    /// `spec` with this parameter set to `value`. Temperature is not part of
    /// an [`ExperimentSpec`] and leaves it unchanged.
    pub fn apply(self, spec: &ExperimentSpec, value: f64) -> ExperimentSpec {
        let mut s = *spec;
        match self {
            Param::Temperature => {}
            Param::PhotonNumber => s.light.photon_number = value,
            Param::OmegaP => s.light.omega_p = value,
            Param::Chi => s.kerr.chi = value,
            Param::Eta => {
                s.loss.eta_detect = value;
                s.loss.eta_reflect = 1.0;
            }
            Param::Omega => s.sample.omega = value,
            Param::Mass => s.sample.mass = value,
        }
        s
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Param::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| CliError::UnknownParameter(s.to_string()))
    }
}
