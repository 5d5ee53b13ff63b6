//! Result rows and their CSV/JSON rendering.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde_json::{json, Value};
use thermofringe::estimation::{
    closed_form_resolution, estimate_high_t, estimate_low_t, resolution_closed_form,
    resolution_propagated, Observation, ResolutionFormula, DEFAULT_RELATIVE_STEP,
};
use thermofringe::{
    classify_regime, second_moment, small_phase_parameter, validate, ExperimentSpec,
    MeasurementModel, ModelOptions, RegimeTag, ValidatedSpec,
};

use crate::grid::Param;
use crate::scenario::ModelChoice;
use crate::CliError;

/// Ratio beyond which a claimed resolution is flagged.
pub const DISCREPANCY_FACTOR: f64 = 10.0;

/// Selectable output column groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Output {
    MeanM,
    Deficit,
    ThermalExcess,
    MeanM2,
    DeltaMExact,
    DeltaMPhotonNumber,
    THat,
    DeltaTClosedForm,
    DeltaTGeneral,
    DeltaTPropagated,
    DeltaTPhotonNumber,
    EffectiveOmegaP,
    SmallPhase,
}

impl Output {
    pub const ALL: [Output; 13] = [
        Output::MeanM,
        Output::Deficit,
        Output::ThermalExcess,
        Output::MeanM2,
        Output::DeltaMExact,
        Output::DeltaMPhotonNumber,
        Output::THat,
        Output::DeltaTClosedForm,
        Output::DeltaTGeneral,
        Output::DeltaTPropagated,
        Output::DeltaTPhotonNumber,
        Output::EffectiveOmegaP,
        Output::SmallPhase,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Output::MeanM => "mean_m",
            Output::Deficit => "deficit",
            Output::ThermalExcess => "thermal_excess",
            Output::MeanM2 => "mean_m2",
            Output::DeltaMExact => "delta_m_exact",
            Output::DeltaMPhotonNumber => "delta_m_photon_number",
            Output::THat => "t_hat",
            Output::DeltaTClosedForm => "delta_t_closed_form",
            Output::DeltaTGeneral => "delta_t_general",
            Output::DeltaTPropagated => "delta_t_propagated",
            Output::DeltaTPhotonNumber => "delta_t_photon_number",
            Output::EffectiveOmegaP => "effective_omega_p",
            Output::SmallPhase => "small_phase",
        }
    }

    fn headers(self) -> &'static [&'static str] {
        match self {
            Output::MeanM => &["mean_M"],
            Output::Deficit => &["deficit"],
            Output::ThermalExcess => &["thermal_excess"],
            Output::MeanM2 => &["mean_M2"],
            Output::DeltaMExact => &["delta_M_exact"],
            Output::DeltaMPhotonNumber => &["delta_M_photon_number"],
            Output::THat => &["T_hat_K", "estimator"],
            Output::DeltaTClosedForm => &["delta_T_closed_form_K", "formula"],
            Output::DeltaTGeneral => &["delta_T_general_K"],
            Output::DeltaTPropagated => &["delta_T_propagated_K"],
            Output::DeltaTPhotonNumber => &["delta_T_photon_number_K"],
            Output::EffectiveOmegaP => &["effective_omega_p_rad_s"],
            Output::SmallPhase => &["small_phase"],
        }
    }

    fn is_resolution(self) -> bool {
        matches!(
            self,
            Output::DeltaTClosedForm
                | Output::DeltaTGeneral
                | Output::DeltaTPropagated
                | Output::DeltaTPhotonNumber
        )
    }
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Output {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Output::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| CliError::Parse(format!("unknown output `{s}`")))
    }
}

/// Sorted, deduplicated outputs. Any resolution output pulls in both
/// `Delta M` conventions so they are always reported side by side.
pub fn normalise_outputs(requested: &[Output]) -> Vec<Output> {
    let mut out = requested.to_vec();
    if out.iter().any(|o| o.is_resolution()) {
        out.extend([Output::DeltaMExact, Output::DeltaMPhotonNumber]);
    }
    if out.contains(&Output::DeltaTPropagated) {
        out.push(Output::DeltaTPhotonNumber);
    }
    out.sort();
    out.dedup();
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:e}"),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(_) | Cell::Empty => Value::Null,
            Cell::Text(s) => json!(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Rows that carry a domain error.
    pub row_errors: usize,
    pub summaries: Vec<ClaimSummary>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric column values; non-numeric cells become NaN.
    pub fn numbers(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column(name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match r[i] {
                    Cell::Num(x) => x,
                    _ => f64::NAN,
                })
                .collect(),
        )
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), CliError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            out.write_record(row.iter().map(Cell::csv)).map_err(io)?;
        }
        out.flush().map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<(), CliError> {
        let rows: Vec<Vec<Value>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::json).collect())
            .collect();
        let doc = json!({ "columns": self.columns, "rows": rows });
        serde_json::to_writer_pretty(&mut w, &doc).map_err(|e| CliError::Io(e.to_string()))?;
        writeln!(w).map_err(|e| CliError::Io(e.to_string()))
    }
}

fn io(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

/// The claimed, closed-form and propagated resolutions of one row.
#[derive(Debug, Clone, PartialEq)]
pub struct ClaimSummary {
    pub temperature: f64,
    pub claimed: f64,
    pub general: f64,
    pub propagated: Option<f64>,
    pub ratio: f64,
    pub discrepancy: bool,
}

impl fmt::Display for ClaimSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let propagated = self
            .propagated
            .map_or_else(|| "n/a".to_string(), |p| format!("{p:e} K"));
        write!(
            f,
            "T = {:e} K | claimed delta_T = {:e} K | closed form = {:e} K | propagated = {} | ratio {:e}{}",
            self.temperature,
            self.claimed,
            self.general,
            propagated,
            self.ratio,
            if self.discrepancy { " | DISCREPANCY" } else { "" }
        )
    }
}

fn flagged(ratio: f64) -> bool {
    !(1.0 / DISCREPANCY_FACTOR..=DISCREPANCY_FACTOR).contains(&ratio)
}

/// Everything that is fixed across the rows of one table.
#[derive(Debug, Clone)]
pub struct Plan {
    pub model: ModelChoice,
    pub outputs: Vec<Output>,
    pub override_regime: bool,
    pub claimed_delta_t: Option<f64>,
    pub vary: Option<Param>,
}

/// One grid point.
#[derive(Debug, Clone, Copy)]
pub struct Point {
    pub spec: ExperimentSpec,
    pub temperature: f64,
    pub varied: Option<f64>,
}

pub fn build(plan: &Plan, points: &[Point]) -> Result<Table, CliError> {
    let outputs = normalise_outputs(&plan.outputs);
    let specs = points
        .iter()
        .map(|p| validate(&p.spec).map_err(CliError::Validation))
        .collect::<Result<Vec<_>, _>>()?;

    let mut columns: Vec<String> = vec!["T_K".into()];
    if let Some(p) = plan.vary.filter(|p| *p != Param::Temperature) {
        columns.push(p.header().into());
    }
    columns.extend(["energy_ratio", "regime", "model"].map(String::from));
    for o in &outputs {
        columns.extend(o.headers().iter().map(|h| h.to_string()));
    }
    if plan.claimed_delta_t.is_some() {
        columns.extend(["claimed_delta_T_K", "claim_ratio", "claim_flag"].map(String::from));
    }
    columns.extend(["warnings", "error"].map(String::from));

    let evaluated: Vec<(Vec<Cell>, bool, Option<ClaimSummary>)> = points
        .par_iter()
        .zip(specs.par_iter())
        .map(|(p, v)| row(plan, &outputs, columns.len(), p, v))
        .collect();

    let row_errors = evaluated.iter().filter(|r| r.1).count();
    let summaries = evaluated.iter().filter_map(|r| r.2.clone()).collect();
    Ok(Table {
        columns,
        rows: evaluated.into_iter().map(|r| r.0).collect(),
        row_errors,
        summaries,
    })
}

fn row(
    plan: &Plan,
    outputs: &[Output],
    width: usize,
    point: &Point,
    v: &ValidatedSpec,
) -> (Vec<Cell>, bool, Option<ClaimSummary>) {
    let t = point.temperature;
    let mut errors: Vec<String> = Vec::new();
    let mut cells = vec![Cell::Num(t)];
    if plan.vary.is_some_and(|p| p != Param::Temperature) {
        cells.push(point.varied.map_or(Cell::Empty, Cell::Num));
    }

    let regime = match classify_regime(v, t) {
        Ok(r) => r,
        Err(e) => {
            // nothing else is computable without a valid temperature
            cells.resize(width - 1, Cell::Empty);
            cells.push(Cell::Text(e.to_string()));
            return (cells, true, None);
        }
    };
    let model = match plan.model {
        ModelChoice::Auto => MeasurementModel::for_regime(regime.tag),
        ModelChoice::Fixed(m) => m,
    };
    cells.push(Cell::Num(regime.ratio));
    cells.push(Cell::Text(regime.tag.to_string()));
    cells.push(Cell::Text(model.to_string()));

    let opts = ModelOptions {
        override_regime: plan.override_regime,
        ..ModelOptions::default()
    };
    let mut note = |r: thermofringe::Error| {
        let s = r.to_string();
        if !errors.contains(&s) {
            errors.push(s);
        }
    };

    let stats = second_moment(v, t, model, &opts).map_err(&mut note).ok();
    let exact_model = match model {
        MeasurementModel::FockBruteForce => MeasurementModel::FockBruteForce,
        _ => MeasurementModel::ExactGaussian,
    };
    let exact = if exact_model == model {
        stats
    } else {
        second_moment(v, t, exact_model, &opts)
            .map_err(&mut note)
            .ok()
    };
    let wants = |o: Output| outputs.contains(&o);
    let report = if wants(Output::DeltaTPropagated) {
        resolution_propagated(v, t, model, &opts, DEFAULT_RELATIVE_STEP)
            .map_err(&mut note)
            .ok()
    } else {
        None
    };
    let estimate = if wants(Output::THat) {
        stats.and_then(|s| {
            let obs = Observation::from_stats(&s);
            let r = match regime.tag {
                RegimeTag::HighT => Some(estimate_high_t(v, obs)),
                RegimeTag::LowT => Some(estimate_low_t(v, obs)),
                RegimeTag::Intermediate => None,
            };
            r.and_then(|r| r.map_err(&mut note).ok())
        })
    } else {
        None
    };
    let general = closed_form_resolution(v, ResolutionFormula::Lossy);

    let num = |x: Option<f64>| x.map_or(Cell::Empty, Cell::Num);
    for o in outputs {
        match o {
            Output::MeanM => cells.push(num(stats.map(|s| s.mean_m))),
            Output::Deficit => cells.push(num(stats.map(|s| s.deficit))),
            Output::ThermalExcess => cells.push(num(stats.and_then(|s| s.thermal_excess))),
            Output::MeanM2 => cells.push(num(stats.and_then(|s| s.second).map(|s| s.mean_m2))),
            Output::DeltaMExact => cells.push(num(exact.and_then(|s| s.second).map(|s| s.delta_m))),
            Output::DeltaMPhotonNumber => cells.push(Cell::Num(v.detected_photons())),
            Output::THat => {
                cells.push(num(estimate.map(|e| e.t_hat)));
                cells.push(estimate.map_or(Cell::Empty, |e| {
                    Cell::Text(
                        serde_json::to_value(e.estimator)
                            .ok()
                            .and_then(|x| x.as_str().map(String::from))
                            .unwrap_or_default(),
                    )
                }));
            }
            Output::DeltaTClosedForm => {
                let c = resolution_closed_form(v);
                cells.push(Cell::Num(c.delta_t));
                cells.push(Cell::Text(c.formula.to_string()));
            }
            Output::DeltaTGeneral => cells.push(Cell::Num(general)),
            Output::DeltaTPropagated => cells.push(num(report.map(|r| r.delta_t_propagated))),
            Output::DeltaTPhotonNumber => cells.push(num(report.map(|r| r.delta_t_photon_number))),
            Output::EffectiveOmegaP => cells.push(Cell::Num(v.effective_omega_p())),
            Output::SmallPhase => cells.push(num(small_phase_parameter(v, t).ok())),
        }
    }

    let summary = plan.claimed_delta_t.map(|claimed| {
        let ratio = general / claimed;
        ClaimSummary {
            temperature: t,
            claimed,
            general,
            propagated: report.map(|r| r.delta_t_propagated),
            ratio,
            discrepancy: flagged(ratio),
        }
    });
    if let Some(s) = &summary {
        cells.push(Cell::Num(s.claimed));
        cells.push(Cell::Num(s.ratio));
        cells.push(Cell::Text(
            if s.discrepancy {
                "DISCREPANCY"
            } else {
                "consistent"
            }
            .into(),
        ));
    }

    let warnings: Vec<String> = v.warnings_at(t).iter().map(|w| w.to_string()).collect();
    cells.push(Cell::Text(warnings.join("; ")));
    let failed = !errors.is_empty();
    cells.push(Cell::Text(errors.join("; ")));
    (cells, failed, summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolution_outputs_carry_both_noise_conventions() {
        let o = normalise_outputs(&[Output::DeltaTGeneral]);
        assert!(o.contains(&Output::DeltaMExact));
        assert!(o.contains(&Output::DeltaMPhotonNumber));
        let o = normalise_outputs(&[Output::DeltaTPropagated]);
        assert!(o.contains(&Output::DeltaTPhotonNumber));
        assert_eq!(normalise_outputs(&[Output::MeanM]), vec![Output::MeanM]);
    }

    #[test]
    fn discrepancy_is_two_sided() {
        assert!(!flagged(1.0));
        assert!(!flagged(10.0));
        assert!(flagged(10.5));
        assert!(flagged(0.05));
        assert!(flagged(f64::NAN));
    }

    #[test]
    fn output_names_round_trip() {
        for o in Output::ALL {
            assert_eq!(o.name().parse::<Output>().unwrap(), o);
        }
    }

    #[test]
    fn rows_align_with_columns() {
        let plan = Plan {
            model: ModelChoice::Auto,
            outputs: Output::ALL.to_vec(),
            override_regime: false,
            claimed_delta_t: Some(1e-7),
            vary: Some(Param::PhotonNumber),
        };
        let spec = ExperimentSpec::reference();
        let points: Vec<Point> = [1e8, 1e10]
            .iter()
            .map(|&n| Point {
                spec: Param::PhotonNumber.apply(&spec, n),
                temperature: 72.0,
                varied: Some(n),
            })
            .collect();
        let table = build(&plan, &points).unwrap();
        for r in &table.rows {
            assert_eq!(r.len(), table.columns.len());
        }
        assert_eq!(table.row_errors, 0);
        assert_eq!(table.summaries.len(), 2);
    }

    #[test]
    fn bad_temperature_row_keeps_shape() {
        let plan = Plan {
            model: ModelChoice::Auto,
            outputs: Output::ALL.to_vec(),
            override_regime: false,
            claimed_delta_t: None,
            vary: None,
        };
        let points = [Point {
            spec: ExperimentSpec::reference(),
            temperature: -1.0,
            varied: None,
        }];
        let table = build(&plan, &points).unwrap();
        assert_eq!(table.rows[0].len(), table.columns.len());
        assert_eq!(table.row_errors, 1);
    }
}
