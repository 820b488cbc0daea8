//! `overnight robustness`: run the selected falsification checks over the
//! decomposed returns and write one JSON report with an evaluable flag per
//! check.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use overnight_core::robustness::{
    apply_exclusions, apply_overnight_capital_cost, dispersion_compare, divergence_statistic,
    regime_split, shifted_open_sensitivity, CostModel, DispersionStats, DivergenceStatistic,
    ExclusionCalendar, RegimeSplit, ShiftedOpenResult,
};
use overnight_core::robustness::ShiftedOpenEndValues;
use overnight_core::{cumulate, Error, Leg, ReturnSeries};
use serde::Serialize;

use super::{ingest, input_error, read_input, to_pretty_json, write_output, CliError, Ingested};
use crate::IngestArgs;

pub struct Params<'a> {
    pub ingest: &'a IngestArgs,
    pub output_dir: &'a Path,
    pub checks: Option<Vec<String>>,
    pub exclusions: Option<PathBuf>,
    pub window: (u32, u32),
    pub cost_rate: f64,
    pub day_count: u32,
    pub cutoff: NaiveDate,
    pub alt_open_column: Option<String>,
}

const ALL_CHECKS: &[&str] = &[
    "exclusions",
    "cost",
    "dispersion",
    "regime",
    "shifted_open",
    "divergence",
];

/// One check's entry in the report.
#[derive(Serialize)]
struct Check<I: Serialize, O: Serialize> {
    evaluable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
    inputs: I,
    #[serde(skip_serializing_if = "Option::is_none")]
    outputs: Option<O>,
}

impl<I: Serialize, O: Serialize> Check<I, O> {
    fn evaluated(inputs: I, outputs: O) -> Self {
        Check {
            evaluable: true,
            reason: None,
            inputs,
            outputs: Some(outputs),
        }
    }

    fn not_evaluable(inputs: I, reason: impl Into<String>) -> Self {
        Check {
            evaluable: false,
            reason: Some(reason.into()),
            inputs,
            outputs: None,
        }
    }
}

#[derive(Serialize)]
struct ExclusionInputs {
    calendar: Option<String>,
    window_before: u32,
    window_after: u32,
}

#[derive(Serialize)]
struct ExclusionOutputs {
    events: usize,
    excluded_days: usize,
    baseline_overnight_end: f64,
    baseline_intraday_end: f64,
    excluded_overnight_end: f64,
    excluded_intraday_end: f64,
    delta_overnight_end: f64,
    delta_intraday_end: f64,
}

#[derive(Serialize)]
struct CostInputs {
    annual_rate: f64,
    day_count: u32,
}

#[derive(Serialize)]
struct CostOutputs {
    baseline_overnight_end: f64,
    adjusted_overnight_end: f64,
    delta_overnight_end: f64,
    intraday_end: f64,
}

#[derive(Serialize)]
struct RegimeInputs {
    cutoff: NaiveDate,
}

#[derive(Serialize)]
struct ShiftedOpenInputs {
    alt_open_column: Option<String>,
}

#[derive(Serialize)]
struct Empty {}

#[derive(Serialize)]
struct Report {
    symbol: String,
    adjustment: String,
    included_days: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    exclusions: Option<Check<ExclusionInputs, ExclusionOutputs>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cost: Option<Check<CostInputs, CostOutputs>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dispersion: Option<Check<Empty, DispersionStats>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    regime: Option<Check<RegimeInputs, RegimeSplit>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shifted_open: Option<Check<ShiftedOpenInputs, ShiftedOpenEndValues>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    divergence: Option<Check<Empty, DivergenceStatistic>>,
}

fn end_values(returns: &ReturnSeries) -> (f64, f64) {
    (
        cumulate(returns, Leg::Overnight).end_value().unwrap_or(0.0),
        cumulate(returns, Leg::Intraday).end_value().unwrap_or(0.0),
    )
}

/// Pull `(date, price)` pairs for an auxiliary price column out of the
/// original CSV.
fn alt_opens_from_column(
    ingested: &Ingested,
    column: &str,
    input: &Path,
) -> Result<Vec<(NaiveDate, f64)>, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(ingested.text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| CliError::input(format!("{}: unreadable header: {e}", input.display())))?
        .clone();
    let col = headers.iter().position(|h| h == column).ok_or_else(|| {
        CliError::input(format!(
            "{}: alternative-open column {column:?} not found in header",
            input.display()
        ))
    })?;
    let date_col = headers
        .iter()
        .position(|h| h == ingested.schema.date)
        .expect("schema matched this header during ingest");

    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::input(format!("{}: {e}", input.display())))?;
        let date: NaiveDate = match rec.get(date_col).unwrap_or("").parse() {
            Ok(d) => d,
            Err(_) => continue, // undated rows never reach the validated series
        };
        if let Ok(price) = rec.get(col).unwrap_or("").trim().parse::<f64>() {
            out.push((date, price));
        }
    }
    Ok(out)
}

pub fn run(params: Params<'_>) -> Result<(), CliError> {
    let selected: Vec<String> = match &params.checks {
        None => ALL_CHECKS.iter().map(|s| s.to_string()).collect(),
        Some(list) => {
            for name in list {
                if !ALL_CHECKS.contains(&name.as_str()) {
                    return Err(CliError::input(format!(
                        "unknown check {name:?}; expected one of {}",
                        ALL_CHECKS.join(", ")
                    )));
                }
            }
            list.clone()
        }
    };
    let on = |name: &str| selected.iter().any(|s| s == name);

    let ingested = ingest(params.ingest)?;
    let returns = overnight_core::decompose(&ingested.series)
        .map_err(|e| input_error(&params.ingest.input, e))?;
    let (baseline_on, baseline_id) = end_values(&returns);

    let mut report = Report {
        symbol: ingested.series.symbol.clone(),
        adjustment: ingested.series.adjustment.as_str().to_string(),
        included_days: returns.included_count(),
        exclusions: None,
        cost: None,
        dispersion: None,
        regime: None,
        shifted_open: None,
        divergence: None,
    };

    if on("exclusions") {
        let inputs = ExclusionInputs {
            calendar: params.exclusions.as_ref().map(|p| p.display().to_string()),
            window_before: params.window.0,
            window_after: params.window.1,
        };
        report.exclusions = Some(match &params.exclusions {
            None => Check::not_evaluable(inputs, "no exclusion calendar supplied"),
            Some(path) => {
                let text = read_input(path)?;
                let calendar =
                    ExclusionCalendar::from_csv(&text, &ingested.series.symbol, params.window)
                        .map_err(|e| input_error(path, e))?;
                let (excluded, covered) = apply_exclusions(&returns, &calendar);
                let (ex_on, ex_id) = end_values(&excluded);
                Check::evaluated(
                    inputs,
                    ExclusionOutputs {
                        events: calendar.events.len(),
                        excluded_days: covered,
                        baseline_overnight_end: baseline_on,
                        baseline_intraday_end: baseline_id,
                        excluded_overnight_end: ex_on,
                        excluded_intraday_end: ex_id,
                        delta_overnight_end: ex_on - baseline_on,
                        delta_intraday_end: ex_id - baseline_id,
                    },
                )
            }
        });
    }

    if on("cost") {
        let inputs = CostInputs {
            annual_rate: params.cost_rate,
            day_count: params.day_count,
        };
        let model = CostModel {
            annual_rate: params.cost_rate,
            day_count: params.day_count,
        };
        report.cost = Some(match apply_overnight_capital_cost(&returns, &model) {
            Ok(adjusted) => {
                let (adj_on, adj_id) = end_values(&adjusted);
                Check::evaluated(
                    inputs,
                    CostOutputs {
                        baseline_overnight_end: baseline_on,
                        adjusted_overnight_end: adj_on,
                        delta_overnight_end: adj_on - baseline_on,
                        intraday_end: adj_id,
                    },
                )
            }
            Err(e @ Error::Config(_)) => return Err(input_error(&params.ingest.input, e)),
            Err(e) => Check::not_evaluable(inputs, e.to_string()),
        });
    }

    if on("dispersion") {
        report.dispersion = Some(match dispersion_compare(&returns) {
            Ok(stats) => Check::evaluated(Empty {}, stats),
            Err(e) => Check::not_evaluable(Empty {}, e.to_string()),
        });
    }

    if on("regime") {
        let inputs = RegimeInputs {
            cutoff: params.cutoff,
        };
        report.regime = Some(match regime_split(&returns, params.cutoff) {
            Ok(split) => Check::evaluated(inputs, split),
            Err(e) => Check::not_evaluable(inputs, e.to_string()),
        });
    }

    if on("shifted_open") {
        let inputs = ShiftedOpenInputs {
            alt_open_column: params.alt_open_column.clone(),
        };
        report.shifted_open = Some(match &params.alt_open_column {
            None => Check::not_evaluable(inputs, "no alternative open prices supplied"),
            Some(column) => {
                let alt = alt_opens_from_column(&ingested, column, &params.ingest.input)?;
                match shifted_open_sensitivity(&ingested.series, Some(&alt)) {
                    Ok(ShiftedOpenResult::Evaluated(values)) => Check::evaluated(inputs, values),
                    Ok(ShiftedOpenResult::NotEvaluable) => {
                        Check::not_evaluable(inputs, "no alternative open prices supplied")
                    }
                    Err(e) => return Err(input_error(&params.ingest.input, e)),
                }
            }
        });
    }

    if on("divergence") {
        report.divergence = Some(match divergence_statistic(&returns) {
            Ok(stat) => Check::evaluated(Empty {}, stat),
            Err(e) => Check::not_evaluable(Empty {}, e.to_string()),
        });
    }

    let path = params
        .output_dir
        .join(format!("{}_robustness.json", report.symbol));
    write_output(&path, &to_pretty_json(&report)?)?;
    println!("wrote {}", path.display());
    Ok(())
}
