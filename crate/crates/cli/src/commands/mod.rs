//! Subcommand implementations and shared plumbing: exit-code mapping, file
//! IO helpers, schema loading, and the decompose-artifact writer reused by
//! `simulate --decompose`.

pub mod decompose;
pub mod render;
pub mod robustness;
pub mod simulate;

use std::fs;
use std::path::{Path, PathBuf};

use overnight_core::{
    cumulate, curve_to_csv, decompose as decompose_returns, ingest_csv, return_series_to_csv,
    summary_stats, BarSeries, CsvSchema, DataQualityReport, IngestOptions, Leg, LegStats,
    RepairPolicy, ReturnSeries,
};
use serde::Serialize;

use crate::IngestArgs;

/// Exit code 2 for input/validation problems, 1 for internal failures.
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }
}

/// Core errors always stem from the caller's inputs.
pub fn input_error(context: &Path, e: overnight_core::Error) -> CliError {
    CliError::input(format!("{}: {e}", context.display()))
}

pub fn read_input(path: &Path) -> Result<String, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    // tolerate a UTF-8 BOM from spreadsheet exports
    Ok(text.strip_prefix('\u{feff}').map(str::to_owned).unwrap_or(text))
}

pub fn write_output(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| CliError::internal(format!("{}: {e}", parent.display())))?;
        }
    }
    fs::write(path, contents).map_err(|e| CliError::internal(format!("{}: {e}", path.display())))
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::internal(format!("serialization failed: {e}")))
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "series".to_string())
}

fn load_schema(args: &IngestArgs, csv_text: &str) -> Result<CsvSchema, CliError> {
    if let Some(path) = &args.schema {
        let text = read_input(path)?;
        return serde_json::from_str(&text)
            .map_err(|e| CliError::input(format!("{}: bad schema: {e}", path.display())));
    }
    let first = csv_text
        .lines()
        .next()
        .ok_or_else(|| CliError::input(format!("{}: empty input", args.input.display())))?;
    let headers: Vec<&str> = first.split(',').map(str::trim).collect();
    CsvSchema::detect(&headers).map_err(|e| input_error(&args.input, e))
}

/// Result of reading and validating the input CSV per the shared flags.
pub struct Ingested {
    pub series: BarSeries,
    pub report: DataQualityReport,
    pub text: String,
    pub schema: CsvSchema,
}

/// Read, adjust, repair, and validate the input CSV.
pub fn ingest(args: &IngestArgs) -> Result<Ingested, CliError> {
    let text = read_input(&args.input)?;
    let schema = load_schema(args, &text)?;
    let symbol = args
        .symbol
        .clone()
        .unwrap_or_else(|| file_stem(&args.input));
    let opts = IngestOptions {
        symbol,
        schema: schema.clone(),
        adjust: !args.raw,
        repair: RepairPolicy::parse(&args.open_repair)
            .expect("clap restricts the value set"),
    };
    let (series, report) =
        ingest_csv(text.as_bytes(), &opts).map_err(|e| input_error(&args.input, e))?;
    Ok(Ingested {
        series,
        report,
        text,
        schema,
    })
}

/// Decompose summary written next to the returns and curve files.
#[derive(Serialize)]
pub struct DecomposeSummary {
    pub symbol: String,
    pub adjustment: String,
    pub first_date: Option<chrono::NaiveDate>,
    pub last_date: Option<chrono::NaiveDate>,
    pub bar_count: usize,
    pub overnight: LegStats,
    pub intraday: LegStats,
    pub close_to_close_end: f64,
    pub max_compounding_discrepancy: f64,
}

/// Shared by `decompose` and `simulate --decompose`: writes
/// `<symbol>_returns.csv`, the two `<symbol>_*_curve.csv` files, and
/// `<symbol>_summary.json`. Returns the decomposed series.
pub fn write_decompose_artifacts(
    series: &BarSeries,
    output_dir: &Path,
) -> Result<ReturnSeries, CliError> {
    let returns = decompose_returns(series)
        .map_err(|e| CliError::input(format!("{}: {e}", series.symbol)))?;
    let stats = summary_stats(&returns)
        .map_err(|e| CliError::input(format!("{}: {e}", series.symbol)))?;

    let overnight_curve = cumulate(&returns, Leg::Overnight);
    let intraday_curve = cumulate(&returns, Leg::Intraday);
    let close_curve = cumulate(&returns, Leg::CloseToClose);

    let base = |suffix: &str| -> PathBuf { output_dir.join(format!("{}_{suffix}", series.symbol)) };
    write_output(&base("returns.csv"), &return_series_to_csv(&returns))?;
    write_output(&base("overnight_curve.csv"), &curve_to_csv(&overnight_curve))?;
    write_output(&base("intraday_curve.csv"), &curve_to_csv(&intraday_curve))?;

    let summary = DecomposeSummary {
        symbol: series.symbol.clone(),
        adjustment: series.adjustment.as_str().to_string(),
        first_date: series.bars.first().map(|b| b.date),
        last_date: series.bars.last().map(|b| b.date),
        bar_count: series.bars.len(),
        overnight: stats.overnight,
        intraday: stats.intraday,
        close_to_close_end: close_curve.end_value().unwrap_or(0.0),
        max_compounding_discrepancy: overnight_core::compounding_identity_check(series),
    };
    write_output(&base("summary.json"), &to_pretty_json(&summary)?)?;
    Ok(returns)
}
