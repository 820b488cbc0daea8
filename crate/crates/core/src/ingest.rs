//! CSV ingestion pipeline: parse, back-adjust for corporate actions, repair
//! bad opens, validate into a canonical [`BarSeries`].
//!
//! The full pipeline runs in this order:
//! 1. `parse_csv` — cells to `RawBarRecord`s, unparseable cells marked missing
//! 2. `adjust_for_corporate_actions` — scale OHLC by adj_close/close per row
//! 3. sort ascending, deduplicate by date (keep last occurrence)
//! 4. `repair_missing_opens` — handle missing/zero/out-of-range opens
//! 5. `validate_series` — enforce bar invariants, produce the quality report

use std::io::Read;

use chrono::NaiveDate;
use serde::Deserialize;

use crate::bars::{
    drop_reason, AdjustState, Adjustment, BarSeries, DailyBar, DataQualityReport, RawBarRecord,
};
use crate::error::{Error, Result};

/// Maps logical fields to CSV column names. `date`, `open`, and `close` are
/// required; the rest are optional columns.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct CsvSchema {
    pub date: String,
    pub open: String,
    pub close: String,
    #[serde(default)]
    pub high: Option<String>,
    #[serde(default)]
    pub low: Option<String>,
    #[serde(default)]
    pub adj_close: Option<String>,
    #[serde(default)]
    pub volume: Option<String>,
    /// Column carrying the repair flag in canonical output files.
    #[serde(default)]
    pub open_repaired: Option<String>,
}

impl CsvSchema {
    /// Yahoo! Finance export header: `Date,Open,High,Low,Close,Adj Close,Volume`.
    pub fn yahoo() -> Self {
        CsvSchema {
            date: "Date".into(),
            open: "Open".into(),
            close: "Close".into(),
            high: Some("High".into()),
            low: Some("Low".into()),
            adj_close: Some("Adj Close".into()),
            volume: Some("Volume".into()),
            open_repaired: None,
        }
    }

    /// Canonical output header: `date,open,close,high,low,volume,open_repaired`.
    pub fn canonical() -> Self {
        CsvSchema {
            date: "date".into(),
            open: "open".into(),
            close: "close".into(),
            high: Some("high".into()),
            low: Some("low".into()),
            adj_close: None,
            volume: Some("volume".into()),
            open_repaired: Some("open_repaired".into()),
        }
    }

    /// Build a schema from a header row by case-insensitive name matching.
    /// Recognizes the Yahoo and canonical headers plus common aliases.
    pub fn detect(headers: &[&str]) -> Result<Self> {
        let find = |names: &[&str]| -> Option<String> {
            headers
                .iter()
                .find(|h| names.iter().any(|n| h.eq_ignore_ascii_case(n)))
                .map(|h| h.to_string())
        };
        let date = find(&["date", "timestamp"]);
        let open = find(&["open"]);
        let close = find(&["close"]);
        match (date, open, close) {
            (Some(date), Some(open), Some(close)) => Ok(CsvSchema {
                date,
                open,
                close,
                high: find(&["high"]),
                low: find(&["low"]),
                adj_close: find(&["adj close", "adj_close", "adjclose", "adjusted close"]),
                volume: find(&["volume", "vol"]),
                open_repaired: find(&["open_repaired"]),
            }),
            _ => Err(Error::Schema(format!(
                "could not detect date/open/close columns in header {:?}",
                headers
            ))),
        }
    }

    fn mapped_columns(&self) -> Vec<(&'static str, &str)> {
        let mut cols: Vec<(&'static str, &str)> = vec![
            ("date", self.date.as_str()),
            ("open", self.open.as_str()),
            ("close", self.close.as_str()),
        ];
        if let Some(c) = &self.high {
            cols.push(("high", c));
        }
        if let Some(c) = &self.low {
            cols.push(("low", c));
        }
        if let Some(c) = &self.adj_close {
            cols.push(("adj_close", c));
        }
        if let Some(c) = &self.volume {
            cols.push(("volume", c));
        }
        if let Some(c) = &self.open_repaired {
            cols.push(("open_repaired", c));
        }
        cols
    }
}

/// How `repair_missing_opens` treats a bad open (missing, <= 0, or outside
/// the day's [low, high]).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepairPolicy {
    /// Remove the day from the series.
    DropDay,
    /// Set open := previous close and flag the bar. Makes that day's
    /// overnight return exactly zero.
    CopyPrevClose,
    /// Hard error naming the first offending date.
    Fail,
}

impl RepairPolicy {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "drop" | "drop_day" => Some(RepairPolicy::DropDay),
            "copy" | "copy_prev_close" => Some(RepairPolicy::CopyPrevClose),
            "fail" => Some(RepairPolicy::Fail),
            _ => None,
        }
    }
}

fn parse_cell(raw: &str) -> Option<&str> {
    let t = raw.trim();
    if t.is_empty() || t.eq_ignore_ascii_case("null") {
        None
    } else {
        Some(t)
    }
}

fn parse_price(raw: &str) -> Option<f64> {
    let v: f64 = parse_cell(raw)?.parse().ok()?;
    // Prices are nonnegative at the raw stage; anything else is unusable.
    if v.is_finite() && v >= 0.0 {
        Some(v)
    } else {
        None
    }
}

fn parse_volume(raw: &str) -> Option<u64> {
    let t = parse_cell(raw)?;
    if let Ok(v) = t.parse::<u64>() {
        return Some(v);
    }
    // Some providers emit volumes as floats ("1000.0").
    let f: f64 = t.parse().ok()?;
    if f.is_finite() && f >= 0.0 && f.fract() == 0.0 && f <= u64::MAX as f64 {
        Some(f as u64)
    } else {
        None
    }
}

fn parse_date(raw: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(parse_cell(raw)?, "%Y-%m-%d").ok()
}

/// Parse header-bearing CSV into raw records, one per data row, in file
/// order. Unparseable cells become missing fields; no row is dropped here.
pub fn parse_csv<R: Read>(reader: R, schema: &CsvSchema) -> Result<Vec<RawBarRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);

    let headers = rdr
        .headers()
        .map_err(|e| Error::Format(format!("unreadable header: {e}")))?
        .clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].trim().is_empty()) {
        return Err(Error::EmptyInput);
    }

    let index_of = |name: &str| headers.iter().position(|h| h == name);

    // A header that matches none of the mapped columns is not a header at all.
    let mapped = schema.mapped_columns();
    if !mapped.iter().any(|(_, col)| index_of(col).is_some()) {
        return Err(Error::Format(format!(
            "no header row: none of the mapped columns {:?} appear in {:?}",
            mapped.iter().map(|(_, c)| *c).collect::<Vec<_>>(),
            headers.iter().collect::<Vec<_>>()
        )));
    }
    let mut missing = Vec::new();
    let idx = |col: Option<&str>| -> Option<usize> { col.and_then(index_of) };
    for (field, col) in &mapped {
        if index_of(col).is_none() {
            missing.push(format!("{field} (column {col:?})"));
        }
    }
    if !missing.is_empty() {
        return Err(Error::Schema(format!(
            "mapped columns not found in header: {}",
            missing.join(", ")
        )));
    }

    let date_i = idx(Some(&schema.date)).unwrap();
    let open_i = idx(Some(&schema.open)).unwrap();
    let close_i = idx(Some(&schema.close)).unwrap();
    let high_i = idx(schema.high.as_deref());
    let low_i = idx(schema.low.as_deref());
    let adj_i = idx(schema.adj_close.as_deref());
    let vol_i = idx(schema.volume.as_deref());
    let rep_i = idx(schema.open_repaired.as_deref());

    let mut out = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Format(format!("row {}: {e}", line + 2)))?;
        let get = |i: Option<usize>| i.and_then(|i| rec.get(i)).unwrap_or("");
        out.push(RawBarRecord {
            date: parse_date(get(Some(date_i))),
            open: parse_price(get(Some(open_i))),
            high: high_i.and_then(|i| parse_price(rec.get(i).unwrap_or(""))),
            low: low_i.and_then(|i| parse_price(rec.get(i).unwrap_or(""))),
            close: parse_price(get(Some(close_i))),
            adj_close: adj_i.and_then(|i| parse_price(rec.get(i).unwrap_or(""))),
            volume: vol_i.and_then(|i| parse_volume(rec.get(i).unwrap_or(""))),
            open_repaired: rep_i
                .and_then(|i| rec.get(i))
                .map(|v| v.trim() == "true")
                .unwrap_or(false),
            adjust_state: AdjustState::Untouched,
        });
    }
    Ok(out)
}

/// Counts produced by the adjustment pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AdjustOutcome {
    pub adjusted: usize,
    pub skipped_no_adj_close: usize,
    pub unadjustable: usize,
}

/// Scale open/high/low/close of each row by that row's adj_close/close ratio.
/// Rows without adj_close pass through unchanged and are flagged; rows with
/// close = 0 and adj_close present are flagged unadjustable (dropped later).
pub fn adjust_for_corporate_actions(
    records: Vec<RawBarRecord>,
) -> (Vec<RawBarRecord>, AdjustOutcome) {
    let mut outcome = AdjustOutcome::default();
    let records = records
        .into_iter()
        .map(|mut r| {
            match (r.close, r.adj_close) {
                (Some(close), Some(adj)) if close > 0.0 => {
                    let ratio = adj / close;
                    r.open = r.open.map(|v| v * ratio);
                    r.high = r.high.map(|v| v * ratio);
                    r.low = r.low.map(|v| v * ratio);
                    r.close = Some(close * ratio);
                    r.adjust_state = AdjustState::Adjusted;
                    outcome.adjusted += 1;
                }
                (Some(_), Some(_)) => {
                    // close = 0: the ratio is undefined.
                    r.adjust_state = AdjustState::Unadjustable;
                    outcome.unadjustable += 1;
                }
                _ => {
                    r.adjust_state = AdjustState::SkippedNoAdjClose;
                    outcome.skipped_no_adj_close += 1;
                }
            }
            r
        })
        .collect();
    (records, outcome)
}

/// Counts produced by the repair pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RepairOutcome {
    pub repaired: usize,
    pub dropped_bad_open: usize,
    pub dropped_unrepairable: usize,
}

fn open_is_bad(r: &RawBarRecord) -> bool {
    match r.open {
        None => true,
        Some(o) if o <= 0.0 => true,
        Some(o) => match (r.low, r.high) {
            (Some(l), Some(h)) => o < l || o > h,
            _ => false,
        },
    }
}

/// Handle rows whose open is missing, <= 0, or outside [low, high] per the
/// chosen policy. Records must already be date-sorted.
///
/// `CopyPrevClose` copies the nearest preceding positive close. The day's
/// high/low are widened to include the synthetic open so the bar stays
/// internally consistent while the overnight return becomes exactly zero.
pub fn repair_missing_opens(
    records: Vec<RawBarRecord>,
    policy: RepairPolicy,
) -> Result<(Vec<RawBarRecord>, RepairOutcome)> {
    let mut outcome = RepairOutcome::default();
    let mut out: Vec<RawBarRecord> = Vec::with_capacity(records.len());

    for r in records {
        if !open_is_bad(&r) {
            out.push(r);
            continue;
        }
        match policy {
            RepairPolicy::Fail => {
                let reason = match r.open {
                    None => "open missing".to_string(),
                    Some(o) if o <= 0.0 => format!("open {o} is not positive"),
                    Some(o) => format!("open {o} outside [low, high]"),
                };
                return Err(match r.date {
                    Some(date) => Error::BadOpen { date, reason },
                    None => Error::Validation(format!("bad open on undated row: {reason}")),
                });
            }
            RepairPolicy::DropDay => {
                outcome.dropped_bad_open += 1;
            }
            RepairPolicy::CopyPrevClose => {
                let prev_close = out
                    .iter()
                    .rev()
                    .find_map(|p| p.close.filter(|c| *c > 0.0));
                match prev_close {
                    Some(c) => {
                        let mut r = r;
                        r.open = Some(c);
                        r.open_repaired = true;
                        r.low = r.low.map(|l| l.min(c));
                        r.high = r.high.map(|h| h.max(c));
                        outcome.repaired += 1;
                        out.push(r);
                    }
                    None => {
                        // First row (or nothing usable before it): no close to copy.
                        outcome.dropped_unrepairable += 1;
                    }
                }
            }
        }
    }
    Ok((out, outcome))
}

/// Stable-sort by date and deduplicate, keeping the last occurrence of each
/// date (later provider rows are corrections). Rows without a date are
/// dropped and counted.
fn canonical_order(records: Vec<RawBarRecord>, report: &mut DataQualityReport) -> Vec<RawBarRecord> {
    let mut dated: Vec<RawBarRecord> = Vec::with_capacity(records.len());
    for r in records {
        if r.date.is_some() {
            dated.push(r);
        } else {
            report.record_drop(drop_reason::MISSING_DATE);
        }
    }
    dated.sort_by_key(|r| r.date);
    let mut out: Vec<RawBarRecord> = Vec::with_capacity(dated.len());
    for r in dated {
        if out.last().map(|p| p.date) == Some(r.date) {
            *out.last_mut().unwrap() = r;
            report.record_drop(drop_reason::DUPLICATE_DATE);
        } else {
            out.push(r);
        }
    }
    out
}

fn validate_into(
    records: Vec<RawBarRecord>,
    adjustment: Adjustment,
    mut report: DataQualityReport,
) -> Result<(BarSeries, DataQualityReport)> {
    let records = canonical_order(records, &mut report);

    let mut bars: Vec<DailyBar> = Vec::with_capacity(records.len());
    for r in records {
        if r.adjust_state == AdjustState::Unadjustable {
            report.record_drop(drop_reason::UNADJUSTABLE);
            continue;
        }
        let date = r.date.expect("undated rows removed");
        let open = match r.open {
            Some(o) if o > 0.0 => o,
            _ => {
                report.record_drop(drop_reason::BAD_OPEN_FIELD);
                continue;
            }
        };
        let close = match r.close {
            Some(c) if c > 0.0 => c,
            _ => {
                report.record_drop(drop_reason::BAD_CLOSE);
                continue;
            }
        };
        let bar = DailyBar {
            date,
            open,
            close,
            high: r.high,
            low: r.low,
            volume: r.volume,
            open_repaired: r.open_repaired,
        };
        if !bar.is_consistent() {
            report.record_drop(drop_reason::OHLC_INCONSISTENT);
            continue;
        }
        if bar.open_repaired {
            report.opens_repaired += 1;
        }
        if bar.volume == Some(0) {
            report.zero_volume_days += 1;
        }
        bars.push(bar);
    }

    report.rows_kept = bars.len();
    report.first_date = bars.first().map(|b| b.date);
    report.last_date = bars.last().map(|b| b.date);

    if bars.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} valid bars after validation (need at least 2)",
            bars.len()
        )));
    }

    Ok((
        BarSeries {
            symbol: report.symbol.clone(),
            bars,
            adjustment,
        },
        report,
    ))
}

/// Validate raw records into a `BarSeries`: sort ascending, resolve duplicate
/// dates (keep last), drop rows violating bar invariants, and account for
/// every input row in the report.
pub fn validate_series(
    records: Vec<RawBarRecord>,
    symbol: &str,
    adjustment: Adjustment,
) -> Result<(BarSeries, DataQualityReport)> {
    let mut report = DataQualityReport::new(symbol);
    report.rows_parsed = records.len();
    report.opens_repaired = 0;
    validate_into(records, adjustment, report)
}

/// Options for the end-to-end ingest pipeline.
#[derive(Debug, Clone)]
pub struct IngestOptions {
    pub symbol: String,
    pub schema: CsvSchema,
    /// Back-adjust OHLC by adj_close/close before anything else.
    pub adjust: bool,
    pub repair: RepairPolicy,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            symbol: String::new(),
            schema: CsvSchema::yahoo(),
            adjust: true,
            repair: RepairPolicy::CopyPrevClose,
        }
    }
}

/// Full pipeline: parse -> adjust -> sort/dedupe -> repair -> validate.
/// The returned report accounts for every parsed row across all stages.
pub fn ingest_csv<R: Read>(
    reader: R,
    opts: &IngestOptions,
) -> Result<(BarSeries, DataQualityReport)> {
    let records = parse_csv(reader, &opts.schema)?;

    let mut report = DataQualityReport::new(&opts.symbol);
    report.rows_parsed = records.len();

    let (records, adjustment) = if opts.adjust {
        let (records, adj) = adjust_for_corporate_actions(records);
        report.rows_adjusted = adj.adjusted;
        report.rows_adjust_skipped = adj.skipped_no_adj_close;
        (records, Adjustment::SplitDividendAdjusted)
    } else {
        (records, Adjustment::Raw)
    };

    let records = canonical_order(records, &mut report);

    let (records, repair) = repair_missing_opens(records, opts.repair)?;
    for _ in 0..repair.dropped_bad_open {
        report.record_drop(drop_reason::BAD_OPEN);
    }
    for _ in 0..repair.dropped_unrepairable {
        report.record_drop(drop_reason::UNREPAIRABLE_OPEN);
    }

    validate_into(records, adjustment, report)
}

// --- canonical CSV serialization -------------------------------------------

fn fmt_opt_f64(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Write a series in the canonical schema:
/// `date,open,close,high,low,volume,open_repaired`.
pub fn bar_series_to_csv(series: &BarSeries) -> String {
    let mut out = String::from("date,open,close,high,low,volume,open_repaired\n");
    for b in &series.bars {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            b.date,
            b.open,
            b.close,
            fmt_opt_f64(b.high),
            fmt_opt_f64(b.low),
            b.volume.map(|v| v.to_string()).unwrap_or_default(),
            b.open_repaired
        ));
    }
    out
}

/// Read a canonical-schema CSV back into a `BarSeries`.
pub fn bar_series_from_csv<R: Read>(
    reader: R,
    symbol: &str,
    adjustment: Adjustment,
) -> Result<(BarSeries, DataQualityReport)> {
    let records = parse_csv(reader, &CsvSchema::canonical())?;
    let mut report = DataQualityReport::new(symbol);
    report.rows_parsed = records.len();
    validate_into(records, adjustment, report)
}
