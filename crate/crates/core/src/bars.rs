//! Daily bar types: raw CSV records, validated bars, and series-level
//! containers with their quality report.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

/// Whether prices in a series have been back-adjusted for splits/dividends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Adjustment {
    Raw,
    SplitDividendAdjusted,
}

impl Adjustment {
    pub fn as_str(&self) -> &'static str {
        match self {
            Adjustment::Raw => "raw",
            Adjustment::SplitDividendAdjusted => "split_dividend_adjusted",
        }
    }
}

/// Outcome of the corporate-action adjustment pass for one row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AdjustState {
    /// Adjustment has not been attempted.
    #[default]
    Untouched,
    /// All price fields were scaled by adj_close/close.
    Adjusted,
    /// Row had no adj_close; passed through unchanged.
    SkippedNoAdjClose,
    /// close = 0 with adj_close present; the row cannot be scaled.
    Unadjustable,
}

/// One row of provider data, parsed but not yet validated.
///
/// Any field can be missing: unparseable cells are marked `None`, never
/// silently zeroed. Flags accumulate what the cleaning passes did to the row.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawBarRecord {
    pub date: Option<NaiveDate>,
    pub open: Option<f64>,
    pub high: Option<f64>,
    pub low: Option<f64>,
    pub close: Option<f64>,
    pub adj_close: Option<f64>,
    pub volume: Option<u64>,
    pub open_repaired: bool,
    pub adjust_state: AdjustState,
}

/// A validated trading day. `open` and `close` are always positive;
/// `high`/`low`, when both present, bracket them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailyBar {
    pub date: NaiveDate,
    pub open: f64,
    pub close: f64,
    pub high: Option<f64>,
    pub low: Option<f64>,
    pub volume: Option<u64>,
    /// True when the open was reconstructed from the previous close.
    pub open_repaired: bool,
}

impl DailyBar {
    /// Check the per-bar invariants: positive open/close and, when both
    /// high and low are present, low <= min(open, close) <= max(open, close) <= high.
    pub fn is_consistent(&self) -> bool {
        if !(self.open > 0.0 && self.close > 0.0) {
            return false;
        }
        if let (Some(h), Some(l)) = (self.high, self.low) {
            let lo = self.open.min(self.close);
            let hi = self.open.max(self.close);
            if !(l <= lo && h >= hi) {
                return false;
            }
        }
        true
    }
}

/// An ordered, validated sequence of daily bars for one symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarSeries {
    pub symbol: String,
    pub bars: Vec<DailyBar>,
    pub adjustment: Adjustment,
}

impl BarSeries {
    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    /// Dates strictly ascending and every bar internally consistent.
    pub fn check_invariants(&self) -> bool {
        self.bars.windows(2).all(|w| w[0].date < w[1].date)
            && self.bars.iter().all(|b| b.is_consistent())
    }
}

/// Row-level accounting for one ingested file. `rows_kept` plus the sum of
/// `rows_dropped` always equals `rows_parsed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataQualityReport {
    pub symbol: String,
    pub rows_parsed: usize,
    pub rows_kept: usize,
    /// Drop reason -> count. BTreeMap keeps JSON output deterministic.
    pub rows_dropped: BTreeMap<String, usize>,
    pub opens_repaired: usize,
    pub zero_volume_days: usize,
    pub rows_adjusted: usize,
    pub rows_adjust_skipped: usize,
    pub first_date: Option<NaiveDate>,
    pub last_date: Option<NaiveDate>,
}

impl DataQualityReport {
    pub fn new(symbol: impl Into<String>) -> Self {
        DataQualityReport {
            symbol: symbol.into(),
            rows_parsed: 0,
            rows_kept: 0,
            rows_dropped: BTreeMap::new(),
            opens_repaired: 0,
            zero_volume_days: 0,
            rows_adjusted: 0,
            rows_adjust_skipped: 0,
            first_date: None,
            last_date: None,
        }
    }

    pub fn record_drop(&mut self, reason: &str) {
        *self.rows_dropped.entry(reason.to_string()).or_insert(0) += 1;
    }

    pub fn total_dropped(&self) -> usize {
        self.rows_dropped.values().sum()
    }

    /// parsed = kept + dropped.
    pub fn conserves_rows(&self) -> bool {
        self.rows_parsed == self.rows_kept + self.total_dropped()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Drop reason labels used in `DataQualityReport::rows_dropped`.
pub mod drop_reason {
    pub const MISSING_DATE: &str = "missing_date";
    pub const DUPLICATE_DATE: &str = "duplicate_date";
    pub const BAD_OPEN: &str = "bad_open";
    pub const UNREPAIRABLE_OPEN: &str = "unrepairable_open";
    pub const BAD_CLOSE: &str = "missing_or_nonpositive_close";
    pub const BAD_OPEN_FIELD: &str = "missing_or_nonpositive_open";
    pub const OHLC_INCONSISTENT: &str = "ohlc_inconsistent";
    pub const UNADJUSTABLE: &str = "unadjustable";
}
