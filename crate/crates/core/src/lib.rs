//! Overnight/intraday return analytics for daily bar data.
//!
//! The crate splits each trading day's return into an overnight leg (prior
//! close to open) and an intraday leg (open to close), compounds the legs
//! into cumulative curves, runs falsification checks on the split, and
//! simulates the daily expansion/contraction of a large portfolio under
//! linear price impact to show how such trading produces the same pattern.
//!
//! Modules:
//! - [`ingest`]: CSV parsing, corporate-action back-adjustment, open repair,
//!   validation into a canonical [`BarSeries`]
//! - [`returns`]: per-day decomposition, cumulative curves, summary stats
//! - [`robustness`]: exclusion calendars, capital-cost adjustment,
//!   dispersion and regime statistics, shifted-open sensitivity
//! - [`sim`]: the price-impact simulator and profitability frontier
//! - [`chart`]: small-multiples SVG rendering of the cumulative curves

pub mod bars;
pub mod chart;
pub mod error;
pub mod ingest;
pub mod returns;
pub mod robustness;
pub mod sim;

pub use bars::{Adjustment, BarSeries, DailyBar, DataQualityReport, RawBarRecord};
pub use error::{Error, Result};
pub use ingest::{
    adjust_for_corporate_actions, bar_series_from_csv, bar_series_to_csv, ingest_csv, parse_csv,
    repair_missing_opens, validate_series, CsvSchema, IngestOptions, RepairPolicy,
};
pub use returns::{
    compounding_discrepancies, compounding_identity_check, cumulate, curve_from_csv, curve_to_csv,
    decompose, return_series_to_csv, summary_stats, CumulativeCurve, CurvePoint, Leg, LegStats,
    ReturnPair, ReturnSeries, SummaryStats,
};
pub use robustness::{
    apply_exclusions, apply_overnight_capital_cost, dispersion_compare, divergence_statistic,
    regime_split, shifted_open_sensitivity, CostModel, DispersionStats, DivergenceStatistic,
    ExclusionCalendar, RegimeSplit, ShiftedOpenResult,
};
pub use sim::{
    profitability_frontier, run as run_simulation, step_day, FrontierCell, LedgerRow, MarketState,
    SimConfig, SimLedger, SimOutput,
};
