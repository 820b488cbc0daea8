//! Falsification checks over a [`ReturnSeries`]: event-window exclusions,
//! overnight capital cost, dispersion comparison, regime split, shifted-open
//! sensitivity, and a paired divergence statistic.

use chrono::{Duration, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::bars::BarSeries;
use crate::error::{Error, Result};
use crate::returns::{cumulate, decompose, Leg, ReturnSeries};

/// Event dates (e.g. earnings announcements) with a symmetric-or-not window
/// of calendar days to exclude around each event.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExclusionCalendar {
    pub symbol: String,
    pub events: Vec<NaiveDate>,
    pub days_before: u32,
    pub days_after: u32,
}

impl ExclusionCalendar {
    pub fn new(symbol: impl Into<String>, events: Vec<NaiveDate>, window: (u32, u32)) -> Self {
        let mut events = events;
        events.sort_unstable();
        events.dedup();
        ExclusionCalendar {
            symbol: symbol.into(),
            events,
            days_before: window.0,
            days_after: window.1,
        }
    }

    /// True when `date` falls inside [event - days_before, event + days_after]
    /// for any event.
    pub fn covers(&self, date: NaiveDate) -> bool {
        self.events.iter().any(|e| {
            let lo = *e - Duration::days(self.days_before as i64);
            let hi = *e + Duration::days(self.days_after as i64);
            lo <= date && date <= hi
        })
    }

    /// Parse a `symbol,event_date` CSV, keeping rows matching `symbol`.
    pub fn from_csv(text: &str, symbol: &str, window: (u32, u32)) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let headers = rdr
            .headers()
            .map_err(|e| Error::Format(format!("unreadable calendar header: {e}")))?;
        if headers.len() < 2 || &headers[0] != "symbol" || &headers[1] != "event_date" {
            return Err(Error::Format(format!(
                "expected `symbol,event_date` header, found {:?}",
                headers.iter().collect::<Vec<_>>()
            )));
        }
        let mut events = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Format(format!("calendar row {}: {e}", i + 2)))?;
            if &rec[0] != symbol {
                continue;
            }
            let date: NaiveDate = rec[1]
                .parse()
                .map_err(|e| Error::Format(format!("calendar row {}: bad date: {e}", i + 2)))?;
            events.push(date);
        }
        Ok(ExclusionCalendar::new(symbol, events, window))
    }
}

/// Mark every pair inside an exclusion window as not included (both legs).
/// Returns the filtered series and the number of pairs the calendar covers.
pub fn apply_exclusions(
    returns: &ReturnSeries,
    calendar: &ExclusionCalendar,
) -> (ReturnSeries, usize) {
    let mut out = returns.clone();
    let mut covered = 0;
    for p in &mut out.pairs {
        if calendar.covers(p.date) {
            p.included = false;
            covered += 1;
        }
    }
    (out, covered)
}

/// Annualized overnight financing cost with a day-count denominator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub annual_rate: f64,
    pub day_count: u32,
}

impl CostModel {
    pub fn validate(&self) -> Result<()> {
        if self.annual_rate < 0.0 {
            return Err(Error::Config("annual_rate must be >= 0".into()));
        }
        if self.day_count == 0 {
            return Err(Error::Config("day_count must be > 0".into()));
        }
        Ok(())
    }

    pub fn per_night(&self) -> f64 {
        self.annual_rate / self.day_count as f64
    }
}

/// Deduct `annual_rate * nights / day_count` from each overnight return;
/// the intraday leg is untouched. Errors if any adjusted return reaches -1.
pub fn apply_overnight_capital_cost(
    returns: &ReturnSeries,
    cost: &CostModel,
) -> Result<ReturnSeries> {
    cost.validate()?;
    let mut out = returns.clone();
    for p in &mut out.pairs {
        p.overnight -= cost.per_night() * p.nights_spanned as f64;
        if p.overnight <= -1.0 {
            return Err(Error::CostDomain(p.date));
        }
    }
    Ok(out)
}

/// Width comparison of the two legs over included days.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionStats {
    pub stddev_overnight: f64,
    pub stddev_intraday: f64,
    /// stddev_intraday / stddev_overnight; None when the overnight leg is
    /// degenerate (zero variance).
    pub ratio: Option<f64>,
    /// F-style variance ratio var_intraday / var_overnight.
    pub f_statistic: Option<f64>,
    pub n_overnight: usize,
    pub n_intraday: usize,
}

/// Per-leg standard deviations and their ratio. Requires at least two
/// included pairs.
pub fn dispersion_compare(returns: &ReturnSeries) -> Result<DispersionStats> {
    let n = returns.included_count();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "{n} included pairs (need at least 2 per leg)"
        )));
    }
    let stats = crate::returns::summary_stats(returns)?;
    let (sd_on, sd_id) = (stats.overnight.stddev, stats.intraday.stddev);
    let degenerate = sd_on == 0.0;
    Ok(DispersionStats {
        stddev_overnight: sd_on,
        stddev_intraday: sd_id,
        ratio: (!degenerate).then(|| sd_id / sd_on),
        f_statistic: (!degenerate).then(|| (sd_id * sd_id) / (sd_on * sd_on)),
        n_overnight: n,
        n_intraday: n,
    })
}

/// Growth summary of one leg inside one regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeLegStats {
    pub mean_daily_return: f64,
    pub end_cumulative: f64,
    /// Mean of ln(1 + r): the log-scale slope proxy.
    pub mean_daily_log_growth: f64,
}

/// One side of a regime split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeStats {
    pub included_days: usize,
    pub overnight: RegimeLegStats,
    pub intraday: RegimeLegStats,
}

/// Per-leg growth behavior before and on/after a cutoff date.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeSplit {
    pub cutoff: NaiveDate,
    pub before: RegimeStats,
    pub after: RegimeStats,
}

fn regime_leg(values: &[f64]) -> RegimeLegStats {
    let n = values.len() as f64;
    RegimeLegStats {
        mean_daily_return: values.iter().sum::<f64>() / n,
        end_cumulative: values.iter().fold(1.0, |acc, r| acc * (1.0 + r)) - 1.0,
        mean_daily_log_growth: values.iter().map(|r| (1.0 + r).ln()).sum::<f64>() / n,
    }
}

fn regime_stats(returns: &ReturnSeries, keep: impl Fn(NaiveDate) -> bool) -> Option<RegimeStats> {
    let pairs: Vec<_> = returns
        .included_pairs()
        .filter(|p| keep(p.date))
        .collect();
    if pairs.len() < 2 {
        return None;
    }
    let on: Vec<f64> = pairs.iter().map(|p| p.overnight).collect();
    let id: Vec<f64> = pairs.iter().map(|p| p.intraday).collect();
    Some(RegimeStats {
        included_days: pairs.len(),
        overnight: regime_leg(&on),
        intraday: regime_leg(&id),
    })
}

/// Split included days at `cutoff` (before: date < cutoff, after: date >=
/// cutoff) and summarize each leg in each regime. Errors when either regime
/// has fewer than two included pairs.
pub fn regime_split(returns: &ReturnSeries, cutoff: NaiveDate) -> Result<RegimeSplit> {
    let before = regime_stats(returns, |d| d < cutoff)
        .ok_or_else(|| Error::EmptyRegime(format!("fewer than 2 included days before {cutoff}")))?;
    let after = regime_stats(returns, |d| d >= cutoff)
        .ok_or_else(|| Error::EmptyRegime(format!("fewer than 2 included days on/after {cutoff}")))?;
    Ok(RegimeSplit {
        cutoff,
        before,
        after,
    })
}

/// End values of both legs for a baseline decomposition and a rerun with
/// substituted opens.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftedOpenEndValues {
    pub baseline_overnight: f64,
    pub baseline_intraday: f64,
    pub shifted_overnight: f64,
    pub shifted_intraday: f64,
}

/// Result of the shifted-open sensitivity check. `NotEvaluable` is returned
/// when no alternative prices were supplied; results are never fabricated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ShiftedOpenResult {
    NotEvaluable,
    Evaluated(ShiftedOpenEndValues),
}

/// Recompute the decomposition with alternative open prices (e.g. the price
/// shortly after the official open) and report end values side by side.
///
/// `alt_opens` must supply a positive price for every bar date; highs/lows
/// are widened to keep substituted bars internally consistent.
pub fn shifted_open_sensitivity(
    series: &BarSeries,
    alt_opens: Option<&[(NaiveDate, f64)]>,
) -> Result<ShiftedOpenResult> {
    let alt = match alt_opens {
        None => return Ok(ShiftedOpenResult::NotEvaluable),
        Some(a) => a,
    };

    let mut shifted = series.clone();
    for bar in &mut shifted.bars {
        let price = alt
            .iter()
            .find(|(d, _)| *d == bar.date)
            .map(|(_, p)| *p)
            .ok_or_else(|| Error::Misaligned(format!("no alternative open for {}", bar.date)))?;
        if !(price.is_finite() && price > 0.0) {
            return Err(Error::Misaligned(format!(
                "alternative open for {} is not a positive price: {price}",
                bar.date
            )));
        }
        bar.open = price;
        bar.low = bar.low.map(|l| l.min(price));
        bar.high = bar.high.map(|h| h.max(price));
    }

    let end_values = |s: &BarSeries| -> Result<(f64, f64)> {
        let r = decompose(s)?;
        Ok((
            cumulate(&r, Leg::Overnight).end_value().unwrap_or(0.0),
            cumulate(&r, Leg::Intraday).end_value().unwrap_or(0.0),
        ))
    };
    let (base_on, base_id) = end_values(series)?;
    let (shift_on, shift_id) = end_values(&shifted)?;
    Ok(ShiftedOpenResult::Evaluated(ShiftedOpenEndValues {
        baseline_overnight: base_on,
        baseline_intraday: base_id,
        shifted_overnight: shift_on,
        shifted_intraday: shift_id,
    }))
}

/// Paired-difference summary of overnight minus intraday returns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceStatistic {
    pub mean_difference: f64,
    /// None when the difference series has zero variance.
    pub t_statistic: Option<f64>,
    pub n: usize,
}

/// Mean of (overnight - intraday) over included days and its one-sample
/// t-statistic.
pub fn divergence_statistic(returns: &ReturnSeries) -> Result<DivergenceStatistic> {
    let diffs: Vec<f64> = returns
        .included_pairs()
        .map(|p| p.overnight - p.intraday)
        .collect();
    let n = diffs.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "{n} included pairs (need at least 2)"
        )));
    }
    let mean = diffs.iter().sum::<f64>() / n as f64;
    let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n - 1) as f64;
    let t_statistic = if var > 0.0 {
        Some(mean / (var.sqrt() / (n as f64).sqrt()))
    } else {
        None
    };
    Ok(DivergenceStatistic {
        mean_difference: mean,
        t_statistic,
        n,
    })
}
