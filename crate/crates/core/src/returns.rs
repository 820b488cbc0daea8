//! Overnight/intraday return decomposition and cumulative curves.
//!
//! For consecutive bars t-1 and t:
//!   overnight(t) = open(t) / close(t-1) - 1
//!   intraday(t)  = close(t) / open(t)   - 1
//! so (1 + overnight)(1 + intraday) = close(t) / close(t-1) exactly. Curves
//! compound simple returns multiplicatively over the included days.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::bars::{Adjustment, BarSeries};
use crate::error::{Error, Result};

/// Which compounded leg a curve or statistic refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Leg {
    Overnight,
    Intraday,
    CloseToClose,
}

impl Leg {
    pub fn as_str(&self) -> &'static str {
        match self {
            Leg::Overnight => "overnight",
            Leg::Intraday => "intraday",
            Leg::CloseToClose => "close_to_close",
        }
    }
}

/// One day's overnight and intraday simple returns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReturnPair {
    pub date: NaiveDate,
    pub overnight: f64,
    pub intraday: f64,
    /// Calendar nights between this bar and the previous one (>= 1; 3 across
    /// a weekend). Used by the overnight capital-cost adjustment.
    pub nights_spanned: i64,
    /// Excluded days still occupy a row but contribute factor 1 to curves.
    pub included: bool,
}

impl ReturnPair {
    pub fn leg(&self, leg: Leg) -> f64 {
        match leg {
            Leg::Overnight => self.overnight,
            Leg::Intraday => self.intraday,
            Leg::CloseToClose => (1.0 + self.overnight) * (1.0 + self.intraday) - 1.0,
        }
    }
}

/// Per-day return pairs for one symbol, in date order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    pub symbol: String,
    pub pairs: Vec<ReturnPair>,
    pub adjustment: Adjustment,
}

impl ReturnSeries {
    pub fn included_pairs(&self) -> impl Iterator<Item = &ReturnPair> {
        self.pairs.iter().filter(|p| p.included)
    }

    pub fn included_count(&self) -> usize {
        self.included_pairs().count()
    }
}

/// A point on a compounded-growth curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub date: NaiveDate,
    pub value: f64,
}

/// Compounded growth path of one leg: value(d) = prod over included days <= d
/// of (1 + r) - 1. Always > -1 for positive-price input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulativeCurve {
    pub leg: Leg,
    pub points: Vec<CurvePoint>,
}

impl CumulativeCurve {
    pub fn end_value(&self) -> Option<f64> {
        self.points.last().map(|p| p.value)
    }
}

/// Split a bar series into per-day overnight/intraday return pairs.
/// Produces exactly len(bars) - 1 pairs, all included.
pub fn decompose(series: &BarSeries) -> Result<ReturnSeries> {
    if series.bars.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} bars (need at least 2 to compute a return)",
            series.bars.len()
        )));
    }
    let pairs = series
        .bars
        .windows(2)
        .map(|w| {
            let (prev, cur) = (&w[0], &w[1]);
            ReturnPair {
                date: cur.date,
                overnight: cur.open / prev.close - 1.0,
                intraday: cur.close / cur.open - 1.0,
                nights_spanned: (cur.date - prev.date).num_days(),
                included: true,
            }
        })
        .collect();
    Ok(ReturnSeries {
        symbol: series.symbol.clone(),
        pairs,
        adjustment: series.adjustment,
    })
}

/// Compound one leg into its cumulative curve. Excluded days contribute
/// factor 1, leaving the curve flat across them but keeping the date axis.
pub fn cumulate(returns: &ReturnSeries, leg: Leg) -> CumulativeCurve {
    let mut acc = 1.0;
    let points = returns
        .pairs
        .iter()
        .map(|p| {
            if p.included {
                acc *= 1.0 + p.leg(leg);
            }
            CurvePoint {
                date: p.date,
                value: acc - 1.0,
            }
        })
        .collect();
    CumulativeCurve { leg, points }
}

/// Max over all days of |(1+overnight)(1+intraday) * close(t-1)/close(t) - 1|,
/// decomposing internally. A self-test that the two ratio definitions compose
/// back to the close-to-close return; <= 1e-12 for any valid series.
pub fn compounding_identity_check(series: &BarSeries) -> f64 {
    series
        .bars
        .windows(2)
        .map(|w| {
            let (prev, cur) = (&w[0], &w[1]);
            let overnight = cur.open / prev.close - 1.0;
            let intraday = cur.close / cur.open - 1.0;
            ((1.0 + overnight) * (1.0 + intraday) * prev.close / cur.close - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// Per-day discrepancy of an already-computed decomposition against the
/// closes of `series`. Nonzero entries localize bars whose prices changed
/// after the pairs were computed.
pub fn compounding_discrepancies(
    series: &BarSeries,
    returns: &ReturnSeries,
) -> Vec<(NaiveDate, f64)> {
    series
        .bars
        .windows(2)
        .zip(returns.pairs.iter())
        .map(|(w, p)| {
            let value =
                ((1.0 + p.overnight) * (1.0 + p.intraday) * w[0].close / w[1].close - 1.0).abs();
            (w[1].date, value)
        })
        .collect()
}

/// Mean, sample standard deviation (n-1 denominator), count, and end
/// cumulative value of one leg over included days.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LegStats {
    pub mean: f64,
    pub stddev: f64,
    pub count: usize,
    pub end_cumulative: f64,
}

/// Summary statistics for both legs over included days.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub overnight: LegStats,
    pub intraday: LegStats,
}

fn leg_stats(returns: &ReturnSeries, leg: Leg) -> LegStats {
    let values: Vec<f64> = returns.included_pairs().map(|p| p.leg(leg)).collect();
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    // Sample stddev is undefined for a single observation; report 0.
    let stddev = if n > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let end_cumulative = values.iter().fold(1.0, |acc, r| acc * (1.0 + r)) - 1.0;
    LegStats {
        mean,
        stddev,
        count: n,
        end_cumulative,
    }
}

/// Per-leg summary over included pairs. Errors when nothing is included.
pub fn summary_stats(returns: &ReturnSeries) -> Result<SummaryStats> {
    if returns.included_count() == 0 {
        return Err(Error::InsufficientData(
            "no included return pairs".to_string(),
        ));
    }
    Ok(SummaryStats {
        overnight: leg_stats(returns, Leg::Overnight),
        intraday: leg_stats(returns, Leg::Intraday),
    })
}

// --- serialization ----------------------------------------------------------

/// `date,overnight,intraday,nights,included` rows.
pub fn return_series_to_csv(returns: &ReturnSeries) -> String {
    let mut out = String::from("date,overnight,intraday,nights,included\n");
    for p in &returns.pairs {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.date, p.overnight, p.intraday, p.nights_spanned, p.included
        ));
    }
    out
}

/// `date,value` rows for one curve.
pub fn curve_to_csv(curve: &CumulativeCurve) -> String {
    let mut out = String::from("date,value\n");
    for p in &curve.points {
        out.push_str(&format!("{},{}\n", p.date, p.value));
    }
    out
}

/// Read a `date,value` curve file back.
pub fn curve_from_csv(text: &str, leg: Leg) -> Result<CumulativeCurve> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| Error::Format(format!("unreadable header: {e}")))?;
    if headers.len() < 2 || &headers[0] != "date" || &headers[1] != "value" {
        return Err(Error::Format(format!(
            "expected `date,value` header, found {:?}",
            headers.iter().collect::<Vec<_>>()
        )));
    }
    let mut points = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Format(format!("row {}: {e}", i + 2)))?;
        let date: NaiveDate = rec[0]
            .parse()
            .map_err(|e| Error::Format(format!("row {}: bad date: {e}", i + 2)))?;
        let value: f64 = rec[1]
            .parse()
            .map_err(|e| Error::Format(format!("row {}: bad value: {e}", i + 2)))?;
        points.push(CurvePoint { date, value });
    }
    Ok(CumulativeCurve { leg, points })
}
