//! Price-impact simulator: a firm expands its portfolio at the open and
//! contracts it before the close, every day, under linear price impact.
//!
//! Event order within a day is fixed:
//! 1. permanent impact of the expansion moves the open mark
//! 2. the expansion fills at the open worsened by temporary impact
//! 3. exogenous log-normal noise moves the mark
//! 4. permanent impact of the contraction moves the close mark the other
//!    way; the contraction fills at the close worsened by temporary impact
//! 5. the ledger records mark-to-market gain on held positions minus
//!    commission and temporary-impact slippage
//!
//! With `market_neutral`, the first half of the assets is pushed up (long
//! side) and the second half down (short side). `contraction_fraction < 1`
//! leaves a growing residual position, so the book drifts with the impact
//! it creates.

use chrono::{Datelike, NaiveDate, Weekday};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::bars::{Adjustment, BarSeries, DailyBar};
use crate::error::{Error, Result};

/// Simulator parameters. Impact coefficients are price fractions per unit
/// traded: a trade of `q` units moves the mark by a factor (1 +/- lambda*q).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub n_assets: usize,
    pub n_days: usize,
    pub base_price: f64,
    /// Per-day standard deviation of the exogenous close-to-close log shock.
    pub noise_sigma: f64,
    pub permanent_impact: f64,
    pub temporary_impact: f64,
    /// Units traded per asset at the open.
    pub expansion_size: f64,
    /// Fraction of the expansion unwound before the close, in [0, 1].
    pub contraction_fraction: f64,
    /// Commission as a fraction of traded notional.
    pub trading_cost_rate: f64,
    /// Long half / short half of assets.
    pub market_neutral: bool,
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Config(msg.to_string()))
            }
        };
        check(self.n_assets >= 1, "n_assets must be >= 1")?;
        check(self.n_days >= 1, "n_days must be >= 1")?;
        check(
            self.base_price.is_finite() && self.base_price > 0.0,
            "base_price must be > 0",
        )?;
        check(self.noise_sigma >= 0.0, "noise_sigma must be >= 0")?;
        check(self.permanent_impact >= 0.0, "permanent_impact must be >= 0")?;
        check(self.temporary_impact >= 0.0, "temporary_impact must be >= 0")?;
        check(self.expansion_size >= 0.0, "expansion_size must be >= 0")?;
        check(
            (0.0..=1.0).contains(&self.contraction_fraction),
            "contraction_fraction must be in [0, 1]",
        )?;
        check(
            self.trading_cost_rate >= 0.0,
            "trading_cost_rate must be >= 0",
        )?;
        check(
            !self.market_neutral || self.n_assets.is_multiple_of(2),
            "n_assets must be even when market_neutral",
        )?;
        Ok(())
    }

    /// Documented default configuration that reproduces the overnight-up /
    /// intraday-down pattern on the long side: 0.1% permanent open impact
    /// per day, 90% of the expansion unwound before the close, ten years of
    /// trading days. Used as the regression fixture.
    pub fn default_mechanism() -> Self {
        SimConfig {
            n_assets: 2,
            n_days: 2520,
            base_price: 100.0,
            noise_sigma: 0.01,
            permanent_impact: 1e-5,
            temporary_impact: 1e-7,
            expansion_size: 100.0,
            contraction_fraction: 0.9,
            trading_cost_rate: 1e-4,
            market_neutral: true,
            seed: 42,
        }
    }

    /// Parse a JSON object or a flat `key = value` file (one pair per line,
    /// `#` comments allowed).
    pub fn from_config_text(text: &str) -> Result<Self> {
        let trimmed = text.trim_start();
        let config: SimConfig = if trimmed.starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::Config(format!("bad JSON config: {e}")))?
        } else {
            Self::from_key_values(text)?
        };
        config.validate()?;
        Ok(config)
    }

    fn from_key_values(text: &str) -> Result<Self> {
        // Start from a neutral template; every field may be overridden.
        let mut config = SimConfig {
            n_assets: 1,
            n_days: 1,
            base_price: 100.0,
            noise_sigma: 0.0,
            permanent_impact: 0.0,
            temporary_impact: 0.0,
            expansion_size: 0.0,
            contraction_fraction: 1.0,
            trading_cost_rate: 0.0,
            market_neutral: false,
            seed: 0,
        };
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key=value", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |e: &dyn std::fmt::Display| {
                Error::Config(format!("line {}: bad value for {key}: {e}", lineno + 1))
            };
            match key {
                "n_assets" => config.n_assets = value.parse().map_err(|e| bad(&e))?,
                "n_days" => config.n_days = value.parse().map_err(|e| bad(&e))?,
                "base_price" => config.base_price = value.parse().map_err(|e| bad(&e))?,
                "noise_sigma" => config.noise_sigma = value.parse().map_err(|e| bad(&e))?,
                "permanent_impact" => config.permanent_impact = value.parse().map_err(|e| bad(&e))?,
                "temporary_impact" => config.temporary_impact = value.parse().map_err(|e| bad(&e))?,
                "expansion_size" => config.expansion_size = value.parse().map_err(|e| bad(&e))?,
                "contraction_fraction" => {
                    config.contraction_fraction = value.parse().map_err(|e| bad(&e))?
                }
                "trading_cost_rate" => {
                    config.trading_cost_rate = value.parse().map_err(|e| bad(&e))?
                }
                "market_neutral" => config.market_neutral = value.parse().map_err(|e| bad(&e))?,
                "seed" => config.seed = value.parse().map_err(|e| bad(&e))?,
                other => return Err(Error::Config(format!("unknown key `{other}`"))),
            }
        }
        Ok(config)
    }

    /// +1 for long-side assets, -1 for short-side.
    pub fn side(&self, asset: usize) -> f64 {
        if self.market_neutral && asset >= self.n_assets / 2 {
            -1.0
        } else {
            1.0
        }
    }
}

/// Evolving simulation state: marks, firm positions, and the random stream.
#[derive(Debug, Clone)]
pub struct MarketState {
    pub prices: Vec<f64>,
    pub positions: Vec<f64>,
    pub day: usize,
    rng: ChaCha8Rng,
}

impl MarketState {
    pub fn new(config: &SimConfig) -> Self {
        MarketState {
            prices: vec![config.base_price; config.n_assets],
            positions: vec![0.0; config.n_assets],
            day: 0,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
        }
    }
}

/// One asset's marks for a single simulated day.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssetDay {
    pub open: f64,
    pub high: f64,
    pub low: f64,
    pub close: f64,
    pub volume: u64,
}

/// One day of firm accounting. `net = mtm_gain - cost` by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub day: usize,
    pub mtm_gain: f64,
    pub cost: f64,
    pub net: f64,
    /// Sum of absolute positions after the day's trading, in units.
    pub gross_position: f64,
}

/// Per-day rows plus exact running totals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimLedger {
    pub rows: Vec<LedgerRow>,
    pub cumulative_mtm: f64,
    pub cumulative_cost: f64,
    pub cumulative_net: f64,
}

impl SimLedger {
    fn new() -> Self {
        SimLedger {
            rows: Vec::new(),
            cumulative_mtm: 0.0,
            cumulative_cost: 0.0,
            cumulative_net: 0.0,
        }
    }

    fn push(&mut self, row: LedgerRow) {
        self.cumulative_mtm += row.mtm_gain;
        self.cumulative_cost += row.cost;
        self.cumulative_net += row.net;
        self.rows.push(row);
    }

    /// `day,mtm_gain,cost,net,gross_position` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("day,mtm_gain,cost,net,gross_position\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.day, r.mtm_gain, r.cost, r.net, r.gross_position
            ));
        }
        out
    }
}

/// Synthetic per-asset series, the equal-weight index, and the firm ledger.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub assets: Vec<BarSeries>,
    pub index: BarSeries,
    pub ledger: SimLedger,
}

fn ensure_positive(price: f64, day: usize, what: &str) -> Result<f64> {
    if price.is_finite() && price > 0.0 {
        Ok(price)
    } else {
        Err(Error::SimAbort {
            day,
            reason: format!("{what} driven to {price}; parameters out of modeled regime"),
        })
    }
}

/// Advance the simulation by one day. Returns each asset's marks and the
/// day's ledger row; mutates prices, positions, day index, and RNG state.
pub fn step_day(state: &mut MarketState, config: &SimConfig) -> Result<(Vec<AssetDay>, LedgerRow)> {
    let q = config.expansion_size;
    let cq = config.contraction_fraction * q;
    let lambda = config.permanent_impact;
    let eta = config.temporary_impact;
    let day = state.day;

    let mut days = Vec::with_capacity(config.n_assets);
    let mut mtm = 0.0;
    let mut commission = 0.0;
    let mut slippage = 0.0;

    for i in 0..config.n_assets {
        let s = config.side(i);
        let prev_close = state.prices[i];
        let held = state.positions[i];

        // 1. expansion's permanent impact sets the open mark
        let open = ensure_positive(prev_close * (1.0 + s * lambda * q), day, "open")?;
        // 2. expansion fills at the open, worsened by temporary impact
        let expansion_fill = ensure_positive(open * (1.0 + s * eta * q), day, "expansion fill")?;

        // 3. exogenous close-to-close log shock
        let z: f64 = StandardNormal.sample(&mut state.rng);
        let shocked = open * (config.noise_sigma * z).exp();

        // 4. contraction's permanent impact sets the close mark; the fill is
        //    again worse than the mark for the firm
        let close = ensure_positive(shocked * (1.0 - s * lambda * cq), day, "close")?;
        let contraction_fill =
            ensure_positive(close * (1.0 - s * eta * cq), day, "contraction fill")?;

        // 5. accounting: marks move the held book, trades pay costs
        mtm += held * (open - prev_close) + (held + s * q) * (close - open);
        slippage += eta * q * q * open + eta * cq * cq * close;
        commission += config.trading_cost_rate * (q * expansion_fill + cq * contraction_fill);

        state.positions[i] = held + s * q - s * cq;
        state.prices[i] = close;

        days.push(AssetDay {
            open,
            high: open.max(shocked).max(close),
            low: open.min(shocked).min(close),
            close,
            volume: (q + cq).round() as u64,
        });
    }

    let cost = commission + slippage;
    let row = LedgerRow {
        day,
        mtm_gain: mtm,
        cost,
        net: mtm - cost,
        gross_position: state.positions.iter().map(|p| p.abs()).sum(),
    };
    state.day += 1;
    Ok((days, row))
}

/// First trading date of the synthetic calendar.
pub fn sim_start_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2000, 1, 3).unwrap()
}

/// `n` consecutive weekdays starting at `start`.
pub fn trading_calendar(start: NaiveDate, n: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(n);
    let mut d = start;
    while out.len() < n {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d = d.succ_opt().expect("date range");
    }
    out
}

/// Run the full simulation. Deterministic given config and seed: identical
/// inputs produce bit-identical output.
pub fn run(config: &SimConfig) -> Result<SimOutput> {
    config.validate()?;
    let mut state = MarketState::new(config);
    let dates = trading_calendar(sim_start_date(), config.n_days);

    let mut per_asset: Vec<Vec<DailyBar>> = vec![Vec::with_capacity(config.n_days); config.n_assets];
    let mut index_bars: Vec<DailyBar> = Vec::with_capacity(config.n_days);
    let mut ledger = SimLedger::new();

    // Equal-weight index re-based to base_price (all assets start there, so
    // the re-basing factor is 1 by construction).
    let n = config.n_assets as f64;

    for (day, date) in dates.iter().enumerate() {
        let (days, row) = step_day(&mut state, config)?;
        debug_assert_eq!(row.day, day);

        let mean = |f: fn(&AssetDay) -> f64| days.iter().map(f).sum::<f64>() / n;
        let index_open = mean(|a| a.open);
        let index_close = mean(|a| a.close);
        let index_high = mean(|a| a.high);
        let index_low = mean(|a| a.low);

        for (i, a) in days.iter().enumerate() {
            per_asset[i].push(DailyBar {
                date: *date,
                open: a.open,
                close: a.close,
                high: Some(a.high),
                low: Some(a.low),
                volume: Some(a.volume),
                open_repaired: false,
            });
        }
        index_bars.push(DailyBar {
            date: *date,
            open: index_open,
            close: index_close,
            // means of per-asset highs/lows bracket the mean open/close
            high: Some(index_high.max(index_open).max(index_close)),
            low: Some(index_low.min(index_open).min(index_close)),
            volume: Some(days.iter().map(|a| a.volume).sum()),
            open_repaired: false,
        });
        ledger.push(row);
    }

    let assets = per_asset
        .into_iter()
        .enumerate()
        .map(|(i, bars)| BarSeries {
            symbol: format!("asset_{i:03}"),
            bars,
            adjustment: Adjustment::Raw,
        })
        .collect();
    let index = BarSeries {
        symbol: "index".to_string(),
        bars: index_bars,
        adjustment: Adjustment::Raw,
    };
    Ok(SimOutput {
        assets,
        index,
        ledger,
    })
}

/// One grid point of the profitability frontier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontierCell {
    pub expansion_size: f64,
    pub permanent_impact: f64,
    pub mtm_cumulative: f64,
    pub cost_cumulative: f64,
    pub net_cumulative: f64,
    pub aborted: bool,
}

/// Sweep (expansion_size, permanent_impact) over a grid, one run per cell,
/// in row-major grid order. Aborted cells are marked rather than failing
/// the sweep.
pub fn profitability_frontier(
    base: &SimConfig,
    expansion_sizes: &[f64],
    permanent_impacts: &[f64],
) -> Result<Vec<FrontierCell>> {
    base.validate()?;
    let mut cells = Vec::with_capacity(expansion_sizes.len() * permanent_impacts.len());
    for &q in expansion_sizes {
        for &lambda in permanent_impacts {
            let config = SimConfig {
                expansion_size: q,
                permanent_impact: lambda,
                ..base.clone()
            };
            config.validate()?;
            match run(&config) {
                Ok(out) => cells.push(FrontierCell {
                    expansion_size: q,
                    permanent_impact: lambda,
                    mtm_cumulative: out.ledger.cumulative_mtm,
                    cost_cumulative: out.ledger.cumulative_cost,
                    net_cumulative: out.ledger.cumulative_net,
                    aborted: false,
                }),
                Err(Error::SimAbort { .. }) => cells.push(FrontierCell {
                    expansion_size: q,
                    permanent_impact: lambda,
                    mtm_cumulative: 0.0,
                    cost_cumulative: 0.0,
                    net_cumulative: 0.0,
                    aborted: true,
                }),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(cells)
}

/// `expansion_size,permanent_impact,mtm_cumulative,cost_cumulative,net_cumulative,aborted` rows.
pub fn frontier_to_csv(cells: &[FrontierCell]) -> String {
    let mut out = String::from(
        "expansion_size,permanent_impact,mtm_cumulative,cost_cumulative,net_cumulative,aborted\n",
    );
    for c in cells {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            c.expansion_size,
            c.permanent_impact,
            c.mtm_cumulative,
            c.cost_cumulative,
            c.net_cumulative,
            c.aborted
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::returns::{cumulate, decompose, Leg};

    fn no_trade_config() -> SimConfig {
        SimConfig {
            n_assets: 2,
            n_days: 30,
            base_price: 100.0,
            noise_sigma: 0.02,
            permanent_impact: 1e-5,
            temporary_impact: 1e-7,
            expansion_size: 0.0,
            contraction_fraction: 1.0,
            trading_cost_rate: 1e-4,
            market_neutral: true,
            seed: 9,
        }
    }

    #[test]
    fn no_trading_means_no_gaps_and_zero_ledger() {
        let out = run(&no_trade_config()).unwrap();
        for series in out.assets.iter().chain(std::iter::once(&out.index)) {
            for w in series.bars.windows(2) {
                assert_eq!(w[1].open, w[0].close);
            }
        }
        for row in &out.ledger.rows {
            assert_eq!(row.mtm_gain, 0.0);
            assert_eq!(row.cost, 0.0);
            assert_eq!(row.net, 0.0);
            assert_eq!(row.gross_position, 0.0);
        }
        assert_eq!(out.ledger.cumulative_net, 0.0);
    }

    #[test]
    fn hand_computed_single_day() {
        // lambda*q = 0.01, no temporary impact, no noise, full contraction,
        // no commission: open = 101, close = 101 * 0.99 = 99.99,
        // mtm = 100 * (99.99 - 101) = -101, gross position returns to zero.
        let config = SimConfig {
            n_assets: 1,
            n_days: 1,
            base_price: 100.0,
            noise_sigma: 0.0,
            permanent_impact: 1e-4,
            temporary_impact: 0.0,
            expansion_size: 100.0,
            contraction_fraction: 1.0,
            trading_cost_rate: 0.0,
            market_neutral: false,
            seed: 1,
        };
        let out = run(&config).unwrap();
        let bar = &out.assets[0].bars[0];
        assert!((bar.open - 101.0).abs() < 1e-12);
        assert!((bar.close - 99.99).abs() < 1e-12);
        let row = &out.ledger.rows[0];
        assert!((row.mtm_gain + 101.0).abs() < 1e-9);
        assert_eq!(row.cost, 0.0);
        assert!((row.net + 101.0).abs() < 1e-9);
        assert_eq!(row.gross_position, 0.0);
        assert_eq!(bar.volume, Some(200));
    }

    #[test]
    fn market_neutral_halves_cancel_in_the_index() {
        let config = SimConfig {
            n_assets: 2,
            n_days: 40,
            base_price: 100.0,
            noise_sigma: 0.0,
            permanent_impact: 1e-4,
            temporary_impact: 0.0,
            expansion_size: 100.0,
            contraction_fraction: 1.0,
            trading_cost_rate: 0.0,
            market_neutral: true,
            seed: 1,
        };
        let out = run(&config).unwrap();
        let lambda_q = 0.01;
        // long side: up at the open, down intraday, every day
        for w in out.assets[0].bars.windows(2) {
            assert!(w[1].open / w[0].close - 1.0 > 0.0);
            assert!(w[1].close / w[1].open - 1.0 < 0.0);
        }
        // symmetric halves: index overnight return is exactly zero, and the
        // intraday leg carries only the second-order impact dissipation
        for w in out.index.bars.windows(2) {
            assert_eq!(w[1].open, w[0].close);
            let intraday = (w[1].close / w[1].open - 1.0).abs();
            assert!(intraday <= lambda_q * lambda_q * 1.01);
        }
    }

    #[test]
    fn identical_seed_and_config_reproduce_bitwise() {
        let config = SimConfig::default_mechanism();
        let a = run(&config).unwrap();
        let b = run(&config).unwrap();
        assert_eq!(a.assets, b.assets);
        assert_eq!(a.index, b.index);
        assert_eq!(a.ledger, b.ledger);
    }

    #[test]
    fn mechanism_produces_overnight_up_intraday_down() {
        let out = run(&SimConfig::default_mechanism()).unwrap();
        let returns = decompose(&out.assets[0]).unwrap();
        let on = cumulate(&returns, Leg::Overnight).end_value().unwrap();
        let id = cumulate(&returns, Leg::Intraday).end_value().unwrap();
        assert!(on > 0.0, "overnight end {on}");
        assert!(id < 0.0, "intraday end {id}");
    }

    #[test]
    fn stationary_noise_free_run_matches_geometric_closed_form() {
        // full contraction, no noise, no costs: per-day profit is
        // -lambda*q^2*(1+lambda*q) * P_{t-1}, with P decaying by a factor
        // (1 - (lambda*q)^2) per day. The cumulative is the geometric sum.
        let config = SimConfig {
            n_assets: 1,
            n_days: 252,
            base_price: 100.0,
            noise_sigma: 0.0,
            permanent_impact: 1e-4,
            temporary_impact: 0.0,
            expansion_size: 100.0,
            contraction_fraction: 1.0,
            trading_cost_rate: 0.0,
            market_neutral: false,
            seed: 3,
        };
        let out = run(&config).unwrap();
        let lq = config.permanent_impact * config.expansion_size;
        let decay = 1.0 - lq * lq;
        let n = config.n_days as i32;
        let per_unit = -config.expansion_size * lq * (1.0 + lq);
        let closed_form =
            per_unit * config.base_price * (1.0 - decay.powi(n)) / (1.0 - decay);
        let rel = (out.ledger.cumulative_net - closed_form).abs() / closed_form.abs();
        assert!(rel < 1e-9, "rel error {rel}");
    }

    #[test]
    fn abort_reports_day_index() {
        let config = SimConfig {
            n_assets: 2,
            n_days: 5,
            base_price: 100.0,
            noise_sigma: 0.0,
            permanent_impact: 2e-4,
            temporary_impact: 0.0,
            expansion_size: 10_000.0, // lambda*q = 2: short-side open factor < 0
            contraction_fraction: 1.0,
            trading_cost_rate: 0.0,
            market_neutral: true,
            seed: 1,
        };
        match run(&config) {
            Err(Error::SimAbort { day, .. }) => assert_eq!(day, 0),
            other => panic!("expected abort, got {other:?}"),
        }
    }

    #[test]
    fn frontier_marks_aborts_and_orders_cells() {
        let base = SimConfig {
            n_assets: 2,
            n_days: 10,
            base_price: 100.0,
            noise_sigma: 0.0,
            permanent_impact: 1e-5,
            temporary_impact: 0.0,
            expansion_size: 0.0,
            contraction_fraction: 0.9,
            trading_cost_rate: 1e-4,
            market_neutral: true,
            seed: 5,
        };
        let cells = profitability_frontier(&base, &[0.0, 100.0, 1e6], &[1e-5, 1e-4]).unwrap();
        assert_eq!(cells.len(), 6);
        assert_eq!(cells[0].expansion_size, 0.0);
        assert_eq!(cells[0].net_cumulative, 0.0);
        assert!(!cells[0].aborted);
        // lambda*q = 1e6 * 1e-4 = 100 drives the short side negative
        assert!(cells[5].aborted);
    }

    #[test]
    fn higher_cost_rate_never_increases_net() {
        let cheap = SimConfig {
            trading_cost_rate: 0.0,
            noise_sigma: 0.0,
            ..SimConfig::default_mechanism()
        };
        let pricey = SimConfig {
            trading_cost_rate: 1e-3,
            ..cheap.clone()
        };
        let a = run(&cheap).unwrap();
        let b = run(&pricey).unwrap();
        assert!(b.ledger.cumulative_net <= a.ledger.cumulative_net);
    }

    #[test]
    fn key_value_config_round_trip() {
        let text = "\
            # simulator parameters\n\
            n_assets = 2\n\
            n_days = 10\n\
            base_price = 50\n\
            noise_sigma = 0.01\n\
            permanent_impact = 0.00001\n\
            temporary_impact = 0.0000001\n\
            expansion_size = 100\n\
            contraction_fraction = 0.9\n\
            trading_cost_rate = 0.0001\n\
            market_neutral = true\n\
            seed = 7\n";
        let config = SimConfig::from_config_text(text).unwrap();
        assert_eq!(config.n_assets, 2);
        assert_eq!(config.base_price, 50.0);
        assert!(config.market_neutral);
        let json = serde_json::to_string(&config).unwrap();
        assert_eq!(SimConfig::from_config_text(&json).unwrap(), config);
    }

    #[test]
    fn unknown_config_key_is_rejected() {
        assert!(matches!(
            SimConfig::from_config_text("n_assetz = 2\n"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn synthetic_bars_pass_validation_and_identity() {
        let out = run(&SimConfig::default_mechanism()).unwrap();
        for series in out.assets.iter().chain(std::iter::once(&out.index)) {
            assert!(series.check_invariants());
            assert!(crate::returns::compounding_identity_check(series) <= 1e-12);
            // the full validation path keeps every synthetic row
            let csv = crate::ingest::bar_series_to_csv(series);
            let (validated, report) =
                crate::ingest::bar_series_from_csv(csv.as_bytes(), &series.symbol, series.adjustment)
                    .unwrap();
            assert_eq!(&validated, series);
            assert_eq!(report.rows_kept, series.bars.len());
            assert!(report.rows_dropped.is_empty());
        }
    }
}
