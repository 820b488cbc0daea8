//! Shared input generators for the criterion benchmarks.

use overnight_core::{run_simulation, BarSeries, SimConfig};

/// A deterministic synthetic series of `n_days` bars with noise and a mild
/// impact pattern, produced by the simulator.
pub fn synthetic_series(n_days: usize) -> BarSeries {
    let config = SimConfig {
        n_assets: 2,
        n_days,
        base_price: 100.0,
        noise_sigma: 0.012,
        permanent_impact: 1e-5,
        temporary_impact: 1e-7,
        expansion_size: 50.0,
        contraction_fraction: 0.9,
        trading_cost_rate: 1e-4,
        market_neutral: true,
        seed: 1234,
    };
    run_simulation(&config).expect("benchmark config is valid").assets.remove(0)
}

/// Yahoo-style CSV text for ingestion benchmarks.
pub fn yahoo_csv(n_days: usize) -> String {
    let series = synthetic_series(n_days);
    let mut out = String::from("Date,Open,High,Low,Close,Adj Close,Volume\n");
    for b in &series.bars {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            b.date,
            b.open,
            b.high.unwrap_or(b.open.max(b.close)),
            b.low.unwrap_or(b.open.min(b.close)),
            b.close,
            b.close,
            b.volume.unwrap_or(0)
        ));
    }
    out
}
