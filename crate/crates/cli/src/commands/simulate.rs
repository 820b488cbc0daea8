//! `overnight simulate`: run the price-impact simulator from a config file
//! and write synthetic bar CSVs (ingest-compatible), the daily ledger, and a
//! run summary. Optionally chains the decomposition on the synthetic index
//! and/or sweeps a profitability frontier grid.

use std::path::Path;

use overnight_core::sim::{frontier_to_csv, profitability_frontier, run as run_sim};
use overnight_core::{bar_series_to_csv, SimConfig};
use serde::{Deserialize, Serialize};

use super::{
    read_input, to_pretty_json, write_decompose_artifacts, write_output, CliError,
};

#[derive(Serialize)]
struct RunSummary<'a> {
    config: &'a SimConfig,
    n_ledger_rows: usize,
    cumulative_mtm: f64,
    cumulative_cost: f64,
    cumulative_net: f64,
    final_gross_position: f64,
}

/// Frontier grid file: axis values swept around the base config.
#[derive(Deserialize)]
struct FrontierGrid {
    expansion_sizes: Vec<f64>,
    permanent_impacts: Vec<f64>,
}

pub fn run(
    config_path: &Path,
    output_dir: &Path,
    decompose: bool,
    frontier: Option<&Path>,
) -> Result<(), CliError> {
    let text = read_input(config_path)?;
    let config = SimConfig::from_config_text(&text)
        .map_err(|e| CliError::input(format!("{}: {e}", config_path.display())))?;

    let output = run_sim(&config)
        .map_err(|e| CliError::input(format!("{}: {e}", config_path.display())))?;

    for series in &output.assets {
        write_output(
            &output_dir.join(format!("{}.csv", series.symbol)),
            &bar_series_to_csv(series),
        )?;
    }
    write_output(&output_dir.join("index.csv"), &bar_series_to_csv(&output.index))?;
    write_output(&output_dir.join("ledger.csv"), &output.ledger.to_csv())?;

    let summary = RunSummary {
        config: &config,
        n_ledger_rows: output.ledger.rows.len(),
        cumulative_mtm: output.ledger.cumulative_mtm,
        cumulative_cost: output.ledger.cumulative_cost,
        cumulative_net: output.ledger.cumulative_net,
        final_gross_position: output
            .ledger
            .rows
            .last()
            .map(|r| r.gross_position)
            .unwrap_or(0.0),
    };
    write_output(&output_dir.join("sim_summary.json"), &to_pretty_json(&summary)?)?;

    if decompose {
        write_decompose_artifacts(&output.index, output_dir)?;
    }

    if let Some(grid_path) = frontier {
        let grid_text = read_input(grid_path)?;
        let grid: FrontierGrid = serde_json::from_str(&grid_text)
            .map_err(|e| CliError::input(format!("{}: bad grid: {e}", grid_path.display())))?;
        let cells = profitability_frontier(&config, &grid.expansion_sizes, &grid.permanent_impacts)
            .map_err(|e| CliError::input(format!("{}: {e}", grid_path.display())))?;
        write_output(&output_dir.join("frontier.csv"), &frontier_to_csv(&cells))?;
    }

    println!(
        "simulated {} assets over {} days into {}",
        config.n_assets,
        config.n_days,
        output_dir.display()
    );
    Ok(())
}
