//! `overnight render`: read cumulative-curve CSVs listed in a manifest and
//! write a small-multiples SVG. Output bytes depend only on the inputs.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use overnight_core::chart::{render_grid, Panel, PanelSpec, ScaleMode};
use overnight_core::{curve_from_csv, Leg};
use serde::Deserialize;

use super::{input_error, read_input, write_output, CliError};

/// One panel: a symbol and its two curve files, with an optional date range.
#[derive(Deserialize)]
struct ManifestEntry {
    symbol: String,
    overnight: PathBuf,
    intraday: PathBuf,
    #[serde(default)]
    start: Option<NaiveDate>,
    #[serde(default)]
    end: Option<NaiveDate>,
}

/// Relative curve paths resolve against the manifest's directory.
fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

pub fn run(
    manifest_path: &Path,
    output: &Path,
    scale: &str,
    columns: usize,
    end_labels: bool,
) -> Result<(), CliError> {
    let scale = ScaleMode::parse(scale).expect("clap restricts the value set");
    let manifest_text = read_input(manifest_path)?;
    let entries: Vec<ManifestEntry> = serde_json::from_str(&manifest_text)
        .map_err(|e| CliError::input(format!("{}: bad manifest: {e}", manifest_path.display())))?;
    if entries.is_empty() {
        return Err(CliError::input(format!(
            "{}: manifest lists no panels",
            manifest_path.display()
        )));
    }

    let base = manifest_path.parent().unwrap_or(Path::new(""));
    let mut panels = Vec::with_capacity(entries.len());
    for entry in &entries {
        let load = |path: &Path, leg: Leg| -> Result<_, CliError> {
            let resolved = resolve(base, path);
            let text = read_input(&resolved)?;
            curve_from_csv(&text, leg).map_err(|e| input_error(&resolved, e))
        };
        panels.push(Panel {
            spec: PanelSpec {
                symbol: entry.symbol.clone(),
                start: entry.start,
                end: entry.end,
                scale,
                end_labels,
            },
            overnight: load(&entry.overnight, Leg::Overnight)?,
            intraday: load(&entry.intraday, Leg::Intraday)?,
        });
    }

    write_output(output, &render_grid(&panels, columns))?;
    println!("rendered {} panels into {}", panels.len(), output.display());
    Ok(())
}
