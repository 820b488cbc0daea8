//! `overnight decompose`: ingest -> decompose -> cumulate, writing the
//! returns CSV, one curve CSV per leg, a summary JSON, and the data-quality
//! report.

use std::path::Path;

use overnight_core::bar_series_to_csv;

use super::{ingest, to_pretty_json, write_decompose_artifacts, write_output, CliError};
use crate::IngestArgs;

pub fn run(args: &IngestArgs, output_dir: &Path) -> Result<(), CliError> {
    let ingested = ingest(args)?;
    let series = ingested.series;
    write_output(
        &output_dir.join(format!("{}_quality.json", series.symbol)),
        &to_pretty_json(&ingested.report)?,
    )?;
    write_output(
        &output_dir.join(format!("{}_bars.csv", series.symbol)),
        &bar_series_to_csv(&series),
    )?;
    write_decompose_artifacts(&series, output_dir)?;
    println!(
        "decomposed {} bars of {} into {}",
        series.bars.len(),
        series.symbol,
        output_dir.display()
    );
    Ok(())
}
