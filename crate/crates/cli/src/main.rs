//! `overnight` — decompose daily bars into overnight/intraday return legs,
//! run robustness checks, simulate the price-impact mechanism, and render
//! the cumulative curves as SVG small multiples.

mod commands;

use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use commands::CliError;

#[derive(Parser)]
#[command(
    name = "overnight",
    version,
    about = "Overnight/intraday return decomposition, robustness checks, impact simulation, and chart rendering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Ingestion flags shared by the commands that read bar CSVs.
#[derive(Args, Debug)]
struct IngestArgs {
    /// Input CSV of daily bars
    #[arg(long)]
    input: PathBuf,

    /// Symbol label (defaults to the input file stem)
    #[arg(long)]
    symbol: Option<String>,

    /// Back-adjust OHLC by adj_close/close (default)
    #[arg(long, conflicts_with = "raw")]
    adjusted: bool,

    /// Use prices as-is, skipping corporate-action adjustment
    #[arg(long)]
    raw: bool,

    /// How to handle missing/zero/out-of-range opens
    #[arg(long = "open-repair", value_parser = ["copy", "drop", "fail"], default_value = "copy")]
    open_repair: String,

    /// JSON file mapping logical fields to column names (default: detect
    /// from the header)
    #[arg(long)]
    schema: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Ingest a bar CSV and write per-day returns, cumulative curves, a
    /// summary, and a data-quality report
    Decompose {
        #[command(flatten)]
        ingest: IngestArgs,

        /// Directory for output artifacts
        #[arg(long = "output-dir", default_value = "out")]
        output_dir: PathBuf,
    },

    /// Run robustness checks over the decomposed returns and write a JSON
    /// report
    Robustness {
        #[command(flatten)]
        ingest: IngestArgs,

        #[arg(long = "output-dir", default_value = "out")]
        output_dir: PathBuf,

        /// Comma-separated subset of checks:
        /// exclusions,cost,dispersion,regime,shifted_open,divergence
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,

        /// Exclusion calendar CSV (`symbol,event_date`)
        #[arg(long)]
        exclusions: Option<PathBuf>,

        /// Calendar days excluded before each event
        #[arg(long = "window-before", default_value_t = 1)]
        window_before: u32,

        /// Calendar days excluded after each event
        #[arg(long = "window-after", default_value_t = 1)]
        window_after: u32,

        /// Annual overnight financing rate (illustrative default 5%)
        #[arg(long = "cost-rate", default_value_t = 0.05)]
        cost_rate: f64,

        /// Day-count denominator for the financing rate
        #[arg(long = "day-count", default_value_t = 360)]
        day_count: u32,

        /// Regime split date
        #[arg(long, default_value = "2008-01-01")]
        cutoff: NaiveDate,

        /// Column holding alternative open prices (e.g. the price shortly
        /// after the official open); omit to mark the check not evaluable
        #[arg(long = "alt-open-column")]
        alt_open_column: Option<String>,
    },

    /// Run the price-impact simulator and write synthetic bars plus the
    /// mark-to-market/cost ledger
    Simulate {
        /// Simulator config file (JSON object or flat key=value lines)
        #[arg(long)]
        config: PathBuf,

        #[arg(long = "output-dir", default_value = "out")]
        output_dir: PathBuf,

        /// Also decompose the synthetic index and write its artifacts
        #[arg(long)]
        decompose: bool,

        /// Sweep a (expansion_size, permanent_impact) grid from a JSON file
        /// and write frontier.csv
        #[arg(long)]
        frontier: Option<PathBuf>,
    },

    /// Render cumulative-curve panels listed in a manifest into one SVG
    Render {
        /// JSON manifest: [{"symbol", "overnight", "intraday", "start"?, "end"?}]
        #[arg(long)]
        manifest: PathBuf,

        /// Output SVG path
        #[arg(long, default_value = "figure.svg")]
        output: PathBuf,

        /// Vertical scale
        #[arg(long, value_parser = ["linear", "log"], default_value = "linear")]
        scale: String,

        /// Panels per row
        #[arg(long, default_value_t = 3)]
        columns: usize,

        /// Suppress the end-value labels at the right edge
        #[arg(long = "no-end-labels")]
        no_end_labels: bool,
    },
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Decompose { ingest, output_dir } => commands::decompose::run(&ingest, &output_dir),
        Command::Robustness {
            ingest,
            output_dir,
            checks,
            exclusions,
            window_before,
            window_after,
            cost_rate,
            day_count,
            cutoff,
            alt_open_column,
        } => commands::robustness::run(commands::robustness::Params {
            ingest: &ingest,
            output_dir: &output_dir,
            checks,
            exclusions,
            window: (window_before, window_after),
            cost_rate,
            day_count,
            cutoff,
            alt_open_column,
        }),
        Command::Simulate {
            config,
            output_dir,
            decompose,
            frontier,
        } => commands::simulate::run(&config, &output_dir, decompose, frontier.as_deref()),
        Command::Render {
            manifest,
            output,
            scale,
            columns,
            no_end_labels,
        } => commands::render::run(&manifest, &output, &scale, columns, !no_end_labels),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = dispatch(cli) {
        eprintln!("error: {}", e.message);
        std::process::exit(e.code);
    }
}
