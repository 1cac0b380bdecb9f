//! End-to-end runs that turn a configuration into CSV and JSON artifacts.
//!
//! Every run writes into its own directory: the data files, a `config.txt`
//! echo that can be fed back in, and a `manifest.json` with checksums,
//! written last. A directory that already has a manifest is refused unless
//! `overwrite` is set.

mod config;
mod output;
mod runs;

pub use config::{Experiment, ExperimentConfig};
pub use output::{sha256_hex, FileRecord, RunManifest, MANIFEST_NAME};
pub use runs::{
    crosscheck_report, default_fig4_times, realization_seed, run, CrosscheckReport, Fig4Series,
    Fig4Summary, HittingPoint, HittingSummary, ScalingSummary, ThoulessSummaryRow,
    CLOSURE_TOLERANCE, DYNAMICS_TOLERANCE, ENTRY_TOLERANCE,
};
