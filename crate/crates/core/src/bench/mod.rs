//! Data ingestion, synthetic corpora, the k-sweep experiment runner and
//! its CSV report.

mod experiment;
mod io;
mod report;
mod synth;

pub use experiment::{run_experiment, run_on_dataset, split_test_train, DataSource, ExperimentConfig};
pub use io::{
    load_csv_dataset, load_dataset, load_fvecs, load_labels, parse_fvecs, write_fvecs,
    write_labels,
};
pub use report::{format_max_table, summarize_max, AccuracyReport, MaxRow, ReportRow, CSV_HEADER};
pub use synth::{generate_synthetic, GeneratorKind, GeneratorSpec, MOON_NOISE};
