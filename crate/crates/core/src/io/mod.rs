//! Reading and writing data, synthetic markets and reports.

pub mod csv;
pub mod format;
pub mod report;
pub mod synth;

pub use csv::{emit_csv, ingest_csv, CsvError, Ingested};
pub use format::{format_index, format_significant};
pub use report::{Report, Series, SeriesPoint};
pub use synth::{synth, SynthConfig, SynthError, SynthSummary};
