//! Dataset ingestion, split sampling, batch scoring and report emission.

mod dataset;
mod evaluate;
mod report;

pub use dataset::{
    decode_record, encode_record, load_completions, load_dataset, parse_completions, parse_dataset, split_sample,
    write_completions, write_dataset, CompletionRow, DatasetFormat, DatasetRecord, FieldEncoding, LoadedCompletions,
    LoadedDataset, MalformedRecord,
};
pub use evaluate::{evaluate, evaluate_with, EvalOptions, EvalReport, RecordRow, ValidityMode};
pub use report::{emit_report, parse_report_csv, parse_report_json, render_report, ReportFormat};
