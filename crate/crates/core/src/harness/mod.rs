//! Cross-validation, significance testing and result tables.

mod cv;
mod report;
mod ttest;

pub use cv::{
    config_hash, cross_validate, cross_validate_with, ConfigSnapshot, CvOptions, CvOutcome, CvResult, FoldAudit,
};
pub use report::{
    read_metric_column, render_fold_csv, render_manifest, render_report, result_file_stem, write_cv_artifacts,
    ReportEntry, ReportFormat,
};
pub use ttest::{paired_t_test, TTestResult, DEFAULT_CRITICAL};
