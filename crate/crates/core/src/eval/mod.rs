//! Metrics, model selection over the (L, N) grid, and summary tables.

pub mod evaluate;
pub mod grid;
pub mod metrics;
pub mod mode;
pub mod report;

pub use evaluate::{evaluate_model, score_set, MetricsReport};
pub use grid::{grid_search, GridConfig, GridEntry, GridResult, SelectedModel};
pub use metrics::{accuracy, confusion, mcc, roc_auc, ConfusionCounts, RocCurve};
pub use mode::{InputMode, NetType};
pub use report::{render_csv, render_grid_csv, render_text, report_rows, ReportRow};
