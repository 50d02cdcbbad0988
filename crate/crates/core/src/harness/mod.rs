//! Batch evaluation over JSONL records.
//!
//! Input schema, one object per line:
//!
//! ```text
//! {"id": str, "task": "affordance" | "trajectory", "instruction": str,
//!  "prediction": str, "gt": [x1,y1,x2,y2] | [[x,y], ...], "image_size": [w,h]?}
//! ```

mod eval;
mod records;
mod report;

pub use eval::{
    evaluate, evaluate_affordance, evaluate_trajectory, AffordanceMetrics, AffordanceScore,
    EvalOptions, FailurePolicy, MetricsReport, TaskSelection, TrajectoryMetrics, TrajectoryScore,
    FAILURE_DISTANCE,
};
pub use records::{load_records, read_records, EvalRecord, LoadedRecords, MIN_GT_POINTS};
pub use report::{
    emit_report, load_json_report, render_csv, render_report, render_table, ReportFormat,
    CSV_HEADER,
};
