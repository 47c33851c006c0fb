//! Persistence experiments: weighted norms of evolved data across growing
//! boxes, smoothing budgets and threshold scans.

mod budget;
mod classify;
mod data;
mod run;
mod scan;
mod spec;

pub use budget::{budget_drift, smoothing_budget, BudgetVariant, SmoothingBudget, STRIDE_TOL};
pub use classify::{
    classify_ladder, combine, LadderVerdict, Verdict, CONVERGED_RATIO, DIVERGENT_RATIO,
    INCREMENT_FLOOR, SAMPLE_NOISE,
};
pub use data::{make_data, DataFamily};
pub use run::{
    run_persistence, LevelRun, LevelSample, MeanZeroStatus, PairReport, PersistenceReport,
    TimeVerdict, BAND_EDGE_BUDGET, TAIL_BUDGET,
};
pub use scan::{is_monotone, scan_from_report, threshold_scan, ScanRow, ThresholdScan};
pub use spec::{ExperimentSpec, LadderSpec, Regime};
