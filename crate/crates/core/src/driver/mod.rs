//! The approximation recursion over a schedule of triples, its front-ends
//! for bounded and norm-bounded cocycles, and reporting.

mod certify;
mod config;
mod export;
mod report;
mod run;
mod schedule;

pub use certify::{certify, first_difference, Violation};
pub use config::{ActionSpec, AnyGroup, GroupKind, GroupSpec, MeasureSpec, Mode, PipelineConfig, RunSpec};
pub use export::{export_run, write_cylinder_csv, write_skew_edges};
pub use report::{BoundednessRecord, Record, RoundRecord, RunReport, WitnessDigest};
pub use schedule::{Schedule, Triple};
pub use run::{
    bounded_cocycle_pipeline, norm_bounded_pipeline, resume, run_theorem_02i, run_theorem_02ii, scheduled_sets,
    single_step, execute, execute_resume, Checkpoint, Finished, Pipeline, RunOutcome, Setup,
};
