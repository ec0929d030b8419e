//! End-to-end plumbing: CSV ingestion, libsvm-style parameter strings, model
//! files, the full estimation run and report emission.

mod io;
mod model_file;
mod param;
mod predict;
mod report;
mod run;

pub use io::{load_effort_dataset, load_projects, parse_effort_csv, parse_projects_csv, write_effort_csv};
pub use model_file::{load_model, parse_model, render_model, save_model, MODEL_FORMAT_VERSION};
pub use param::{format_4dp, parse_param_string, ParamString};
pub use predict::{predict_effort, predict_effort_from_file, EffortInput, EffortPrediction};
pub use report::{comparison_csv, result_block, summary_csv};
pub use run::{
    evaluate_model, run_full_pipeline, run_pipeline, Artifact, ArtifactKind, KernelOutcome,
    PipelineConfig, PipelineOutcome, RunManifest,
};
