//! Experimental protocol: min-max scaling, stride-based test extraction,
//! stride-based k-fold partitioning and the gamma × epsilon grid search.

mod dataset;
mod grid;
mod scaling;

pub use dataset::{kfold_partitions, split_test, FoldAssignment, LabeledDataset, Record};
pub use grid::{
    derive_c, evaluate, finalize_with_params, grid_search, select_and_finalize, FinalizedModel,
    GridCell, GridSearchReport,
    HyperGrid, SearchConfig,
};
pub use scaling::{scale_apply, scale_fit, ScalingParams};
