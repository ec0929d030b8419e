//! Software effort estimation from Use Case Points with epsilon-support-vector
//! regression.
//!
//! The crate is organised along the estimation pipeline:
//!
//! - [`ucp`] sizes a project from its actors, use cases and adjustment ratings.
//! - [`kernels`] evaluates linear, polynomial, RBF and sigmoid kernels.
//! - [`svr`] trains an epsilon-SVR with a two-coordinate (SMO) dual solver.
//! - [`selection`] holds min-max scaling, stride splits, k-fold partitions
//!   and the gamma/epsilon grid search.
//! - [`metrics`] computes MSE, RMSE, NRMS, MMRE, PRED and r².
//! - [`pipeline`] ties everything together: CSV ingestion, libsvm-style
//!   parameter strings, model files and report emission.

pub mod error;
pub mod kernels;
pub mod metrics;
pub mod pipeline;
pub mod selection;
pub mod svr;
pub mod ucp;

pub use error::{Error, Result};
pub use kernels::{FeatureVector, KernelFamily, KernelSpec};
pub use metrics::EvaluationReport;
pub use selection::{
    FoldAssignment, GridSearchReport, HyperGrid, LabeledDataset, Record, ScalingParams,
};
pub use svr::{SvrModel, SvrParams};
pub use ucp::{ProjectDescriptor, UcpBreakdown};
