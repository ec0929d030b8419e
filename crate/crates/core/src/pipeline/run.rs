use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use log::info;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::kernels::KernelFamily;
use crate::metrics::EvaluationReport;
use crate::selection::{
    evaluate, finalize_with_params, grid_search, select_and_finalize, split_test, FinalizedModel,
    GridSearchReport, HyperGrid, LabeledDataset, SearchConfig,
};
use crate::svr::SvrModel;

use super::io::load_effort_dataset;
use super::model_file::render_model;
use super::param::{format_4dp, ParamString};
use super::report::{comparison_csv, mmre_ranking, result_block, summary_csv};

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub kernels: Vec<KernelFamily>,
    pub grid: HyperGrid,
    pub search: SearchConfig,
    /// Every `stride`-th record (starting with the first) goes to the test set.
    pub stride: usize,
    /// Skips grid search and trains this single configuration; `kernels` is
    /// then ignored in favour of the string's kernel code.
    pub fixed_params: Option<ParamString>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            kernels: KernelFamily::ALL.to_vec(),
            grid: HyperGrid::default(),
            search: SearchConfig::default(),
            stride: 5,
            fixed_params: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KernelOutcome {
    pub family: KernelFamily,
    /// `None` when the parameters were fixed up front.
    pub report: Option<GridSearchReport>,
    pub finalized: FinalizedModel,
    pub param: ParamString,
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub scaled: LabeledDataset,
    pub train: LabeledDataset,
    pub test: LabeledDataset,
    pub kernels: Vec<KernelOutcome>,
}

impl PipelineOutcome {
    /// The kernel with the lowest test MMRE; the earliest one wins a tie.
    pub fn best_kernel(&self) -> Option<&KernelOutcome> {
        mmre_ranking(&self.kernels).first().map(|&i| &self.kernels[i])
    }
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Stage {
        stage: name,
        source: Box::new(e),
    })
}

/// Scale, split, search and finalize for each requested kernel on an
/// in-memory dataset. Nothing is written.
pub fn run_pipeline(data: &LabeledDataset, config: &PipelineConfig) -> Result<PipelineOutcome> {
    if config.kernels.is_empty() && config.fixed_params.is_none() {
        return Err(Error::invalid("no kernel families requested"));
    }
    let scaled = stage("scale", data.scaled())?;
    let (train, test) = stage("split", split_test(&scaled, config.stride))?;
    let mut kernels = Vec::new();
    match &config.fixed_params {
        Some(param) => {
            let params = param.to_svr_params(&config.search);
            let finalized = stage("train", finalize_with_params(&train, &test, &params))?;
            kernels.push(KernelOutcome {
                family: param.kernel,
                report: None,
                finalized,
                param: param.clone(),
            });
        }
        None => {
            for &family in &config.kernels {
                info!("grid search: {family} kernel, {} cells", config.grid.cell_count());
                let report = stage("grid-search", grid_search(&train, family, &config.grid, &config.search))?;
                let finalized = stage("finalize", select_and_finalize(&train, &test, &report, &config.search))?;
                let param = ParamString::from_params(&finalized.model.params);
                kernels.push(KernelOutcome {
                    family,
                    report: Some(report),
                    finalized,
                    param,
                });
            }
        }
    }
    Ok(PipelineOutcome {
        scaled,
        train,
        test,
        kernels,
    })
}

/// Scores a saved model on a raw dataset: the dataset is scaled with the
/// model's stored parameters and split with `stride`. Returns the train and
/// test reports.
pub fn evaluate_model(
    model: &SvrModel,
    data: &LabeledDataset,
    stride: usize,
) -> Result<(EvaluationReport, EvaluationReport)> {
    let (Some(f), Some(t)) = (model.feature_scaling, model.target_scaling) else {
        return Err(Error::invalid("model carries no scaling parameters"));
    };
    let scaled = data.scaled_with(f, t)?;
    let (train, test) = split_test(&scaled, stride)?;
    let train_report = evaluate(&train, &model.predict_many(&train.features())?)?;
    let test_report = evaluate(&test, &model.predict_many(&test.features())?)?;
    Ok((train_report, test_report))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArtifactKind {
    GridReport,
    Model,
    ResultBlocks,
    Comparison,
    Summary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Artifact {
    /// File name relative to the output directory.
    pub path: String,
    pub kind: ArtifactKind,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub dataset: PathBuf,
    pub kernels: Vec<String>,
    pub grid: HyperGrid,
    pub fixed_params: Option<String>,
    /// The run uses no random state; identical inputs give identical artifacts.
    pub deterministic: bool,
    pub output_dir: PathBuf,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub best_kernel: Option<String>,
    pub artifacts: Vec<Artifact>,
}

impl RunManifest {
    pub const FILE_NAME: &'static str = "manifest.json";

    pub fn count(&self, kind: ArtifactKind) -> usize {
        self.artifacts.iter().filter(|a| a.kind == kind).count()
    }
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn render_artifacts(outcome: &PipelineOutcome) -> Vec<(String, ArtifactKind, String)> {
    let mut files = Vec::new();
    for k in &outcome.kernels {
        if let Some(report) = &k.report {
            files.push((format!("grid_{}.csv", k.family.name()), ArtifactKind::GridReport, report.to_csv()));
        }
    }
    for k in &outcome.kernels {
        files.push((
            format!("model_{}.model", k.family.name()),
            ArtifactKind::Model,
            render_model(&k.finalized.model),
        ));
    }
    let mut blocks = String::new();
    for k in &outcome.kernels {
        if let Some(report) = &k.report {
            blocks.push_str(&format!("Validation error, {} kernel (C = {})\n", k.family.name(), format_4dp(report.c_used)));
            blocks.push_str(&report.to_table());
            blocks.push('\n');
        }
        blocks.push_str(&result_block(k));
        blocks.push('\n');
    }
    files.push(("results.txt".into(), ArtifactKind::ResultBlocks, blocks));
    files.push((
        "comparison.csv".into(),
        ArtifactKind::Comparison,
        comparison_csv(&outcome.test, &outcome.kernels),
    ));
    files.push(("summary.csv".into(), ArtifactKind::Summary, summary_csv(&outcome.kernels)));
    files
}

fn write_all(out_dir: &Path, files: &[(String, ArtifactKind, String)]) -> Result<Vec<Artifact>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written: Vec<PathBuf> = Vec::new();
    let mut artifacts = Vec::new();
    for (name, kind, contents) in files {
        let path = out_dir.join(name);
        if let Err(e) = fs::write(&path, contents) {
            for p in written.iter().chain(std::iter::once(&path)) {
                let _ = fs::remove_file(p);
            }
            return Err(Error::io(path, e));
        }
        written.push(path);
        artifacts.push(Artifact {
            path: name.clone(),
            kind: *kind,
            sha256: sha256_hex(contents.as_bytes()),
        });
    }
    Ok(artifacts)
}

/// Loads the dataset, runs every stage, then writes all artifacts and
/// `manifest.json` into `out_dir`. No file is written before all computation
/// has finished; if a write fails, files already written by this run are
/// removed.
pub fn run_full_pipeline(
    dataset_path: impl AsRef<Path>,
    config: &PipelineConfig,
    out_dir: impl AsRef<Path>,
) -> Result<RunManifest> {
    let dataset_path = dataset_path.as_ref();
    let out_dir = out_dir.as_ref();
    let started_unix = unix_now();
    let data = stage("load", load_effort_dataset(dataset_path))?;
    let outcome = run_pipeline(&data, config)?;
    let files = render_artifacts(&outcome);
    let artifacts = stage("write", write_all(out_dir, &files))?;

    let manifest = RunManifest {
        dataset: dataset_path.to_path_buf(),
        kernels: outcome.kernels.iter().map(|k| k.family.name().to_string()).collect(),
        grid: config.grid.clone(),
        fixed_params: config.fixed_params.as_ref().map(ParamString::render),
        deterministic: true,
        output_dir: out_dir.to_path_buf(),
        started_unix,
        finished_unix: unix_now(),
        best_kernel: outcome.best_kernel().map(|k| k.family.name().to_string()),
        artifacts,
    };
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Format(e.to_string()))?;
    let manifest_path = out_dir.join(RunManifest::FILE_NAME);
    if let Err(e) = fs::write(&manifest_path, json + "\n") {
        for a in &manifest.artifacts {
            let _ = fs::remove_file(out_dir.join(&a.path));
        }
        let _ = fs::remove_file(&manifest_path);
        return Err(Error::Stage {
            stage: "write",
            source: Box::new(Error::io(manifest_path, e)),
        });
    }
    Ok(manifest)
}
