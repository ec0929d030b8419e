use std::fmt::Write as _;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{FeatureVector, KernelFamily, KernelSpec};
use crate::metrics::{self, EvaluationReport};
use crate::svr::{self, SvrModel, SvrParams};

use super::dataset::{kfold_partitions, LabeledDataset};

/// The gamma × epsilon lattice searched for each kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperGrid {
    pub gamma_values: Vec<f64>,
    pub epsilon_values: Vec<f64>,
}

impl Default for HyperGrid {
    /// γ ∈ {2⁻⁷, …, 2⁷} and ε ∈ {0, 1, …, 5}: 90 cells.
    fn default() -> Self {
        Self {
            gamma_values: (-7..=7).map(|e| 2f64.powi(e)).collect(),
            epsilon_values: (0..=5).map(f64::from).collect(),
        }
    }
}

impl HyperGrid {
    pub fn cell_count(&self) -> usize {
        self.gamma_values.len() * self.epsilon_values.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma_values.is_empty() || self.epsilon_values.is_empty() {
            return Err(Error::invalid("hyperparameter grid is empty"));
        }
        if self.epsilon_values.iter().any(|e| !(*e >= 0.0 && e.is_finite())) {
            return Err(Error::invalid("grid epsilon values must be non-negative"));
        }
        if self.gamma_values.iter().any(|g| !g.is_finite()) {
            return Err(Error::invalid("grid gamma values must be finite"));
        }
        Ok(())
    }
}

/// Knobs shared by every cell of a search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub folds: usize,
    pub coef0: f64,
    pub degree: u32,
    pub tolerance: f64,
    pub max_iterations: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            folds: 5,
            coef0: KernelSpec::DEFAULT_COEF0,
            degree: KernelSpec::DEFAULT_DEGREE,
            tolerance: SvrParams::DEFAULT_TOLERANCE,
            max_iterations: SvrParams::DEFAULT_MAX_ITERATIONS,
        }
    }
}

impl SearchConfig {
    pub fn params(&self, family: KernelFamily, gamma: f64, c: f64, epsilon: f64) -> SvrParams {
        let kernel = KernelSpec::new(family, gamma)
            .with_coef0(self.coef0)
            .with_degree(self.degree);
        SvrParams::new(kernel, c, epsilon)
            .with_tolerance(self.tolerance)
            .with_max_iterations(self.max_iterations)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub gamma_index: usize,
    pub epsilon_index: usize,
    pub gamma: f64,
    pub epsilon: f64,
    /// Mean validation MSE over the folds; `None` when training failed.
    pub validation_error: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchReport {
    pub kernel: KernelFamily,
    pub c_used: f64,
    pub gamma_values: Vec<f64>,
    pub epsilon_values: Vec<f64>,
    /// Row-major: gamma index outer, epsilon index inner.
    pub cells: Vec<GridCell>,
    pub best: GridCell,
}

impl GridSearchReport {
    pub fn cell(&self, gamma_index: usize, epsilon_index: usize) -> &GridCell {
        &self.cells[gamma_index * self.epsilon_values.len() + epsilon_index]
    }

    pub fn best_params(&self, config: &SearchConfig) -> SvrParams {
        config.params(self.kernel, self.best.gamma, self.c_used, self.best.epsilon)
    }

    /// Machine-readable layout: one row per gamma, one column per epsilon.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("gamma");
        for e in &self.epsilon_values {
            write!(out, ",eps={e}").unwrap();
        }
        out.push('\n');
        for (gi, g) in self.gamma_values.iter().enumerate() {
            write!(out, "{g}").unwrap();
            for ei in 0..self.epsilon_values.len() {
                match self.cell(gi, ei).validation_error {
                    Some(v) => write!(out, ",{v}").unwrap(),
                    None => out.push_str(",failed"),
                }
            }
            out.push('\n');
        }
        out
    }

    /// Human-readable table at 4 decimals; the selected cell is bracketed.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "Validation errors, {} kernel (C = {:.4}, {} cells)\n",
            self.kernel,
            self.c_used,
            self.cells.len()
        );
        write!(out, "{:>12}", "gamma \\ eps").unwrap();
        for e in &self.epsilon_values {
            write!(out, " {:>10}", format!("{e}")).unwrap();
        }
        out.push('\n');
        for (gi, g) in self.gamma_values.iter().enumerate() {
            write!(out, "{:>12}", gamma_label(*g)).unwrap();
            for ei in 0..self.epsilon_values.len() {
                let cell = self.cell(gi, ei);
                let text = match cell.validation_error {
                    Some(v) if gi == self.best.gamma_index && ei == self.best.epsilon_index => {
                        format!("[{v:.4}]")
                    }
                    Some(v) => format!("{v:.4}"),
                    None => "failed".to_string(),
                };
                write!(out, " {text:>10}").unwrap();
            }
            out.push('\n');
        }
        writeln!(
            out,
            "best: gamma = {} ({:.4}), epsilon = {}, validation error = {:.4}",
            gamma_label(self.best.gamma),
            self.best.gamma,
            self.best.epsilon,
            self.best.validation_error.unwrap_or(f64::NAN)
        )
        .unwrap();
        out
    }
}

/// `2^k` when gamma is an exact power of two, otherwise the plain value.
pub(crate) fn gamma_label(g: f64) -> String {
    let k = g.log2().round();
    if g > 0.0 && 2f64.powi(k as i32) == g {
        format!("2^{k}")
    } else {
        format!("{g}")
    }
}

/// Penalty `C` from the spread of the (scaled) training targets, falling back
/// to 1 when the targets are constant.
pub fn derive_c(train_targets: &[f64]) -> f64 {
    let max = train_targets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = train_targets.iter().copied().fold(f64::INFINITY, f64::min);
    let span = max - min;
    if span > 0.0 && span.is_finite() {
        span
    } else {
        1.0
    }
}

struct Fold {
    learn_x: Vec<FeatureVector>,
    learn_y: Vec<f64>,
    valid_x: Vec<FeatureVector>,
    valid_y: Vec<f64>,
}

/// Evaluates every grid cell by k-fold cross-validation and picks the cell
/// with the lowest mean validation MSE. Ties go to the lowest gamma index,
/// then the lowest epsilon index. Cells run in parallel; results are keyed
/// by position so the report does not depend on completion order.
pub fn grid_search(
    train: &LabeledDataset,
    family: KernelFamily,
    grid: &HyperGrid,
    config: &SearchConfig,
) -> Result<GridSearchReport> {
    grid.validate()?;
    let assignment = kfold_partitions(train, config.folds)?;
    let xs = train.features();
    let ys = train.targets();
    let folds: Vec<Fold> = (0..config.folds)
        .map(|f| {
            let learn = assignment.learning_indices(f);
            let valid = assignment.validation_indices(f);
            Fold {
                learn_x: learn.iter().map(|&i| xs[i].clone()).collect(),
                learn_y: learn.iter().map(|&i| ys[i]).collect(),
                valid_x: valid.iter().map(|&i| xs[i].clone()).collect(),
                valid_y: valid.iter().map(|&i| ys[i]).collect(),
            }
        })
        .collect();
    let c = derive_c(&ys);
    let n_eps = grid.epsilon_values.len();

    let cells: Vec<GridCell> = (0..grid.cell_count())
        .into_par_iter()
        .map(|idx| {
            let (gi, ei) = (idx / n_eps, idx % n_eps);
            let gamma = grid.gamma_values[gi];
            let epsilon = grid.epsilon_values[ei];
            let params = config.params(family, gamma, c, epsilon);
            let outcome = cross_validate(&folds, &params);
            let (validation_error, failure) = match outcome {
                Ok(v) => (Some(v), None),
                Err(e) => {
                    warn!("{family} kernel, gamma {gamma}, epsilon {epsilon}: cell excluded ({e})");
                    (None, Some(e.to_string()))
                }
            };
            GridCell {
                gamma_index: gi,
                epsilon_index: ei,
                gamma,
                epsilon,
                validation_error,
                failure,
            }
        })
        .collect();

    let mut best: Option<&GridCell> = None;
    for cell in &cells {
        if let Some(v) = cell.validation_error {
            if best.map_or(true, |b| v < b.validation_error.unwrap()) {
                best = Some(cell);
            }
        }
    }
    let best = best
        .cloned()
        .ok_or_else(|| Error::Search(format!("all {} cells failed for the {family} kernel", cells.len())))?;

    Ok(GridSearchReport {
        kernel: family,
        c_used: c,
        gamma_values: grid.gamma_values.clone(),
        epsilon_values: grid.epsilon_values.clone(),
        cells,
        best,
    })
}

fn cross_validate(folds: &[Fold], params: &SvrParams) -> Result<f64> {
    let mut total = 0.0;
    for fold in folds {
        let model = svr::train(&fold.learn_x, &fold.learn_y, params)?;
        let predicted = model.predict_many(&fold.valid_x)?;
        let mse = metrics::mse(&fold.valid_y, &predicted)?;
        if !mse.is_finite() {
            return Err(Error::NumericOverflow("validation error is not finite".into()));
        }
        total += mse;
    }
    Ok(total / folds.len() as f64)
}

/// A model retrained on the full training set, with its evaluation on the
/// training and test sets. Predictions are on the scaled target axis.
#[derive(Debug, Clone)]
pub struct FinalizedModel {
    pub model: SvrModel,
    pub train_report: EvaluationReport,
    pub test_report: EvaluationReport,
    pub train_predictions: Vec<f64>,
    pub test_predictions: Vec<f64>,
}

/// Retrains with the report's best cell on all of `train` and evaluates on
/// both sets.
pub fn select_and_finalize(
    train: &LabeledDataset,
    test: &LabeledDataset,
    report: &GridSearchReport,
    config: &SearchConfig,
) -> Result<FinalizedModel> {
    finalize_with_params(train, test, &report.best_params(config))
}

/// Same as [`select_and_finalize`] for explicitly chosen hyperparameters.
pub fn finalize_with_params(
    train: &LabeledDataset,
    test: &LabeledDataset,
    params: &SvrParams,
) -> Result<FinalizedModel> {
    let model = svr::train(&train.features(), &train.targets(), params)?
        .with_scaling(train.feature_scaling, train.target_scaling);
    let train_predictions = model.predict_many(&train.features())?;
    let test_predictions = model.predict_many(&test.features())?;
    let train_report = evaluate(train, &train_predictions)?;
    let test_report = evaluate(test, &test_predictions)?;
    Ok(FinalizedModel {
        model,
        train_report,
        test_report,
        train_predictions,
        test_predictions,
    })
}

/// Scores predictions made on the scaled axis; MMRE is taken in original
/// effort units where every actual is positive.
pub fn evaluate(data: &LabeledDataset, predictions: &[f64]) -> Result<EvaluationReport> {
    let actual = data.targets();
    let effort_actual: Vec<f64> = actual.iter().map(|&y| data.unscale_target(y)).collect();
    let effort_predicted: Vec<f64> = predictions.iter().map(|&y| data.unscale_target(y)).collect();
    metrics::evaluate(&actual, predictions, &effort_actual, &effort_predicted)
}
