//! Accuracy statistics for effort predictions.
//!
//! PRED here is `100 · (1 − mean |y − ŷ|)`, which is only meaningful on
//! efforts scaled into `[0, 1]`. It is not the PRED(x) "within x percent"
//! family.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_pairs(actual: &[f64], predicted: &[f64]) -> Result<()> {
    if actual.len() != predicted.len() {
        return Err(Error::invalid(format!(
            "{} actual values but {} predictions",
            actual.len(),
            predicted.len()
        )));
    }
    if actual.is_empty() {
        return Err(Error::invalid("no values to evaluate"));
    }
    Ok(())
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn mse(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pairs(actual, predicted)?;
    let sum: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(y, p)| (y - p) * (y - p))
        .sum();
    Ok(sum / actual.len() as f64)
}

pub fn rmse(mse: f64) -> Result<f64> {
    if !(mse >= 0.0) {
        return Err(Error::invalid(format!("MSE must be non-negative, got {mse}")));
    }
    Ok(mse.sqrt())
}

/// Population standard deviation.
pub fn std_dev(values: &[f64]) -> f64 {
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64).sqrt()
}

/// RMSE divided by the population standard deviation of `reference_actuals`.
pub fn nrms(rmse: f64, reference_actuals: &[f64]) -> Result<f64> {
    if reference_actuals.len() < 2 {
        return Err(Error::Degenerate(
            "NRMS needs at least two reference values".into(),
        ));
    }
    let sd = std_dev(reference_actuals);
    if sd == 0.0 {
        return Err(Error::Degenerate(
            "reference values have zero standard deviation".into(),
        ));
    }
    Ok(rmse / sd)
}

/// Mean magnitude of relative error, `(1/N) Σ |y − ŷ| / y`.
pub fn mmre(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pairs(actual, predicted)?;
    if let Some(i) = actual.iter().position(|&y| y == 0.0) {
        return Err(Error::DivisionDomain(format!(
            "actual value {i} is zero; relative error is undefined"
        )));
    }
    let sum: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(y, p)| ((y - p) / y).abs())
        .sum();
    Ok(sum / actual.len() as f64)
}

/// `(1 − mean |y − ŷ|) · 100`, in percent.
pub fn pred(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pairs(actual, predicted)?;
    let mae = actual
        .iter()
        .zip(predicted)
        .map(|(y, p)| (y - p).abs())
        .sum::<f64>()
        / actual.len() as f64;
    Ok((1.0 - mae) * 100.0)
}

/// Squared Pearson correlation between `actual` and `predicted`.
pub fn r_squared(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pairs(actual, predicted)?;
    if actual.len() < 2 {
        return Err(Error::Degenerate("r² needs at least two pairs".into()));
    }
    let (ma, mp) = (mean(actual), mean(predicted));
    let (mut cov, mut va, mut vp) = (0.0, 0.0, 0.0);
    for (a, p) in actual.iter().zip(predicted) {
        let (da, dp) = (a - ma, p - mp);
        cov += da * dp;
        va += da * da;
        vp += dp * dp;
    }
    if va == 0.0 || vp == 0.0 {
        return Err(Error::Degenerate(
            "r² is undefined when either series has zero variance".into(),
        ));
    }
    Ok((cov * cov / (va * vp)).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub mse: f64,
    pub rmse: f64,
    /// `None` when the actuals have no spread.
    pub nrms: Option<f64>,
    pub mmre: f64,
    /// Percent.
    pub pred: f64,
    /// `None` when either series has no variance (e.g. a constant model).
    pub r_squared: Option<f64>,
    pub n: usize,
}

/// Builds a report. MSE, RMSE, NRMS, PRED and r² use the scaled pair;
/// MMRE uses the pair in original effort units.
pub fn evaluate(
    actual: &[f64],
    predicted: &[f64],
    effort_actual: &[f64],
    effort_predicted: &[f64],
) -> Result<EvaluationReport> {
    let mse = mse(actual, predicted)?;
    let rmse = rmse(mse)?;
    let nrms = degenerate_as_none(nrms(rmse, actual))?;
    let r_squared = degenerate_as_none(r_squared(actual, predicted))?;
    Ok(EvaluationReport {
        mse,
        rmse,
        nrms,
        mmre: mmre(effort_actual, effort_predicted)?,
        pred: pred(actual, predicted)?,
        r_squared,
        n: actual.len(),
    })
}

fn degenerate_as_none(r: Result<f64>) -> Result<Option<f64>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Degenerate(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn fixed4(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.4}"))
}

fn full(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| format!("{v}"))
}

impl EvaluationReport {
    pub const CSV_HEADER: &'static str = "n,mse,rmse,nrms,mmre,pred,r_squared";

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let rows = [
            ("N", self.n.to_string()),
            ("MSE", format!("{:.4}", self.mse)),
            ("RMSE", format!("{:.4}", self.rmse)),
            ("NRMS", fixed4(self.nrms)),
            ("MMRE", format!("{:.4}", self.mmre)),
            ("PRED (%)", format!("{:.4}", self.pred)),
            ("r²", fixed4(self.r_squared)),
        ];
        for (k, v) in rows {
            writeln!(out, "{k:<10} {v:>12}").unwrap();
        }
        out
    }

    /// Full-precision CSV row matching [`CSV_HEADER`](Self::CSV_HEADER).
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.n,
            self.mse,
            self.rmse,
            full(self.nrms),
            self.mmre,
            self.pred,
            full(self.r_squared)
        )
    }
}
