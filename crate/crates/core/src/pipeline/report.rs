use std::fmt::Write as _;

use crate::kernels::KernelFamily;
use crate::metrics::EvaluationReport;
use crate::selection::LabeledDataset;

use super::param::format_4dp;
use super::run::KernelOutcome;

fn title(family: KernelFamily) -> &'static str {
    match family {
        KernelFamily::Linear => "Linear",
        KernelFamily::Polynomial => "Polynomial",
        KernelFamily::Rbf => "RBF",
        KernelFamily::Sigmoid => "Sigmoid",
    }
}

fn opt4(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), format_4dp)
}

fn full(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| format!("{v}"))
}

/// Human-readable block for one kernel: the Param line, the headline test
/// statistics, then the train and test metric tables.
pub fn result_block(outcome: &KernelOutcome) -> String {
    let test = &outcome.finalized.test_report;
    let mut out = String::new();
    writeln!(out, "SVR {} Kernel Result for UCP:", title(outcome.family)).unwrap();
    writeln!(out, "Param:  {}", outcome.param.render_display()).unwrap();
    writeln!(out, "* Mean Squared Error (MSE_TEST) = {} (regression)", format_4dp(test.mse)).unwrap();
    writeln!(
        out,
        "* Squared correlation coefficient = {} (regression)",
        opt4(test.r_squared)
    )
    .unwrap();
    writeln!(out, "* NRMS_Test = {}", opt4(test.nrms)).unwrap();
    writeln!(out, "* Support vectors = {}", outcome.finalized.model.support_vector_count()).unwrap();
    out.push('\n');
    out.push_str("Training set\n");
    out.push_str(&outcome.finalized.train_report.to_table());
    out.push('\n');
    out.push_str("Test set\n");
    out.push_str(&test.to_table());
    out
}

/// Test-set comparison: actual effort against each kernel's prediction, in
/// original effort units and on the scaled axis. The first line records the
/// scaling constants used. Negative scaled predictions are left as they are.
pub fn comparison_csv(test: &LabeledDataset, kernels: &[KernelOutcome]) -> String {
    let mut out = String::new();
    let bounds = |p: Option<crate::selection::ScalingParams>| {
        p.map_or_else(|| "none".to_string(), |p| format!("min={} max={}", p.min_value, p.max_value))
    };
    writeln!(
        out,
        "# ucp scaling: {}; effort scaling: {}",
        bounds(test.feature_scaling),
        bounds(test.target_scaling)
    )
    .unwrap();
    out.push_str("row,ucp,actual_effort,actual_scaled");
    for k in kernels {
        write!(out, ",{0}_effort,{0}_scaled", k.family.name()).unwrap();
    }
    out.push('\n');
    for (i, r) in test.records.iter().enumerate() {
        let x = r.feature.as_slice()[0];
        let ucp = test.feature_scaling.map_or(x, |p| p.unscale(x));
        write!(out, "{},{},{},{}", i + 1, ucp, test.unscale_target(r.effort), r.effort).unwrap();
        for k in kernels {
            let p = k.finalized.test_predictions[i];
            write!(out, ",{},{}", test.unscale_target(p), p).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Indices of `kernels` ordered by test MMRE, lowest first. Ties keep the
/// input order.
pub(crate) fn mmre_ranking(kernels: &[KernelOutcome]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..kernels.len()).collect();
    order.sort_by(|&a, &b| {
        kernels[a]
            .finalized
            .test_report
            .mmre
            .total_cmp(&kernels[b].finalized.test_report.mmre)
    });
    order
}

/// One row per kernel with the test-set MMRE and PRED, plus the remaining
/// test statistics and the chosen hyperparameters. `rank` is 1 for the
/// lowest MMRE.
pub fn summary_csv(kernels: &[KernelOutcome]) -> String {
    let mut rank = vec![0; kernels.len()];
    for (r, i) in mmre_ranking(kernels).into_iter().enumerate() {
        rank[i] = r + 1;
    }
    let mut out = String::from("kernel,mmre,pred,mse,rmse,nrms,r_squared,rank,param\n");
    for (k, r) in kernels.iter().zip(rank) {
        let t: &EvaluationReport = &k.finalized.test_report;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            k.family.name(),
            t.mmre,
            t.pred,
            t.mse,
            t.rmse,
            full(t.nrms),
            full(t.r_squared),
            r,
            k.param.render()
        )
        .unwrap();
    }
    out
}
