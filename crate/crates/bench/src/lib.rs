//! Fixtures shared by the solver benchmarks.

use effort_svr::LabeledDataset;

/// `n` projects with UCP spread over 50..=500 and effort `1.2·ucp^1.1`,
/// perturbed by a fixed ±2% ripple so the data are not exactly on the curve.
pub fn power_law_dataset(n: usize) -> LabeledDataset {
    let pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let ucp = 50.0 + 450.0 * i as f64 / (n.max(2) - 1) as f64;
            let ripple = 1.0 + 0.02 * (i as f64 * 2.399).sin();
            (ucp, 1.2 * ucp.powf(1.1) * ripple)
        })
        .collect();
    LabeledDataset::from_pairs(&pairs).expect("finite fixture")
}
