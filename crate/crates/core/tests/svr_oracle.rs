mod common;

use effort_svr::kernels::{gram_matrix, FeatureVector, KernelFamily, KernelSpec};
use effort_svr::svr::{dual_objective, kkt_violation, train, train_traced, SvrParams};
use proptest::prelude::*;

fn scalars(xs: &[f64]) -> Vec<FeatureVector> {
    xs.iter().map(|&v| FeatureVector::scalar(v).unwrap()).collect()
}

const X: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

fn doubling() -> (Vec<f64>, Vec<f64>) {
    (X.to_vec(), X.iter().map(|x| 2.0 * x).collect())
}

#[test]
fn doubling_fixture_matches_oracle() {
    let (x, y) = doubling();
    let params = SvrParams::new(KernelSpec::linear(), 10.0, 0.0).with_tolerance(1e-10);
    let model = train(&scalars(&x), &y, &params).unwrap();

    let k = common::kernel_matrix(0, 1.0, &x);
    let oracle = common::qp_oracle(&k, &y, 10.0, 0.0, 1_000_000);
    let gram = gram_matrix(&params.kernel, &scalars(&x)).unwrap();
    let ours = dual_objective(&model.full_coefficients(5), &gram, &y, 0.0);
    assert!((ours - oracle.objective).abs() < 1e-6, "{ours} vs {}", oracle.objective);

    let q = model.predict(&FeatureVector::scalar(0.25).unwrap()).unwrap();
    assert!((q - 0.5).abs() < 1e-3, "{q}");
    for probe in [0.0, 0.25, 0.6, 1.0] {
        let theirs: f64 = (0..5).map(|j| oracle.beta[j] * x[j] * probe).sum::<f64>() + oracle.bias;
        let ours = model.predict(&FeatureVector::scalar(probe).unwrap()).unwrap();
        assert!((ours - theirs).abs() < 1e-4, "at {probe}: {ours} vs {theirs}");
    }
}

#[test]
fn free_coefficients_interpolate_at_zero_epsilon() {
    let (x, y) = doubling();
    let params = SvrParams::new(KernelSpec::linear(), 10.0, 0.0).with_tolerance(1e-10);
    let model = train(&scalars(&x), &y, &params).unwrap();
    let mut checked = 0;
    for (idx, b) in model.support_indices.iter().zip(&model.dual_coefficients) {
        if b.abs() > 1e-9 && b.abs() < 10.0 - 1e-9 {
            let p = model.predict(&FeatureVector::scalar(x[*idx]).unwrap()).unwrap();
            assert!((p - y[*idx]).abs() < 1e-6, "point {idx}: {p} vs {}", y[*idx]);
            checked += 1;
        }
    }
    assert!(checked > 0, "no free coefficient");
}

#[test]
fn converged_objective_matches_oracle_optimum() {
    let (x, y) = doubling();
    let params = SvrParams::new(KernelSpec::linear(), 10.0, 0.0).with_tolerance(1e-10);
    let (_, trace) = train_traced(&scalars(&x), &y, &params).unwrap();
    let oracle = common::qp_oracle(&common::kernel_matrix(0, 1.0, &x), &y, 10.0, 0.0, 1_000_000);
    let last = *trace.objective.last().unwrap();
    assert!((last - oracle.objective).abs() < 1e-6, "{last} vs {}", oracle.objective);
}

fn small_problem() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..=8).prop_flat_map(|n| {
        (
            prop::collection::vec(0.0f64..1.0, n),
            prop::collection::vec(0.0f64..1.0, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn solver_agrees_with_oracle(
        (x, y) in small_problem(),
        code in 0u8..4,
        c in prop::sample::select(vec![0.5, 1.0, 10.0]),
        eps in prop::sample::select(vec![0.0, 0.05, 0.2]),
        gamma in prop::sample::select(vec![0.5, 1.0, 2.0]),
    ) {
        let family = KernelFamily::from_code(i64::from(code)).unwrap();
        let spec = KernelSpec::new(family, gamma);
        let params = SvrParams::new(spec, c, eps).with_tolerance(1e-10);
        let xs = scalars(&x);
        let model = train(&xs, &y, &params).unwrap();
        prop_assert!(kkt_violation(&model, &xs, &y).unwrap() <= 1e-8);

        let k = common::kernel_matrix(code, gamma, &x);
        let oracle = common::qp_oracle(&k, &y, c, eps, 1_000_000);
        let gram = gram_matrix(&spec, &xs).unwrap();
        let ours = dual_objective(&model.full_coefficients(x.len()), &gram, &y, eps);
        prop_assert!((ours - oracle.objective).abs() <= 1e-6, "{} vs {}", ours, oracle.objective);
    }
}
