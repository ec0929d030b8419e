mod common;

use std::fs;

use effort_svr::kernels::KernelFamily;
use effort_svr::pipeline::{
    evaluate_model, load_model, parse_param_string, predict_effort, predict_effort_from_file,
    run_full_pipeline, run_pipeline, ArtifactKind, EffortInput, PipelineConfig, RunManifest,
};
use effort_svr::selection::HyperGrid;
use effort_svr::{Error, LabeledDataset};

fn small_grid() -> HyperGrid {
    HyperGrid {
        gamma_values: vec![0.125, 1.0, 8.0],
        epsilon_values: vec![0.0, 1.0],
    }
}

fn config(kernels: &[KernelFamily]) -> PipelineConfig {
    PipelineConfig {
        kernels: kernels.to_vec(),
        grid: small_grid(),
        ..PipelineConfig::default()
    }
}

fn write_dataset(dir: &std::path::Path, data: &LabeledDataset) -> std::path::PathBuf {
    let path = dir.join("effort.csv");
    fs::write(&path, common::csv_of(data)).unwrap();
    path
}

#[test]
fn manifest_lists_every_artifact_with_checksum() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_dataset(dir.path(), &common::power_law_84(3));
    let out = dir.path().join("run");
    let m = run_full_pipeline(&path, &config(&KernelFamily::ALL), &out).unwrap();
    assert_eq!(m.count(ArtifactKind::GridReport), 4);
    assert_eq!(m.count(ArtifactKind::Model), 4);
    assert_eq!(m.count(ArtifactKind::Comparison), 1);
    assert_eq!(m.count(ArtifactKind::Summary), 1);
    assert_eq!(m.count(ArtifactKind::ResultBlocks), 1);
    assert!(m.deterministic);
    for a in &m.artifacts {
        let bytes = fs::read(out.join(&a.path)).unwrap();
        assert_eq!(a.sha256.len(), 64);
        assert!(!bytes.is_empty(), "{}", a.path);
    }
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join(RunManifest::FILE_NAME)).unwrap()).unwrap();
    assert_eq!(json["artifacts"].as_array().unwrap().len(), m.artifacts.len());
    assert_eq!(json["grid"]["gamma_values"].as_array().unwrap().len(), 3);
    assert_eq!(json["deterministic"], true);

    let grid = fs::read_to_string(out.join("grid_rbf.csv")).unwrap();
    assert_eq!(grid.lines().count(), 1 + 3);
    let results = fs::read_to_string(out.join("results.txt")).unwrap();
    for title in ["Linear", "Polynomial", "RBF", "Sigmoid"] {
        assert!(results.contains(&format!("SVR {title} Kernel Result for UCP:")), "{title}");
    }
    assert_eq!(results.matches("Param:  -s 3 -t ").count(), 4);
    let comparison = fs::read_to_string(out.join("comparison.csv")).unwrap();
    assert!(comparison.starts_with("# ucp scaling: min="));
    assert_eq!(comparison.lines().count(), 2 + 17);
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_dataset(dir.path(), &common::power_law_84(4));
    let cfg = config(&[KernelFamily::Linear, KernelFamily::Rbf]);
    let a = run_full_pipeline(&path, &cfg, dir.path().join("a")).unwrap();
    let b = run_full_pipeline(&path, &cfg, dir.path().join("b")).unwrap();
    assert_eq!(a.artifacts, b.artifacts);
    for art in &a.artifacts {
        let x = fs::read(dir.path().join("a").join(&art.path)).unwrap();
        let y = fs::read(dir.path().join("b").join(&art.path)).unwrap();
        assert_eq!(x, y, "{}", art.path);
    }
}

#[test]
fn noiseless_line_ranks_linear_near_perfect() {
    let pairs: Vec<(f64, f64)> = (0..84).map(|i| {
        let x = 20.0 + 5.0 * i as f64;
        (x, 3.0 * x + 40.0)
    }).collect();
    let data = LabeledDataset::from_pairs(&pairs).unwrap();
    let cfg = PipelineConfig {
        kernels: vec![KernelFamily::Linear],
        ..PipelineConfig::default()
    };
    let outcome = run_pipeline(&data, &cfg).unwrap();
    let linear = &outcome.kernels[0];
    assert!((linear.finalized.test_report.pred - 100.0).abs() < 0.01, "{}", linear.finalized.test_report.pred);

    let dir = tempfile::tempdir().unwrap();
    let path = write_dataset(dir.path(), &data);
    run_full_pipeline(&path, &cfg, dir.path().join("out")).unwrap();
    let summary = fs::read_to_string(dir.path().join("out/summary.csv")).unwrap();
    let row = summary.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[0], "linear");
    let pred: f64 = fields[2].parse().unwrap();
    assert!((pred - 100.0).abs() < 0.01, "{pred}");
}

#[test]
fn kernels_share_one_test_split() {
    let outcome = run_pipeline(&common::power_law_84(8), &config(&KernelFamily::ALL)).unwrap();
    assert_eq!(outcome.test.len(), 17);
    for k in &outcome.kernels {
        assert_eq!(k.finalized.test_report.n, 17);
        assert_eq!(k.finalized.test_predictions.len(), 17);
        let direct = effort_svr::selection::evaluate(&outcome.test, &k.finalized.test_predictions).unwrap();
        assert_eq!(direct, k.finalized.test_report);
    }
}

#[test]
fn fixed_param_string_skips_search() {
    let mut cfg = config(&KernelFamily::ALL);
    cfg.fixed_params = Some(parse_param_string("-s 3 -t 2 -c 1 -g 2 -p 0").unwrap());
    let outcome = run_pipeline(&common::power_law_84(9), &cfg).unwrap();
    assert_eq!(outcome.kernels.len(), 1);
    assert_eq!(outcome.kernels[0].family, KernelFamily::Rbf);
    assert!(outcome.kernels[0].report.is_none());
    assert_eq!(outcome.kernels[0].finalized.model.params.kernel.gamma, 2.0);
}

#[test]
fn stage_failures_name_the_stage() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.csv");
    let err = run_full_pipeline(&missing, &config(&[KernelFamily::Linear]), dir.path().join("o")).unwrap_err();
    assert!(matches!(&err, Error::Stage { stage: "load", .. }), "{err}");
    assert_eq!(err.exit_code(), 3);

    let tiny = LabeledDataset::from_pairs(&[(1.0, 2.0), (2.0, 3.0), (3.0, 5.0)]).unwrap();
    let path = write_dataset(dir.path(), &tiny);
    let err = run_full_pipeline(&path, &config(&[KernelFamily::Linear]), dir.path().join("o")).unwrap_err();
    assert!(matches!(&err, Error::Stage { stage: "split", .. }), "{err}");
    assert!(!dir.path().join("o").exists());
}

#[test]
fn unwritable_output_leaves_no_partial_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_dataset(dir.path(), &common::power_law_84(10));
    let out = dir.path().join("out");
    fs::create_dir(&out).unwrap();
    // A directory where a later artifact should go makes that write fail.
    fs::create_dir(out.join("summary.csv")).unwrap();
    let err = run_full_pipeline(&path, &config(&[KernelFamily::Linear]), &out).unwrap_err();
    assert!(matches!(&err, Error::Stage { stage: "write", .. }), "{err}");
    let left: Vec<_> = fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(left, vec![std::ffi::OsString::from("summary.csv")]);
}

#[test]
fn saved_model_predicts_in_effort_units() {
    let data = common::power_law_84(12);
    let dir = tempfile::tempdir().unwrap();
    let path = write_dataset(dir.path(), &data);
    let out = dir.path().join("out");
    run_full_pipeline(&path, &config(&[KernelFamily::Rbf]), &out).unwrap();
    let model_path = out.join("model_rbf.model");
    let model = load_model(&model_path).unwrap();

    let span = model.target_scaling.unwrap().span();
    for r in data.records.iter().take(10) {
        let ucp = r.feature.as_slice()[0];
        let p = predict_effort_from_file(&model_path, &EffortInput::Ucp(ucp)).unwrap();
        assert!(!p.extrapolated);
        let rescaled = model.target_scaling.unwrap().apply(p.effort);
        assert!((rescaled - p.scaled_prediction).abs() <= 1e-12);
        assert!((p.effort - r.effort).abs() < 0.05 * span, "{} vs {}", p.effort, r.effort);
    }
    let low = predict_effort(&model, &EffortInput::Ucp(1.0)).unwrap();
    assert!(low.extrapolated);

    let (train, test) = evaluate_model(&model, &data, 5).unwrap();
    assert_eq!((train.n, test.n), (67, 17));
    assert!(test.pred > 90.0);
}
