use std::path::Path;

use log::warn;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::FeatureVector;
use crate::svr::SvrModel;
use crate::ucp::{compute_ucp, ProjectDescriptor};

use super::model_file::load_model;

#[derive(Debug, Clone, PartialEq)]
pub enum EffortInput {
    Ucp(f64),
    Project(ProjectDescriptor),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffortPrediction {
    pub ucp: f64,
    pub scaled_input: f64,
    pub scaled_prediction: f64,
    /// Prediction in original effort units.
    pub effort: f64,
    /// The input lay outside the range seen in training.
    pub extrapolated: bool,
}

/// Scales the input with the model's stored parameters, predicts, and maps
/// the result back to effort units. Models without stored scaling are used
/// on the raw axis.
pub fn predict_effort(model: &SvrModel, input: &EffortInput) -> Result<EffortPrediction> {
    if model.dimension != 1 {
        return Err(Error::invalid(format!(
            "effort prediction needs a one-feature model, this one has {} features",
            model.dimension
        )));
    }
    let ucp = match input {
        EffortInput::Ucp(v) => *v,
        EffortInput::Project(p) => compute_ucp(p)?.ucp,
    };
    if !ucp.is_finite() {
        return Err(Error::invalid("UCP must be finite"));
    }
    let (scaled_input, extrapolated) = match model.feature_scaling {
        Some(s) => (s.apply(ucp), !s.contains(ucp)),
        None => (ucp, false),
    };
    if let Some(s) = model.feature_scaling.filter(|_| extrapolated) {
        warn!(
            "UCP {ucp} lies outside the training range [{}, {}]; the prediction is an extrapolation",
            s.min_value, s.max_value
        );
    }
    let scaled_prediction = model.predict(&FeatureVector::scalar(scaled_input)?)?;
    let effort = model
        .target_scaling
        .map_or(scaled_prediction, |s| s.unscale(scaled_prediction));
    Ok(EffortPrediction {
        ucp,
        scaled_input,
        scaled_prediction,
        effort,
        extrapolated,
    })
}

pub fn predict_effort_from_file(path: impl AsRef<Path>, input: &EffortInput) -> Result<EffortPrediction> {
    predict_effort(&load_model(path)?, input)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selection::{finalize_with_params, split_test, LabeledDataset};
    use crate::kernels::KernelSpec;
    use crate::svr::SvrParams;
    use crate::ucp::{ActorClass, EnvironmentalRatings, TechnicalRatings};

    /// y = 2x on x = 1..=20, scaled, linear kernel with ε = 0.
    fn doubling_model() -> (LabeledDataset, SvrModel) {
        let pairs: Vec<_> = (1..=20).map(|i| (i as f64, 2.0 * i as f64)).collect();
        let data = LabeledDataset::from_pairs(&pairs).unwrap();
        let scaled = data.scaled().unwrap();
        let (train, test) = split_test(&scaled, 5).unwrap();
        let params = SvrParams::new(KernelSpec::linear(), 1.0, 0.0).with_tolerance(1e-9);
        let fin = finalize_with_params(&train, &test, &params).unwrap();
        (data, fin.model)
    }

    #[test]
    fn training_input_recovers_target() {
        let (data, model) = doubling_model();
        for r in &data.records {
            let p = predict_effort(&model, &EffortInput::Ucp(r.feature.as_slice()[0])).unwrap();
            assert!((p.effort - r.effort).abs() < 1e-3, "{} vs {}", p.effort, r.effort);
            assert!(!p.extrapolated);
            let rescaled = model.target_scaling.unwrap().apply(p.effort);
            assert!((rescaled - p.scaled_prediction).abs() < 1e-12);
        }
    }

    #[test]
    fn below_training_range_is_flagged() {
        let (_, model) = doubling_model();
        let p = predict_effort(&model, &EffortInput::Ucp(0.25)).unwrap();
        assert!(p.extrapolated);
        assert!((p.effort - 0.5).abs() < 1e-2);
    }

    #[test]
    fn descriptor_input_goes_through_ucp() {
        let (_, model) = doubling_model();
        let project = ProjectDescriptor {
            name: "zero".into(),
            actors: vec![ActorClass::Simple],
            use_cases: vec![2],
            technical: TechnicalRatings::uniform(0).unwrap(),
            environmental: EnvironmentalRatings::uniform(0).unwrap(),
        };
        let p = predict_effort(&model, &EffortInput::Project(project)).unwrap();
        assert!((p.ucp - 5.04).abs() < 1e-12);
        assert!((p.effort - 10.08).abs() < 1e-2);
    }
}
