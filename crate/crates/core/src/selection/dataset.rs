use crate::error::{Error, Result};
use crate::kernels::FeatureVector;

use super::scaling::{scale_fit, ScalingParams};

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub feature: FeatureVector,
    pub effort: f64,
}

/// Ordered `(feature, effort)` pairs. Order is load order; the stride-based
/// splits depend on it, so nothing here ever permutes records.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabeledDataset {
    pub records: Vec<Record>,
    pub feature_scaling: Option<ScalingParams>,
    pub target_scaling: Option<ScalingParams>,
}

impl LabeledDataset {
    pub fn new(records: Vec<Record>) -> Self {
        Self {
            records,
            feature_scaling: None,
            target_scaling: None,
        }
    }

    /// Builds a one-feature dataset from `(ucp, effort)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let records = pairs
            .iter()
            .map(|&(x, y)| {
                if !y.is_finite() {
                    return Err(Error::invalid("effort must be finite"));
                }
                Ok(Record {
                    feature: FeatureVector::scalar(x)?,
                    effort: y,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self::new(records))
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn features(&self) -> Vec<FeatureVector> {
        self.records.iter().map(|r| r.feature.clone()).collect()
    }

    pub fn targets(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.effort).collect()
    }

    pub fn is_scaled(&self) -> bool {
        self.target_scaling.is_some()
    }

    /// Fits min-max parameters on this dataset and maps features and efforts
    /// into `[0, 1]`. Only one-dimensional features are supported.
    pub fn scaled(&self) -> Result<Self> {
        if self.is_scaled() {
            return Err(Error::invalid("dataset is already scaled"));
        }
        if let Some(r) = self.records.iter().find(|r| r.feature.dim() != 1) {
            return Err(Error::invalid(format!(
                "scaling expects one-dimensional features, found dimension {}",
                r.feature.dim()
            )));
        }
        let xs: Vec<f64> = self.records.iter().map(|r| r.feature.as_slice()[0]).collect();
        let feature = scale_fit(&xs)?;
        let target = scale_fit(&self.targets())?;
        self.scaled_with(feature, target)
    }

    /// Applies existing scaling parameters, e.g. those stored with a model.
    pub fn scaled_with(&self, feature: ScalingParams, target: ScalingParams) -> Result<Self> {
        let records = self
            .records
            .iter()
            .map(|r| {
                Ok(Record {
                    feature: FeatureVector::scalar(feature.apply(r.feature.as_slice()[0]))?,
                    effort: target.apply(r.effort),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            records,
            feature_scaling: Some(feature),
            target_scaling: Some(target),
        })
    }

    /// Maps a scaled target back to the original effort unit.
    pub fn unscale_target(&self, y: f64) -> f64 {
        self.target_scaling.map_or(y, |p| p.unscale(y))
    }

    pub(crate) fn subset(&self, indices: impl IntoIterator<Item = usize>) -> Self {
        Self {
            records: indices.into_iter().map(|i| self.records[i].clone()).collect(),
            feature_scaling: self.feature_scaling,
            target_scaling: self.target_scaling,
        }
    }
}

/// Extracts every `stride`-th record (1-based positions 1, 1+stride, ...)
/// as the test set. Returns `(train, test)`, both in original order.
pub fn split_test(data: &LabeledDataset, stride: usize) -> Result<(LabeledDataset, LabeledDataset)> {
    if stride == 0 {
        return Err(Error::invalid("stride must be positive"));
    }
    if data.len() < stride {
        return Err(Error::invalid(format!(
            "dataset has {} records, fewer than the stride {stride}",
            data.len()
        )));
    }
    let (test, train): (Vec<usize>, Vec<usize>) = (0..data.len()).partition(|i| i % stride == 0);
    Ok((data.subset(train), data.subset(test)))
}

/// Validation fold of each training record: record `i` (0-based) is in fold `i mod k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    pub k: usize,
    pub fold_index_of: Vec<usize>,
}

impl FoldAssignment {
    pub fn validation_indices(&self, fold: usize) -> Vec<usize> {
        self.indices(|f| f == fold)
    }

    pub fn learning_indices(&self, fold: usize) -> Vec<usize> {
        self.indices(|f| f != fold)
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.fold_index_of {
            sizes[f] += 1;
        }
        sizes
    }

    fn indices(&self, keep: impl Fn(usize) -> bool) -> Vec<usize> {
        self.fold_index_of
            .iter()
            .enumerate()
            .filter(|(_, &f)| keep(f))
            .map(|(i, _)| i)
            .collect()
    }
}

pub fn kfold_partitions(train: &LabeledDataset, k: usize) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::invalid("k-fold partitioning needs k >= 2"));
    }
    if train.len() < k {
        return Err(Error::invalid(format!(
            "{} training records cannot fill {k} folds",
            train.len()
        )));
    }
    Ok(FoldAssignment {
        k,
        fold_index_of: (0..train.len()).map(|i| i % k).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn numbered(n: usize) -> LabeledDataset {
        let pairs: Vec<_> = (1..=n).map(|i| (i as f64, 10.0 * i as f64)).collect();
        LabeledDataset::from_pairs(&pairs).unwrap()
    }

    fn positions(d: &LabeledDataset) -> Vec<usize> {
        d.records.iter().map(|r| r.feature.as_slice()[0] as usize).collect()
    }

    #[test]
    fn stride_split_examples() {
        let (train, test) = split_test(&numbered(84), 5).unwrap();
        assert_eq!((train.len(), test.len()), (67, 17));
        assert_eq!(&positions(&test)[..3], &[1, 6, 11]);

        let (train, test) = split_test(&numbered(5), 5).unwrap();
        assert_eq!(positions(&test), vec![1]);
        assert_eq!(positions(&train), vec![2, 3, 4, 5]);

        let (_, test) = split_test(&numbered(10), 5).unwrap();
        assert_eq!(positions(&test), vec![1, 6]);

        assert!(split_test(&numbered(4), 5).is_err());
    }

    #[test]
    fn fold_examples() {
        let folds = kfold_partitions(&numbered(67), 5).unwrap();
        assert_eq!(folds.fold_sizes(), vec![14, 14, 13, 13, 13]);
        // 1-based record 12 lands with records 2 and 7
        assert_eq!(folds.fold_index_of[11], 1);
        assert_eq!(&folds.validation_indices(1)[..3], &[1, 6, 11]);

        let folds = kfold_partitions(&numbered(5), 5).unwrap();
        assert_eq!(folds.fold_sizes(), vec![1; 5]);
        assert!(kfold_partitions(&numbered(4), 5).is_err());
    }

    #[test]
    fn scaling_maps_into_unit_interval() {
        let d = numbered(10).scaled().unwrap();
        for r in &d.records {
            assert!((0.0..=1.0).contains(&r.effort));
            assert!((0.0..=1.0).contains(&r.feature.as_slice()[0]));
        }
        assert_eq!(d.unscale_target(1.0), 100.0);
        assert!(d.scaled().is_err());
    }

    proptest! {
        #[test]
        fn split_and_fold_laws(n in 5usize..200, stride in 2usize..8, k in 2usize..8) {
            prop_assume!(n >= stride);
            let data = numbered(n);
            let (train, test) = split_test(&data, stride).unwrap();
            let mut all: Vec<usize> = positions(&train).into_iter().chain(positions(&test)).collect();
            prop_assert!(positions(&train).windows(2).all(|w| w[0] < w[1]));
            prop_assert!(positions(&test).windows(2).all(|w| w[0] < w[1]));
            all.sort_unstable();
            prop_assert_eq!(all, (1..=n).collect::<Vec<_>>());

            prop_assume!(train.len() >= k);
            let folds = kfold_partitions(&train, k).unwrap();
            let mut seen_validation = vec![0; train.len()];
            let mut seen_learning = vec![0; train.len()];
            for f in 0..k {
                let v = folds.validation_indices(f);
                prop_assert!(!v.is_empty());
                for i in v { seen_validation[i] += 1; }
                for i in folds.learning_indices(f) { seen_learning[i] += 1; }
            }
            prop_assert!(seen_validation.iter().all(|&c| c == 1));
            prop_assert!(seen_learning.iter().all(|&c| c == k - 1));
        }
    }
}
