use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Min-max bounds observed on a column. A constant column maps to 0.5.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub min_value: f64,
    pub max_value: f64,
}

impl ScalingParams {
    pub fn new(min_value: f64, max_value: f64) -> Result<Self> {
        if !(min_value.is_finite() && max_value.is_finite()) || max_value < min_value {
            return Err(Error::invalid(format!(
                "invalid scaling bounds [{min_value}, {max_value}]"
            )));
        }
        Ok(Self {
            min_value,
            max_value,
        })
    }

    pub fn span(&self) -> f64 {
        self.max_value - self.min_value
    }

    pub fn apply(&self, x: f64) -> f64 {
        let span = self.span();
        if span == 0.0 {
            0.5
        } else {
            (x - self.min_value) / span
        }
    }

    /// Inverse of [`apply`](Self::apply). A constant column unscales to its value.
    pub fn unscale(&self, scaled: f64) -> f64 {
        let span = self.span();
        if span == 0.0 {
            self.min_value
        } else {
            scaled * span + self.min_value
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.min_value && x <= self.max_value
    }
}

pub fn scale_fit(values: &[f64]) -> Result<ScalingParams> {
    if values.is_empty() {
        return Err(Error::invalid("cannot fit scaling on an empty column"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("cannot fit scaling on non-finite values"));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    ScalingParams::new(min, max)
}

pub fn scale_apply(params: &ScalingParams, x: f64) -> f64 {
    params.apply(x)
}
