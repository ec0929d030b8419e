//! Linear, polynomial, RBF and sigmoid kernels.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum KernelFamily {
    Linear,
    Polynomial,
    Rbf,
    Sigmoid,
}

impl KernelFamily {
    pub const ALL: [KernelFamily; 4] = [
        KernelFamily::Linear,
        KernelFamily::Polynomial,
        KernelFamily::Rbf,
        KernelFamily::Sigmoid,
    ];

    /// Integer code used by the `-t` flag of parameter strings.
    pub fn code(self) -> u8 {
        match self {
            KernelFamily::Linear => 0,
            KernelFamily::Polynomial => 1,
            KernelFamily::Rbf => 2,
            KernelFamily::Sigmoid => 3,
        }
    }

    pub fn from_code(code: i64) -> Option<Self> {
        match code {
            0 => Some(KernelFamily::Linear),
            1 => Some(KernelFamily::Polynomial),
            2 => Some(KernelFamily::Rbf),
            3 => Some(KernelFamily::Sigmoid),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::Linear => "linear",
            KernelFamily::Polynomial => "poly",
            KernelFamily::Rbf => "rbf",
            KernelFamily::Sigmoid => "sigmoid",
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" | "0" => Ok(KernelFamily::Linear),
            "poly" | "polynomial" | "1" => Ok(KernelFamily::Polynomial),
            "rbf" | "2" => Ok(KernelFamily::Rbf),
            "sigmoid" | "3" => Ok(KernelFamily::Sigmoid),
            other => Err(Error::invalid(format!("unknown kernel `{other}`"))),
        }
    }
}

/// Kernel family plus its parameters: `gamma` (width/scale), `coef0` (r)
/// and `degree` (d). Parameters a family does not use are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub gamma: f64,
    pub coef0: f64,
    pub degree: u32,
}

impl KernelSpec {
    pub const DEFAULT_DEGREE: u32 = 3;
    pub const DEFAULT_COEF0: f64 = 0.0;

    /// Spec with the default `coef0 = 0` and `degree = 3`.
    pub fn new(family: KernelFamily, gamma: f64) -> Self {
        Self {
            family,
            gamma,
            coef0: Self::DEFAULT_COEF0,
            degree: Self::DEFAULT_DEGREE,
        }
    }

    pub fn linear() -> Self {
        Self::new(KernelFamily::Linear, 1.0)
    }

    pub fn with_coef0(mut self, coef0: f64) -> Self {
        self.coef0 = coef0;
        self
    }

    pub fn with_degree(mut self, degree: u32) -> Self {
        self.degree = degree;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.family {
            KernelFamily::Polynomial | KernelFamily::Rbf if !(self.gamma > 0.0) => Err(
                Error::invalid(format!("{} kernel needs gamma > 0, got {}", self.family, self.gamma)),
            ),
            KernelFamily::Sigmoid if !self.gamma.is_finite() => {
                Err(Error::invalid("sigmoid gamma must be finite"))
            }
            _ if !self.coef0.is_finite() => Err(Error::invalid("coef0 must be finite")),
            _ if self.degree == 0 => Err(Error::invalid("degree must be at least 1")),
            _ => Ok(()),
        }
    }

    /// Evaluates the kernel without dimension or finiteness checks.
    #[inline]
    pub(crate) fn eval_raw(&self, a: &[f64], b: &[f64]) -> f64 {
        match self.family {
            KernelFamily::Linear => dot(a, b),
            KernelFamily::Polynomial => {
                let base = self.gamma * dot(a, b) + self.coef0;
                match i32::try_from(self.degree) {
                    Ok(d) => base.powi(d),
                    Err(_) => base.powf(f64::from(self.degree)),
                }
            }
            KernelFamily::Rbf => {
                let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-self.gamma * sq).exp()
            }
            KernelFamily::Sigmoid => (self.gamma * dot(a, b) + self.coef0).tanh(),
        }
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// An input pattern. The effort pipeline uses one component (scaled UCP).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("feature vector has a non-finite component"));
        }
        Ok(Self(components))
    }

    pub fn scalar(value: f64) -> Result<Self> {
        Self::new(vec![value])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for FeatureVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub fn kernel_eval(spec: &KernelSpec, a: &FeatureVector, b: &FeatureVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::invalid(format!(
            "kernel inputs differ in dimension ({} vs {})",
            a.dim(),
            b.dim()
        )));
    }
    finite(spec, spec.eval_raw(a.as_slice(), b.as_slice()))
}

fn finite(spec: &KernelSpec, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NumericOverflow(format!(
            "{} kernel (gamma {}, coef0 {}, degree {}) evaluated to {value}",
            spec.family, spec.gamma, spec.coef0, spec.degree
        )))
    }
}

/// Dense symmetric kernel matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    n: usize,
    data: Vec<f64>,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

/// Builds the Gram matrix over `xs`; the upper triangle is computed and mirrored.
pub fn gram_matrix(spec: &KernelSpec, xs: &[FeatureVector]) -> Result<GramMatrix> {
    let n = xs.len();
    if n == 0 {
        return Err(Error::invalid("gram matrix needs at least one input"));
    }
    let dim = xs[0].dim();
    if let Some(bad) = xs.iter().find(|x| x.dim() != dim) {
        return Err(Error::invalid(format!(
            "inputs differ in dimension ({dim} vs {})",
            bad.dim()
        )));
    }
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = finite(spec, spec.eval_raw(xs[i].as_slice(), xs[j].as_slice()))?;
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    Ok(GramMatrix { n, data })
}
