//! Versioned plain-text model files.
//!
//! ```text
//! effort-svr-model 1
//! kernel 2
//! gamma 1
//! coef0 0
//! degree 3
//! c 0.9989
//! epsilon 0
//! tolerance 0.001
//! max_iterations 10000000
//! dimension 1
//! bias 0.0123
//! feature_scaling 12.5 410
//! target_scaling none
//! support_vectors 2
//! 0 0.5 0.25
//! 3 -0.5 0.75
//! end
//! ```
//!
//! Support-vector lines are `training-index coefficient x1 .. xd`. Numbers use
//! the shortest decimal form that parses back to the same `f64`, so a round
//! trip is bit-exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::kernels::{FeatureVector, KernelFamily, KernelSpec};
use crate::selection::ScalingParams;
use crate::svr::{SvrModel, SvrParams};

pub const MODEL_FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "effort-svr-model";

fn scaling_line(p: Option<ScalingParams>) -> String {
    match p {
        Some(p) => format!("{} {}", p.min_value, p.max_value),
        None => "none".to_string(),
    }
}

pub fn render_model(model: &SvrModel) -> String {
    let p = &model.params;
    let k = &p.kernel;
    let mut out = String::new();
    writeln!(out, "{MAGIC} {MODEL_FORMAT_VERSION}").unwrap();
    writeln!(out, "kernel {}", k.family.code()).unwrap();
    writeln!(out, "gamma {}", k.gamma).unwrap();
    writeln!(out, "coef0 {}", k.coef0).unwrap();
    writeln!(out, "degree {}", k.degree).unwrap();
    writeln!(out, "c {}", p.c).unwrap();
    writeln!(out, "epsilon {}", p.epsilon).unwrap();
    writeln!(out, "tolerance {}", p.tolerance).unwrap();
    writeln!(out, "max_iterations {}", p.max_iterations).unwrap();
    writeln!(out, "dimension {}", model.dimension).unwrap();
    writeln!(out, "bias {}", model.bias).unwrap();
    writeln!(out, "feature_scaling {}", scaling_line(model.feature_scaling)).unwrap();
    writeln!(out, "target_scaling {}", scaling_line(model.target_scaling)).unwrap();
    writeln!(out, "support_vectors {}", model.support_inputs.len()).unwrap();
    for ((idx, coef), x) in model
        .support_indices
        .iter()
        .zip(&model.dual_coefficients)
        .zip(&model.support_inputs)
    {
        write!(out, "{idx} {coef}").unwrap();
        for v in x.as_slice() {
            write!(out, " {v}").unwrap();
        }
        out.push('\n');
    }
    out.push_str("end\n");
    out
}

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next_line(&mut self) -> Result<(usize, &'a str)> {
        self.inner
            .next()
            .map(|(i, l)| (i + 1, l.trim()))
            .ok_or_else(|| format_err("file is truncated"))
    }

    fn field(&mut self, key: &str) -> Result<&'a str> {
        let (n, line) = self.next_line()?;
        match line.split_once(' ') {
            Some((k, v)) if k == key => Ok(v.trim()),
            _ => Err(format_err(format!("line {n}: expected `{key} <value>`, found `{line}`"))),
        }
    }

    fn number<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let v = self.field(key)?;
        v.parse()
            .map_err(|_| format_err(format!("`{key}` value `{v}` is not valid")))
    }

    fn scaling(&mut self, key: &str) -> Result<Option<ScalingParams>> {
        let v = self.field(key)?;
        if v == "none" {
            return Ok(None);
        }
        let parts: Vec<&str> = v.split_whitespace().collect();
        let parse = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| format_err(format!("`{key}` value `{s}` is not a number")))
        };
        match parts.as_slice() {
            [lo, hi] => Ok(Some(
                ScalingParams::new(parse(lo)?, parse(hi)?).map_err(|e| format_err(e.to_string()))?,
            )),
            _ => Err(format_err(format!("`{key}` needs `min max` or `none`"))),
        }
    }
}

pub fn parse_model(text: &str) -> Result<SvrModel> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let (_, header) = lines.next_line()?;
    let version = match header.split_once(' ') {
        Some((MAGIC, v)) => v
            .trim()
            .parse::<u32>()
            .map_err(|_| format_err(format!("bad version `{v}`")))?,
        _ => return Err(format_err("not an effort-svr model file")),
    };
    if version != MODEL_FORMAT_VERSION {
        return Err(format_err(format!(
            "model format version {version} is not supported (expected {MODEL_FORMAT_VERSION})"
        )));
    }
    let code: i64 = lines.number("kernel")?;
    let family = KernelFamily::from_code(code)
        .ok_or_else(|| format_err(format!("unknown kernel code {code}")))?;
    let kernel = KernelSpec {
        family,
        gamma: lines.number("gamma")?,
        coef0: lines.number("coef0")?,
        degree: lines.number("degree")?,
    };
    let c = lines.number("c")?;
    let epsilon = lines.number("epsilon")?;
    let params = SvrParams::new(kernel, c, epsilon)
        .with_tolerance(lines.number("tolerance")?)
        .with_max_iterations(lines.number("max_iterations")?);
    params.validate().map_err(|e| format_err(e.to_string()))?;
    let dimension: usize = lines.number("dimension")?;
    let bias: f64 = lines.number("bias")?;
    let feature_scaling = lines.scaling("feature_scaling")?;
    let target_scaling = lines.scaling("target_scaling")?;
    let count: usize = lines.number("support_vectors")?;

    let mut support_indices = Vec::with_capacity(count);
    let mut dual_coefficients = Vec::with_capacity(count);
    let mut support_inputs = Vec::with_capacity(count);
    for _ in 0..count {
        let (n, line) = lines.next_line()?;
        if line == "end" {
            return Err(format_err(format!(
                "line {n}: expected {count} support vectors, found {}",
                support_inputs.len()
            )));
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != dimension + 2 {
            return Err(format_err(format!(
                "line {n}: expected {} fields, found {}",
                dimension + 2,
                fields.len()
            )));
        }
        let bad = |s: &str| format_err(format!("line {n}: `{s}` is not a number"));
        support_indices.push(fields[0].parse().map_err(|_| bad(fields[0]))?);
        dual_coefficients.push(fields[1].parse().map_err(|_| bad(fields[1]))?);
        let x = fields[2..]
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| bad(s)))
            .collect::<Result<Vec<_>>>()?;
        support_inputs.push(FeatureVector::new(x).map_err(|e| format_err(e.to_string()))?);
    }
    let (n, end) = lines.next_line()?;
    if end != "end" {
        return Err(format_err(format!("line {n}: expected `end`, found `{end}`")));
    }
    Ok(SvrModel {
        support_indices,
        support_inputs,
        dual_coefficients,
        bias,
        params,
        dimension,
        feature_scaling,
        target_scaling,
    })
}

pub fn save_model(path: impl AsRef<Path>, model: &SvrModel) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, render_model(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<SvrModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_model(&text)
}
