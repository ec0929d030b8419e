use std::fmt;

use crate::error::{Error, Result};
use crate::kernels::{KernelFamily, KernelSpec};
use crate::selection::SearchConfig;
use crate::svr::SvrParams;

/// Hyperparameters in libsvm's command-line form, e.g. `-s 3 -t 2 -c 20 -g 64 -p 1`.
///
/// Only `-s 3` (epsilon-SVR) is accepted. Missing flags take libsvm's
/// defaults: kernel RBF, `C = 1`, `gamma = 1`, `p = 0.1`. `-d` and `-r` set
/// the polynomial degree and `coef0` when present.
#[derive(Debug, Clone)]
pub struct ParamString {
    pub svm_type: u8,
    pub kernel: KernelFamily,
    pub c: f64,
    pub gamma: f64,
    pub p_epsilon: f64,
    pub degree: Option<u32>,
    pub coef0: Option<f64>,
    pub raw: String,
}

/// Equality ignores `raw`, so a rendered-and-reparsed string compares equal.
impl PartialEq for ParamString {
    fn eq(&self, other: &Self) -> bool {
        self.svm_type == other.svm_type
            && self.kernel == other.kernel
            && self.c.to_bits() == other.c.to_bits()
            && self.gamma.to_bits() == other.gamma.to_bits()
            && self.p_epsilon.to_bits() == other.p_epsilon.to_bits()
            && self.degree == other.degree
            && self.coef0.map(f64::to_bits) == other.coef0.map(f64::to_bits)
    }
}

pub const EPSILON_SVR: u8 = 3;

fn parse_number(flag: &str, value: &str) -> Result<f64> {
    let v: f64 = value.parse().map_err(|_| Error::ParamParse {
        flag: flag.into(),
        reason: format!("`{value}` is not a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::ParamParse {
            flag: flag.into(),
            reason: format!("`{value}` is not finite"),
        });
    }
    Ok(v)
}

fn parse_integer(flag: &str, value: &str) -> Result<i64> {
    value.parse().map_err(|_| Error::ParamParse {
        flag: flag.into(),
        reason: format!("`{value}` is not an integer"),
    })
}

pub fn parse_param_string(text: &str) -> Result<ParamString> {
    let mut svm_type: i64 = 0;
    let mut kernel = KernelFamily::Rbf;
    let mut c = 1.0;
    let mut gamma = 1.0;
    let mut p_epsilon = 0.1;
    let mut degree = None;
    let mut coef0 = None;
    let mut seen: Vec<&str> = Vec::new();

    let mut tokens = text.split_whitespace();
    while let Some(flag) = tokens.next() {
        let value = tokens.next().ok_or_else(|| Error::ParamParse {
            flag: flag.into(),
            reason: "missing value".into(),
        })?;
        if seen.contains(&flag) {
            return Err(Error::ParamParse {
                flag: flag.into(),
                reason: "given more than once".into(),
            });
        }
        seen.push(flag);
        match flag {
            "-s" => svm_type = parse_integer(flag, value)?,
            "-t" => {
                let code = parse_integer(flag, value)?;
                kernel = KernelFamily::from_code(code).ok_or_else(|| Error::ParamParse {
                    flag: flag.into(),
                    reason: format!("kernel type {code} is not one of 0, 1, 2, 3"),
                })?;
            }
            "-c" => {
                c = parse_number(flag, value)?;
                if c <= 0.0 {
                    return Err(Error::ParamParse {
                        flag: flag.into(),
                        reason: "C must be positive".into(),
                    });
                }
            }
            "-g" => gamma = parse_number(flag, value)?,
            "-p" => {
                p_epsilon = parse_number(flag, value)?;
                if p_epsilon < 0.0 {
                    return Err(Error::ParamParse {
                        flag: flag.into(),
                        reason: "epsilon must be non-negative".into(),
                    });
                }
            }
            "-d" => {
                let d = parse_integer(flag, value)?;
                degree = Some(u32::try_from(d).ok().filter(|&d| d >= 1).ok_or_else(|| {
                    Error::ParamParse {
                        flag: flag.into(),
                        reason: "degree must be a positive integer".into(),
                    }
                })?);
            }
            "-r" => coef0 = Some(parse_number(flag, value)?),
            _ => {
                return Err(Error::ParamParse {
                    flag: flag.into(),
                    reason: "unknown flag".into(),
                })
            }
        }
    }
    if svm_type != i64::from(EPSILON_SVR) {
        return Err(Error::ParamParse {
            flag: "-s".into(),
            reason: format!("svm type {svm_type} is not epsilon-SVR (3)"),
        });
    }
    Ok(ParamString {
        svm_type: EPSILON_SVR,
        kernel,
        c,
        gamma,
        p_epsilon,
        degree,
        coef0,
        raw: text.to_string(),
    })
}

/// Fixed four decimals with trailing zeros trimmed: `0.0078125` → `0.0078`,
/// `128.0` → `128`.
pub fn format_4dp(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    match s {
        "-0" | "" => "0".to_string(),
        other => other.to_string(),
    }
}

impl ParamString {
    pub fn from_params(params: &SvrParams) -> Self {
        let k = &params.kernel;
        let mut out = Self {
            svm_type: EPSILON_SVR,
            kernel: k.family,
            c: params.c,
            gamma: k.gamma,
            p_epsilon: params.epsilon,
            degree: (k.degree != KernelSpec::DEFAULT_DEGREE).then_some(k.degree),
            coef0: (k.coef0 != KernelSpec::DEFAULT_COEF0).then_some(k.coef0),
            raw: String::new(),
        };
        out.raw = out.render();
        out
    }

    /// Canonical flag order at full precision; parses back to an equal value.
    pub fn render(&self) -> String {
        self.render_with(|v| format!("{v}"))
    }

    /// Same layout with numbers at four decimals, as printed in result blocks.
    pub fn render_display(&self) -> String {
        self.render_with(format_4dp)
    }

    fn render_with(&self, num: impl Fn(f64) -> String) -> String {
        let mut s = format!(
            "-s {} -t {} -c {} -g {} -p {}",
            self.svm_type,
            self.kernel.code(),
            num(self.c),
            num(self.gamma),
            num(self.p_epsilon)
        );
        if let Some(d) = self.degree {
            s.push_str(&format!(" -d {d}"));
        }
        if let Some(r) = self.coef0 {
            s.push_str(&format!(" -r {}", num(r)));
        }
        s
    }

    pub fn kernel_spec(&self) -> KernelSpec {
        KernelSpec::new(self.kernel, self.gamma)
            .with_degree(self.degree.unwrap_or(KernelSpec::DEFAULT_DEGREE))
            .with_coef0(self.coef0.unwrap_or(KernelSpec::DEFAULT_COEF0))
    }

    /// Solver parameters; tolerance and iteration budget come from `config`.
    pub fn to_svr_params(&self, config: &SearchConfig) -> SvrParams {
        SvrParams::new(self.kernel_spec(), self.c, self.p_epsilon)
            .with_tolerance(config.tolerance)
            .with_max_iterations(config.max_iterations)
    }
}

impl fmt::Display for ParamString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
