//! Epsilon-support-vector regression.
//!
//! The dual problem is solved over `2l` variables `z = [α; α*]` with signs
//! `s = [+1; -1]`:
//!
//! ```text
//! min  ½ zᵀQz + pᵀz    s.t.  sᵀz = 0,  0 ≤ z ≤ C
//! Q_ts = s_t s_u K(x_t, x_u),  p = [ε − y; ε + y]
//! ```
//!
//! Each step picks the maximal violating pair of the KKT conditions (lowest
//! index wins ties) and solves the two-variable subproblem analytically. The
//! regression function is `f(x) = Σ βᵢ K(xᵢ, x) + b` with `βᵢ = αᵢ − αᵢ*`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{gram_matrix, FeatureVector, GramMatrix, KernelSpec};
use crate::selection::ScalingParams;

/// Curvature floor for non-positive-definite pairs (sigmoid kernels).
const TAU: f64 = 1e-12;
/// Relative distance to a box bound below which a coefficient is placed on it.
const BOUND_SNAP: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvrParams {
    /// Penalty `C` on residuals outside the tube.
    pub c: f64,
    /// Tube half-width.
    pub epsilon: f64,
    pub kernel: KernelSpec,
    /// Stop once the maximal KKT violation drops to this value.
    pub tolerance: f64,
    pub max_iterations: u64,
}

impl SvrParams {
    pub const DEFAULT_TOLERANCE: f64 = 1e-3;
    pub const DEFAULT_MAX_ITERATIONS: u64 = 10_000_000;

    pub fn new(kernel: KernelSpec, c: f64, epsilon: f64) -> Self {
        Self {
            c,
            epsilon,
            kernel,
            tolerance: Self::DEFAULT_TOLERANCE,
            max_iterations: Self::DEFAULT_MAX_ITERATIONS,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: u64) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::invalid(format!("C must be positive, got {}", self.c)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::invalid(format!(
                "epsilon must be non-negative, got {}",
                self.epsilon
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::invalid("tolerance must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations must be positive"));
        }
        self.kernel.validate()
    }
}

/// A trained regressor. Only points with a non-zero dual coefficient are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct SvrModel {
    /// Position of each support vector in the training set.
    pub support_indices: Vec<usize>,
    pub support_inputs: Vec<FeatureVector>,
    /// `βᵢ = αᵢ − αᵢ*`, aligned with `support_inputs`.
    pub dual_coefficients: Vec<f64>,
    pub bias: f64,
    pub params: SvrParams,
    /// Input dimension seen during training.
    pub dimension: usize,
    /// Min-max parameters of the raw feature, when the model was trained on scaled data.
    pub feature_scaling: Option<ScalingParams>,
    /// Min-max parameters of the raw target, when the model was trained on scaled data.
    pub target_scaling: Option<ScalingParams>,
}

/// Per-step record of a training run.
#[derive(Debug, Clone, Default)]
pub struct SolverTrace {
    /// Dual objective (maximisation form) after each accepted step, starting at 0.
    pub objective: Vec<f64>,
    pub iterations: u64,
    pub final_violation: f64,
}

impl SvrModel {
    pub fn kernel(&self) -> &KernelSpec {
        &self.params.kernel
    }

    pub fn support_vector_count(&self) -> usize {
        self.support_inputs.len()
    }

    pub fn with_scaling(
        mut self,
        feature: Option<ScalingParams>,
        target: Option<ScalingParams>,
    ) -> Self {
        self.feature_scaling = feature;
        self.target_scaling = target;
        self
    }

    pub fn predict(&self, x: &FeatureVector) -> Result<f64> {
        if x.dim() != self.dimension {
            return Err(Error::invalid(format!(
                "query has dimension {}, model expects {}",
                x.dim(),
                self.dimension
            )));
        }
        Ok(self.predict_unchecked(x.as_slice()))
    }

    fn predict_unchecked(&self, x: &[f64]) -> f64 {
        let kernel = &self.params.kernel;
        self.support_inputs
            .iter()
            .zip(&self.dual_coefficients)
            .map(|(sv, &beta)| beta * kernel.eval_raw(sv.as_slice(), x))
            .sum::<f64>()
            + self.bias
    }

    pub fn predict_many(&self, xs: &[FeatureVector]) -> Result<Vec<f64>> {
        xs.iter().map(|x| self.predict(x)).collect()
    }

    /// Expands the pruned coefficients back to one entry per training point.
    pub fn full_coefficients(&self, n: usize) -> Vec<f64> {
        let mut beta = vec![0.0; n];
        for (&i, &b) in self.support_indices.iter().zip(&self.dual_coefficients) {
            if i < n {
                beta[i] = b;
            }
        }
        beta
    }
}

pub fn predict(model: &SvrModel, x: &FeatureVector) -> Result<f64> {
    model.predict(x)
}

/// Dual objective in maximisation form:
/// `Σ yᵢβᵢ − ε Σ |βᵢ| − ½ βᵀKβ`.
pub fn dual_objective(coefficients: &[f64], gram: &GramMatrix, ys: &[f64], epsilon: f64) -> f64 {
    let n = coefficients.len();
    let mut quad = 0.0;
    for i in 0..n {
        if coefficients[i] == 0.0 {
            continue;
        }
        let row = gram.row(i);
        let k_beta: f64 = row.iter().zip(coefficients).map(|(k, b)| k * b).sum();
        quad += coefficients[i] * k_beta;
    }
    let linear: f64 = coefficients
        .iter()
        .zip(ys)
        .map(|(b, y)| y * b - epsilon * b.abs())
        .sum();
    linear - 0.5 * quad
}

/// Largest violation of the dual feasibility and complementarity conditions
/// of `model` on its training data.
///
/// Covers the equality `Σβ = 0`, the box `|β| ≤ C`, and per point:
/// `β = 0 ⇒ |r| ≤ ε`, `0 < |β| < C ⇒ r = ±ε`, `|β| = C ⇒ r beyond ±ε`,
/// where `r = y − f(x)`.
pub fn kkt_violation(model: &SvrModel, xs: &[FeatureVector], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::invalid("xs and ys differ in length"));
    }
    let c = model.params.c;
    let eps = model.params.epsilon;
    let beta = model.full_coefficients(xs.len());
    let mut worst = beta.iter().sum::<f64>().abs();
    for ((x, &y), &b) in xs.iter().zip(ys).zip(&beta) {
        let r = y - model.predict(x)?;
        let v = if b == 0.0 {
            (r.abs() - eps).max(0.0)
        } else {
            let target = eps * b.signum();
            if b.abs() < c {
                (r - target).abs()
            } else {
                // at the bound the residual may sit anywhere beyond the tube edge
                let box_excess = b.abs() - c;
                box_excess.max(if b > 0.0 { target - r } else { r - target }).max(0.0)
            }
        };
        worst = worst.max(v);
    }
    Ok(worst)
}

pub fn train(xs: &[FeatureVector], ys: &[f64], params: &SvrParams) -> Result<SvrModel> {
    Ok(fit(xs, ys, params, false)?.0)
}

/// Trains and records the dual objective after every solver step.
pub fn train_traced(
    xs: &[FeatureVector],
    ys: &[f64],
    params: &SvrParams,
) -> Result<(SvrModel, SolverTrace)> {
    fit(xs, ys, params, true)
}

fn fit(
    xs: &[FeatureVector],
    ys: &[f64],
    params: &SvrParams,
    trace: bool,
) -> Result<(SvrModel, SolverTrace)> {
    params.validate()?;
    if xs.is_empty() {
        return Err(Error::invalid("training set is empty"));
    }
    if xs.len() != ys.len() {
        return Err(Error::invalid(format!(
            "{} inputs but {} targets",
            xs.len(),
            ys.len()
        )));
    }
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::invalid("training targets must be finite"));
    }
    let gram = gram_matrix(&params.kernel, xs)?;
    let mut solver = Smo::new(&gram, ys, params.c, params.epsilon);
    let mut log = SolverTrace::default();
    if trace {
        log.objective.push(0.0);
    }
    let violation = loop {
        let (i, j, gap) = solver.select_working_set();
        if gap <= params.tolerance {
            break gap.max(0.0);
        }
        if log.iterations >= params.max_iterations {
            return Err(Error::Convergence {
                iterations: log.iterations,
                violation: gap,
            });
        }
        solver.step(i, j);
        log.iterations += 1;
        if trace {
            log.objective.push(-solver.primal_value());
        }
    };
    log.final_violation = violation;

    let l = ys.len();
    let beta: Vec<f64> = (0..l).map(|i| solver.alpha[i] - solver.alpha[i + l]).collect();
    let mut support_indices = Vec::new();
    let mut support_inputs = Vec::new();
    let mut dual_coefficients = Vec::new();
    for (i, &b) in beta.iter().enumerate() {
        if b != 0.0 {
            support_indices.push(i);
            support_inputs.push(xs[i].clone());
            dual_coefficients.push(b);
        }
    }
    let bias = if support_indices.is_empty() {
        constant_bias(ys, params.epsilon)
    } else {
        solver.bias()
    };
    let model = SvrModel {
        support_indices,
        support_inputs,
        dual_coefficients,
        bias,
        params: *params,
        dimension: xs[0].dim(),
        feature_scaling: None,
        target_scaling: None,
    };
    Ok((model, log))
}

/// Bias of a model without support vectors: the target mean, clamped into
/// the interval `[max y − ε, min y + ε]` where every residual fits the tube.
fn constant_bias(ys: &[f64], epsilon: f64) -> f64 {
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let max = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = ys.iter().copied().fold(f64::INFINITY, f64::min);
    let (lo, hi) = (max - epsilon, min + epsilon);
    if lo <= hi {
        mean.clamp(lo, hi)
    } else {
        0.5 * (lo + hi)
    }
}

struct Smo<'a> {
    gram: &'a GramMatrix,
    l: usize,
    c: f64,
    alpha: Vec<f64>,
    grad: Vec<f64>,
    linear: Vec<f64>,
    diag: Vec<f64>,
}

impl<'a> Smo<'a> {
    fn new(gram: &'a GramMatrix, ys: &[f64], c: f64, epsilon: f64) -> Self {
        let l = ys.len();
        let linear: Vec<f64> = ys
            .iter()
            .map(|y| epsilon - y)
            .chain(ys.iter().map(|y| epsilon + y))
            .collect();
        Self {
            gram,
            l,
            c,
            alpha: vec![0.0; 2 * l],
            grad: linear.clone(),
            linear,
            diag: (0..l).map(|p| gram.get(p, p)).collect(),
        }
    }

    #[inline]
    fn sign(&self, t: usize) -> f64 {
        if t < self.l {
            1.0
        } else {
            -1.0
        }
    }

    #[inline]
    fn point(&self, t: usize) -> usize {
        if t < self.l {
            t
        } else {
            t - self.l
        }
    }

    /// Working pair `(i, j)` and the maximal KKT gap `m − M`. `i` is the
    /// maximal violator; `j` maximises the second-order decrease of the
    /// objective among the variables violating against `i`. Ties go to the
    /// lowest index.
    fn select_working_set(&self) -> (usize, usize, f64) {
        let (l, c) = (self.l, self.c);
        let (alpha_pos, alpha_neg) = self.alpha.split_at(l);
        let (grad_pos, grad_neg) = self.grad.split_at(l);

        // For α_t the violation value is −G_t, for α*_t it is +G_t.
        let mut gmax = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..l {
            if alpha_pos[t] < c && -grad_pos[t] > gmax {
                gmax = -grad_pos[t];
                i = t;
            }
        }
        for t in 0..l {
            if alpha_neg[t] > 0.0 && grad_neg[t] > gmax {
                gmax = grad_neg[t];
                i = t + l;
            }
        }
        if i == usize::MAX {
            return (0, 0, 0.0);
        }

        let row_i = self.gram.row(self.point(i));
        let kii = self.diag[self.point(i)];
        let mut gmin = f64::INFINITY;
        let mut best_gain = f64::INFINITY;
        let mut j = usize::MAX;
        let mut consider = |t: usize, p: usize, v: f64| {
            gmin = gmin.min(v);
            let b = gmax - v;
            if b > 0.0 {
                let mut a = kii + self.diag[p] - 2.0 * row_i[p];
                if a <= 0.0 {
                    a = TAU;
                }
                let gain = -(b * b) / a;
                if gain < best_gain {
                    best_gain = gain;
                    j = t;
                }
            }
        };
        for t in 0..l {
            if alpha_pos[t] > 0.0 {
                consider(t, t, -grad_pos[t]);
            }
        }
        for t in 0..l {
            if alpha_neg[t] < c {
                consider(t + l, t, grad_neg[t]);
            }
        }
        if j == usize::MAX {
            return (0, 0, 0.0f64.min(gmax - gmin));
        }
        (i, j, gmax - gmin)
    }

    fn step(&mut self, i: usize, j: usize) {
        let (pi, pj) = (self.point(i), self.point(j));
        let (si, sj) = (self.sign(i), self.sign(j));
        let kij = self.gram.get(pi, pj);
        let mut quad = self.gram.get(pi, pi) + self.gram.get(pj, pj) - 2.0 * kij;
        if quad <= 0.0 {
            quad = TAU;
        }
        let c = self.c;
        let (old_i, old_j) = (self.alpha[i], self.alpha[j]);
        let (mut ai, mut aj) = (old_i, old_j);

        if si != sj {
            let delta = (-self.grad[i] - self.grad[j]) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let delta = (self.grad[i] - self.grad[j]) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
        }
        let (ai, aj) = (self.snap(ai), self.snap(aj));
        self.alpha[i] = ai;
        self.alpha[j] = aj;

        let (di, dj) = (ai - old_i, aj - old_j);
        let (ci, cj) = (si * di, sj * dj);
        let (row_i, row_j) = (self.gram.row(pi), self.gram.row(pj));
        let (pos, neg) = self.grad.split_at_mut(self.l);
        for (((gp, gn), ki), kj) in pos.iter_mut().zip(neg.iter_mut()).zip(row_i).zip(row_j) {
            let change = ci * ki + cj * kj;
            *gp += change;
            *gn -= change;
        }
    }

    /// Moves a value lying within rounding distance of 0 or C onto the bound,
    /// so that bound membership does not depend on the last ulp.
    #[inline]
    fn snap(&self, a: f64) -> f64 {
        let eps = BOUND_SNAP * self.c;
        if a <= eps {
            0.0
        } else if a >= self.c - eps {
            self.c
        } else {
            a
        }
    }

    /// `½ zᵀQz + pᵀz`, using `Qz = G − p`.
    fn primal_value(&self) -> f64 {
        self.alpha
            .iter()
            .zip(&self.grad)
            .zip(&self.linear)
            .map(|((a, g), p)| a * (g + p))
            .sum::<f64>()
            * 0.5
    }

    /// Bias from the KKT equalities: mean over free variables, else the
    /// midpoint of the feasible interval.
    fn bias(&self) -> f64 {
        let mut ub = f64::INFINITY;
        let mut lb = f64::NEG_INFINITY;
        let mut free_sum = 0.0;
        let mut free = 0usize;
        for t in 0..2 * self.l {
            let yg = self.sign(t) * self.grad[t];
            let positive = t < self.l;
            if self.alpha[t] >= self.c {
                if positive {
                    lb = lb.max(yg);
                } else {
                    ub = ub.min(yg);
                }
            } else if self.alpha[t] <= 0.0 {
                if positive {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else {
                free += 1;
                free_sum += yg;
            }
        }
        let rho = if free > 0 {
            free_sum / free as f64
        } else {
            0.5 * (ub + lb)
        };
        -rho
    }
}
