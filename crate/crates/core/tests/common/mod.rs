//! Test-only oracles and fixtures, written without reference to the solver.

#![allow(dead_code)]

use effort_svr::LabeledDataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Kernel matrix from the textbook formulas. `family`: 0 linear, 1 poly,
/// 2 rbf, 3 sigmoid; polynomial degree 3 and coef0 0.
pub fn kernel_matrix(family: u8, gamma: f64, xs: &[f64]) -> Vec<Vec<f64>> {
    xs.iter()
        .map(|&a| xs.iter().map(|&b| kernel(family, gamma, a, b)).collect())
        .collect()
}

pub fn kernel(family: u8, gamma: f64, a: f64, b: f64) -> f64 {
    match family {
        0 => a * b,
        1 => (gamma * a * b).powi(3),
        2 => (-gamma * (a - b) * (a - b)).exp(),
        3 => (gamma * a * b).tanh(),
        _ => unreachable!(),
    }
}

pub struct OracleSolution {
    /// `alpha_i - alpha_i*`.
    pub beta: Vec<f64>,
    pub bias: f64,
    /// Dual objective in maximisation form.
    pub objective: f64,
    pub iterations: usize,
}

/// Dual objective `Σ yβ − ε Σ|β| − ½ βᵀKβ`.
pub fn dual_value(k: &[Vec<f64>], y: &[f64], eps: f64, beta: &[f64]) -> f64 {
    let n = y.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += beta[i] * k[i][j] * beta[j];
        }
    }
    (0..n).map(|i| y[i] * beta[i] - eps * beta[i].abs()).sum::<f64>() - 0.5 * quad
}

/// Projects `v` onto `{z ∈ [0, c]^{2n} : Σ z_i − Σ z_{n+i} = 0}` by bisection on
/// the multiplier of the equality constraint.
fn project(v: &[f64], n: usize, c: f64) -> Vec<f64> {
    let sign = |t: usize| if t < n { 1.0 } else { -1.0 };
    let at = |lam: f64| -> (Vec<f64>, f64) {
        let z: Vec<f64> = (0..2 * n).map(|t| (v[t] - lam * sign(t)).clamp(0.0, c)).collect();
        let s = (0..2 * n).map(|t| sign(t) * z[t]).sum();
        (z, s)
    };
    // The signed sum is non-increasing in lam.
    let span = v.iter().fold(0.0f64, |m, x| m.max(x.abs())) + c + 1.0;
    let (mut lo, mut hi) = (-span, span);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if at(mid).1 > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * span {
            break;
        }
    }
    at(0.5 * (lo + hi)).0
}

/// Solves the ε-SVR dual over `z = [α; α*]` with FISTA (accelerated projected
/// gradient, adaptive restart), then recovers the bias from the KKT
/// conditions on the residuals.
pub fn qp_oracle(k: &[Vec<f64>], y: &[f64], c: f64, eps: f64, max_iter: usize) -> OracleSolution {
    let n = y.len();
    let sign = |t: usize| if t < n { 1.0 } else { -1.0 };
    let idx = |t: usize| if t < n { t } else { t - n };
    // f(z) = ½ zᵀQz + pᵀz with Q_tu = s_t s_u K, p = [ε − y; ε + y].
    let p: Vec<f64> = (0..2 * n)
        .map(|t| if t < n { eps - y[t] } else { eps + y[t - n] })
        .collect();
    let grad = |z: &[f64]| -> Vec<f64> {
        let beta: Vec<f64> = (0..n).map(|i| z[i] - z[i + n]).collect();
        (0..2 * n)
            .map(|t| {
                let kb: f64 = (0..n).map(|j| k[idx(t)][j] * beta[j]).sum();
                sign(t) * kb + p[t]
            })
            .collect()
    };
    let f = |z: &[f64]| -> f64 {
        let beta: Vec<f64> = (0..n).map(|i| z[i] - z[i + n]).collect();
        let mut quad = 0.0;
        for i in 0..n {
            for j in 0..n {
                quad += beta[i] * k[i][j] * beta[j];
            }
        }
        0.5 * quad + (0..2 * n).map(|t| p[t] * z[t]).sum::<f64>()
    };
    // Gershgorin bound on λmax(K), doubled for the 2n system.
    let lk = k
        .iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    let lip = (2.0 * lk).max(1e-12);

    let mut z = vec![0.0; 2 * n];
    let mut w = z.clone();
    let mut t_k = 1.0f64;
    let mut fz = f(&z);
    let mut iterations = 0;
    for it in 0..max_iter {
        iterations = it + 1;
        let g = grad(&w);
        let step: Vec<f64> = (0..2 * n).map(|t| w[t] - g[t] / lip).collect();
        let z_next = project(&step, n, c);
        let f_next = f(&z_next);
        let moved = z_next
            .iter()
            .zip(&z)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        // A plain projected step (t_k = 1) never increases f beyond rounding,
        // so only momentum steps are rejected.
        if f_next > fz && t_k > 1.0 {
            t_k = 1.0;
            w = z.clone();
            continue;
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t_k * t_k).sqrt());
        let mom = (t_k - 1.0) / t_next;
        w = (0..2 * n).map(|t| z_next[t] + mom * (z_next[t] - z[t])).collect();
        z = z_next;
        fz = f_next;
        t_k = t_next;
        if it % 50 == 49 || moved <= f64::EPSILON * c {
            // Fixed-point residual of the projected gradient map at z.
            let g = grad(&z);
            let probe: Vec<f64> = (0..2 * n).map(|t| z[t] - g[t] / lip).collect();
            let pz = project(&probe, n, c);
            let residual = pz.iter().zip(&z).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            if residual * lip <= 1e-12 {
                break;
            }
        }
    }
    // ε > 0 never has both α_i and α_i* positive at the optimum; with ε = 0
    // only the difference matters.
    let beta: Vec<f64> = (0..n).map(|i| z[i] - z[i + n]).collect();
    let bias = kkt_bias(k, y, c, eps, &beta);
    OracleSolution {
        objective: dual_value(k, y, eps, &beta),
        beta,
        bias,
        iterations,
    }
}

/// Bias from `r_i = y_i − Σ_j β_j K_ij`: each coefficient strictly inside the
/// box pins `b = r_i ∓ ε`; otherwise the midpoint of the interval allowed by
/// the bound coefficients. With every coefficient zero any `b` in
/// `[max y − ε, min y + ε]` is optimal and the target mean, clamped into that
/// interval, is used.
pub fn kkt_bias(k: &[Vec<f64>], y: &[f64], c: f64, eps: f64, beta: &[f64]) -> f64 {
    let n = y.len();
    let tol = 1e-9 * c.max(1.0);
    if beta.iter().all(|b| b.abs() <= tol) {
        let mean = y.iter().sum::<f64>() / n as f64;
        let hi = y.iter().copied().fold(f64::INFINITY, f64::min) + eps;
        let lo = y.iter().copied().fold(f64::NEG_INFINITY, f64::max) - eps;
        return if lo <= hi { mean.clamp(lo, hi) } else { 0.5 * (lo + hi) };
    }
    let mut pinned = Vec::new();
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..n {
        let r = y[i] - (0..n).map(|j| beta[j] * k[i][j]).sum::<f64>();
        let b = beta[i];
        if b > tol && b < c - tol {
            pinned.push(r - eps);
        } else if b < -tol && b > -c + tol {
            pinned.push(r + eps);
        } else if b >= c - tol {
            hi = hi.min(r - eps);
        } else if b <= -c + tol {
            lo = lo.max(r + eps);
        } else {
            lo = lo.max(r - eps);
            hi = hi.min(r + eps);
        }
    }
    if pinned.is_empty() {
        0.5 * (lo + hi)
    } else {
        pinned.iter().sum::<f64>() / pinned.len() as f64
    }
}

/// Width of the interval of optimal biases when no coefficient is free;
/// zero when the bias is pinned.
pub fn bias_slack(k: &[Vec<f64>], y: &[f64], c: f64, eps: f64, beta: &[f64]) -> f64 {
    let n = y.len();
    let tol = 1e-9 * c.max(1.0);
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..n {
        let r = y[i] - (0..n).map(|j| beta[j] * k[i][j]).sum::<f64>();
        let b = beta[i];
        if b.abs() > tol && b.abs() < c - tol {
            return 0.0;
        } else if b >= c - tol {
            hi = hi.min(r - eps);
        } else if b <= -c + tol {
            lo = lo.max(r + eps);
        } else {
            lo = lo.max(r - eps);
            hi = hi.min(r + eps);
        }
    }
    (hi - lo).max(0.0)
}

/// 84 projects with UCP uniform on [50, 600] and effort `1.2·ucp^1.1` times
/// `1 + N(0, 0.02)` noise, from a fixed ChaCha seed.
pub fn power_law_84(seed: u64) -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.02).unwrap();
    let pairs: Vec<(f64, f64)> = (0..84)
        .map(|_| {
            let ucp: f64 = rng.gen_range(50.0..600.0);
            let effort = 1.2 * ucp.powf(1.1) * (1.0 + noise.sample(&mut rng));
            (ucp, effort)
        })
        .collect();
    LabeledDataset::from_pairs(&pairs).unwrap()
}

pub fn csv_of(data: &LabeledDataset) -> String {
    effort_svr::pipeline::write_effort_csv(data)
}
