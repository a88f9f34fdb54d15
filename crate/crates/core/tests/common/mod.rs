//! Independent reference computations used by the integration tests. None of
//! these go through the crate's own CDF code path.

#![allow(dead_code)]

use latsample_core::PathDelayModel;

pub const TRAPEZOID_STEP_US: f64 = 0.01;

pub fn data_file(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

/// Blue path: 44 us propagation, three equal stages totalling 19 us.
pub fn blue() -> PathDelayModel {
    PathDelayModel::equal_stages(44.0, 19.0, 3).unwrap()
}

/// Green path: 68 us propagation, four equal stages totalling 5 us.
pub fn green() -> PathDelayModel {
    PathDelayModel::equal_stages(68.0, 5.0, 4).unwrap()
}

/// Erlang-k CDF with total mean `mean`: `1 − e^{−λx} Σ_{i<k} (λx)^i / i!`.
pub fn erlang_cdf(k: usize, mean: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let lx = k as f64 / mean * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for i in 1..k {
        term *= lx / i as f64;
        sum += term;
    }
    1.0 - (-lx).exp() * sum
}

fn exp_density(mean: f64, s: f64) -> f64 {
    (-s / mean).exp() / mean
}

fn exp_cdf(mean: f64, s: f64) -> f64 {
    -(-s / mean).exp_m1()
}

/// CDF of the model at each `t`, by iterated trapezoid convolution on a grid
/// of step `h`. Each `t − offset` is snapped to the nearest grid point.
///
/// The densities of all stages but the last are convolved on the grid; the
/// last stage enters through its CDF, `F(x) = ∫ g(s) F_last(x − s) ds`,
/// which keeps the integrand continuous.
pub fn trapezoid_cdf_with_step(model: &PathDelayModel, ts: &[f64], h: f64) -> Vec<f64> {
    let means = model.stage_means_us();
    let offset = model.propagation_us();
    let x_max = ts.iter().map(|t| t - offset).fold(0.0, f64::max);
    if x_max <= 0.0 {
        return vec![0.0; ts.len()];
    }
    let n = (x_max / h).ceil() as usize + 1;
    let (last, rest) = means.split_last().unwrap();

    let finish = |g: Option<&[f64]>, x: f64| -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let Some(g) = g else {
            return exp_cdf(*last, x);
        };
        // x is snapped to the grid; callers pick grid-aligned points
        let m = (x / h).round() as usize;
        let x = m as f64 * h;
        let mut acc = 0.5 * (g[0] * exp_cdf(*last, x) + g[m] * exp_cdf(*last, 0.0));
        for (i, gi) in g.iter().enumerate().take(m).skip(1) {
            acc += gi * exp_cdf(*last, x - i as f64 * h);
        }
        acc *= h;
        acc
    };

    if rest.is_empty() {
        return ts.iter().map(|&t| finish(None, t - offset)).collect();
    }

    let mut g: Vec<f64> = (0..=n)
        .map(|i| exp_density(rest[0], i as f64 * h))
        .collect();
    for &mean in &rest[1..] {
        let f: Vec<f64> = (0..=n).map(|i| exp_density(mean, i as f64 * h)).collect();
        let mut next = vec![0.0; n + 1];
        for (k, slot) in next.iter_mut().enumerate().skip(1) {
            let mut acc = 0.5 * (g[0] * f[k] + g[k] * f[0]);
            for i in 1..k {
                acc += g[i] * f[k - i];
            }
            *slot = acc * h;
        }
        g = next;
    }
    ts.iter().map(|&t| finish(Some(&g), t - offset)).collect()
}

/// Trapezoid convolution at steps `h` and `h/2` combined by one Richardson
/// step, `(4·F(h/2) − F(h)) / 3`, which cancels the `O(h²)` term (about 1e-5
/// for unit-mean stages at `h = 0.01`).
pub fn trapezoid_cdf(model: &PathDelayModel, ts: &[f64]) -> Vec<f64> {
    let coarse = trapezoid_cdf_with_step(model, ts, TRAPEZOID_STEP_US);
    let fine = trapezoid_cdf_with_step(model, ts, TRAPEZOID_STEP_US / 2.0);
    coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect()
}

/// Standard error of a binomial proportion.
pub fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}
