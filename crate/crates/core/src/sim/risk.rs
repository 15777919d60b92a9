//! Bayes risk of the simulated location models and the one-binary / one-continuous
//! illustration.
//!
//! Given `u`, with `Δ = √(βᵀΣβ)` and `wᵢ = πᵢ pᵢ(u)`, the Bayes rule errs with
//! probability `[w₁Φ(−Δ/2 − η/Δ) + w₂Φ(−Δ/2 + η/Δ)] / (w₁ + w₂)`. Averaging that over
//! locations drawn from the mixture gives a Rao–Blackwellized estimate of the risk.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use super::models::{model_beta, model_rho, true_eta, SimulationSpec};
use super::sampling::{draw_features_at, draw_location, rng_for};
use crate::data::{Class, MixedDataset, MixedObservation};
use crate::error::Result;
use crate::math;

/// Monte-Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub draws: usize,
}

fn mean_and_se(values: impl Iterator<Item = f64>) -> RiskEstimate {
    // Welford
    let mut n = 0usize;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for v in values {
        n += 1;
        let delta = v - mean;
        mean += delta / n as f64;
        m2 += delta * (v - mean);
    }
    let var = if n > 1 { m2 / (n - 1) as f64 } else { 0.0 };
    RiskEstimate {
        estimate: mean,
        std_error: math::sqrt(var / n.max(1) as f64),
        draws: n,
    }
}

/// Error probability of the rule `D > 0` given `Δ² = βᵀΣβ` and the log prior odds `η`.
pub fn conditional_risk(delta_sq: f64, eta: f64) -> f64 {
    let w1 = math::sigmoid(eta);
    let w2 = 1.0 - w1;
    if !(delta_sq > 0.0) {
        return w1.min(w2);
    }
    let delta = math::sqrt(delta_sq);
    w1 * math::normal_cdf(-delta / 2.0 - eta / delta) + w2 * math::normal_cdf(-delta / 2.0 + eta / delta)
}

/// `βᵀΣβ` using only the direction's support.
pub(crate) fn delta_sq(spec: &SimulationSpec, u: &[u8]) -> f64 {
    let k = spec.model.support().min(spec.p);
    let beta = model_beta(spec.model, u, k);
    let ubar = u.iter().map(|&b| f64::from(b)).sum::<f64>() / u.len() as f64;
    let rho = model_rho(spec.model, ubar);
    let mut total = 0.0;
    for i in 0..k {
        for j in 0..k {
            total += beta[i] * beta[j] * libm::pow(rho, i.abs_diff(j) as f64);
        }
    }
    total.max(0.0)
}

/// Bayes error probability at location `u`.
pub fn conditional_bayes_risk(spec: &SimulationSpec, u: &[u8]) -> f64 {
    conditional_risk(delta_sq(spec, u), true_eta(spec, u))
}

fn draw_mixture_location<R: Rng + ?Sized>(spec: &SimulationSpec, rng: &mut R) -> Vec<u8> {
    let class = if rng.random::<bool>() { Class::One } else { Class::Two };
    draw_location(spec, class, rng)
}

/// Rao–Blackwellized Bayes risk from `n_draws` mixture locations.
pub fn bayes_risk_mc(spec: &SimulationSpec, n_draws: usize) -> RiskEstimate {
    let mut rng = rng_for(spec.seed, u64::MAX);
    mean_and_se((0..n_draws.max(1)).map(|_| {
        let u = draw_mixture_location(spec, &mut rng);
        conditional_bayes_risk(spec, &u)
    }))
}

/// Raw-counting Bayes risk: draws full observations and counts errors of the exact
/// Bayes rule. Same estimand as [`bayes_risk_mc`], higher variance.
pub fn bayes_risk_counting(spec: &SimulationSpec, n_draws: usize) -> RiskEstimate {
    let mut rng = rng_for(spec.seed, u64::MAX - 1);
    mean_and_se((0..n_draws.max(1)).map(|_| {
        let class = if rng.random::<bool>() { Class::One } else { Class::Two };
        let u = draw_location(spec, class, &mut rng);
        let z = draw_features_at(spec, class, &u, &mut rng);
        let predicted = super::bench::oracle_classify(spec, &z, &u);
        if predicted == class {
            0.0
        } else {
            1.0
        }
    }))
}

/// `n1` class-1 and `n2` class-2 draws from the illustration geometry described at
/// [`illustration_example`] (`p = d = 1`).
pub fn sample_illustration<R: Rng + ?Sized>(n1: usize, n2: usize, rng: &mut R) -> Result<MixedDataset> {
    let mut draw = |class1: bool| {
        let u = rng.random::<bool>();
        let sign = if u { 1.0 } else { -1.0 };
        let e: f64 = rng.sample(StandardNormal);
        let x = if class1 { sign } else { -sign } + e;
        MixedObservation::new(alloc::vec![x], alloc::vec![u8::from(u)])
    };
    let c1 = (0..n1).map(|_| draw(true)).collect::<Result<Vec<_>>>()?;
    let c2 = (0..n2).map(|_| draw(false)).collect::<Result<Vec<_>>>()?;
    MixedDataset::with_dims(c1, c2, 1, 1)
}

/// Monte-Carlo risks for the illustration: equal priors, `U ~ Bernoulli(1/2)` in both
/// classes, class 1 `X | U ~ N(2U − 1, 1)`, class 2 `X | U ~ N(1 − 2U, 1)`.
///
/// Returns `(bayes, best_linear)`: the error of `X·(2U − 1) > 0` and the smallest error
/// of `X + aU > b` over `a, b ∈ [−6, 6]` (step 0.05) together with the `a = b → ∞`
/// limit rule (`U = 1 and X > 0`).
pub fn illustration_example(n_draws: usize, seed: u64) -> (f64, f64) {
    let mut rng = rng_for(seed, 0);
    // Sorted X within each (class, U) cell.
    let mut cells: [Vec<f64>; 4] = Default::default();
    let mut bayes_errors = 0usize;
    let mut limit_errors = 0usize;
    for _ in 0..n_draws {
        let class1 = rng.random::<bool>();
        let u = rng.random::<bool>();
        let sign = if u { 1.0 } else { -1.0 };
        let mean = if class1 { sign } else { -sign };
        let e: f64 = rng.sample(StandardNormal);
        let x = mean + e;
        let says_one = x * sign > 0.0;
        if says_one != class1 {
            bayes_errors += 1;
        }
        if (u && x > 0.0) != class1 {
            limit_errors += 1;
        }
        cells[usize::from(class1) * 2 + usize::from(u)].push(x);
    }
    for c in cells.iter_mut() {
        c.sort_by(|a, b| a.total_cmp(b));
    }
    let count_le = |v: &[f64], t: f64| v.partition_point(|&x| x <= t);
    let n = n_draws as f64;
    let mut best = limit_errors as f64 / n;
    let steps = 240;
    for ia in 0..=steps {
        let a = -6.0 + 0.05 * ia as f64;
        for ib in 0..=steps {
            let b = -6.0 + 0.05 * ib as f64;
            // class 2 wrongly above the threshold, class 1 not above it
            let c2u0 = cells[0].len() - count_le(&cells[0], b);
            let c2u1 = cells[1].len() - count_le(&cells[1], b - a);
            let c1u0 = count_le(&cells[2], b);
            let c1u1 = count_le(&cells[3], b - a);
            let err = (c2u0 + c2u1 + c1u0 + c1u1) as f64 / n;
            if err < best {
                best = err;
            }
        }
    }
    (bayes_errors as f64 / n, best)
}
