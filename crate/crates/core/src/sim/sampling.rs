use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::models::{model_rho, oracle_params, SimulationSpec};
use crate::data::{Class, MixedDataset, MixedObservation};
use crate::error::Result;
use crate::math;

/// Deterministic generator for `(seed, stream)`; replications use distinct streams.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn draw_location<R: Rng + ?Sized>(spec: &SimulationSpec, class: Class, rng: &mut R) -> Vec<u8> {
    spec.xi
        .iter()
        .map(|x| {
            let p = match class {
                Class::One => 0.5 + x,
                Class::Two => 0.5,
            };
            u8::from(rng.random::<f64>() < p)
        })
        .collect()
}

/// Unit-variance Gaussian with correlation `ρ^{|i−j|}` via the AR(1) recursion
/// `x₁ = e₁, x_k = ρ x_{k−1} + √(1 − ρ²) e_k`.
pub(crate) fn ar1_gaussian<R: Rng + ?Sized>(rho: f64, p: usize, rng: &mut R) -> Vec<f64> {
    let innovation = math::sqrt((1.0 - rho * rho).max(0.0));
    let mut out = Vec::with_capacity(p);
    let mut prev = 0.0;
    for k in 0..p {
        let e: f64 = rng.sample(StandardNormal);
        prev = if k == 0 { e } else { rho * prev + innovation * e };
        out.push(prev);
    }
    out
}

pub(crate) fn draw_observation<R: Rng + ?Sized>(spec: &SimulationSpec, class: Class, rng: &mut R) -> MixedObservation {
    let u = draw_location(spec, class, rng);
    let z = draw_features_at(spec, class, &u, rng);
    MixedObservation { z, u }
}

/// Continuous features of one `class` observation at the fixed location `u`.
pub fn draw_features_at<R: Rng + ?Sized>(spec: &SimulationSpec, class: Class, u: &[u8], rng: &mut R) -> Vec<f64> {
    let ubar = u.iter().map(|&b| f64::from(b)).sum::<f64>() / u.len() as f64;
    let noise = ar1_gaussian(model_rho(spec.model, ubar), spec.p, rng);
    let oracle = oracle_params(spec, u);
    let mean = match class {
        Class::One => oracle.mu1,
        Class::Two => oracle.mu2,
    };
    noise.iter().zip(&mean).map(|(e, m)| e + m).collect()
}

fn draw_set<R: Rng + ?Sized>(spec: &SimulationSpec, n1: usize, n2: usize, rng: &mut R) -> Result<MixedDataset> {
    let c1 = (0..n1).map(|_| draw_observation(spec, Class::One, rng)).collect();
    let c2 = (0..n2).map(|_| draw_observation(spec, Class::Two, rng)).collect();
    MixedDataset::with_dims(c1, c2, spec.p, spec.d)
}

/// Train set of `(n1, n2)` and test set of `(test_n1, test_n2)` from one generator.
pub fn sample_with<R: Rng + ?Sized>(spec: &SimulationSpec, rng: &mut R) -> Result<(MixedDataset, MixedDataset)> {
    spec.validate()?;
    let train = draw_set(spec, spec.n1, spec.n2, rng)?;
    let test = draw_set(spec, spec.test_n1, spec.test_n2, rng)?;
    Ok((train, test))
}

/// `(train, test)` from `spec.seed`.
pub fn sample_dataset(spec: &SimulationSpec) -> Result<(MixedDataset, MixedDataset)> {
    sample_with(spec, &mut rng_for(spec.seed, 0))
}

/// `(train, test)` for replication `rep`, independent of every other replication.
pub fn sample_replication(spec: &SimulationSpec, rep: u64) -> Result<(MixedDataset, MixedDataset)> {
    sample_with(spec, &mut rng_for(spec.seed, rep + 1))
}
