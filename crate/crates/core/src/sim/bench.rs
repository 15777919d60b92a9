//! Replicated experiments over simulated data.
//!
//! Every replication draws its own train/test pair from stream `rep + 1` of the
//! spec's seed, so results do not depend on scheduling. Drivers accept a `map`
//! strategy that runs replications; [`serial`] runs them in order and the `slm` crate
//! supplies a parallel one.

use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

use super::models::{oracle_params, SimulationSpec};
use super::risk::bayes_risk_mc;
use super::sampling::{rng_for, sample_replication};
use crate::baselines::{self, tune_dsda, tune_plg};
use crate::classifier::{classify_score, hamming_ball};
use crate::data::{Class, MixedDataset, MixedObservation};
use crate::error::{Error, Result};
use crate::linalg;
use crate::moments;
use crate::tuning::{fit_tuned, CvScheme, TuneGrid, TuneOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Slm,
    Plg,
    Dsda,
    /// The exact Bayes rule with oracle parameters (reference only).
    Bayes,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Slm => "SLM",
            Method::Plg => "PLG",
            Method::Dsda => "DSDA",
            Method::Bayes => "Bayes",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "slm" => Some(Method::Slm),
            "plg" => Some(Method::Plg),
            "dsda" => Some(Method::Dsda),
            "bayes" => Some(Method::Bayes),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchConfig {
    pub tune: TuneOptions,
}

impl BenchConfig {
    pub fn with_cv(mut self, cv: CvScheme) -> Self {
        self.tune.cv = cv;
        self
    }
}

/// Test errors of one replication, one entry per requested method.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationResult {
    pub rep: u64,
    pub errors: Vec<(Method, Result<f64>)>,
}

/// Bayes rule with the model's true parameters.
pub fn oracle_classify(spec: &SimulationSpec, z: &[f64], u: &[u8]) -> Class {
    let o = oracle_params(spec, u);
    // midpoint (μ₁ + μ₂)/2 is zero
    classify_score(linalg::dot(&o.beta, z) + o.eta)
}

fn oracle_error(spec: &SimulationSpec, test: &MixedDataset) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::EmptySample("test set"));
    }
    let wrong = test
        .iter_labelled()
        .filter(|(c, o)| oracle_classify(spec, &o.z, &o.u) != *c)
        .count();
    Ok(wrong as f64 / test.len() as f64)
}

fn method_error(
    method: Method,
    spec: &SimulationSpec,
    train: &MixedDataset,
    test: &MixedDataset,
    config: &BenchConfig,
) -> Result<f64> {
    match method {
        Method::Slm => {
            let grid = TuneGrid::default_for(train)?;
            fit_tuned(train, &grid, &config.tune)?.model.error_rate(test)
        }
        Method::Dsda => {
            let t = tune_dsda(train, config.tune.cv, &config.tune.solver)?;
            baselines::baseline_error_rate(&t.model, test)
        }
        Method::Plg => {
            let t = tune_plg(train, config.tune.cv, &config.tune.logistic)?;
            baselines::baseline_error_rate(&t.model, test)
        }
        Method::Bayes => oracle_error(spec, test),
    }
}

/// Fresh train/test draw, tuning and test error for each method.
pub fn run_replication(spec: &SimulationSpec, methods: &[Method], rep: u64, config: &BenchConfig) -> ReplicationResult {
    let errors = match sample_replication(spec, rep) {
        Ok((train, test)) => methods
            .iter()
            .map(|&m| (m, method_error(m, spec, &train, &test, config)))
            .collect(),
        Err(e) => methods.iter().map(|&m| (m, Err(e.clone()))).collect(),
    };
    ReplicationResult { rep, errors }
}

/// Runs `f` over the replication indices in order.
pub fn serial(f: &(dyn Fn(u64) -> ReplicationResult + Sync), reps: Range<u64>) -> Vec<ReplicationResult> {
    reps.map(f).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub method: Method,
    pub mean: f64,
    /// Sample standard deviation across successful replications.
    pub sd: f64,
    pub replications: usize,
    pub failures: usize,
    /// First failure message, if any.
    pub first_failure: Option<String>,
}

/// Mean and sd per method, in the order of `methods`.
pub fn summarize(methods: &[Method], results: &[ReplicationResult]) -> Vec<BenchRow> {
    methods
        .iter()
        .map(|&m| {
            let mut values = Vec::new();
            let mut failures = 0;
            let mut first_failure = None;
            for r in results {
                for (method, e) in &r.errors {
                    if *method != m {
                        continue;
                    }
                    match e {
                        Ok(v) => values.push(*v),
                        Err(err) => {
                            failures += 1;
                            if first_failure.is_none() {
                                log::warn!("{} failed in replication {}: {err}", m.name(), r.rep);
                                first_failure = Some(alloc::format!("{err}"));
                            }
                        }
                    }
                }
            }
            let n = values.len();
            let mean = if n > 0 {
                values.iter().sum::<f64>() / n as f64
            } else {
                f64::NAN
            };
            let sd = if n > 1 {
                crate::math::sqrt(values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64)
            } else {
                0.0
            };
            BenchRow {
                method: m,
                mean,
                sd,
                replications: n,
                failures,
                first_failure,
            }
        })
        .collect()
}

pub type ReplicationMap<'a> =
    &'a dyn Fn(&(dyn Fn(u64) -> ReplicationResult + Sync), Range<u64>) -> Vec<ReplicationResult>;

/// Benchmark table over `replications` independent draws.
pub fn benchmark_with(
    spec: &SimulationSpec,
    methods: &[Method],
    replications: u64,
    config: &BenchConfig,
    map: ReplicationMap<'_>,
) -> Result<Vec<BenchRow>> {
    spec.validate()?;
    if replications == 0 {
        return Err(Error::InvalidParameter("replications must be at least 1".into()));
    }
    let run = |rep: u64| run_replication(spec, methods, rep, config);
    let results = map(&run, 0..replications);
    Ok(summarize(methods, &results))
}

pub fn benchmark(
    spec: &SimulationSpec,
    methods: &[Method],
    replications: u64,
    config: &BenchConfig,
) -> Result<Vec<BenchRow>> {
    benchmark_with(spec, methods, replications, config, &serial)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegretRow {
    pub n: usize,
    pub method: Method,
    pub error: f64,
    pub bayes_risk: f64,
    pub regret: f64,
}

/// Mean test error minus Monte-Carlo Bayes risk for each total size `n` (split evenly).
pub fn regret_curve_with(
    spec: &SimulationSpec,
    n_values: &[usize],
    methods: &[Method],
    replications: u64,
    bayes_draws: usize,
    config: &BenchConfig,
    map: ReplicationMap<'_>,
) -> Result<Vec<RegretRow>> {
    if n_values.iter().any(|n| n % 2 != 0 || *n < 4) {
        return Err(Error::InvalidParameter(
            "sample sizes must be even and at least 4".into(),
        ));
    }
    let bayes = bayes_risk_mc(spec, bayes_draws).estimate;
    let mut rows = Vec::new();
    for &n in n_values {
        let sized = spec.clone().with_sizes(n / 2, n / 2);
        for row in benchmark_with(&sized, methods, replications, config, map)? {
            rows.push(RegretRow {
                n,
                method: row.method,
                error: row.mean,
                bayes_risk: bayes,
                regret: row.mean - bayes,
            });
        }
    }
    Ok(rows)
}

pub fn regret_curve(
    spec: &SimulationSpec,
    n_values: &[usize],
    methods: &[Method],
    replications: u64,
    bayes_draws: usize,
    config: &BenchConfig,
) -> Result<Vec<RegretRow>> {
    regret_curve_with(spec, n_values, methods, replications, bayes_draws, config, &serial)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRow {
    pub n: usize,
    pub sup_error_mean: f64,
}

/// Uniform error of the class-1 kernel mean over the Hamming ball of `radius` around
/// the all-zeros location: for each `n`, the average over `probes` seeds of
/// `max_{u ∈ B} ‖μ̂₁(u) − μ₁(u)‖_∞` from `n` class-1 draws at bandwidth `theta`.
pub fn concentration_probe(
    spec: &SimulationSpec,
    n_list: &[usize],
    radius: usize,
    theta: f64,
    probes: usize,
) -> Result<Vec<ProbeRow>> {
    spec.validate()?;
    crate::kernel::check_theta(theta)?;
    if probes == 0 {
        return Err(Error::InvalidParameter("need at least one probe".into()));
    }
    let center = alloc::vec![0u8; spec.d];
    let ball = hamming_ball(&center, radius);
    let truth: Vec<Vec<f64>> = ball.iter().map(|u| oracle_params(spec, u).mu1).collect();
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        if n == 0 {
            return Err(Error::EmptySample("concentration probe"));
        }
        let mut total = 0.0;
        for s in 0..probes {
            let mut rng = rng_for(spec.seed, ((n as u64) << 20) | s as u64);
            let sample: Vec<MixedObservation> = (0..n)
                .map(|_| super::sampling::draw_observation(spec, Class::One, &mut rng))
                .collect();
            let mut sup = 0.0_f64;
            for (u, mu) in ball.iter().zip(&truth) {
                let est = moments::local_mean(&sample, u, theta, None)?;
                sup = sup.max(linalg::max_abs(&linalg::sub(&est, mu)));
            }
            total += sup;
        }
        rows.push(ProbeRow {
            n,
            sup_error_mean: total / probes as f64,
        });
    }
    Ok(rows)
}
