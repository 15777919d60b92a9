//! The fitted location-model classifier.
//!
//! `D̂(z; u) = β̂(u)ᵀ [z − (μ̂₁(u) + μ̂₂(u))/2] + η̂(u)`; class 1 iff `D̂ > 0`.
//!
//! The model keeps its training data: every new location needs fresh kernel moments.
//! Directions are computed lazily per location and memoized.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicUsize, Ordering};

use spin::RwLock;

use crate::data::{Class, MixedDataset};
use crate::error::{Error, Result};
use crate::kernel;
use crate::linalg;
use crate::logistic::{self, LogisticDesign, LogisticFit, LogisticOptions};
use crate::moments;
use crate::solver::{self, QuadProblem, SolverOptions, SparseSolution};

/// Direction and midpoint at one location.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalRule {
    pub beta: SparseSolution,
    pub midpoint: Vec<f64>,
}

pub struct SlmModel {
    train: MixedDataset,
    theta: f64,
    lambda_beta: f64,
    eta_fit: LogisticFit,
    solver: SolverOptions,
    cache: Option<RwLock<BTreeMap<Vec<u8>, LocalRule>>>,
    moment_evaluations: AtomicUsize,
}

impl Clone for SlmModel {
    fn clone(&self) -> Self {
        SlmModel {
            train: self.train.clone(),
            theta: self.theta,
            lambda_beta: self.lambda_beta,
            eta_fit: self.eta_fit.clone(),
            solver: self.solver.clone(),
            cache: self.cache.as_ref().map(|c| RwLock::new(c.read().clone())),
            moment_evaluations: AtomicUsize::new(self.moment_evaluations.load(Ordering::Relaxed)),
        }
    }
}

impl core::fmt::Debug for SlmModel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("SlmModel")
            .field("n1", &self.train.n1())
            .field("n2", &self.train.n2())
            .field("p", &self.train.p())
            .field("d", &self.train.d())
            .field("theta", &self.theta)
            .field("lambda_beta", &self.lambda_beta)
            .field("eta_fit", &self.eta_fit)
            .finish()
    }
}

/// Logistic design `(u, class)` over every training observation, class 1 first.
pub fn location_design(data: &MixedDataset) -> Result<LogisticDesign> {
    let rows: Vec<(Vec<f64>, Class)> = data
        .iter_labelled()
        .map(|(c, o)| (o.u.iter().map(|&b| f64::from(b)).collect(), c))
        .collect();
    LogisticDesign::new(rows.iter().map(|(x, c)| (x.as_slice(), *c)), data.d())
}

impl SlmModel {
    pub fn new(train: MixedDataset, theta: f64, lambda_beta: f64, eta_fit: LogisticFit) -> Result<Self> {
        kernel::check_theta(theta)?;
        if !(lambda_beta >= 0.0) || !lambda_beta.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!(
                "lambda_beta must be finite and nonnegative, got {lambda_beta}"
            )));
        }
        if !train.has_both_classes() {
            return Err(Error::SingleClass);
        }
        if eta_fit.a.len() != train.d() {
            return Err(Error::mismatch("intercept coefficients", train.d(), eta_fit.a.len()));
        }
        Ok(SlmModel {
            train,
            theta,
            lambda_beta,
            eta_fit,
            solver: SolverOptions::default(),
            cache: Some(RwLock::new(BTreeMap::new())),
            moment_evaluations: AtomicUsize::new(0),
        })
    }

    /// Fits the intercept model at `lambda_eta` and wraps everything into a model.
    pub fn fit(train: MixedDataset, theta: f64, lambda_beta: f64, lambda_eta: f64) -> Result<Self> {
        let design = location_design(&train)?;
        let eta_fit = logistic::fit_logistic(&design, lambda_eta, &LogisticOptions::default())?;
        Self::new(train, theta, lambda_beta, eta_fit)
    }

    pub fn with_cache(mut self, enabled: bool) -> Self {
        self.cache = enabled.then(|| RwLock::new(BTreeMap::new()));
        self
    }

    pub fn with_solver_options(mut self, opts: SolverOptions) -> Self {
        self.solver = SolverOptions {
            warm_start: None,
            ..opts
        };
        self.clear_cache();
        self
    }

    pub fn clear_cache(&self) {
        if let Some(c) = &self.cache {
            c.write().clear();
        }
    }

    pub fn train(&self) -> &MixedDataset {
        &self.train
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn lambda_beta(&self) -> f64 {
        self.lambda_beta
    }

    pub fn eta_fit(&self) -> &LogisticFit {
        &self.eta_fit
    }

    pub fn solver_options(&self) -> &SolverOptions {
        &self.solver
    }

    /// Number of kernel moment computations performed so far.
    pub fn moment_evaluations(&self) -> usize {
        self.moment_evaluations.load(Ordering::Relaxed)
    }

    pub fn cached_locations(&self) -> usize {
        self.cache.as_ref().map_or(0, |c| c.read().len())
    }

    pub fn local_rule(&self, u: &[u8]) -> Result<LocalRule> {
        if u.len() != self.train.d() {
            return Err(Error::mismatch("query location", self.train.d(), u.len()));
        }
        if let Some(c) = &self.cache {
            if let Some(hit) = c.read().get(u) {
                return Ok(hit.clone());
            }
        }
        self.moment_evaluations.fetch_add(1, Ordering::Relaxed);
        let m = moments::moments_at(&self.train, u, self.theta, None)?;
        let problem = QuadProblem::new(m.sigma.clone(), m.mean_difference(), self.lambda_beta)?;
        let beta = solver::solve(&problem, &self.solver)?;
        let rule = LocalRule {
            beta,
            midpoint: m.midpoint(),
        };
        if let Some(c) = &self.cache {
            c.write().entry(u.to_vec()).or_insert_with(|| rule.clone());
        }
        Ok(rule)
    }

    /// `β̂(u)`.
    pub fn beta_at(&self, u: &[u8]) -> Result<SparseSolution> {
        Ok(self.local_rule(u)?.beta)
    }

    pub fn eta_at(&self, u: &[u8]) -> Result<f64> {
        logistic::eta_value(&self.eta_fit, u)
    }

    pub fn discriminant(&self, z: &[f64], u: &[u8]) -> Result<f64> {
        if z.len() != self.train.p() {
            return Err(Error::mismatch("feature vector", self.train.p(), z.len()));
        }
        let rule = self.local_rule(u)?;
        let centered = linalg::sub(z, &rule.midpoint);
        Ok(linalg::dot(&rule.beta.b, &centered) + self.eta_at(u)?)
    }

    /// Class 1 iff the discriminant is strictly positive.
    pub fn classify(&self, z: &[f64], u: &[u8]) -> Result<Class> {
        Ok(classify_score(self.discriminant(z, u)?))
    }

    pub fn error_rate(&self, test: &MixedDataset) -> Result<f64> {
        if test.is_empty() {
            return Err(Error::EmptySample("test set"));
        }
        if test.p() != self.train.p() || test.d() != self.train.d() {
            return Err(Error::mismatch(
                "test set width",
                self.train.p() + self.train.d(),
                test.p() + test.d(),
            ));
        }
        let mut wrong = 0usize;
        for (truth, obs) in test.iter_labelled() {
            if self.classify(&obs.z, &obs.u)? != truth {
                wrong += 1;
            }
        }
        Ok(wrong as f64 / test.len() as f64)
    }

    /// Precomputes directions on the Hamming ball of `radius` around `center`.
    /// Returns the number of locations visited.
    pub fn warm_ball(&self, center: &[u8], radius: usize) -> Result<usize> {
        let locations = hamming_ball(center, radius);
        for u in &locations {
            self.local_rule(u)?;
        }
        Ok(locations.len())
    }
}

#[inline]
pub fn classify_score(score: f64) -> Class {
    if score > 0.0 {
        Class::One
    } else {
        Class::Two
    }
}

/// All locations within Hamming distance `radius` of `center`, nearest first.
pub fn hamming_ball(center: &[u8], radius: usize) -> Vec<Vec<u8>> {
    let d = center.len();
    let mut out = alloc::vec![center.to_vec()];
    let mut frontier: Vec<(Vec<u8>, usize)> = alloc::vec![(center.to_vec(), 0)];
    for _ in 0..radius.min(d) {
        let mut next = Vec::new();
        for (u, last) in &frontier {
            for j in *last..d {
                if u[j] == center[j] {
                    let mut v = u.clone();
                    v[j] ^= 1;
                    next.push((v, j + 1));
                }
            }
        }
        out.extend(next.iter().map(|(u, _)| u.clone()));
        frontier = next;
    }
    out
}
