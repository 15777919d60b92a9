//! Comparator classifiers that treat `[z; u]` as one continuous vector.
//!
//! * DSDA: lasso least squares on responses `+n/n₁` (class 1) and `−n/n₂` (class 2)
//!   with an unpenalized intercept. With that coding the centered normal equations
//!   reduce to `Ω = Cov([z;u])` (1/n-normalized) and `a = x̄₁ − x̄₂`, so the fit is one
//!   call to the sparse quadratic solver.
//! * PLG: ℓ1-penalized logistic regression on `[z; u]`.
//!
//! Continuous columns are scaled to unit variance before fitting (binary columns are
//! left alone); coefficients are mapped back to the raw scale.

use alloc::vec;
use alloc::vec::Vec;

use crate::classifier::classify_score;
use crate::data::{Class, MixedDataset, MixedObservation};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::logistic::{self, LogisticDesign, LogisticOptions, LooWarmStart};
use crate::math;
use crate::solver::{self, QuadProblem, SolverOptions};
use crate::tuning::{geometric_ladder, CvScheme, LADDER_DECADES, LADDER_POINTS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaselineKind {
    Dsda,
    Plg,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearBaselineModel {
    pub kind: BaselineKind,
    pub intercept: f64,
    /// Raw-scale coefficients on `[z; u]`.
    pub coef: Vec<f64>,
    pub lambda: f64,
}

impl LinearBaselineModel {
    pub fn score(&self, z: &[f64], u: &[u8]) -> Result<f64> {
        if z.len() + u.len() != self.coef.len() {
            return Err(Error::mismatch("baseline features", self.coef.len(), z.len() + u.len()));
        }
        let (cz, cu) = self.coef.split_at(z.len());
        Ok(self.intercept + linalg::dot(cz, z) + cu.iter().zip(u).map(|(c, &b)| c * f64::from(b)).sum::<f64>())
    }

    /// Class 1 iff the score is strictly positive.
    pub fn classify(&self, z: &[f64], u: &[u8]) -> Result<Class> {
        Ok(classify_score(self.score(z, u)?))
    }
}

pub fn baseline_error_rate(model: &LinearBaselineModel, test: &MixedDataset) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::EmptySample("test set"));
    }
    let mut wrong = 0usize;
    for (truth, obs) in test.iter_labelled() {
        if model.classify(&obs.z, &obs.u)? != truth {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / test.len() as f64)
}

/// Per-column scale: sd for continuous columns (1 if constant), 1 for binary columns.
fn column_scales(data: &MixedDataset) -> Vec<f64> {
    let p = data.p();
    let n = data.len() as f64;
    let mut mean = vec![0.0; p];
    for (_, o) in data.iter_labelled() {
        for (m, z) in mean.iter_mut().zip(&o.z) {
            *m += z / n;
        }
    }
    let mut var = vec![0.0; p];
    for (_, o) in data.iter_labelled() {
        for ((v, z), m) in var.iter_mut().zip(&o.z).zip(&mean) {
            *v += (z - m) * (z - m) / n;
        }
    }
    let mut scales: Vec<f64> = var
        .into_iter()
        .map(|v| if v > 0.0 { math::sqrt(v) } else { 1.0 })
        .collect();
    scales.extend(core::iter::repeat_n(1.0, data.d()));
    scales
}

fn scaled_features(o: &MixedObservation, scales: &[f64]) -> Vec<f64> {
    o.z.iter()
        .map(|v| *v)
        .chain(o.u.iter().map(|&b| f64::from(b)))
        .zip(scales)
        .map(|(v, s)| v / s)
        .collect()
}

/// Scaled feature rows, class 1 first, with their labels.
fn scaled_rows(data: &MixedDataset, scales: &[f64]) -> Vec<(Vec<f64>, Class)> {
    data.iter_labelled()
        .map(|(c, o)| (scaled_features(o, scales), c))
        .collect()
}

fn unscale(model_coef: &[f64], scales: &[f64]) -> Vec<f64> {
    model_coef.iter().zip(scales).map(|(b, s)| b / s).collect()
}

/// Sufficient statistics for DSDA, supporting removal of rows.
#[derive(Clone)]
struct DsdaStats {
    sum1: Vec<f64>,
    sum2: Vec<f64>,
    n1: usize,
    n2: usize,
    /// Upper triangle of Σ xxᵀ.
    second: Matrix,
}

impl DsdaStats {
    fn new(rows: &[(Vec<f64>, Class)], q: usize) -> Self {
        let mut s = DsdaStats {
            sum1: vec![0.0; q],
            sum2: vec![0.0; q],
            n1: 0,
            n2: 0,
            second: Matrix::zeros(q, q),
        };
        for (x, c) in rows {
            s.update(x, *c, 1.0);
        }
        s
    }

    fn update(&mut self, x: &[f64], c: Class, sign: f64) {
        let (sum, n) = match c {
            Class::One => (&mut self.sum1, &mut self.n1),
            Class::Two => (&mut self.sum2, &mut self.n2),
        };
        for (s, v) in sum.iter_mut().zip(x) {
            *s += sign * v;
        }
        if sign > 0.0 {
            *n += 1;
        } else {
            *n -= 1;
        }
        self.second.add_outer_upper(sign, x);
    }

    /// `(Ω, a, x̄)`.
    fn problem_parts(&self) -> Result<(Matrix, Vec<f64>, Vec<f64>)> {
        if self.n1 == 0 || self.n2 == 0 {
            return Err(Error::SingleClass);
        }
        let q = self.sum1.len();
        let n = (self.n1 + self.n2) as f64;
        let mean: Vec<f64> = self.sum1.iter().zip(&self.sum2).map(|(a, b)| (a + b) / n).collect();
        let a: Vec<f64> = self
            .sum1
            .iter()
            .zip(&self.sum2)
            .map(|(s1, s2)| s1 / self.n1 as f64 - s2 / self.n2 as f64)
            .collect();
        let mut omega = Matrix::zeros(q, q);
        for i in 0..q {
            for j in i..q {
                omega[(i, j)] = self.second[(i, j)] / n - mean[i] * mean[j];
            }
        }
        omega.mirror_upper();
        Ok((omega, a, mean))
    }
}

fn dsda_from_stats(stats: &DsdaStats, lambdas: &[f64], opts: &SolverOptions) -> Result<Vec<(f64, Vec<f64>)>> {
    let (omega, a, mean) = stats.problem_parts()?;
    let base = QuadProblem::new(omega, a, 0.0)?;
    solver::solve_path(&base, lambdas, opts)
        .into_iter()
        .map(|sol| {
            let b = sol?.b;
            Ok((-linalg::dot(&mean, &b), b))
        })
        .collect()
}

/// DSDA fit at a single penalty.
pub fn dsda_fit(train: &MixedDataset, lambda: f64) -> Result<LinearBaselineModel> {
    let scales = column_scales(train);
    let rows = scaled_rows(train, &scales);
    let stats = DsdaStats::new(&rows, scales.len());
    let (b0, b) = dsda_from_stats(&stats, &[lambda], &SolverOptions::default())?
        .pop()
        .expect("one penalty");
    Ok(LinearBaselineModel {
        kind: BaselineKind::Dsda,
        intercept: b0,
        coef: unscale(&b, &scales),
        lambda,
    })
}

/// PLG fit at a single penalty.
pub fn plg_fit(train: &MixedDataset, lambda: f64) -> Result<LinearBaselineModel> {
    plg_fit_with(train, lambda, &LogisticOptions::default())
}

pub fn plg_fit_with(train: &MixedDataset, lambda: f64, opts: &LogisticOptions) -> Result<LinearBaselineModel> {
    let scales = column_scales(train);
    let rows = scaled_rows(train, &scales);
    let design = LogisticDesign::new(rows.iter().map(|(x, c)| (x.as_slice(), *c)), scales.len())?;
    let fit = logistic::fit_logistic(&design, lambda, opts)?;
    Ok(LinearBaselineModel {
        kind: BaselineKind::Plg,
        intercept: fit.a0,
        coef: unscale(&fit.a, &scales),
        lambda,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineTuning {
    pub model: LinearBaselineModel,
    /// `(λ, held-out errors)` in ladder order.
    pub table: Vec<(f64, usize)>,
}

fn is_error(class: Class, score: f64) -> bool {
    classify_score(score) != class
}

fn pick(lambdas: &[f64], errors: &[usize]) -> f64 {
    let mut best = (usize::MAX, f64::NEG_INFINITY);
    for (&l, &e) in lambdas.iter().zip(errors) {
        if e < best.0 || (e == best.0 && l > best.1) {
            best = (e, l);
        }
    }
    best.1
}

fn held_out_groups(n: usize, cv: CvScheme) -> Vec<Vec<usize>> {
    match cv {
        CvScheme::LeaveOneOut => (0..n).map(|i| vec![i]).collect(),
        CvScheme::KFold(k) => (0..k)
            .map(|f| (0..n).filter(|i| i % k == f).collect())
            .filter(|g: &Vec<usize>| !g.is_empty())
            .collect(),
    }
}

/// DSDA with λ chosen by held-out misclassification over a 10-point, 3-decade ladder.
pub fn tune_dsda(train: &MixedDataset, cv: CvScheme, opts: &SolverOptions) -> Result<BaselineTuning> {
    let scales = column_scales(train);
    let rows = scaled_rows(train, &scales);
    let q = scales.len();
    let full = DsdaStats::new(&rows, q);
    let (_, a, _) = full.problem_parts()?;
    let top = 2.0 * linalg::max_abs(&a);
    let lambdas = geometric_ladder(if top > 0.0 { top } else { 1.0 }, LADDER_POINTS, LADDER_DECADES);

    let mut errors = vec![0usize; lambdas.len()];
    for group in held_out_groups(rows.len(), cv) {
        let mut stats = full.clone();
        for &i in &group {
            stats.update(&rows[i].0, rows[i].1, -1.0);
        }
        let fits = dsda_from_stats(&stats, &lambdas, opts)?;
        for (k, (b0, b)) in fits.iter().enumerate() {
            for &i in &group {
                let (x, c) = &rows[i];
                if is_error(*c, b0 + linalg::dot(b, x)) {
                    errors[k] += 1;
                }
            }
        }
    }
    let lambda = pick(&lambdas, &errors);
    let (b0, b) = dsda_from_stats(&full, &[lambda], opts)?.pop().expect("one penalty");
    Ok(BaselineTuning {
        model: LinearBaselineModel {
            kind: BaselineKind::Dsda,
            intercept: b0,
            coef: unscale(&b, &scales),
            lambda,
        },
        table: lambdas.into_iter().zip(errors).collect(),
    })
}

/// PLG with λ chosen by held-out misclassification over a 10-point, 3-decade ladder.
pub fn tune_plg(train: &MixedDataset, cv: CvScheme, opts: &LogisticOptions) -> Result<BaselineTuning> {
    let scales = column_scales(train);
    let rows = scaled_rows(train, &scales);
    let design = LogisticDesign::new(rows.iter().map(|(x, c)| (x.as_slice(), *c)), scales.len())?;
    let top = logistic::logistic_lambda_max(&design)?;
    let lambdas = geometric_ladder(if top > 0.0 { top } else { 1.0 }, LADDER_POINTS, LADDER_DECADES);

    let mut errors = vec![0usize; lambdas.len()];
    let mut full_fits = Vec::with_capacity(lambdas.len());
    for (k, &lambda) in lambdas.iter().enumerate() {
        let full = logistic::fit_logistic(&design, lambda, opts)?;
        let warm = LogisticOptions {
            warm_start: Some((full.a0, full.a.clone())),
            ..opts.clone()
        };
        let loo_start = LooWarmStart::new(&design, &full)?;
        for group in held_out_groups(rows.len(), cv) {
            let fit = if let [i] = group[..] {
                let start = LogisticOptions {
                    warm_start: Some(loo_start.start(&design, i)),
                    ..opts.clone()
                };
                logistic::fit_logistic_excluding(&design, lambda, &start, Some(i))?
            } else {
                let reduced = design.filtered(|i| !group.contains(&i));
                logistic::fit_logistic(&reduced, lambda, &warm)?
            };
            for &i in &group {
                if is_error(rows[i].1, fit.linear_predictor(&rows[i].0)?) {
                    errors[k] += 1;
                }
            }
        }
        full_fits.push(full);
    }
    let lambda = pick(&lambdas, &errors);
    let k = lambdas.iter().position(|&l| l == lambda).expect("picked from ladder");
    let fit = &full_fits[k];
    Ok(BaselineTuning {
        model: LinearBaselineModel {
            kind: BaselineKind::Plg,
            intercept: fit.a0,
            coef: unscale(&fit.a, &scales),
            lambda,
        },
        table: lambdas.into_iter().zip(errors).collect(),
    })
}
