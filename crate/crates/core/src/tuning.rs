//! Misclassification-driven tuning.
//!
//! `(θ, λ_β)` are chosen jointly by the leave-one-out error of the zero-intercept rule
//! (the `R₀` count); given those, `λ_η` is chosen by the leave-one-out error of the
//! full rule, reusing the zero-intercept scores `ζᵢ`.
//!
//! For a class-1 sample `i` the score is
//! `ζᵢ = β̂₋ᵢ(Uᵢ)ᵀ (Xᵢ − (μ̂₁,₋ᵢ(Uᵢ) + μ̂₂(Uᵢ))/2)`: only its own class's moments
//! drop it. Class-1 samples count as errors when their score is `≤ 0`, class-2
//! samples when it is `≥ 0`.

use alloc::vec;
use alloc::vec::Vec;

use crate::classifier::{location_design, SlmModel};
use crate::data::{Class, MixedDataset};
use crate::error::{Error, Result};
use crate::linalg;
use crate::logistic::{self, LogisticDesign, LogisticFit, LogisticOptions, LooWarmStart};
use crate::moments;
use crate::solver::{self, QuadProblem, SolverOptions};

pub const DEFAULT_THETAS: [f64; 6] = [0.05, 0.1, 0.2, 0.3, 0.4, 0.5];
pub const LADDER_POINTS: usize = 10;
pub const LADDER_DECADES: f64 = 3.0;

/// Candidate hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TuneGrid {
    /// Ascending, within (0, 0.5].
    pub thetas: Vec<f64>,
    /// Descending, nonnegative.
    pub lambdas_beta: Vec<f64>,
    /// Descending, nonnegative.
    pub lambdas_eta: Vec<f64>,
}

/// `points` values from `top` down `decades` orders of magnitude, geometrically spaced.
pub fn geometric_ladder(top: f64, points: usize, decades: f64) -> Vec<f64> {
    if points <= 1 {
        return vec![top];
    }
    (0..points)
        .map(|k| top * libm::pow(10.0, -decades * k as f64 / (points - 1) as f64))
        .collect()
}

/// `2 · max_j |x̄₁ⱼ − x̄₂ⱼ|` from the global class means (the θ = 0.5 estimate).
pub fn lambda_beta_max(data: &MixedDataset) -> Result<f64> {
    let u = vec![0u8; data.d()];
    let mu1 = moments::local_mean(data.class1(), &u, 0.5, None)?;
    let mu2 = moments::local_mean(data.class2(), &u, 0.5, None)?;
    Ok(2.0 * linalg::max_abs(&linalg::sub(&mu1, &mu2)))
}

fn positive_or_one(x: f64) -> f64 {
    if x > 0.0 && x.is_finite() {
        x
    } else {
        1.0
    }
}

impl TuneGrid {
    /// θ ∈ {0.05, 0.1, 0.2, 0.3, 0.4, 0.5}; both λ ladders take 10 geometric points over
    /// three decades below the value at which the fitted coefficients vanish.
    pub fn default_for(data: &MixedDataset) -> Result<Self> {
        let top_beta = positive_or_one(lambda_beta_max(data)?);
        let top_eta = positive_or_one(logistic::logistic_lambda_max(&location_design(data)?)?);
        Ok(TuneGrid {
            thetas: DEFAULT_THETAS.to_vec(),
            lambdas_beta: geometric_ladder(top_beta, LADDER_POINTS, LADDER_DECADES),
            lambdas_eta: geometric_ladder(top_eta, LADDER_POINTS, LADDER_DECADES),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.into()));
        if self.thetas.is_empty() || self.lambdas_beta.is_empty() || self.lambdas_eta.is_empty() {
            return bad("tuning grids must be nonempty");
        }
        if self.thetas.iter().any(|t| !(*t > 0.0 && *t <= 0.5)) {
            return bad("theta grid must lie in (0, 0.5]");
        }
        if self.thetas.windows(2).any(|w| w[0] >= w[1]) {
            return bad("theta grid must be strictly ascending");
        }
        for ladder in [&self.lambdas_beta, &self.lambdas_eta] {
            if ladder.iter().any(|l| !(*l >= 0.0) || !l.is_finite()) {
                return bad("penalty grids must be finite and nonnegative");
            }
            if ladder.windows(2).any(|w| w[0] < w[1]) {
                return bad("penalty grids must be descending");
            }
        }
        Ok(())
    }
}

/// How held-out scores are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CvScheme {
    /// Exact leave-one-out.
    LeaveOneOut,
    /// `k` folds, sample `j` (class 1 first) in fold `j mod k`.
    KFold(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneOptions {
    pub cv: CvScheme,
    pub solver: SolverOptions,
    pub logistic: LogisticOptions,
    /// Leave samples whose direction solve fails out of the error counts. By default
    /// such a sample counts as misclassified.
    pub skip_solver_failures: bool,
}

impl Default for TuneOptions {
    fn default() -> Self {
        TuneOptions {
            cv: CvScheme::LeaveOneOut,
            solver: SolverOptions::default(),
            logistic: LogisticOptions::default(),
            skip_solver_failures: false,
        }
    }
}

/// Held-out zero-intercept scores, class 1 first; `None` where the direction solve failed.
#[derive(Debug, Clone, PartialEq)]
pub struct LooScores {
    pub zeta: Vec<Option<f64>>,
}

impl LooScores {
    pub fn len(&self) -> usize {
        self.zeta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeta.is_empty()
    }
}

#[inline]
fn is_error(class: Class, score: f64) -> bool {
    match class {
        Class::One => score <= 0.0,
        Class::Two => score >= 0.0,
    }
}

fn labels(data: &MixedDataset) -> Vec<(Class, usize)> {
    (0..data.n1())
        .map(|i| (Class::One, i))
        .chain((0..data.n2()).map(|i| (Class::Two, i)))
        .collect()
}

/// Scores along a λ ladder at one θ.
#[derive(Debug, Clone, PartialEq)]
pub struct ScorePath {
    /// `scores[k]` belongs to `lambdas[k]`.
    pub scores: Vec<LooScores>,
    pub solver_failures: Vec<usize>,
}

fn check_cv_sizes(data: &MixedDataset, cv: CvScheme) -> Result<()> {
    match cv {
        CvScheme::LeaveOneOut if data.n1() < 2 || data.n2() < 2 => Err(Error::InvalidParameter(
            "leave-one-out tuning needs at least two samples per class".into(),
        )),
        CvScheme::KFold(k) if k < 2 || k > data.len() => Err(Error::InvalidParameter(alloc::format!(
            "fold count {k} must lie in [2, n]"
        ))),
        _ => Ok(()),
    }
}

/// Held-out scores `ζ` for every λ in `lambdas` (descending, warm-started) at `theta`.
pub fn score_path(data: &MixedDataset, theta: f64, lambdas: &[f64], opts: &TuneOptions) -> Result<ScorePath> {
    check_cv_sizes(data, opts.cv)?;
    let samples = labels(data);
    let n = samples.len();
    let mut scores: Vec<Vec<Option<f64>>> = vec![vec![None; n]; lambdas.len()];
    let mut failures = vec![0usize; lambdas.len()];

    let mut score_one =
        |slot: usize, reduced: &MixedDataset, exclude: Option<(Class, usize)>, z: &[f64], u: &[u8]| -> Result<()> {
            let m = moments::moments_at(reduced, u, theta, exclude)?;
            let mid = m.midpoint();
            let centered = linalg::sub(z, &mid);
            let base = QuadProblem::new(m.sigma, linalg::sub(&m.mu1, &m.mu2), 0.0)?;
            let path = solver::solve_path(&base, lambdas, &opts.solver);
            for (k, sol) in path.into_iter().enumerate() {
                match sol {
                    Ok(s) => scores[k][slot] = Some(linalg::dot(&s.b, &centered)),
                    Err(Error::NoConvergence { .. } | Error::NonFinite(_)) => failures[k] += 1,
                    Err(e) => return Err(e),
                }
            }
            Ok(())
        };

    match opts.cv {
        CvScheme::LeaveOneOut => {
            for (slot, &(class, i)) in samples.iter().enumerate() {
                let obs = &data.class(class)[i];
                score_one(slot, data, Some((class, i)), &obs.z, &obs.u)?;
            }
        }
        CvScheme::KFold(k) => {
            for fold in 0..k {
                let keep = |slot: usize| slot % k != fold;
                let (c1, c2) = split_kept(data, &samples, keep);
                let reduced = MixedDataset::with_dims(c1, c2, data.p(), data.d())?;
                if !reduced.has_both_classes() {
                    return Err(Error::SingleClass);
                }
                for (slot, &(class, i)) in samples.iter().enumerate() {
                    if keep(slot) {
                        continue;
                    }
                    let obs = &data.class(class)[i];
                    score_one(slot, &reduced, None, &obs.z, &obs.u)?;
                }
            }
        }
    }
    Ok(ScorePath {
        scores: scores.into_iter().map(|zeta| LooScores { zeta }).collect(),
        solver_failures: failures,
    })
}

fn split_kept(
    data: &MixedDataset,
    samples: &[(Class, usize)],
    keep: impl Fn(usize) -> bool,
) -> (Vec<crate::data::MixedObservation>, Vec<crate::data::MixedObservation>) {
    let mut c1 = Vec::new();
    let mut c2 = Vec::new();
    for (slot, &(class, i)) in samples.iter().enumerate() {
        if keep(slot) {
            let o = data.class(class)[i].clone();
            match class {
                Class::One => c1.push(o),
                Class::Two => c2.push(o),
            }
        }
    }
    (c1, c2)
}

/// Misclassification count of held-out scores. A failed sample counts as an
/// error unless `skip_failures` is set.
pub fn count_errors(data: &MixedDataset, scores: &LooScores, skip_failures: bool) -> usize {
    labels(data)
        .iter()
        .zip(&scores.zeta)
        .filter(|((class, _), z)| match z {
            Some(v) => is_error(*class, *v),
            None => !skip_failures,
        })
        .count()
}

/// Leave-one-out scores and `R₀` count at a single `(θ, λ_β)`.
pub fn loo_r0(data: &MixedDataset, theta: f64, lambda_beta: f64) -> Result<(LooScores, usize)> {
    let path = score_path(data, theta, &[lambda_beta], &TuneOptions::default())?;
    let scores = path.scores.into_iter().next().expect("one lambda");
    let r0 = count_errors(data, &scores, false);
    Ok((scores, r0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct R0Entry {
    pub theta: f64,
    pub lambda_beta: f64,
    pub r0: usize,
    pub solver_failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetaSelection {
    pub theta: f64,
    pub lambda_beta: f64,
    pub r0: usize,
    /// Scores at the selected point, reused for `λ_η`.
    pub zeta: LooScores,
    /// One row per grid point, θ-major in grid order.
    pub table: Vec<R0Entry>,
}

/// Minimizes `R₀` over the `θ × λ_β` grid; ties go to the larger θ, then the larger λ_β.
pub fn tune_beta(data: &MixedDataset, grid: &TuneGrid, opts: &TuneOptions) -> Result<BetaSelection> {
    grid.validate()?;
    let mut table = Vec::new();
    let mut best: Option<(usize, f64, f64, LooScores)> = None;
    for &theta in &grid.thetas {
        let path = score_path(data, theta, &grid.lambdas_beta, opts)?;
        for ((scores, failures), &lambda) in path
            .scores
            .into_iter()
            .zip(path.solver_failures)
            .zip(&grid.lambdas_beta)
        {
            let r0 = count_errors(data, &scores, opts.skip_solver_failures);
            table.push(R0Entry {
                theta,
                lambda_beta: lambda,
                r0,
                solver_failures: failures,
            });
            let better = match &best {
                None => true,
                Some((br, bt, bl, _)) => r0 < *br || (r0 == *br && (theta > *bt || (theta == *bt && lambda > *bl))),
            };
            if better {
                best = Some((r0, theta, lambda, scores));
            }
        }
    }
    let (r0, theta, lambda_beta, zeta) = best.expect("validated grid is nonempty");
    Ok(BetaSelection {
        theta,
        lambda_beta,
        r0,
        zeta,
        table,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtaEntry {
    pub lambda_eta: f64,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtaSelection {
    pub lambda_eta: f64,
    pub errors: usize,
    pub table: Vec<EtaEntry>,
}

/// Held-out intercepts `Â₀,₋ᵢ + Uᵢᵀ Â₋ᵢ` for every sample at one λ_η.
pub fn held_out_intercepts(
    data: &MixedDataset,
    design: &LogisticDesign,
    lambda_eta: f64,
    opts: &TuneOptions,
) -> Result<Vec<f64>> {
    let n = design.n();
    let full = logistic::fit_logistic(design, lambda_eta, &opts.logistic)?;
    let warm = LogisticOptions {
        warm_start: Some((full.a0, full.a.clone())),
        ..opts.logistic.clone()
    };
    let mut out = vec![0.0; n];
    match opts.cv {
        CvScheme::LeaveOneOut => {
            let loo_start = LooWarmStart::new(design, &full)?;
            for (i, slot) in out.iter_mut().enumerate() {
                let start = LogisticOptions {
                    warm_start: Some(loo_start.start(design, i)),
                    ..opts.logistic.clone()
                };
                let fit = logistic::fit_logistic_excluding(design, lambda_eta, &start, Some(i))?;
                *slot = fit.linear_predictor(design.row(i))?;
            }
        }
        CvScheme::KFold(k) => {
            check_cv_sizes(data, opts.cv)?;
            for fold in 0..k {
                let reduced = design.filtered(|i| i % k != fold);
                let fit: LogisticFit = logistic::fit_logistic(&reduced, lambda_eta, &warm)?;
                for i in (0..n).filter(|i| i % k == fold) {
                    out[i] = fit.linear_predictor(design.row(i))?;
                }
            }
        }
    }
    Ok(out)
}

/// Minimizes the full-rule held-out error over the λ_η grid; ties go to the larger λ_η.
pub fn tune_eta(data: &MixedDataset, zeta: &LooScores, grid: &TuneGrid, opts: &TuneOptions) -> Result<EtaSelection> {
    grid.validate()?;
    if zeta.len() != data.len() {
        return Err(Error::mismatch("held-out scores", data.len(), zeta.len()));
    }
    check_cv_sizes(data, opts.cv)?;
    let design = location_design(data)?;
    let classes: Vec<Class> = labels(data).into_iter().map(|(c, _)| c).collect();
    let mut table = Vec::with_capacity(grid.lambdas_eta.len());
    let mut best: Option<(usize, f64)> = None;
    for &lambda in &grid.lambdas_eta {
        let intercepts = held_out_intercepts(data, &design, lambda, opts)?;
        let errors = classes
            .iter()
            .zip(&zeta.zeta)
            .zip(&intercepts)
            .filter(|((c, z), eta)| match z {
                Some(v) => is_error(**c, v + **eta),
                None => !opts.skip_solver_failures,
            })
            .count();
        table.push(EtaEntry {
            lambda_eta: lambda,
            errors,
        });
        if best.is_none_or(|(be, bl)| errors < be || (errors == be && lambda > bl)) {
            best = Some((errors, lambda));
        }
    }
    let (errors, lambda_eta) = best.expect("validated grid is nonempty");
    Ok(EtaSelection {
        lambda_eta,
        errors,
        table,
    })
}

/// A tuned model together with its tuning tables.
#[derive(Debug, Clone)]
pub struct TunedFit {
    pub model: SlmModel,
    pub beta: BetaSelection,
    pub eta: EtaSelection,
}

/// Tunes `(θ, λ_β)`, then `λ_η`, then fits the intercept on all data.
pub fn fit_tuned(data: &MixedDataset, grid: &TuneGrid, opts: &TuneOptions) -> Result<TunedFit> {
    let beta = tune_beta(data, grid, opts)?;
    let eta = tune_eta(data, &beta.zeta, grid, opts)?;
    let design = location_design(data)?;
    let eta_fit = logistic::fit_logistic(&design, eta.lambda_eta, &opts.logistic)?;
    let model =
        SlmModel::new(data.clone(), beta.theta, beta.lambda_beta, eta_fit)?.with_solver_options(opts.solver.clone());
    Ok(TunedFit { model, beta, eta })
}
