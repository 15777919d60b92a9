//! ℓ1-penalized logistic regression with an unpenalized intercept:
//!
//! ```text
//! (1/n) Σ [ log(1 + e^{A₀ + Aᵀxᵢ}) − yᵢ (A₀ + Aᵀxᵢ) ] + λ‖A‖₁,   yᵢ = I(class 1)
//! ```
//!
//! Fitted by monotone accelerated proximal gradient (soft-threshold on `A`, plain
//! gradient step on `A₀`) with a backtracking line search. Used for the location
//! intercept `η(u) = A₀ + Aᵀu` and by the PLG baseline.

use alloc::vec;
use alloc::vec::Vec;

use crate::data::Class;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::math;

/// Row-major design with class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticDesign {
    x: Vec<f64>,
    y: Vec<f64>,
    width: usize,
}

impl LogisticDesign {
    pub fn new<'a, I>(rows: I, width: usize) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a [f64], Class)>,
    {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (features, class) in rows {
            if features.len() != width {
                return Err(Error::mismatch("logistic design row", width, features.len()));
            }
            if features.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("logistic features"));
            }
            x.extend_from_slice(features);
            y.push(if class == Class::One { 1.0 } else { 0.0 });
        }
        Ok(LogisticDesign { x, y, width })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.width..(i + 1) * self.width]
    }

    pub fn class(&self, i: usize) -> Class {
        if self.y[i] == 1.0 {
            Class::One
        } else {
            Class::Two
        }
    }

    /// Design restricted to the rows for which `keep(i)` holds.
    pub fn filtered(&self, keep: impl Fn(usize) -> bool) -> Self {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in (0..self.n()).filter(|&i| keep(i)) {
            x.extend_from_slice(self.row(i));
            y.push(self.y[i]);
        }
        LogisticDesign {
            x,
            y,
            width: self.width,
        }
    }

    /// `(n₁, n₂)` with `skip` removed.
    fn counts(&self, skip: Option<usize>) -> (usize, usize) {
        let mut n1 = 0;
        let mut n2 = 0;
        for (i, &y) in self.y.iter().enumerate() {
            if Some(i) == skip {
                continue;
            }
            if y == 1.0 {
                n1 += 1;
            } else {
                n2 += 1;
            }
        }
        (n1, n2)
    }

    /// Averaged loss; fills `grad = [∂/∂A₀, ∂/∂A]` when given.
    fn evaluate(&self, a0: f64, a: &[f64], skip: Option<usize>, mut grad: Option<&mut [f64]>) -> f64 {
        let n_eff = (self.n() - usize::from(skip.is_some())) as f64;
        if let Some(g) = grad.as_deref_mut() {
            g.iter_mut().for_each(|v| *v = 0.0);
        }
        let mut loss = 0.0;
        for i in 0..self.n() {
            if Some(i) == skip {
                continue;
            }
            let row = self.row(i);
            let eta = a0 + linalg::dot(a, row);
            if let Some(g) = grad.as_deref_mut() {
                let (l, s) = math::log1p_exp_sigmoid(eta);
                loss += l - self.y[i] * eta;
                let r = s - self.y[i];
                g[0] += r;
                for (gj, xj) in g[1..].iter_mut().zip(row) {
                    *gj += r * xj;
                }
            } else {
                loss += math::log1p_exp(eta) - self.y[i] * eta;
            }
        }
        if let Some(g) = grad {
            g.iter_mut().for_each(|v| *v /= n_eff);
        }
        loss / n_eff
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticOptions {
    /// Tolerance on the subgradient optimality conditions.
    pub tol: f64,
    /// Maximum number of proximal steps.
    pub max_iter: usize,
    /// Starting `(A₀, A)`; zero when absent.
    pub warm_start: Option<(f64, Vec<f64>)>,
}

impl Default for LogisticOptions {
    fn default() -> Self {
        LogisticOptions {
            tol: 1e-7,
            max_iter: 50_000,
            warm_start: None,
        }
    }
}

/// Fitted `(Â₀, Â)` at penalty `lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticFit {
    pub a0: f64,
    pub a: Vec<f64>,
    pub lambda: f64,
    pub converged: bool,
    /// Largest violation of the optimality conditions at the returned point.
    pub final_gap: f64,
    pub iterations: usize,
}

impl LogisticFit {
    /// Linear predictor `Â₀ + Âᵀx`.
    pub fn linear_predictor(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.a.len() {
            return Err(Error::mismatch("logistic predictor", self.a.len(), x.len()));
        }
        Ok(self.a0 + linalg::dot(&self.a, x))
    }
}

/// `η̂(u) = Â₀ + Âᵀu`.
pub fn eta_value(fit: &LogisticFit, u: &[u8]) -> Result<f64> {
    if u.len() != fit.a.len() {
        return Err(Error::mismatch("intercept location", fit.a.len(), u.len()));
    }
    Ok(fit.a0 + fit.a.iter().zip(u).map(|(c, &b)| c * f64::from(b)).sum::<f64>())
}

/// Value and gradient `(loss, ∂/∂A₀, ∂/∂A)` of the unpenalized averaged loss.
pub fn logistic_loss_grad(a0: f64, a: &[f64], design: &LogisticDesign) -> Result<(f64, f64, Vec<f64>)> {
    if a.len() != design.width() {
        return Err(Error::mismatch("logistic coefficients", design.width(), a.len()));
    }
    if design.n() == 0 {
        return Err(Error::EmptySample("logistic design"));
    }
    let mut g = vec![0.0; a.len() + 1];
    let loss = design.evaluate(a0, a, None, Some(&mut g));
    let g0 = g[0];
    g.remove(0);
    Ok((loss, g0, g))
}

fn optimality_gap(grad: &[f64], a: &[f64], lambda: f64) -> f64 {
    let mut gap = math::abs(grad[0]);
    for (g, &aj) in grad[1..].iter().zip(a) {
        let v = if aj != 0.0 {
            math::abs(g + lambda * math::sign(aj))
        } else {
            (math::abs(*g) - lambda).max(0.0)
        };
        gap = gap.max(v);
    }
    gap
}

/// Penalty at which the intercept-only fit is optimal: `max_j |∂/∂A_j|` at
/// `A = 0, A₀ = log(n₁/n₂)`.
pub fn logistic_lambda_max(design: &LogisticDesign) -> Result<f64> {
    let (n1, n2) = design.counts(None);
    if n1 == 0 || n2 == 0 {
        return Err(Error::SingleClass);
    }
    let a0 = math::ln(n1 as f64 / n2 as f64);
    let (_, _, g) = logistic_loss_grad(a0, &vec![0.0; design.width()], design)?;
    Ok(linalg::max_abs(&g))
}

/// Leave-one-out starting points from a full fit: one Newton step on the active
/// coordinates (plus intercept) of the objective with row `i` removed. The Hessian
/// is factored once and downdated per row with Sherman–Morrison.
#[derive(Debug, Clone)]
pub struct LooWarmStart {
    a0: f64,
    a: Vec<f64>,
    active: Vec<usize>,
    /// Residuals `σ(ηᵢ) − yᵢ` and curvatures `σ(ηᵢ)(1 − σ(ηᵢ))` at the full fit.
    resid: Vec<f64>,
    curv: Vec<f64>,
    /// `[0; λ sign(a_active)]`.
    penalty: Vec<f64>,
    /// Summed stationarity `Σ rᵢ x̃ᵢ + n [0; λ sign(a_active)]`.
    stationarity: Vec<f64>,
    /// Cholesky factor of `Σ wᵢ x̃ᵢ x̃ᵢᵀ`, if positive definite.
    factor: Option<Matrix>,
}

fn active_row(row: &[f64], active: &[usize], out: &mut [f64]) {
    out[0] = 1.0;
    for (o, &j) in out[1..].iter_mut().zip(active) {
        *o = row[j];
    }
}

impl LooWarmStart {
    pub fn new(design: &LogisticDesign, fit: &LogisticFit) -> Result<Self> {
        if fit.a.len() != design.width() {
            return Err(Error::mismatch("logistic coefficients", design.width(), fit.a.len()));
        }
        let n = design.n();
        let active: Vec<usize> = (0..fit.a.len()).filter(|&j| fit.a[j] != 0.0).collect();
        let m = active.len() + 1;
        let mut penalty = vec![0.0; m];
        for (k, &j) in active.iter().enumerate() {
            penalty[k + 1] = fit.lambda * math::sign(fit.a[j]);
        }
        let mut resid = Vec::with_capacity(n);
        let mut curv = Vec::with_capacity(n);
        let mut hess = Matrix::zeros(m, m);
        let mut stationarity: Vec<f64> = penalty.iter().map(|p| p * n as f64).collect();
        let mut xt = vec![0.0; m];
        for i in 0..n {
            let row = design.row(i);
            let s = math::sigmoid(fit.linear_predictor(row)?);
            let r = s - design.y[i];
            let w = s * (1.0 - s);
            resid.push(r);
            curv.push(w);
            active_row(row, &active, &mut xt);
            hess.add_outer_upper(w, &xt);
            for (g, x) in stationarity.iter_mut().zip(&xt) {
                *g += r * x;
            }
        }
        hess.mirror_upper();
        Ok(LooWarmStart {
            a0: fit.a0,
            a: fit.a.clone(),
            active,
            resid,
            curv,
            penalty,
            stationarity,
            factor: hess.cholesky(),
        })
    }

    /// Starting `(A₀, A)` for the fit that leaves out row `i`.
    pub fn start(&self, design: &LogisticDesign, i: usize) -> (f64, Vec<f64>) {
        let mut a = self.a.clone();
        let Some(factor) = &self.factor else {
            return (self.a0, a);
        };
        let m = self.active.len() + 1;
        let mut xt = vec![0.0; m];
        active_row(design.row(i), &self.active, &mut xt);
        let g: Vec<f64> = (0..m)
            .map(|k| self.stationarity[k] - self.resid[i] * xt[k] - self.penalty[k])
            .collect();
        // (H − wᵢ x̃ᵢ x̃ᵢᵀ)⁻¹ g by Sherman–Morrison.
        let hg = factor.cholesky_solve(&g);
        let hx = factor.cholesky_solve(&xt);
        let w = self.curv[i];
        let denom = 1.0 - w * linalg::dot(&xt, &hx);
        if !(denom > 1e-8) {
            return (self.a0, a);
        }
        let coef = w * linalg::dot(&xt, &hg) / denom;
        let step: Vec<f64> = hg.iter().zip(&hx).map(|(u, v)| u + coef * v).collect();
        if step.iter().any(|v| !v.is_finite()) {
            return (self.a0, a);
        }
        for (k, &j) in self.active.iter().enumerate() {
            let next = a[j] - step[k + 1];
            // A coordinate that would change sign is parked at zero.
            a[j] = if next * a[j] > 0.0 { next } else { 0.0 };
        }
        (self.a0 - step[0], a)
    }
}

pub fn fit_logistic(design: &LogisticDesign, lambda: f64, opts: &LogisticOptions) -> Result<LogisticFit> {
    fit_logistic_excluding(design, lambda, opts, None)
}

/// Fit on all rows except `exclude`.
pub fn fit_logistic_excluding(
    design: &LogisticDesign,
    lambda: f64,
    opts: &LogisticOptions,
    exclude: Option<usize>,
) -> Result<LogisticFit> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!(
            "lambda must be a finite nonnegative number, got {lambda}"
        )));
    }
    if let Some(i) = exclude {
        if i >= design.n() {
            return Err(Error::mismatch("excluded row bound", design.n(), i));
        }
    }
    let (n1, n2) = design.counts(exclude);
    if n1 == 0 || n2 == 0 {
        return Err(Error::SingleClass);
    }
    let q = design.width();
    let (mut a0, mut a) = match &opts.warm_start {
        Some((w0, w)) if w.len() == q => (*w0, w.clone()),
        Some((_, w)) => return Err(Error::mismatch("logistic warm start", q, w.len())),
        None => (0.0, vec![0.0; q]),
    };

    // Step size from the Lipschitz bound (1/4)(1 + mean ‖xᵢ‖²); backtracking lets it grow.
    let mean_sq = (0..design.n())
        .filter(|i| Some(*i) != exclude)
        .map(|i| linalg::dot(design.row(i), design.row(i)))
        .sum::<f64>()
        / (n1 + n2) as f64;
    let safe_step = 4.0 / (1.0 + mean_sq);
    let mut step = safe_step;

    let penalty = |coef: &[f64]| lambda * coef.iter().map(|v| math::abs(*v)).sum::<f64>();

    let mut grad = vec![0.0; q + 1];
    let mut objective = design.evaluate(a0, &a, exclude, Some(&mut grad)) + penalty(&a);

    // Extrapolated point (y0, y) and momentum. While `extrapolated` is false the
    // extrapolated point equals the iterate and its gradient is `grad`.
    let mut y0 = a0;
    let mut y = a.clone();
    let mut extrapolated = false;
    let mut momentum = 1.0_f64;
    let mut grad_y = grad.clone();
    let mut cand = vec![0.0; q];
    let mut cand_grad = vec![0.0; q + 1];
    let mut prev = vec![0.0; q];

    for iter in 0..opts.max_iter {
        let gap = optimality_gap(&grad, &a, lambda);
        if gap <= opts.tol {
            return Ok(LogisticFit {
                a0,
                a,
                lambda,
                converged: true,
                final_gap: gap,
                iterations: iter,
            });
        }

        let smooth_y = if extrapolated {
            design.evaluate(y0, &y, exclude, Some(&mut grad_y))
        } else {
            grad_y.copy_from_slice(&grad);
            objective - penalty(&a)
        };
        // Backtracking on the quadratic upper bound at y; the step is allowed to grow slowly.
        step *= 1.25;
        let (cand0, cand_smooth) = loop {
            let c0 = y0 - step * grad_y[0];
            for j in 0..q {
                cand[j] = math::soft_threshold(y[j] - step * grad_y[j + 1], step * lambda);
            }
            let f = design.evaluate(c0, &cand, exclude, Some(&mut cand_grad));
            let mut lin = (c0 - y0) * grad_y[0];
            let mut sq = (c0 - y0) * (c0 - y0);
            for j in 0..q {
                let dj = cand[j] - y[j];
                lin += dj * grad_y[j + 1];
                sq += dj * dj;
            }
            if f <= smooth_y + lin + sq / (2.0 * step) + 1e-15 * math::abs(smooth_y) || step < 1e-12 {
                break (c0, f);
            }
            step *= 0.5;
        };

        let cand_obj = cand_smooth + penalty(&cand);
        if cand_obj <= objective {
            let prev0 = a0;
            prev.copy_from_slice(&a);
            a0 = cand0;
            a.copy_from_slice(&cand);
            grad.copy_from_slice(&cand_grad);
            objective = cand_obj;
            let next_momentum = 0.5 * (1.0 + math::sqrt(1.0 + 4.0 * momentum * momentum));
            let c = (momentum - 1.0) / next_momentum;
            y0 = a0 + c * (a0 - prev0);
            for j in 0..q {
                y[j] = a[j] + c * (a[j] - prev[j]);
            }
            extrapolated = c != 0.0;
            momentum = next_momentum;
        } else {
            // Rejected step: restart the momentum from the current iterate.
            y0 = a0;
            y.copy_from_slice(&a);
            extrapolated = false;
            momentum = 1.0;
        }
    }
    let final_gap = optimality_gap(&grad, &a, lambda);
    Ok(LogisticFit {
        a0,
        a,
        lambda,
        converged: final_gap <= opts.tol,
        final_gap,
        iterations: opts.max_iter,
    })
}
