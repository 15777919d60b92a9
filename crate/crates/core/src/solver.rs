//! Cyclic coordinate descent for the ℓ1-penalized quadratic
//!
//! ```text
//! minimize  bᵀΩb − 2aᵀb + λ‖b‖₁
//! ```
//!
//! which defines the local discriminant direction with `Ω = Σ̂(u)` and
//! `a = μ̂₁(u) − μ̂₂(u)`. The coordinate update is
//! `b_j ← S(a_j − Σ_{k≠j} Ω_jk b_k, λ/2) / Ω_jj`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::math;

/// Lower clamp applied to `Ω_jj` so updates stay defined on singular kernel covariances.
pub const DIAGONAL_FLOOR: f64 = 1e-8;

const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadProblem {
    omega: Matrix,
    a: Vec<f64>,
    lambda: f64,
}

impl QuadProblem {
    /// Validates the inputs and clamps the diagonal of `omega` at [`DIAGONAL_FLOOR`].
    pub fn new(mut omega: Matrix, a: Vec<f64>, lambda: f64) -> Result<Self> {
        if !omega.is_square() {
            return Err(Error::mismatch("quadratic matrix", omega.rows(), omega.cols()));
        }
        if a.len() != omega.rows() {
            return Err(Error::mismatch("linear term", omega.rows(), a.len()));
        }
        if !omega.is_finite() || a.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("quadratic problem"));
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!(
                "lambda must be a finite nonnegative number, got {lambda}"
            )));
        }
        let scale = linalg::max_abs(omega.as_slice()).max(1.0);
        if omega.max_asymmetry() > SYMMETRY_TOL * scale {
            return Err(Error::InvalidParameter("quadratic matrix is not symmetric".into()));
        }
        for j in 0..omega.rows() {
            if omega[(j, j)] < DIAGONAL_FLOOR {
                omega[(j, j)] = DIAGONAL_FLOOR;
            }
        }
        Ok(QuadProblem { omega, a, lambda })
    }

    pub fn omega(&self) -> &Matrix {
        &self.omega
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// Same quadratic with a different penalty.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!(
                "lambda must be a finite nonnegative number, got {lambda}"
            )));
        }
        Ok(QuadProblem {
            omega: self.omega.clone(),
            a: self.a.clone(),
            lambda,
        })
    }

    /// `bᵀΩb − 2aᵀb + λ‖b‖₁`.
    pub fn objective(&self, b: &[f64]) -> Result<f64> {
        let quad = self.omega.quad_form(b)?;
        let l1: f64 = b.iter().map(|v| math::abs(*v)).sum();
        Ok(quad - 2.0 * linalg::dot(&self.a, b) + self.lambda * l1)
    }

    /// Smallest λ for which `b = 0` is optimal: `2‖a‖_∞`.
    pub fn lambda_max(&self) -> f64 {
        2.0 * linalg::max_abs(&self.a)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Stop once the largest coordinate change in a sweep and the KKT residual are below this.
    pub tol: f64,
    /// Maximum number of full sweeps.
    pub max_iter: usize,
    pub warm_start: Option<Vec<f64>>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-7,
            max_iter: 10_000,
            warm_start: None,
        }
    }
}

impl SolverOptions {
    pub fn warm(mut self, b: Vec<f64>) -> Self {
        self.warm_start = Some(b);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseSolution {
    pub b: Vec<f64>,
    pub active_set: Vec<usize>,
    /// Number of sweeps performed.
    pub iterations: usize,
    pub kkt_residual: f64,
}

impl SparseSolution {
    fn from_b(b: Vec<f64>, iterations: usize, kkt_residual: f64) -> Self {
        let active_set = b
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, _)| i)
            .collect();
        SparseSolution {
            b,
            active_set,
            iterations,
            kkt_residual,
        }
    }
}

fn kkt_from_gradient(omega_b: &[f64], a: &[f64], b: &[f64], lambda: f64) -> f64 {
    let mut worst = 0.0_f64;
    for j in 0..b.len() {
        let g = 2.0 * (omega_b[j] - a[j]);
        let r = if b[j] != 0.0 {
            math::abs(g + lambda * math::sign(b[j]))
        } else {
            (math::abs(g) - lambda).max(0.0)
        };
        worst = worst.max(r);
    }
    worst
}

/// Largest violation of the subgradient optimality conditions at `b`.
pub fn kkt_residual(problem: &QuadProblem, b: &[f64]) -> Result<f64> {
    let omega_b = problem.omega.mul_vec(b)?;
    Ok(kkt_from_gradient(&omega_b, &problem.a, b, problem.lambda))
}

pub fn solve(problem: &QuadProblem, opts: &SolverOptions) -> Result<SparseSolution> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter("solver tolerance must be positive".into()));
    }
    let p = problem.dim();
    let omega = &problem.omega;
    let a = &problem.a;
    let half_lambda = 0.5 * problem.lambda;

    let mut b = match &opts.warm_start {
        Some(w) if w.len() != p => return Err(Error::mismatch("warm start", p, w.len())),
        Some(w) if w.iter().any(|v| !v.is_finite()) => return Err(Error::NonFinite("warm start")),
        Some(w) => w.clone(),
        None => vec![0.0; p],
    };
    // Running Ωb, updated by column after each coordinate move.
    let mut omega_b = omega.mul_vec(&b)?;

    let mut sweeps = 0;
    while sweeps < opts.max_iter {
        sweeps += 1;
        let mut max_change = 0.0_f64;
        for j in 0..p {
            let ojj = omega[(j, j)];
            let partial = a[j] - (omega_b[j] - ojj * b[j]);
            let next = math::soft_threshold(partial, half_lambda) / ojj;
            let step = next - b[j];
            if step != 0.0 {
                b[j] = next;
                for (g, o) in omega_b.iter_mut().zip(omega.row(j)) {
                    *g += o * step;
                }
                max_change = max_change.max(math::abs(step));
            }
        }
        if !max_change.is_finite() {
            return Err(Error::NonFinite("coordinate descent iterate"));
        }
        if max_change < opts.tol && kkt_from_gradient(&omega_b, a, &b, problem.lambda) <= opts.tol {
            let kkt = kkt_residual(problem, &b)?;
            if kkt <= opts.tol {
                return Ok(SparseSolution::from_b(b, sweeps, kkt));
            }
            omega_b = omega.mul_vec(&b)?;
        }
    }
    let kkt = kkt_residual(problem, &b)?;
    if kkt <= opts.tol {
        Ok(SparseSolution::from_b(b, sweeps, kkt))
    } else {
        Err(Error::NoConvergence {
            iterations: sweeps,
            kkt_residual: kkt,
        })
    }
}

/// Solves along a penalty ladder, warm-starting each point from the previous one.
pub fn solve_path(problem: &QuadProblem, lambdas: &[f64], opts: &SolverOptions) -> Vec<Result<SparseSolution>> {
    let mut warm = opts.warm_start.clone();
    lambdas
        .iter()
        .map(|&lambda| {
            let pr = problem.with_lambda(lambda)?;
            let o = SolverOptions {
                warm_start: warm.clone(),
                ..opts.clone()
            };
            let sol = solve(&pr, &o);
            if let Ok(s) = &sol {
                warm = Some(s.b.clone());
            }
            sol
        })
        .collect()
}
