use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;

/// Which covariance / direction family to simulate from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelId {
    One,
    Two,
    Three,
    Four,
}

impl ModelId {
    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(ModelId::One),
            2 => Ok(ModelId::Two),
            3 => Ok(ModelId::Three),
            4 => Ok(ModelId::Four),
            _ => Err(Error::InvalidParameter(alloc::format!("unknown model id {n}"))),
        }
    }

    pub fn number(self) -> u8 {
        match self {
            ModelId::One => 1,
            ModelId::Two => 2,
            ModelId::Three => 3,
            ModelId::Four => 4,
        }
    }

    /// Number of leading nonzero direction coordinates.
    pub fn support(self) -> usize {
        match self {
            ModelId::One | ModelId::Two => 2,
            ModelId::Three => 3,
            ModelId::Four => 5,
        }
    }

    /// Default class-1 location signal on the first five coordinates.
    pub fn default_signal(self) -> f64 {
        match self {
            ModelId::One => 0.25,
            _ => 0.30,
        }
    }
}

/// Parameters of one simulated experiment.
///
/// Class-2 locations are i.i.d. Bernoulli(1/2); class-1 coordinate `j` is
/// Bernoulli(1/2 + ξⱼ). Priors are equal.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSpec {
    pub model: ModelId,
    pub d: usize,
    pub p: usize,
    pub n1: usize,
    pub n2: usize,
    pub xi: Vec<f64>,
    pub seed: u64,
    pub test_n1: usize,
    pub test_n2: usize,
}

impl SimulationSpec {
    /// Default signal `ξ₁..₅` (0.25 for model 1, 0.30 otherwise), zero elsewhere, and a
    /// 100/100 test split.
    pub fn new(model: ModelId, d: usize, p: usize, n1: usize, n2: usize, seed: u64) -> Result<Self> {
        let mut xi = vec![0.0; d];
        for x in xi.iter_mut().take(5) {
            *x = model.default_signal();
        }
        let spec = SimulationSpec {
            model,
            d,
            p,
            n1,
            n2,
            xi,
            seed,
            test_n1: 100,
            test_n2: 100,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_xi(mut self, xi: Vec<f64>) -> Result<Self> {
        self.xi = xi;
        self.validate()?;
        Ok(self)
    }

    pub fn with_sizes(mut self, n1: usize, n2: usize) -> Self {
        self.n1 = n1;
        self.n2 = n2;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.p == 0 {
            return Err(Error::InvalidParameter("d and p must be positive".into()));
        }
        if self.xi.len() != self.d {
            return Err(Error::mismatch("location signal", self.d, self.xi.len()));
        }
        if self.xi.iter().any(|x| !(-0.5..=0.5).contains(x)) {
            return Err(Error::InvalidParameter("each 0.5 + xi_j must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

fn location_sum(u: &[u8]) -> usize {
    u.iter().map(|&b| usize::from(b)).sum()
}

/// Lag-one correlation `ρ(ū)` of the model's Toeplitz covariance `ρ^{|i−j|}`.
pub fn model_rho(model: ModelId, ubar: f64) -> f64 {
    match model {
        ModelId::One => ubar,
        ModelId::Two => math::sqrt(ubar),
        ModelId::Three => 3.0 * ubar * (1.0 - ubar),
        ModelId::Four => ubar * math::exp(-ubar),
    }
}

fn ubar(u: &[u8]) -> f64 {
    location_sum(u) as f64 / u.len() as f64
}

/// `Σ(u)_{ij} = ρ(ū)^{|i−j|}` with `0⁰ = 1`.
pub fn model_sigma(model: ModelId, u: &[u8], p: usize) -> Matrix {
    let rho = model_rho(model, ubar(u));
    let powers: Vec<f64> = (0..p).map(|k| libm::pow(rho, k as f64)).collect();
    let mut s = Matrix::zeros(p, p);
    for i in 0..p {
        for j in 0..p {
            s[(i, j)] = powers[i.abs_diff(j)];
        }
    }
    s
}

/// `β(u)`, nonzero only on the leading `support` coordinates. With
/// `t = Σu/√d − √d/2`: models 1–3 use `5t`, model 4 uses `sign(t)·½·e^{|2t|}`
/// (`sign(0) = 0`).
pub fn model_beta(model: ModelId, u: &[u8], p: usize) -> Vec<f64> {
    let d = u.len() as f64;
    let t = (2.0 * location_sum(u) as f64 - d) / (2.0 * math::sqrt(d));
    let value = match model {
        ModelId::Four => math::sign(t) * 0.5 * math::exp(math::abs(2.0 * t)),
        _ => 5.0 * t,
    };
    let mut beta = vec![0.0; p];
    for b in beta.iter_mut().take(model.support()) {
        *b = value;
    }
    beta
}

/// Stand-in for `±∞` when a location is impossible under one class.
pub const ETA_SENTINEL: f64 = 1e6;

/// `η(u) = log(p₁(u)/p₂(u))` for the product-Bernoulli location laws (equal priors).
pub fn true_eta(spec: &SimulationSpec, u: &[u8]) -> f64 {
    let mut eta = 0.0;
    for (&x, &b) in spec.xi.iter().zip(u) {
        let p1 = if b == 1 { 0.5 + x } else { 0.5 - x };
        if p1 <= 0.0 {
            log::warn!("location impossible under class 1; using -{ETA_SENTINEL} for eta");
            return -ETA_SENTINEL;
        }
        eta += math::ln(p1 / 0.5);
    }
    eta
}

/// Closed-form quantities at one location.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleParams {
    pub sigma: Matrix,
    pub beta: Vec<f64>,
    pub mu1: Vec<f64>,
    pub mu2: Vec<f64>,
    pub eta: f64,
    /// `Δ(u) = βᵀΣβ = βᵀ(μ₁ − μ₂)`.
    pub delta: f64,
}

/// `μ₁(u) = Σ(u)β(u)/2 = −μ₂(u)`.
pub fn oracle_params(spec: &SimulationSpec, u: &[u8]) -> OracleParams {
    let sigma = model_sigma(spec.model, u, spec.p);
    let beta = model_beta(spec.model, u, spec.p);
    let sb = sigma.mul_vec(&beta).expect("square oracle covariance");
    let mu1: Vec<f64> = sb.iter().map(|v| 0.5 * v).collect();
    let mu2: Vec<f64> = mu1.iter().map(|v| -v).collect();
    let delta = crate::linalg::dot(&beta, &sb).max(0.0);
    OracleParams {
        sigma,
        beta,
        mu1,
        mu2,
        eta: true_eta(spec, u),
        delta,
    }
}
