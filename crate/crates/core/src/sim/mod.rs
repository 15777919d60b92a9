//! Simulation laboratory: the four location models, their closed-form oracle
//! quantities, Monte-Carlo Bayes risk, and the benchmark / regret / concentration
//! experiment drivers.

pub mod bench;
pub mod models;
pub mod risk;
pub mod sampling;

pub use bench::{
    benchmark, benchmark_with, concentration_probe, oracle_classify, regret_curve, regret_curve_with, run_replication,
    serial, summarize, BenchConfig, BenchRow, Method, ProbeRow, RegretRow, ReplicationMap, ReplicationResult,
};
pub use models::{model_beta, model_rho, model_sigma, oracle_params, true_eta, ModelId, OracleParams, SimulationSpec};
pub use risk::{
    bayes_risk_counting, bayes_risk_mc, conditional_bayes_risk, conditional_risk, illustration_example,
    sample_illustration, RiskEstimate,
};
pub use sampling::{draw_features_at, rng_for, sample_dataset, sample_replication};
