//! Semiparametric location-model (SLM) linear discriminant for observations that
//! pair a binary location vector `u ∈ {0,1}^d` with continuous features `z ∈ R^p`.
//!
//! The classifier evaluates, at every queried location `u`,
//!
//! ```text
//! D(z; u) = β(u)ᵀ [z − (μ₁(u) + μ₂(u)) / 2] + η(u)
//! ```
//!
//! where the class means and pooled covariance are Nadaraya–Watson estimates over
//! Hamming distance ([`moments`]), the direction `β(u)` solves an ℓ1-penalized
//! quadratic ([`solver`]) and the intercept `η(u)` is a main-effects penalized
//! logistic regression on `u` ([`logistic`]).
//!
//! The crate is `no_std` (with `alloc`). File formats, CLI and parallel runners live
//! in the companion `slm` crate.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod baselines;
pub mod classifier;
pub mod data;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod logistic;
pub mod math;
pub mod moments;
pub mod sim;
pub mod solver;
pub mod tuning;

pub use classifier::SlmModel;
pub use data::{Class, MixedDataset, MixedObservation};
pub use error::{Error, Result};
pub use linalg::Matrix;
