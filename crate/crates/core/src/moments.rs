//! Nadaraya–Watson estimates of the class means and the pooled covariance at a
//! query location, with exact leave-one-out variants.
//!
//! All moments are 1/n-normalized weighted moments with the kernel weights of
//! [`crate::kernel`]. Leaving a sample out sets its weight to zero and renormalizes
//! the rest, which is identical to refitting on the reduced sample.

use alloc::vec::Vec;

use crate::data::{Class, MixedDataset, MixedObservation};
use crate::error::{Error, Result};
use crate::kernel::{self, fill_weights, hamming_unchecked};
use crate::linalg::{self, Matrix};

/// Kernel-smoothed `(μ̂₁(u), μ̂₂(u), Σ̂(u))`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalMoments {
    pub mu1: Vec<f64>,
    pub mu2: Vec<f64>,
    pub sigma: Matrix,
    pub u: Vec<u8>,
    pub theta: f64,
}

impl LocalMoments {
    /// `μ̂₁(u) − μ̂₂(u)`.
    pub fn mean_difference(&self) -> Vec<f64> {
        linalg::sub(&self.mu1, &self.mu2)
    }

    /// `(μ̂₁(u) + μ̂₂(u)) / 2`.
    pub fn midpoint(&self) -> Vec<f64> {
        self.mu1.iter().zip(&self.mu2).map(|(a, b)| 0.5 * (a + b)).collect()
    }
}

fn check_location(samples: &[MixedObservation], u: &[u8]) -> Result<()> {
    if let Some(first) = samples.first() {
        if first.u.len() != u.len() {
            return Err(Error::mismatch("query location", first.u.len(), u.len()));
        }
    }
    if u.iter().any(|&b| b > 1) {
        return Err(Error::NonBinaryLocation);
    }
    Ok(())
}

fn weights_for(samples: &[MixedObservation], u: &[u8], theta: f64, exclude: Option<usize>) -> Result<Vec<f64>> {
    kernel::check_theta(theta)?;
    check_location(samples, u)?;
    if let Some(i) = exclude {
        if i >= samples.len() {
            return Err(Error::mismatch("excluded index bound", samples.len(), i));
        }
    }
    let dist: Vec<u32> = samples.iter().map(|s| hamming_unchecked(&s.u, u)).collect();
    let mut w = Vec::new();
    if !fill_weights(&dist, theta, exclude, &mut w) {
        return Err(Error::EmptySample("local moments"));
    }
    Ok(w)
}

fn weighted_mean(samples: &[MixedObservation], w: &[f64]) -> Vec<f64> {
    let p = samples[0].z.len();
    let mut mean = alloc::vec![0.0; p];
    for (s, &wi) in samples.iter().zip(w) {
        if wi == 0.0 {
            continue;
        }
        for (m, z) in mean.iter_mut().zip(&s.z) {
            *m += wi * z;
        }
    }
    mean
}

/// `Σ wᵢ (zᵢ − μ̂)(zᵢ − μ̂)ᵀ`, which equals `Σ wᵢ zᵢ zᵢᵀ − μ̂ μ̂ᵀ` when the weights sum
/// to one and is PSD by construction.
fn weighted_cov(samples: &[MixedObservation], w: &[f64], mean: &[f64]) -> Matrix {
    let p = mean.len();
    let mut cov = Matrix::zeros(p, p);
    let mut centered = alloc::vec![0.0; p];
    for (s, &wi) in samples.iter().zip(w) {
        if wi == 0.0 {
            continue;
        }
        for ((c, z), m) in centered.iter_mut().zip(&s.z).zip(mean) {
            *c = z - m;
        }
        cov.add_outer_upper(wi, &centered);
    }
    cov.mirror_upper();
    cov
}

/// Kernel-weighted mean of `z` at location `u`. With `exclude`, that sample is
/// dropped and the remaining weights renormalized.
pub fn local_mean(samples: &[MixedObservation], u: &[u8], theta: f64, exclude: Option<usize>) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptySample("local mean"));
    }
    let w = weights_for(samples, u, theta, exclude)?;
    Ok(weighted_mean(samples, &w))
}

/// Kernel-weighted covariance of `z` at location `u`.
pub fn local_class_cov(samples: &[MixedObservation], u: &[u8], theta: f64) -> Result<Matrix> {
    Ok(local_class_moments(samples, u, theta, None)?.1)
}

/// Mean and covariance from a single weight computation.
pub fn local_class_moments(
    samples: &[MixedObservation],
    u: &[u8],
    theta: f64,
    exclude: Option<usize>,
) -> Result<(Vec<f64>, Matrix)> {
    if samples.is_empty() {
        return Err(Error::EmptySample("local covariance"));
    }
    let w = weights_for(samples, u, theta, exclude)?;
    let mean = weighted_mean(samples, &w);
    let cov = weighted_cov(samples, &w, &mean);
    Ok((mean, cov))
}

/// `(n₁/n) Σ₁ + (n₂/n) Σ₂`.
pub fn pooled_cov(sigma1: &Matrix, sigma2: &Matrix, n1: usize, n2: usize) -> Result<Matrix> {
    if sigma1.rows() != sigma2.rows() || sigma1.cols() != sigma2.cols() {
        return Err(Error::mismatch(
            "pooled covariance shapes",
            sigma1.rows() * sigma1.cols(),
            sigma2.rows() * sigma2.cols(),
        ));
    }
    if n1 == 0 || n2 == 0 {
        return Err(Error::EmptySample("pooled covariance"));
    }
    let n = (n1 + n2) as f64;
    let (a, b) = (n1 as f64 / n, n2 as f64 / n);
    let data = sigma1
        .as_slice()
        .iter()
        .zip(sigma2.as_slice())
        .map(|(x, y)| a * x + b * y)
        .collect();
    Matrix::from_row_major(sigma1.rows(), sigma1.cols(), data)
}

/// All three estimators at `u`. With `exclude = Some((class, i))` the sample is removed
/// from its class's mean and covariance and from that class's count in the pooling.
pub fn moments_at(
    dataset: &MixedDataset,
    u: &[u8],
    theta: f64,
    exclude: Option<(Class, usize)>,
) -> Result<LocalMoments> {
    if u.len() != dataset.d() {
        return Err(Error::mismatch("query location", dataset.d(), u.len()));
    }
    let skip = |c: Class| exclude.filter(|(ec, _)| *ec == c).map(|(_, i)| i);
    let (mu1, s1) = local_class_moments(dataset.class1(), u, theta, skip(Class::One))?;
    let (mu2, s2) = local_class_moments(dataset.class2(), u, theta, skip(Class::Two))?;
    let n1 = dataset.n1() - usize::from(skip(Class::One).is_some());
    let n2 = dataset.n2() - usize::from(skip(Class::Two).is_some());
    let sigma = pooled_cov(&s1, &s2, n1, n2)?;
    Ok(LocalMoments {
        mu1,
        mu2,
        sigma,
        u: u.to_vec(),
        theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn obs(z: &[f64], u: &[u8]) -> MixedObservation {
        MixedObservation::new(z.to_vec(), u.to_vec()).unwrap()
    }

    #[test]
    fn global_mean_at_half_theta() {
        let s = vec![
            obs(&[1.0, 0.0], &[0, 1]),
            obs(&[3.0, 2.0], &[1, 1]),
            obs(&[5.0, 4.0], &[0, 0]),
        ];
        let m = local_mean(&s, &[1, 0], 0.5, None).unwrap();
        assert!((m[0] - 3.0).abs() < 1e-15);
        assert!((m[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn quarter_theta_weighting() {
        let s = vec![obs(&[4.0], &[0]), obs(&[8.0], &[1])];
        let m = local_mean(&s, &[0], 0.25, None).unwrap();
        assert!((m[0] - (3.0 * 4.0 + 8.0) / 4.0).abs() < 1e-14);
    }

    #[test]
    fn excluding_only_exact_match_falls_back_to_neighbours() {
        let s = vec![obs(&[10.0], &[0, 0]), obs(&[1.0], &[1, 0]), obs(&[3.0], &[0, 1])];
        let m = local_mean(&s, &[0, 0], 0.0, Some(0)).unwrap();
        assert_eq!(m, vec![2.0]);
        assert!(local_mean(&s[..1], &[0, 0], 0.0, Some(0)).is_err());
    }

    #[test]
    fn covariance_examples() {
        let one = vec![obs(&[1.0, 2.0], &[0])];
        let c = local_class_cov(&one, &[0], 0.3).unwrap();
        assert_eq!(c, Matrix::zeros(2, 2));

        let two = vec![obs(&[1.0], &[0]), obs(&[-1.0], &[1])];
        let c = local_class_cov(&two, &[0], 0.5).unwrap();
        assert!((c[(0, 0)] - 1.0).abs() < 1e-15);

        let s = vec![obs(&[1.0, 2.0], &[0]), obs(&[3.0, 1.0], &[1]), obs(&[2.0, 6.0], &[1])];
        let c = local_class_cov(&s, &[0], 0.5).unwrap();
        // biased sample covariance
        let mx = 2.0;
        let my = 3.0;
        let cxy = ((1.0 - mx) * (2.0 - my) + (3.0 - mx) * (1.0 - my) + (2.0 - mx) * (6.0 - my)) / 3.0;
        assert!((c[(0, 1)] - cxy).abs() < 1e-14);
        assert_eq!(c[(0, 1)], c[(1, 0)]);
        assert!(local_class_cov(&[], &[0], 0.5).is_err());
    }

    #[test]
    fn pooled_examples() {
        let i = Matrix::identity(2);
        assert_eq!(pooled_cov(&i, &i, 5, 5).unwrap(), i);
        let p = pooled_cov(&i.scaled(4.0), &Matrix::zeros(2, 2), 1, 3).unwrap();
        assert!(p.max_abs_diff(&i) < 1e-15);
        let a = Matrix::from_rows(&[&[1.0, 0.5], &[0.5, 1.0]]).unwrap();
        let b = Matrix::from_rows(&[&[1.0, -0.5], &[-0.5, 1.0]]).unwrap();
        assert!(pooled_cov(&a, &b, 7, 7).unwrap().max_abs_diff(&i) < 1e-15);
        assert!(pooled_cov(&a, &Matrix::zeros(3, 3), 1, 1).is_err());
    }

    #[test]
    fn cell_mean_at_zero_theta() {
        let c1 = vec![obs(&[1.0], &[1, 0]), obs(&[3.0], &[1, 0])];
        let c2 = vec![obs(&[-1.0], &[0, 0]), obs(&[-5.0], &[1, 1])];
        let ds = MixedDataset::new(c1, c2).unwrap();
        let m = moments_at(&ds, &[1, 0], 0.0, None).unwrap();
        assert_eq!(m.mu1, vec![2.0]);
        assert!((m.sigma[(0, 0)] - 2.5).abs() < 1e-15);
        assert!(moments_at(&ds, &[1], 0.2, None).is_err());
    }
}
