//! Hamming distances on `{0,1}^d` and exponential kernel weights.
//!
//! The kernel `exp{−t / (d h)}` over a Hamming distance `t` is written in the bounded
//! parameterization `θ = e^{−1/(dh)} / (1 + e^{−1/(dh)}) ∈ [0, 0.5]`, so a sample at
//! distance `t` gets weight proportional to `(θ / (1 − θ))^t`. `θ = 0.5` weights every
//! sample equally (global means); `θ → 0` keeps only the nearest cell.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Normalized weights over a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelWeights {
    pub weights: Vec<f64>,
    pub theta: f64,
}

/// Number of coordinates where `a` and `b` differ.
pub fn hamming(a: &[u8], b: &[u8]) -> Result<u32> {
    if a.len() != b.len() {
        return Err(Error::mismatch("hamming operands", a.len(), b.len()));
    }
    Ok(hamming_unchecked(a, b))
}

#[inline]
pub(crate) fn hamming_unchecked(a: &[u8], b: &[u8]) -> u32 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u32
}

pub fn check_theta(theta: f64) -> Result<()> {
    if (0.0..=0.5).contains(&theta) {
        Ok(())
    } else {
        Err(Error::InvalidTheta(theta))
    }
}

/// Weights `∝ (θ/(1−θ))^{distance}` normalized to sum to one.
pub fn normalized_weights(distances: &[u32], theta: f64) -> Result<KernelWeights> {
    check_theta(theta)?;
    if distances.is_empty() {
        return Err(Error::EmptySample("kernel distances"));
    }
    let mut weights = Vec::with_capacity(distances.len());
    fill_weights(distances, theta, None, &mut weights);
    Ok(KernelWeights { weights, theta })
}

/// Writes normalized weights into `out`. The entry at `skip`, if any, gets weight 0
/// and the rest are renormalized; the minimum distance is taken over the kept
/// entries so that `θ = 0` still yields the nearest-cell average. Returns `false`
/// when no entry is kept.
pub(crate) fn fill_weights(distances: &[u32], theta: f64, skip: Option<usize>, out: &mut Vec<f64>) -> bool {
    out.clear();
    out.resize(distances.len(), 0.0);
    let kept = |i: usize| Some(i) != skip;
    let Some(dmin) = distances
        .iter()
        .enumerate()
        .filter(|(i, _)| kept(*i))
        .map(|(_, &t)| t)
        .min()
    else {
        return false;
    };

    if theta == 0.0 {
        for (i, &t) in distances.iter().enumerate() {
            if kept(i) && t == dmin {
                out[i] = 1.0;
            }
        }
    } else {
        // Subtracting the minimum keeps the largest weight at exactly 1.
        let log_ratio = math::ln(theta / (1.0 - theta));
        let mut cache = [f64::NAN; 64];
        for (i, &t) in distances.iter().enumerate() {
            if !kept(i) {
                continue;
            }
            let k = (t - dmin) as usize;
            out[i] = if k < cache.len() {
                if cache[k].is_nan() {
                    cache[k] = math::exp(k as f64 * log_ratio);
                }
                cache[k]
            } else {
                math::exp(k as f64 * log_ratio)
            };
        }
    }
    let total: f64 = out.iter().sum();
    for w in out.iter_mut() {
        *w /= total;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming(&[0, 0, 0], &[0, 0, 0]).unwrap(), 0);
        assert_eq!(hamming(&[1, 0, 1], &[0, 0, 1]).unwrap(), 1);
        assert_eq!(hamming(&[1, 1], &[0, 0]).unwrap(), 2);
        assert!(hamming(&[1], &[0, 0]).is_err());
    }

    #[test]
    fn global_and_cell_limits() {
        let w = normalized_weights(&[0, 1, 2], 0.5).unwrap().weights;
        for v in &w {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
        let w = normalized_weights(&[0, 1, 2], 0.0).unwrap().weights;
        assert_eq!(w, vec![1.0, 0.0, 0.0]);
        let w = normalized_weights(&[2, 1, 1], 0.0).unwrap().weights;
        assert_eq!(w, vec![0.0, 0.5, 0.5]);
    }

    #[test]
    fn quarter_theta_gives_one_third_ratio() {
        let w = normalized_weights(&[0, 1], 0.25).unwrap().weights;
        assert!((w[0] - 0.75).abs() < 1e-15);
        assert!((w[1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(normalized_weights(&[0], 0.6), Err(Error::InvalidTheta(0.6)));
        assert!(normalized_weights(&[0], -0.1).is_err());
        assert!(normalized_weights(&[0], f64::NAN).is_err());
        assert!(normalized_weights(&[], 0.2).is_err());
    }

    #[test]
    fn far_distances_do_not_underflow_to_nan() {
        let w = normalized_weights(&[5000, 5001], 1e-3).unwrap().weights;
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(w[0] > w[1]);
    }

    proptest! {
        #[test]
        fn sums_to_one_and_monotone(
            dist in proptest::collection::vec(0u32..12, 1..30),
            theta in 0.0f64..0.5,
        ) {
            let w = normalized_weights(&dist, theta).unwrap().weights;
            prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(w.iter().all(|&x| x >= 0.0));
            for i in 0..dist.len() {
                for j in 0..dist.len() {
                    if dist[i] < dist[j] && theta > 0.0 {
                        prop_assert!(w[i] > w[j]);
                    }
                }
            }
        }

        #[test]
        fn permutation_equivariant(
            dist in proptest::collection::vec(0u32..12, 1..20),
            theta in 0.0f64..=0.5,
            rot in 0usize..20,
        ) {
            let w = normalized_weights(&dist, theta).unwrap().weights;
            let k = rot % dist.len();
            let mut rotated = dist.clone();
            rotated.rotate_left(k);
            let wr = normalized_weights(&rotated, theta).unwrap().weights;
            let mut expect = w.clone();
            expect.rotate_left(k);
            for (a, b) in wr.iter().zip(&expect) {
                prop_assert!((a - b).abs() < 1e-15);
            }
        }

        #[test]
        fn log_domain_matches_direct(
            dist in proptest::collection::vec(0u32..10, 1..20),
            theta in 0.01f64..0.5,
        ) {
            let w = normalized_weights(&dist, theta).unwrap().weights;
            let r = theta / (1.0 - theta);
            let raw: Vec<f64> = dist.iter().map(|&t| libm::pow(r, t as f64)).collect();
            let s: f64 = raw.iter().sum();
            for (a, b) in w.iter().zip(&raw) {
                prop_assert!((a - b / s).abs() < 1e-12);
            }
        }
    }
}
