use std::sync::Arc;
use std::thread;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slm_core::classifier::location_design;
use slm_core::logistic::{fit_logistic, LogisticDesign, LogisticFit, LogisticOptions};
use slm_core::sim::{model_sigma, oracle_params, sample_dataset, ModelId, SimulationSpec};
use slm_core::solver::{solve, QuadProblem, SolverOptions};
use slm_core::{Class, MixedDataset, MixedObservation, SlmModel};

fn constant_fit(a0: f64, d: usize) -> LogisticFit {
    LogisticFit {
        a0,
        a: vec![0.0; d],
        lambda: 0.0,
        converged: true,
        final_gap: 0.0,
        iterations: 0,
    }
}

fn simulated(model: ModelId, seed: u64) -> MixedDataset {
    let spec = SimulationSpec::new(model, 4, 5, 40, 40, seed).unwrap();
    sample_dataset(&spec).unwrap().0
}

/// The illustration geometry: class 1 `X | U ~ N(2U − 1, 1)`, class 2 mirrored.
fn illustration_toy() -> MixedDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut draw = |class1: bool| {
        let u = rng.random::<bool>();
        let mean = if u == class1 { 1.0 } else { -1.0 };
        let z: f64 = mean + rng.random_range(-0.5..0.5);
        MixedObservation::new(vec![z], vec![u8::from(u)]).unwrap()
    };
    let c1 = (0..60).map(|_| draw(true)).collect();
    let c2 = (0..60).map(|_| draw(false)).collect();
    MixedDataset::new(c1, c2).unwrap()
}

#[test]
fn discriminant_examples() {
    let data = simulated(ModelId::Two, 1);
    let model = SlmModel::new(data, 0.2, 0.05, constant_fit(0.0, 4)).unwrap();
    let u = [1, 0, 1, 1];
    let rule = model.local_rule(&u).unwrap();
    // midpoint scores zero when the intercept vanishes
    assert!(model.discriminant(&rule.midpoint, &u).unwrap().abs() < 1e-12);
    // shifting z moves the score by β̂ᵀδ
    let delta = [0.3, -1.0, 2.0, 0.0, 0.7];
    let z0 = [0.1, 0.2, -0.4, 1.0, 0.0];
    let z1: Vec<f64> = z0.iter().zip(&delta).map(|(a, b)| a + b).collect();
    let expected: f64 = rule.beta.b.iter().zip(&delta).map(|(b, d)| b * d).sum();
    let moved = model.discriminant(&z1, &u).unwrap() - model.discriminant(&z0, &u).unwrap();
    assert!((moved - expected).abs() < 1e-12);
}

#[test]
fn illustration_toy_scores_follow_the_sign_of_xu() {
    let model = SlmModel::new(illustration_toy(), 0.0, 0.0, constant_fit(0.0, 1)).unwrap();
    let beta1 = model.beta_at(&[1]).unwrap().b[0];
    let beta0 = model.beta_at(&[0]).unwrap().b[0];
    assert!(beta1 > 0.0 && beta0 < 0.0);
    assert_eq!(model.classify(&[1.0], &[1]).unwrap(), Class::One);
    assert_eq!(model.classify(&[-1.0], &[1]).unwrap(), Class::Two);
    assert_eq!(model.classify(&[-1.0], &[0]).unwrap(), Class::One);
    assert_eq!(model.error_rate(model.train()).unwrap(), 0.0);
}

#[test]
fn error_rate_examples() {
    let data = simulated(ModelId::One, 2);
    // β forced to zero and a positive intercept: always class 1
    let constant = SlmModel::new(data.clone(), 0.3, 1e9, constant_fit(1.0, 4)).unwrap();
    let rate = constant.error_rate(&data).unwrap();
    assert!((rate - 0.5).abs() < 1e-15);

    let model = SlmModel::fit(data.clone(), 0.3, 0.1, 0.01).unwrap();
    let obs = &data.class1()[0];
    let class = model.classify(&obs.z, &obs.u).unwrap();
    let single = if class == Class::One {
        MixedDataset::with_dims(vec![obs.clone()], vec![], 5, 4).unwrap()
    } else {
        MixedDataset::with_dims(vec![], vec![obs.clone()], 5, 4).unwrap()
    };
    assert_eq!(model.error_rate(&single).unwrap(), 0.0);
}

fn permuted_design(data: &MixedDataset, seed: u64) -> LogisticDesign {
    let mut labels: Vec<Class> = data.iter_labelled().map(|(c, _)| c).collect();
    labels.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let rows: Vec<(Vec<f64>, Class)> = data
        .iter_labelled()
        .zip(labels)
        .map(|((_, o), c)| (o.u.iter().map(|&b| f64::from(b)).collect(), c))
        .collect();
    LogisticDesign::new(rows.iter().map(|(x, c)| (x.as_slice(), *c)), data.d()).unwrap()
}

#[test]
fn direction_ignores_the_intercept_fit() {
    for (k, model_id) in [ModelId::One, ModelId::Two, ModelId::Three, ModelId::Four]
        .into_iter()
        .enumerate()
    {
        let data = simulated(model_id, 10 + k as u64);
        let honest = fit_logistic(&location_design(&data).unwrap(), 0.01, &LogisticOptions::default()).unwrap();
        let scrambled = fit_logistic(&permuted_design(&data, k as u64), 0.01, &LogisticOptions::default()).unwrap();
        assert_ne!(honest.a0.to_bits(), scrambled.a0.to_bits());
        let m1 = SlmModel::new(data.clone(), 0.25, 0.05, honest).unwrap();
        let m2 = SlmModel::new(data, 0.25, 0.05, scrambled).unwrap();
        for u in [[0, 0, 0, 0], [1, 0, 1, 0], [1, 1, 1, 1]] {
            let b1 = m1.beta_at(&u).unwrap().b;
            let b2 = m2.beta_at(&u).unwrap().b;
            assert!(b1.iter().zip(&b2).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }
}

#[test]
fn oracle_moments_recover_the_bayes_direction() {
    for model_id in [ModelId::One, ModelId::Two, ModelId::Three, ModelId::Four] {
        let spec = SimulationSpec::new(model_id, 6, 8, 1, 1, 0).unwrap();
        for u in [[0u8, 0, 1, 0, 0, 0], [1, 0, 1, 0, 1, 0], [0, 1, 1, 0, 1, 1]] {
            let o = oracle_params(&spec, &u);
            let a: Vec<f64> = o.mu1.iter().zip(&o.mu2).map(|(x, y)| x - y).collect();
            let problem = QuadProblem::new(model_sigma(model_id, &u, 8), a, 0.0).unwrap();
            let opts = SolverOptions {
                tol: 1e-12,
                max_iter: 1_000_000,
                ..SolverOptions::default()
            };
            let b = solve(&problem, &opts).unwrap().b;
            for (x, y) in b.iter().zip(&o.beta) {
                assert!((x - y).abs() < 1e-6, "{model_id:?} {u:?}: {x} vs {y}");
            }
        }
    }
}

#[test]
fn cached_and_uncached_answers_agree() {
    let data = simulated(ModelId::Three, 5);
    let cached = SlmModel::fit(data.clone(), 0.2, 0.05, 0.02).unwrap();
    let plain = cached.clone().with_cache(false);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..30 {
        let u: Vec<u8> = (0..4).map(|_| u8::from(rng.random::<bool>())).collect();
        let z: Vec<f64> = (0..5).map(|_| rng.random_range(-2.0..2.0)).collect();
        let a = cached.discriminant(&z, &u).unwrap();
        let b = plain.discriminant(&z, &u).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
    assert!(cached.cached_locations() <= 16);
}

#[test]
fn concurrent_readers_see_one_answer() {
    let data = simulated(ModelId::Four, 7);
    let model = Arc::new(SlmModel::fit(data.clone(), 0.3, 0.05, 0.02).unwrap());
    let reference: Vec<f64> = data
        .iter_labelled()
        .map(|(_, o)| {
            model
                .clone()
                .as_ref()
                .clone()
                .with_cache(false)
                .discriminant(&o.z, &o.u)
                .unwrap()
        })
        .collect();
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let model = Arc::clone(&model);
            let data = data.clone();
            thread::spawn(move || {
                data.iter_labelled()
                    .map(|(_, o)| model.discriminant(&o.z, &o.u).unwrap())
                    .collect::<Vec<f64>>()
            })
        })
        .collect();
    for h in handles {
        let got = h.join().unwrap();
        assert!(got.iter().zip(&reference).all(|(a, b)| a.to_bits() == b.to_bits()));
    }
}

#[test]
fn warm_ball_fills_the_cache() {
    let model = SlmModel::fit(simulated(ModelId::One, 9), 0.3, 0.05, 0.02).unwrap();
    assert_eq!(model.warm_ball(&[0, 0, 0, 0], 1).unwrap(), 5);
    assert_eq!(model.cached_locations(), 5);
    let evaluations = model.moment_evaluations();
    model.beta_at(&[0, 1, 0, 0]).unwrap();
    assert_eq!(model.moment_evaluations(), evaluations);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn raising_the_intercept_never_turns_class_one_into_class_two(
        seed in any::<u64>(),
        a0 in -3.0f64..3.0,
        bump in 0.0f64..5.0,
    ) {
        let data = simulated(ModelId::Two, 3);
        let low = SlmModel::new(data.clone(), 0.2, 0.05, constant_fit(a0, 4)).unwrap();
        let high = SlmModel::new(data, 0.2, 0.05, constant_fit(a0 + bump, 4)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u: Vec<u8> = (0..4).map(|_| u8::from(rng.random::<bool>())).collect();
        let z: Vec<f64> = (0..5).map(|_| rng.random_range(-3.0..3.0)).collect();
        if low.classify(&z, &u).unwrap() == Class::One {
            prop_assert_eq!(high.classify(&z, &u).unwrap(), Class::One);
        }
        prop_assert!(high.discriminant(&z, &u).unwrap() >= low.discriminant(&z, &u).unwrap());
    }
}
