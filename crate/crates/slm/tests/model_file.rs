use rand::Rng;
use slm::{load_model, save_model};
use slm_core::sim::{rng_for, sample_dataset, ModelId, SimulationSpec};
use slm_core::tuning::{fit_tuned, CvScheme, TuneGrid, TuneOptions};

#[test]
fn reloaded_models_classify_identically() {
    let spec = SimulationSpec::new(ModelId::Three, 5, 6, 40, 40, 21).unwrap();
    let (train, _) = sample_dataset(&spec).unwrap();
    let mut grid = TuneGrid::default_for(&train).unwrap();
    grid.thetas = vec![0.1, 0.3];
    let opts = TuneOptions {
        cv: CvScheme::KFold(5),
        ..TuneOptions::default()
    };
    let model = fit_tuned(&train, &grid, &opts).unwrap().model;
    let text = save_model(&model, None);
    let (back, encoding) = load_model(&text).unwrap();
    assert!(encoding.is_none());
    assert_eq!(save_model(&back, None), text);

    let mut rng = rng_for(99, 0);
    for _ in 0..100 {
        let u: Vec<u8> = (0..5).map(|_| u8::from(rng.random::<bool>())).collect();
        let z: Vec<f64> = (0..6).map(|_| rng.random_range(-3.0..3.0)).collect();
        assert_eq!(model.classify(&z, &u).unwrap(), back.classify(&z, &u).unwrap());
        let (a, b) = (model.discriminant(&z, &u).unwrap(), back.discriminant(&z, &u).unwrap());
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn missing_version_is_rejected() {
    let spec = SimulationSpec::new(ModelId::One, 2, 2, 5, 5, 1).unwrap();
    let (train, _) = sample_dataset(&spec).unwrap();
    let model = slm_core::SlmModel::fit(train, 0.2, 0.1, 0.1).unwrap();
    let text = save_model(&model, None);
    let without: String = text
        .lines()
        .filter(|l| !l.contains("format_version"))
        .collect::<Vec<_>>()
        .join("\n");
    assert!(load_model(&without).is_err());
}
