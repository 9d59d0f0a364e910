use cadx::classifiers::{
    render_model, train_gd, train_mlp, Class, Classifier, GdParams, GdStepMode, LabeledDataset, MlpParams, ModelKind,
    Normalization, BREAST_LAYERS,
};
use cadx::data_io::{load_wbc_csv, synthesize_lung_dataset, SyntheticSpec};
use cadx::evaluation::{evaluate_with, learning_curve, split_dataset};
use cadx::pipeline::{extract_lung, fit_model, train_pipeline, ExtractConfig, Pipeline, TrainConfig};

fn wbc() -> LabeledDataset {
    load_wbc_csv(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/breast-cancer-wisconsin.data"))
        .unwrap()
        .dataset
}

#[test]
fn seven_layer_network_trains_on_wbc_without_overflow() {
    let data = wbc();
    let scaled = Normalization::fit(&data).apply_dataset(&data);
    let fit = train_mlp(
        &scaled,
        &MlpParams {
            layer_sizes: BREAST_LAYERS.to_vec(),
            epochs: 1000,
            seed: 11,
            ..MlpParams::default()
        },
    )
    .unwrap();
    // initial loss plus one entry per epoch
    assert_eq!(fit.losses.len(), 1001);
    assert!(fit.losses.iter().all(|l| l.is_finite()));
    assert!(fit.model.parameters().iter().all(|p| p.is_finite()));
    assert!(fit.losses.last().unwrap() <= fit.losses.first().unwrap());
}

#[test]
fn gd_loss_is_non_increasing_on_wbc() {
    for step in [0.05, 0.1, 0.5] {
        let fit = train_gd(
            &wbc(),
            &GdParams {
                iterations: 500,
                step,
                ..GdParams::default()
            },
        )
        .unwrap();
        assert!(fit.losses.windows(2).all(|w| w[1] <= w[0] + 1e-12), "step {step}");
    }
}

#[test]
fn paper_step_descends_slowly() {
    let paper = train_gd(
        &wbc(),
        &GdParams {
            mode: GdStepMode::Paper,
            ..GdParams::default()
        },
    )
    .unwrap();
    let practical = train_gd(&wbc(), &GdParams::default()).unwrap();
    assert!(paper.losses.windows(2).all(|w| w[1] <= w[0]));
    let (p, q) = (*paper.losses.last().unwrap(), *practical.losses.last().unwrap());
    assert!(p < paper.losses[0] && p > 2.0 * q, "paper {p}, practical {q}");
}

#[test]
fn training_is_deterministic() {
    let data = wbc();
    for kind in [ModelKind::Gd, ModelKind::Ann, ModelKind::Svm] {
        let mut cfg = TrainConfig::new(Pipeline::Breast);
        cfg.kind = kind;
        cfg.seed = 5;
        cfg.mlp.epochs = 200;
        let a = train_pipeline(&data, &cfg).unwrap();
        let b = train_pipeline(&data, &cfg).unwrap();
        assert_eq!(render_model(&a.model), render_model(&b.model), "{kind:?}");
    }
}

#[test]
fn breast_split_is_55_45() {
    let (train, test) = split_dataset(&wbc(), 0.55, 7).unwrap();
    assert_eq!(train.len() + test.len(), 683);
    let frac = train.len() as f64 / 683.0;
    assert!((frac - 0.55).abs() < 0.01, "{frac}");
}

#[test]
fn stub_scorer_reproduces_published_mcc() {
    // 129 TP, 5 FP, 59 TN, 6 FN
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (n, label, score) in [(129, Class::Malignant, 1.0), (5, Class::Benign, 1.0), (59, Class::Benign, 0.0), (6, Class::Malignant, 0.0)] {
        for _ in 0..n {
            rows.push(vec![score]);
            labels.push(label);
        }
    }
    let data = LabeledDataset::new(vec!["score".into()], rows, labels).unwrap();
    let counts = evaluate_with(
        |x: &[f64]| {
            Ok(cadx::classifiers::Diagnosis::from_score(x[0], 0.0))
        },
        &data,
    )
    .unwrap();
    let mcc = cadx::evaluation::metrics(&counts).mcc.unwrap();
    assert!((mcc - 0.874).abs() < 5e-4, "{mcc}");
}

#[test]
fn lung_learning_curve() {
    let samples = synthesize_lung_dataset(&SyntheticSpec::new(31, 80, 96)).unwrap();
    let cfg = ExtractConfig::default();
    let rows: Vec<Vec<f64>> = samples.iter().map(|(img, _)| extract_lung(img, &cfg.lung).unwrap().to_vec()).collect();
    let data = LabeledDataset::new(
        Pipeline::Lung.feature_names(),
        rows,
        samples.iter().map(|s| s.1).collect(),
    )
    .unwrap();
    let (train, test) = split_dataset(&data, 0.7, 1).unwrap();
    let tc = TrainConfig::new(Pipeline::Lung);
    let sizes = [10, 30, train.len()];
    let trainer = |d: &LabeledDataset| fit_model(d, &tc).map(|(m, _, _)| m);
    let a = learning_curve(&train, &test, &sizes, 9, trainer).unwrap();
    let b = learning_curve(&train, &test, &sizes, 9, trainer).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.iter().map(|p| p.size).collect::<Vec<_>>(), sizes);
    for p in &a {
        let acc = p.accuracy.unwrap();
        assert!((0.0..=1.0).contains(&acc));
        assert_eq!(p.inconclusive_rate, Some(0.0));
    }
    assert!(a.last().unwrap().accuracy.unwrap() >= 0.9);
    assert!(learning_curve(&train, &test, &[train.len() + 1], 9, trainer).is_err());
}

#[test]
fn model_accepts_raw_rows() {
    let data = wbc();
    let mut cfg = TrainConfig::new(Pipeline::Breast);
    cfg.mlp.epochs = 300;
    let (model, _, _) = fit_model(&data, &cfg).unwrap();
    assert_eq!(model.input_dim(), 9);
    let p = model.predict(&[10.0; 9]).unwrap();
    assert!(p.score > 0.5);
}
