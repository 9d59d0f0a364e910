//! End-to-end chains: image to features, features to a trained model.

use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::classifiers::{
    select_feature_pair, train_gd, train_mlp, train_svm_on, GdParams, LabeledDataset, MlpParams,
    Model, ModelKind, Normalization, SvmParams, BREAST_LAYERS, MELANOMA_LAYERS,
};
use crate::data_io::{load_gray_image, load_mask, load_rgb_image, WBC_FEATURE_NAMES};
use crate::dermoscopy::{extract_lesion_features, LesionConfig, LesionFeatures, LESION_FEATURE_NAMES};
use crate::error::{Error, Result};
use crate::evaluation::{evaluate, metrics, split_dataset, ConfusionCounts, EvalReport};
use crate::imaging::{
    binarize, connected_components, morphological_close, tv_denoise, BinaryMask, GrayImage, RgbImage, Roi,
    StructuringElement, ThresholdConfig,
};
use crate::texture::{extract_lung_features, GlcmParams, LungFeatureVector, LUNG_FEATURE_NAMES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Pipeline {
    Lung,
    Melanoma,
    Breast,
}

impl Pipeline {
    pub fn as_str(&self) -> &'static str {
        match self {
            Pipeline::Lung => "lung",
            Pipeline::Melanoma => "melanoma",
            Pipeline::Breast => "breast",
        }
    }

    pub fn feature_names(&self) -> Vec<String> {
        let names: &[&str] = match self {
            Pipeline::Lung => &LUNG_FEATURE_NAMES,
            Pipeline::Melanoma => &LESION_FEATURE_NAMES,
            Pipeline::Breast => &WBC_FEATURE_NAMES,
        };
        names.iter().map(|s| s.to_string()).collect()
    }

    pub fn default_model(&self) -> ModelKind {
        match self {
            Pipeline::Lung => ModelKind::Svm,
            Pipeline::Melanoma => ModelKind::Ann,
            Pipeline::Breast => ModelKind::Gd,
        }
    }

    /// Lung pairs with the SVM, melanoma with the network, breast with
    /// either gradient descent or the network.
    pub fn allows(&self, kind: ModelKind) -> bool {
        matches!(
            (self, kind),
            (Pipeline::Lung, ModelKind::Svm)
                | (Pipeline::Melanoma, ModelKind::Ann)
                | (Pipeline::Breast, ModelKind::Gd | ModelKind::Ann)
        )
    }

    pub fn default_split(&self) -> f64 {
        match self {
            Pipeline::Breast => 0.55,
            _ => 0.7,
        }
    }

    /// Infers the pipeline whose features a model was trained on.
    pub fn for_features(names: &[String]) -> Option<Self> {
        [Pipeline::Lung, Pipeline::Melanoma, Pipeline::Breast]
            .into_iter()
            .find(|p| p.feature_names() == names)
    }
}

impl FromStr for Pipeline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lung" => Ok(Pipeline::Lung),
            "melanoma" => Ok(Pipeline::Melanoma),
            "breast" => Ok(Pipeline::Breast),
            other => Err(Error::InvalidArgument(format!("unknown pipeline `{other}`"))),
        }
    }
}

impl std::fmt::Display for Pipeline {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LungConfig {
    pub tv_weight: f64,
    pub tv_iterations: usize,
    pub threshold: ThresholdConfig,
    pub close_radius: usize,
    pub min_pixels: usize,
    pub glcm: GlcmParams,
}

impl Default for LungConfig {
    fn default() -> Self {
        Self {
            tv_weight: 0.1,
            tv_iterations: 50,
            threshold: ThresholdConfig::default(),
            close_radius: 2,
            min_pixels: 10,
            glcm: GlcmParams::default(),
        }
    }
}

/// Denoise, threshold, close the dark body mask, and return the largest
/// bright region as the nodule.
pub fn segment_lung(img: &GrayImage, cfg: &LungConfig) -> Result<Roi> {
    let smooth = tv_denoise(img, cfg.tv_weight, cfg.tv_iterations).map_err(Error::at_stage("denoise"))?;
    let t = cfg.threshold.apply(&smooth).map_err(Error::at_stage("threshold"))?;
    let body = binarize(&smooth, t);
    if body.count() == 0 || body.count() == body.bits().len() {
        return Err(Error::at_stage("threshold")(Error::DegenerateRegion("image has no contrast".into())));
    }
    let se = StructuringElement::disk(cfg.close_radius).map_err(Error::at_stage("close"))?;
    let nodules = morphological_close(&body, &se).complement();
    connected_components(&nodules, cfg.min_pixels)
        .map_err(Error::at_stage("components"))?
        .into_iter()
        .next()
        .ok_or_else(|| Error::at_stage("components")(Error::DegenerateRegion("no bright region found".into())))
}

/// Texture is measured on the input image inside the segmented region.
pub fn extract_lung(img: &GrayImage, cfg: &LungConfig) -> Result<LungFeatureVector> {
    let roi = segment_lung(img, cfg)?;
    extract_lung_features(img, &roi, &cfg.glcm).map_err(Error::at_stage("features"))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MelanomaConfig {
    pub threshold: ThresholdConfig,
    pub close_radius: usize,
    pub min_pixels: usize,
    pub lesion: LesionConfig,
}

impl Default for MelanomaConfig {
    fn default() -> Self {
        Self {
            threshold: ThresholdConfig::default(),
            close_radius: 3,
            min_pixels: 10,
            lesion: LesionConfig::default(),
        }
    }
}

/// Dark pixels of the gray image, closed, largest component.
pub fn segment_lesion(img: &RgbImage, cfg: &MelanomaConfig) -> Result<BinaryMask> {
    let gray = img.to_gray();
    let t = cfg.threshold.apply(&gray).map_err(Error::at_stage("threshold"))?;
    let se = StructuringElement::disk(cfg.close_radius).map_err(Error::at_stage("close"))?;
    let dark = binarize(&gray, t);
    if dark.count() == 0 || dark.count() == dark.bits().len() {
        return Err(Error::at_stage("threshold")(Error::DegenerateRegion("image has no contrast".into())));
    }
    let closed = morphological_close(&dark, &se);
    let roi = connected_components(&closed, cfg.min_pixels)
        .map_err(Error::at_stage("components"))?
        .into_iter()
        .next()
        .ok_or_else(|| Error::at_stage("components")(Error::DegenerateRegion("no dark region found".into())))?;
    Ok(roi.to_mask(img.width(), img.height()))
}

/// Uses `mask` when given, otherwise segments the image first.
pub fn extract_melanoma(img: &RgbImage, mask: Option<&BinaryMask>, cfg: &MelanomaConfig) -> Result<LesionFeatures> {
    let segmented;
    let mask = match mask {
        Some(m) => m,
        None => {
            segmented = segment_lesion(img, cfg)?;
            &segmented
        }
    };
    extract_lesion_features(img, mask, &cfg.lesion).map_err(Error::at_stage("features"))
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ExtractConfig {
    pub lung: LungConfig,
    pub melanoma: MelanomaConfig,
}

/// Feature row for one image file.
pub fn extract_file(pipeline: Pipeline, path: &Path, mask: Option<&Path>, cfg: &ExtractConfig) -> Result<Vec<f64>> {
    match pipeline {
        Pipeline::Lung => {
            let img = load_gray_image(path).map_err(Error::at_stage("load"))?;
            Ok(extract_lung(&img, &cfg.lung)?.to_vec())
        }
        Pipeline::Melanoma => {
            let img = load_rgb_image(path).map_err(Error::at_stage("load"))?;
            let mask = mask.map(load_mask).transpose().map_err(Error::at_stage("load"))?;
            Ok(extract_melanoma(&img, mask.as_ref(), &cfg.melanoma)?.to_vec())
        }
        Pipeline::Breast => Err(Error::InvalidArgument(
            "the breast pipeline reads tabular cytology scores, not images".into(),
        )),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub pipeline: Pipeline,
    pub kind: ModelKind,
    pub split: f64,
    pub seed: u64,
    pub svm: SvmParams,
    pub folds: usize,
    pub mlp: MlpParams,
    pub gd: GdParams,
}

impl TrainConfig {
    /// Defaults for the pipeline's usual model.
    pub fn new(pipeline: Pipeline) -> Self {
        let layers = match pipeline {
            Pipeline::Breast => BREAST_LAYERS.to_vec(),
            _ => MELANOMA_LAYERS.to_vec(),
        };
        Self {
            pipeline,
            kind: pipeline.default_model(),
            split: pipeline.default_split(),
            seed: 0,
            svm: SvmParams::default(),
            folds: 5,
            mlp: MlpParams {
                layer_sizes: layers,
                ..MlpParams::default()
            },
            gd: GdParams::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: Model,
    pub train_size: usize,
    pub test_size: usize,
    /// Final training loss where the learner has one.
    pub final_loss: Option<f64>,
    pub train_report: EvalReport,
    pub test_report: EvalReport,
    /// Chosen column pair for the SVM.
    pub selected: Option<[usize; 2]>,
}

/// Trains on the whole dataset with the configured learner.
pub fn fit_model(train: &LabeledDataset, cfg: &TrainConfig) -> Result<(Model, Option<f64>, Option<[usize; 2]>)> {
    if train.is_empty() {
        return Err(Error::EmptyInput("training set is empty"));
    }
    match cfg.kind {
        ModelKind::Svm => {
            let norm = Normalization::fit(train);
            let scaled = norm.apply_dataset(train);
            let pair = if scaled.dim() >= 2 {
                select_feature_pair(&scaled, &cfg.svm, cfg.folds, cfg.seed)?.columns().to_vec()
            } else {
                vec![0]
            };
            let model = train_svm_on(&scaled, &pair, &cfg.svm)?.with_normalization(norm);
            let selected = (pair.len() == 2).then(|| [pair[0], pair[1]]);
            Ok((model.into(), None, selected))
        }
        ModelKind::Ann => {
            let norm = Normalization::fit(train);
            let mut params = cfg.mlp.clone();
            params.layer_sizes[0] = train.dim();
            let fit = train_mlp(&norm.apply_dataset(train), &params)?;
            let loss = fit.losses.last().copied();
            Ok((fit.model.with_normalization(norm).into(), loss, None))
        }
        ModelKind::Gd => {
            let fit = train_gd(train, &cfg.gd)?;
            let loss = fit.losses.last().copied();
            Ok((fit.model.into(), loss, None))
        }
    }
}

/// Stratified split, fit on the training part, report on both parts.
pub fn train_pipeline(data: &LabeledDataset, cfg: &TrainConfig) -> Result<TrainOutcome> {
    if data.feature_names() != cfg.pipeline.feature_names().as_slice() && cfg.pipeline != Pipeline::Breast {
        return Err(Error::FeatureMismatch(format!(
            "expected {} features {:?}",
            cfg.pipeline,
            cfg.pipeline.feature_names()
        )));
    }
    if !data.has_both_classes() {
        return Err(Error::DegenerateTraining("data must contain both classes".into()));
    }
    let (train, test) = split_dataset(data, cfg.split, cfg.seed)?;
    let (model, final_loss, selected) = fit_model(&train, cfg)?;
    Ok(TrainOutcome {
        train_report: metrics(&evaluate(&model, &train)?),
        test_report: metrics(&evaluate(&model, &test)?),
        model,
        train_size: train.len(),
        test_size: test.len(),
        final_loss,
        selected,
    })
}

/// Checks that `data` carries exactly the model's features, in order.
pub fn check_features(model_names: &[String], data_names: &[String]) -> Result<()> {
    for (i, name) in model_names.iter().enumerate() {
        match data_names.get(i) {
            Some(d) if d == name => {}
            Some(d) => {
                return Err(Error::FeatureMismatch(format!(
                    "column {i} is `{d}`, model expects `{name}`"
                )))
            }
            None => return Err(Error::FeatureMismatch(format!("missing column `{name}`"))),
        }
    }
    if let Some(extra) = data_names.get(model_names.len()) {
        return Err(Error::FeatureMismatch(format!("unexpected column `{extra}`")));
    }
    Ok(())
}

pub fn evaluate_counts(model: &Model, data: &LabeledDataset) -> Result<ConfusionCounts> {
    check_features(model.feature_names(), data.feature_names())?;
    evaluate(model, data)
}
