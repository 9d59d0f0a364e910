//! Binary classifiers: linear max-margin SVM, feed-forward network with an
//! abstention band, and min-max normalized logistic gradient descent.

mod dataset;
mod gd;
mod mlp;
mod model_io;
mod select;
mod svm;

pub use dataset::{Class, LabeledDataset, Normalization};
pub use gd::{predict_gd, train_gd, GdFit, GdModel, GdParams, GdStepMode, PAPER_SIGMA};
pub use mlp::{
    mlp_gradient, mlp_gradient_targets, predict_mlp, train_mlp, MlpFit, MlpGradient, MlpModel,
    MlpParams, BREAST_LAYERS, MELANOMA_LAYERS,
};
pub use model_io::{load_model, parse_model, render_model, save_model, FORMAT_VERSION};
pub use select::{cross_validated_correct, select_feature_pair, PairSelection};
pub use svm::{predict_svm, train_svm, train_svm_on, LinearSvmModel, SvmParams};

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Three-way diagnostic outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Diagnosis {
    Benign,
    Malignant,
    Inconclusive,
}

impl Diagnosis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Diagnosis::Benign => "benign",
            Diagnosis::Malignant => "malignant",
            Diagnosis::Inconclusive => "inconclusive",
        }
    }

    /// Applies the abstention band around 0.5. Scores on the boundary go to
    /// malignant; with `delta == 0` nothing is inconclusive.
    pub fn from_score(score: f64, delta: f64) -> Self {
        if score >= 0.5 + delta {
            Diagnosis::Malignant
        } else if score <= 0.5 - delta {
            Diagnosis::Benign
        } else {
            Diagnosis::Inconclusive
        }
    }
}

impl std::fmt::Display for Diagnosis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub score: f64,
    pub label: Diagnosis,
}

/// Anything that maps a raw feature row to a prediction.
pub trait Classifier: Send + Sync {
    fn predict(&self, x: &[f64]) -> Result<Prediction>;
    fn input_dim(&self) -> usize;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Svm,
    Ann,
    Gd,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Svm => "svm",
            ModelKind::Ann => "ann",
            ModelKind::Gd => "gd",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "svm" => Ok(ModelKind::Svm),
            "ann" | "mlp" => Ok(ModelKind::Ann),
            "gd" => Ok(ModelKind::Gd),
            other => Err(crate::Error::InvalidArgument(format!("unknown model kind `{other}`"))),
        }
    }
}

/// Any trained model, as stored in a model file.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Svm(LinearSvmModel),
    Mlp(MlpModel),
    Gd(GdModel),
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Svm(_) => ModelKind::Svm,
            Model::Mlp(_) => ModelKind::Ann,
            Model::Gd(_) => ModelKind::Gd,
        }
    }

    pub fn feature_names(&self) -> &[String] {
        match self {
            Model::Svm(m) => &m.feature_names,
            Model::Mlp(m) => &m.feature_names,
            Model::Gd(m) => &m.feature_names,
        }
    }

    pub fn inconclusive_delta(&self) -> f64 {
        match self {
            Model::Mlp(m) => m.inconclusive_delta,
            _ => 0.0,
        }
    }
}

impl Classifier for Model {
    fn predict(&self, x: &[f64]) -> Result<Prediction> {
        match self {
            Model::Svm(m) => predict_svm(m, x),
            Model::Mlp(m) => predict_mlp(m, x),
            Model::Gd(m) => predict_gd(m, x),
        }
    }

    fn input_dim(&self) -> usize {
        self.feature_names().len()
    }
}

impl From<LinearSvmModel> for Model {
    fn from(m: LinearSvmModel) -> Self {
        Model::Svm(m)
    }
}

impl From<MlpModel> for Model {
    fn from(m: MlpModel) -> Self {
        Model::Mlp(m)
    }
}

impl From<GdModel> for Model {
    fn from(m: GdModel) -> Self {
        Model::Gd(m)
    }
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}
