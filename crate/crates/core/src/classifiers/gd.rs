use super::{sigmoid, Classifier, Diagnosis, LabeledDataset, Normalization, Prediction};
use crate::error::{Error, Result};

/// Step size reported for the cytology model (`sigma = 2e-9`).
pub const PAPER_SIGMA: f64 = 2e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GdStepMode {
    /// Min-max normalized features, mean log-loss gradient, step `step`.
    Practical,
    /// Raw features, summed log-loss gradient, step `sigma`.
    Paper,
}

impl GdStepMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            GdStepMode::Practical => "practical",
            GdStepMode::Paper => "paper",
        }
    }
}

impl std::str::FromStr for GdStepMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "practical" => Ok(GdStepMode::Practical),
            "paper" => Ok(GdStepMode::Paper),
            other => Err(Error::InvalidArgument(format!("unknown step mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GdParams {
    pub iterations: usize,
    pub step: f64,
    pub sigma: f64,
    pub mode: GdStepMode,
}

impl Default for GdParams {
    fn default() -> Self {
        Self {
            iterations: 5000,
            step: 0.5,
            sigma: PAPER_SIGMA,
            mode: GdStepMode::Practical,
        }
    }
}

impl GdParams {
    pub fn effective_step(&self) -> f64 {
        match self.mode {
            GdStepMode::Practical => self.step,
            GdStepMode::Paper => self.sigma,
        }
    }
}

/// Logistic model on min-max scaled features.
#[derive(Debug, Clone, PartialEq)]
pub struct GdModel {
    pub feature_names: Vec<String>,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    pub step: f64,
    pub mode: GdStepMode,
    pub normalization: Normalization,
}

impl GdModel {
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                actual: x.len(),
            });
        }
        let z = self.normalization.apply(x);
        Ok(sigmoid(self.weights.iter().zip(&z).map(|(w, v)| w * v).sum::<f64>() + self.bias))
    }
}

impl Classifier for GdModel {
    fn predict(&self, x: &[f64]) -> Result<Prediction> {
        predict_gd(self, x)
    }

    fn input_dim(&self) -> usize {
        self.weights.len()
    }
}

#[derive(Debug, Clone)]
pub struct GdFit {
    pub model: GdModel,
    /// Mean log-loss before each step, then once after the last.
    pub losses: Vec<f64>,
}

/// Logistic score thresholded at 0.5 (0.5 itself is malignant).
pub fn predict_gd(model: &GdModel, x: &[f64]) -> Result<Prediction> {
    let score = model.score(x)?;
    Ok(Prediction {
        score,
        label: Diagnosis::from_score(score, 0.0),
    })
}

fn mean_log_loss(rows: &[Vec<f64>], targets: &[f64], w: &[f64], b: f64) -> f64 {
    let mut total = 0.0;
    for (x, &t) in rows.iter().zip(targets) {
        let z = w.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() + b;
        // log(1 + e^z) - t z, evaluated without overflow
        let softplus = if z > 0.0 { z + (-z).exp().ln_1p() } else { z.exp().ln_1p() };
        total += softplus - t * z;
    }
    total / rows.len().max(1) as f64
}

pub fn train_gd(data: &LabeledDataset, params: &GdParams) -> Result<GdFit> {
    if data.is_empty() {
        return Err(Error::EmptyInput("gradient descent needs at least one row"));
    }
    let step = params.effective_step();
    if !(step > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    let normalization = match params.mode {
        GdStepMode::Practical => Normalization::fit(data),
        GdStepMode::Paper => Normalization::identity(data.dim()),
    };
    let scaled = normalization.apply_dataset(data);
    let rows = scaled.rows();
    let targets: Vec<f64> = data.labels().iter().map(|c| c.target()).collect();
    let d = data.dim();
    let n = rows.len() as f64;
    let reduce = match params.mode {
        GdStepMode::Practical => 1.0 / n,
        GdStepMode::Paper => 1.0,
    };

    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut losses = Vec::with_capacity(params.iterations + 1);
    let mut gw = vec![0.0; d];
    for _ in 0..params.iterations {
        losses.push(mean_log_loss(rows, &targets, &w, b));
        gw.fill(0.0);
        let mut gb = 0.0;
        for (x, &t) in rows.iter().zip(&targets) {
            let z = w.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() + b;
            let err = sigmoid(z) - t;
            for (g, v) in gw.iter_mut().zip(x) {
                *g += err * v;
            }
            gb += err;
        }
        for (p, g) in w.iter_mut().zip(&gw) {
            *p -= step * g * reduce;
        }
        b -= step * gb * reduce;
    }
    losses.push(mean_log_loss(rows, &targets, &w, b));
    if w.iter().any(|v| !v.is_finite()) || !b.is_finite() {
        return Err(Error::Numeric("gradient descent diverged".into()));
    }
    Ok(GdFit {
        model: GdModel {
            feature_names: data.feature_names().to_vec(),
            weights: w,
            bias: b,
            iterations: params.iterations,
            step,
            mode: params.mode,
            normalization,
        },
        losses,
    })
}
