use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{sigmoid, Classifier, Diagnosis, LabeledDataset, Normalization, Prediction};
use crate::error::{Error, Result};

/// Seven-layer network used for the cytology features.
pub const BREAST_LAYERS: [usize; 7] = [9, 16, 12, 8, 8, 4, 1];
/// Network used for the six lesion features.
pub const MELANOMA_LAYERS: [usize; 4] = [6, 10, 6, 1];

#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    pub layer_sizes: Vec<usize>,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub inconclusive_delta: f64,
}

impl Default for MlpParams {
    fn default() -> Self {
        Self {
            layer_sizes: MELANOMA_LAYERS.to_vec(),
            epochs: 5000,
            learning_rate: 0.5,
            seed: 0,
            inconclusive_delta: 0.05,
        }
    }
}

/// Fully connected sigmoid network with a single output unit.
///
/// `weights[l]` is row-major `(layer_sizes[l + 1], layer_sizes[l])`.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub feature_names: Vec<String>,
    pub layer_sizes: Vec<usize>,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
    pub inconclusive_delta: f64,
    pub normalization: Option<Normalization>,
}

/// Per-parameter gradient with the same layout as [`MlpModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGradient {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl MlpGradient {
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend_from_slice(w);
            out.extend_from_slice(b);
        }
        out
    }

    pub fn norm(&self) -> f64 {
        self.flatten().iter().map(|g| g * g).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone)]
pub struct MlpFit {
    pub model: MlpModel,
    /// Mean squared error before each epoch's update, then once after the last.
    pub losses: Vec<f64>,
}

fn validate_layers(layer_sizes: &[usize]) -> Result<()> {
    if layer_sizes.len() < 2 {
        return Err(Error::InvalidArgument("network needs at least input and output layers".into()));
    }
    if layer_sizes.contains(&0) {
        return Err(Error::InvalidArgument("layer sizes must be positive".into()));
    }
    if *layer_sizes.last().unwrap() != 1 {
        return Err(Error::InvalidArgument("output layer must have size 1".into()));
    }
    Ok(())
}

impl MlpModel {
    /// Uniform `[-0.5, 0.5]` initialization, layer by layer, weights before biases.
    pub fn init(feature_names: Vec<String>, layer_sizes: &[usize], seed: u64, inconclusive_delta: f64) -> Result<Self> {
        validate_layers(layer_sizes)?;
        if feature_names.len() != layer_sizes[0] {
            return Err(Error::DimensionMismatch {
                expected: layer_sizes[0],
                actual: feature_names.len(),
            });
        }
        if !(0.0..0.5).contains(&inconclusive_delta) {
            return Err(Error::InvalidArgument(format!(
                "inconclusive delta must be in [0, 0.5), got {inconclusive_delta}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for pair in layer_sizes.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            weights.push((0..fan_in * fan_out).map(|_| rng.random_range(-0.5..=0.5)).collect());
            biases.push((0..fan_out).map(|_| rng.random_range(-0.5..=0.5)).collect());
        }
        Ok(Self {
            feature_names,
            layer_sizes: layer_sizes.to_vec(),
            weights,
            biases,
            inconclusive_delta,
            normalization: None,
        })
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = Some(normalization);
        self
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn num_layers(&self) -> usize {
        self.layer_sizes.len()
    }

    pub fn parameter_count(&self) -> usize {
        self.weights.iter().map(Vec::len).sum::<usize>() + self.biases.iter().map(Vec::len).sum::<usize>()
    }

    pub fn parameters(&self) -> Vec<f64> {
        MlpGradient {
            weights: self.weights.clone(),
            biases: self.biases.clone(),
        }
        .flatten()
    }

    pub fn set_parameters(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.parameter_count() {
            return Err(Error::DimensionMismatch {
                expected: self.parameter_count(),
                actual: params.len(),
            });
        }
        let mut k = 0;
        for (w, b) in self.weights.iter_mut().zip(self.biases.iter_mut()) {
            let (nw, nb) = (w.len(), b.len());
            w.copy_from_slice(&params[k..k + nw]);
            k += nw;
            b.copy_from_slice(&params[k..k + nb]);
            k += nb;
        }
        Ok(())
    }

    /// Activations of every layer, input first, on an already scaled row.
    fn forward_raw(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = vec![x.to_vec()];
        for (l, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let fan_in = self.layer_sizes[l];
            let prev = &acts[l];
            let next: Vec<f64> = b
                .iter()
                .enumerate()
                .map(|(o, &bias)| {
                    let row = &w[o * fan_in..(o + 1) * fan_in];
                    sigmoid(row.iter().zip(prev).map(|(a, v)| a * v).sum::<f64>() + bias)
                })
                .collect();
            acts.push(next);
        }
        acts
    }

    fn scale(&self, x: &[f64]) -> Vec<f64> {
        match &self.normalization {
            Some(n) => n.apply(x),
            None => x.to_vec(),
        }
    }

    /// Network output in `(0, 1)`.
    pub fn output(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                actual: x.len(),
            });
        }
        let acts = self.forward_raw(&self.scale(x));
        Ok(acts.last().unwrap()[0])
    }

    /// Mean squared error against explicit targets.
    pub fn mse(&self, inputs: &[Vec<f64>], targets: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for (x, &t) in inputs.iter().zip(targets) {
            let e = self.output(x)? - t;
            total += e * e;
        }
        Ok(total / inputs.len().max(1) as f64)
    }
}

impl Classifier for MlpModel {
    fn predict(&self, x: &[f64]) -> Result<Prediction> {
        predict_mlp(self, x)
    }

    fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }
}

pub fn predict_mlp(model: &MlpModel, x: &[f64]) -> Result<Prediction> {
    let score = model.output(x)?;
    Ok(Prediction {
        score,
        label: Diagnosis::from_score(score, model.inconclusive_delta),
    })
}

/// Exact gradient of the mean squared error with respect to every weight and
/// bias, by backpropagation.
pub fn mlp_gradient_targets(model: &MlpModel, inputs: &[Vec<f64>], targets: &[f64]) -> Result<MlpGradient> {
    if inputs.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: inputs.len(),
            actual: targets.len(),
        });
    }
    let mut grad = MlpGradient {
        weights: model.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
        biases: model.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
    };
    if inputs.is_empty() {
        return Ok(grad);
    }
    let scale = 2.0 / inputs.len() as f64;
    let layers = model.weights.len();

    for (x, &t) in inputs.iter().zip(targets) {
        if x.len() != model.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: model.input_dim(),
                actual: x.len(),
            });
        }
        let acts = model.forward_raw(&model.scale(x));
        let out = acts[layers][0];
        let mut delta = vec![scale * (out - t) * out * (1.0 - out)];
        for l in (0..layers).rev() {
            let fan_in = model.layer_sizes[l];
            let prev = &acts[l];
            for (o, &d) in delta.iter().enumerate() {
                let row = &mut grad.weights[l][o * fan_in..(o + 1) * fan_in];
                for (g, &a) in row.iter_mut().zip(prev) {
                    *g += d * a;
                }
                grad.biases[l][o] += d;
            }
            if l > 0 {
                let w = &model.weights[l];
                delta = (0..fan_in)
                    .map(|k| {
                        let back: f64 = delta.iter().enumerate().map(|(o, d)| d * w[o * fan_in + k]).sum();
                        back * prev[k] * (1.0 - prev[k])
                    })
                    .collect();
            }
        }
    }
    Ok(grad)
}

pub fn mlp_gradient(model: &MlpModel, data: &LabeledDataset) -> Result<MlpGradient> {
    let targets: Vec<f64> = data.labels().iter().map(|c| c.target()).collect();
    mlp_gradient_targets(model, data.rows(), &targets)
}

/// Full-batch gradient descent on mean squared error.
pub fn train_mlp(data: &LabeledDataset, params: &MlpParams) -> Result<MlpFit> {
    validate_layers(&params.layer_sizes)?;
    if params.layer_sizes[0] != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.layer_sizes[0],
            actual: data.dim(),
        });
    }
    if !(params.learning_rate > 0.0) {
        return Err(Error::InvalidArgument("learning rate must be positive".into()));
    }
    let mut model = MlpModel::init(
        data.feature_names().to_vec(),
        &params.layer_sizes,
        params.seed,
        params.inconclusive_delta,
    )?;
    let targets: Vec<f64> = data.labels().iter().map(|c| c.target()).collect();
    let mut losses = Vec::with_capacity(params.epochs + 1);
    for _ in 0..params.epochs {
        losses.push(model.mse(data.rows(), &targets)?);
        let g = mlp_gradient_targets(&model, data.rows(), &targets)?;
        for (w, gw) in model.weights.iter_mut().zip(&g.weights) {
            for (p, d) in w.iter_mut().zip(gw) {
                *p -= params.learning_rate * d;
            }
        }
        for (b, gb) in model.biases.iter_mut().zip(&g.biases) {
            for (p, d) in b.iter_mut().zip(gb) {
                *p -= params.learning_rate * d;
            }
        }
    }
    let final_loss = model.mse(data.rows(), &targets)?;
    if !final_loss.is_finite() || model.parameters().iter().any(|p| !p.is_finite()) {
        return Err(Error::Numeric("network training diverged".into()));
    }
    losses.push(final_loss);
    Ok(MlpFit { model, losses })
}
