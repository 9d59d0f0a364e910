use super::{Class, Classifier, Diagnosis, LabeledDataset, Normalization, Prediction};
use crate::error::{Error, Result};

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmParams {
    pub c: f64,
    /// Stop once the maximal KKT violation drops below this.
    pub tol: f64,
    /// Pair updates are capped at `max_passes * n`.
    pub max_passes: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            c: 10.0,
            tol: 1e-4,
            max_passes: 1000,
        }
    }
}

/// Separating hyperplane `w . x[feature_indices] + b = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSvmModel {
    pub feature_names: Vec<String>,
    pub feature_indices: Vec<usize>,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub c: f64,
    /// Applied to the full input row before column selection.
    pub normalization: Option<Normalization>,
}

impl LinearSvmModel {
    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.feature_names.len() {
            return Err(Error::DimensionMismatch {
                expected: self.feature_names.len(),
                actual: x.len(),
            });
        }
        let scaled;
        let x = match &self.normalization {
            Some(n) => {
                scaled = n.apply(x);
                &scaled[..]
            }
            None => x,
        };
        Ok(self
            .feature_indices
            .iter()
            .zip(&self.weights)
            .map(|(&i, w)| w * x[i])
            .sum::<f64>()
            + self.bias)
    }

    /// Smallest label-signed distance of the given rows to the hyperplane.
    pub fn geometric_margin(&self, data: &LabeledDataset) -> Result<f64> {
        let norm = self.weights.iter().map(|w| w * w).sum::<f64>().sqrt();
        let mut margin = f64::INFINITY;
        for (row, label) in data.rows().iter().zip(data.labels()) {
            margin = margin.min(label.sign() * self.decision(row)? / norm);
        }
        Ok(margin)
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = Some(normalization);
        self
    }
}

impl Classifier for LinearSvmModel {
    fn predict(&self, x: &[f64]) -> Result<Prediction> {
        predict_svm(self, x)
    }

    fn input_dim(&self) -> usize {
        self.feature_names.len()
    }
}

/// Hard decision: score 1 (malignant) when `w . x + b >= 0`, else 0.
pub fn predict_svm(model: &LinearSvmModel, x: &[f64]) -> Result<Prediction> {
    let f = model.decision(x)?;
    Ok(if f >= 0.0 {
        Prediction {
            score: 1.0,
            label: Diagnosis::Malignant,
        }
    } else {
        Prediction {
            score: 0.0,
            label: Diagnosis::Benign,
        }
    })
}

/// Trains on every column of `data`.
pub fn train_svm(data: &LabeledDataset, params: &SvmParams) -> Result<LinearSvmModel> {
    let all: Vec<usize> = (0..data.dim()).collect();
    train_svm_on(data, &all, params)
}

/// Soft-margin linear SVM on the chosen columns, solved in the dual by
/// sequential two-variable optimization with second-order working-set
/// selection.
pub fn train_svm_on(data: &LabeledDataset, columns: &[usize], params: &SvmParams) -> Result<LinearSvmModel> {
    if columns.is_empty() {
        return Err(Error::InvalidArgument("SVM needs at least one feature".into()));
    }
    if !(params.c > 0.0) {
        return Err(Error::InvalidArgument(format!("C must be positive, got {}", params.c)));
    }
    if !data.has_both_classes() {
        return Err(Error::DegenerateTraining(
            "SVM training data must contain both classes".into(),
        ));
    }
    let sub = data.select_columns(columns)?;
    let x = sub.rows();
    let y: Vec<f64> = sub.labels().iter().map(Class::sign).collect();
    let n = x.len();
    let c = params.c;

    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    let mut kernel = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let k = dot(&x[i], &x[j]);
            kernel[i * n + j] = k;
            kernel[j * n + i] = k;
        }
    }
    let q = |i: usize, j: usize| y[i] * y[j] * kernel[i * n + j];

    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let in_up = |a: f64, yi: f64| (yi > 0.0 && a < c) || (yi < 0.0 && a > 0.0);
    let in_low = |a: f64, yi: f64| (yi > 0.0 && a > 0.0) || (yi < 0.0 && a < c);

    let max_iter = params.max_passes.max(1).saturating_mul(n.max(1));
    for _ in 0..max_iter {
        // i: maximal violator from the up set
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            if in_up(alpha[t], y[t]) && -y[t] * grad[t] >= gmax {
                gmax = -y[t] * grad[t];
                i_sel = Some(t);
            }
        }
        let Some(i) = i_sel else { break };

        // j: largest second-order decrease from the low set
        let mut gmax2 = f64::NEG_INFINITY;
        let mut best = f64::INFINITY;
        let mut j_sel = None;
        for t in 0..n {
            if !in_low(alpha[t], y[t]) {
                continue;
            }
            gmax2 = gmax2.max(y[t] * grad[t]);
            let b = gmax + y[t] * grad[t];
            if b > 0.0 {
                let a = kernel[i * n + i] + kernel[t * n + t] - 2.0 * kernel[i * n + t];
                let obj = -(b * b) / a.max(TAU);
                if obj <= best {
                    best = obj;
                    j_sel = Some(t);
                }
            }
        }
        if gmax + gmax2 < params.tol {
            break;
        }
        let Some(j) = j_sel else { break };

        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let quad = (q(i, i) + q(j, j) + 2.0 * q(i, j)).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (q(i, i) + q(j, j) - 2.0 * q(i, j)).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        if di == 0.0 && dj == 0.0 {
            break;
        }
        for t in 0..n {
            grad[t] += q(t, i) * di + q(t, j) * dj;
        }
    }

    // offset from free multipliers, else the midpoint of the feasible interval
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free_sum, mut free_n) = (0.0, 0usize);
    for t in 0..n {
        let yg = y[t] * grad[t];
        let at_upper = alpha[t] >= c;
        let at_lower = alpha[t] <= 0.0;
        if at_upper {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if at_lower {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free_sum += yg;
            free_n += 1;
        }
    }
    let rho = if free_n > 0 {
        free_sum / free_n as f64
    } else {
        0.5 * (ub + lb)
    };

    let d = columns.len();
    let mut weights = vec![0.0; d];
    for t in 0..n {
        if alpha[t] != 0.0 {
            for k in 0..d {
                weights[k] += alpha[t] * y[t] * x[t][k];
            }
        }
    }
    if weights.iter().chain(std::iter::once(&rho)).any(|v| !v.is_finite()) {
        return Err(Error::Numeric("SVM solver produced non-finite parameters".into()));
    }

    Ok(LinearSvmModel {
        feature_names: data.feature_names().to_vec(),
        feature_indices: columns.to_vec(),
        weights,
        bias: -rho,
        c,
        normalization: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dataset(points: &[(Vec<f64>, u8)]) -> LabeledDataset {
        let d = points[0].0.len();
        LabeledDataset::new(
            (0..d).map(|i| format!("x{i}")).collect(),
            points.iter().map(|p| p.0.clone()).collect(),
            points.iter().map(|p| Class::from_code(p.1).unwrap()).collect(),
        )
        .unwrap()
    }

    fn hard() -> SvmParams {
        SvmParams {
            c: 1e6,
            tol: 1e-8,
            max_passes: 10_000,
        }
    }

    #[test]
    fn one_dimensional_midpoint() {
        let data = dataset(&[(vec![-1.0], 0), (vec![1.0], 1)]);
        let m = train_svm(&data, &hard()).unwrap();
        assert!((m.weights[0] - 1.0).abs() < 1e-9);
        assert!(m.bias.abs() < 1e-9);
        assert!((m.geometric_margin(&data).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(predict_svm(&m, &[-0.5]).unwrap().label, Diagnosis::Benign);
        assert_eq!(predict_svm(&m, &[0.25]).unwrap().label, Diagnosis::Malignant);
    }

    #[test]
    fn boundary_point_is_malignant() {
        let m = LinearSvmModel {
            feature_names: vec!["x".into()],
            feature_indices: vec![0],
            weights: vec![1.0],
            bias: 0.0,
            c: 1.0,
            normalization: None,
        };
        let p = predict_svm(&m, &[0.0]).unwrap();
        assert_eq!((p.label, p.score), (Diagnosis::Malignant, 1.0));
        assert!(predict_svm(&m, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn two_dimensional_diagonal() {
        let data = dataset(&[(vec![0.0, 0.0], 0), (vec![2.0, 2.0], 1)]);
        let m = train_svm(&data, &hard()).unwrap();
        let norm = (m.weights[0].powi(2) + m.weights[1].powi(2)).sqrt();
        assert!((m.weights[0] / norm - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
        assert!((m.weights[1] / norm - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
        // (1, 1) lies on the hyperplane
        assert!(m.decision(&[1.0, 1.0]).unwrap().abs() / norm < 1e-6);
    }

    #[test]
    fn single_class_is_rejected() {
        let data = dataset(&[(vec![0.0], 1), (vec![1.0], 1)]);
        assert!(matches!(train_svm(&data, &SvmParams::default()), Err(Error::DegenerateTraining(_))));
    }

    #[test]
    fn separable_fit_is_perfect_with_unit_margins() {
        let pts: Vec<(Vec<f64>, u8)> = (0..20)
            .map(|i| {
                let t = i as f64;
                if i % 2 == 0 {
                    (vec![t * 0.3, 1.0 + (t * 0.7).sin()], 0)
                } else {
                    (vec![t * 0.3, 4.0 + (t * 0.3).cos()], 1)
                }
            })
            .collect();
        let data = dataset(&pts);
        let m = train_svm(&data, &hard()).unwrap();
        for (row, label) in data.rows().iter().zip(data.labels()) {
            assert!(label.sign() * m.decision(row).unwrap() >= 1.0 - 1e-6);
            let want = if *label == Class::Malignant { Diagnosis::Malignant } else { Diagnosis::Benign };
            assert_eq!(predict_svm(&m, row).unwrap().label, want);
        }
    }
}
