//! Splits, confusion counts, diagnostic rates, learning curves and Welch's
//! t-test.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::classifiers::{Class, Classifier, Diagnosis, LabeledDataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub inconclusive: usize,
}

impl ConfusionCounts {
    pub fn new(tp: usize, fp: usize, tn: usize, fn_: usize, inconclusive: usize) -> Self {
        Self {
            tp,
            fp,
            tn,
            fn_,
            inconclusive,
        }
    }

    pub fn total(&self) -> usize {
        self.decided() + self.inconclusive
    }

    /// Outcomes that were not inconclusive.
    pub fn decided(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn record(&mut self, truth: Class, outcome: Diagnosis) {
        match (truth, outcome) {
            (_, Diagnosis::Inconclusive) => self.inconclusive += 1,
            (Class::Malignant, Diagnosis::Malignant) => self.tp += 1,
            (Class::Benign, Diagnosis::Malignant) => self.fp += 1,
            (Class::Benign, Diagnosis::Benign) => self.tn += 1,
            (Class::Malignant, Diagnosis::Benign) => self.fn_ += 1,
        }
    }
}

/// Diagnostic rates; `None` where the denominator is zero.
///
/// Inconclusive outcomes are left out of every denominator except
/// `inconclusive_rate`, which divides by the full total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalReport {
    pub counts: ConfusionCounts,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub ppv: Option<f64>,
    pub npv: Option<f64>,
    pub accuracy: Option<f64>,
    pub inconclusive_rate: Option<f64>,
    pub mcc: Option<f64>,
}

const REPORT_KEYS: [&str; 7] = [
    "sensitivity",
    "specificity",
    "ppv",
    "npv",
    "accuracy",
    "inconclusive_rate",
    "mcc",
];

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

fn fmt_metric(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_string(), |x| format!("{x:.6}"))
}

impl EvalReport {
    fn values(&self) -> [Option<f64>; 7] {
        [
            self.sensitivity,
            self.specificity,
            self.ppv,
            self.npv,
            self.accuracy,
            self.inconclusive_rate,
            self.mcc,
        ]
    }

    /// `key value` lines, counts first.
    pub fn to_key_value(&self) -> String {
        let c = &self.counts;
        let mut out = String::new();
        for (k, v) in [
            ("tp", c.tp),
            ("fp", c.fp),
            ("tn", c.tn),
            ("fn", c.fn_),
            ("inconclusive", c.inconclusive),
            ("total", c.total()),
        ] {
            writeln!(out, "{k} {v}").unwrap();
        }
        for (k, v) in REPORT_KEYS.iter().zip(self.values()) {
            writeln!(out, "{k} {}", fmt_metric(v)).unwrap();
        }
        out
    }

    pub fn csv_header() -> String {
        format!("tp,fp,tn,fn,inconclusive,{}", REPORT_KEYS.join(","))
    }

    /// One CSV row matching [`EvalReport::csv_header`]; undefined metrics are empty.
    pub fn to_csv_row(&self) -> String {
        let c = &self.counts;
        let metrics: Vec<String> = self
            .values()
            .iter()
            .map(|v| v.map(|x| format!("{x:.6}")).unwrap_or_default())
            .collect();
        format!("{},{},{},{},{},{}", c.tp, c.fp, c.tn, c.fn_, c.inconclusive, metrics.join(","))
    }
}

pub fn metrics(c: &ConfusionCounts) -> EvalReport {
    let mcc_den = ((c.tp + c.fp) as f64) * ((c.tp + c.fn_) as f64) * ((c.tn + c.fp) as f64) * ((c.tn + c.fn_) as f64);
    let mcc = (mcc_den > 0.0).then(|| {
        let num = c.tp as f64 * c.tn as f64 - c.fp as f64 * c.fn_ as f64;
        (num / mcc_den.sqrt()).clamp(-1.0, 1.0)
    });
    EvalReport {
        counts: *c,
        sensitivity: ratio(c.tp, c.tp + c.fn_),
        specificity: ratio(c.tn, c.tn + c.fp),
        ppv: ratio(c.tp, c.tp + c.fp),
        npv: ratio(c.tn, c.tn + c.fn_),
        accuracy: ratio(c.tp + c.tn, c.decided()),
        inconclusive_rate: ratio(c.inconclusive, c.total()),
        mcc,
    }
}

/// Tallies predictions against labels. Prediction errors propagate.
pub fn evaluate<C: Classifier + ?Sized>(model: &C, test: &LabeledDataset) -> Result<ConfusionCounts> {
    evaluate_with(|x| model.predict(x).map(|p| p.label), test)
}

pub fn evaluate_with(
    mut predict: impl FnMut(&[f64]) -> Result<Diagnosis>,
    test: &LabeledDataset,
) -> Result<ConfusionCounts> {
    let mut counts = ConfusionCounts::default();
    for (row, &truth) in test.rows().iter().zip(test.labels()) {
        counts.record(truth, predict(row)?);
    }
    Ok(counts)
}

/// Stratified shuffle split. Each class contributes
/// `round(n_class * train_fraction)` rows to training, kept within
/// `[1, n_class - 1]`.
pub fn split_dataset(data: &LabeledDataset, train_fraction: f64, seed: u64) -> Result<(LabeledDataset, LabeledDataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "train fraction must be in (0, 1), got {train_fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in [Class::Benign, Class::Malignant] {
        let mut idx: Vec<usize> = (0..data.len()).filter(|&i| data.labels()[i] == class).collect();
        if idx.len() < 2 {
            return Err(Error::Stratification(format!(
                "class {} has {} rows; at least 2 are needed",
                class.code(),
                idx.len()
            )));
        }
        idx.shuffle(&mut rng);
        let k = ((idx.len() as f64 * train_fraction).round() as usize).clamp(1, idx.len() - 1);
        train.extend_from_slice(&idx[..k]);
        test.extend_from_slice(&idx[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((data.subset(&train), data.subset(&test)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub size: usize,
    pub accuracy: Option<f64>,
    pub inconclusive_rate: Option<f64>,
}

/// Trains on growing prefixes of one seeded shuffle of `train` and scores
/// each model on the same `test` set. Points come back in request order.
pub fn learning_curve<M, F>(
    train: &LabeledDataset,
    test: &LabeledDataset,
    sizes: &[usize],
    seed: u64,
    trainer: F,
) -> Result<Vec<CurvePoint>>
where
    M: Classifier,
    F: Fn(&LabeledDataset) -> Result<M> + Sync,
{
    if let Some(&bad) = sizes.iter().find(|&&s| s > train.len() || s == 0) {
        return Err(Error::OutOfBounds(format!(
            "training size {bad} not in [1, {}]",
            train.len()
        )));
    }
    let mut order: Vec<usize> = (0..train.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    sizes
        .par_iter()
        .map(|&size| {
            let model = trainer(&train.subset(&order[..size]))?;
            let report = metrics(&evaluate(&model, test)?);
            Ok(CurvePoint {
                size,
                accuracy: report.accuracy,
                inconclusive_rate: report.inconclusive_rate,
            })
        })
        .collect()
}

pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("size,accuracy,inconclusive_rate\n");
    for p in points {
        let f = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        writeln!(out, "{},{},{}", p.size, f(p.accuracy), f(p.inconclusive_rate)).unwrap();
    }
    out
}

/// Welch's two-sided test. `None` marks an undefined quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TTestResult {
    pub t_statistic: Option<f64>,
    pub degrees_of_freedom: Option<f64>,
    pub p_value: Option<f64>,
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Zero variance in both groups: equal means leave everything undefined,
/// unequal means give an infinite t and `p = 0`.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InvalidArgument("each group needs at least 2 values".into()));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("t-test input must be finite".into()));
    }
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    let (sa, sb) = (va / a.len() as f64, vb / b.len() as f64);
    let se2 = sa + sb;
    if se2 == 0.0 {
        return Ok(if ma == mb {
            TTestResult {
                t_statistic: None,
                degrees_of_freedom: None,
                p_value: None,
            }
        } else {
            TTestResult {
                t_statistic: Some(if ma > mb { f64::INFINITY } else { f64::NEG_INFINITY }),
                degrees_of_freedom: None,
                p_value: Some(0.0),
            }
        });
    }
    let t = (ma - mb) / se2.sqrt();
    let dof = se2 * se2 / (sa * sa / (a.len() as f64 - 1.0) + sb * sb / (b.len() as f64 - 1.0));
    Ok(TTestResult {
        t_statistic: Some(t),
        degrees_of_freedom: Some(dof),
        p_value: Some(student_t_two_sided(t, dof)),
    })
}

/// `P(|T| >= |t|)` for Student's t with `dof` degrees of freedom.
pub fn student_t_two_sided(t: f64, dof: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    let x = dof / (dof + t * t);
    regularized_incomplete_beta(x, dof / 2.0, 0.5).clamp(0.0, 1.0)
}

fn ln_gamma(x: f64) -> f64 {
    // Lanczos, g = 7, n = 9
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// `I_x(a, b)` by Lentz's continued fraction.
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    if x > (a + 1.0) / (a + b + 2.0) {
        return 1.0 - regularized_incomplete_beta(1.0 - x, b, a);
    }
    const TINY: f64 = 1e-300;
    let mut c = 1.0;
    let mut d = 1.0 - (a + b) * x / (a + 1.0);
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=500 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
        d = 1.0 + num * d;
        d = if d.abs() < TINY { 1.0 / TINY } else { 1.0 / d };
        c = 1.0 + num / c;
        if c.abs() < TINY {
            c = TINY;
        }
        h *= d * c;
        let num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
        d = 1.0 + num * d;
        d = if d.abs() < TINY { 1.0 / TINY } else { 1.0 / d };
        c = 1.0 + num / c;
        if c.abs() < TINY {
            c = TINY;
        }
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-15 {
            break;
        }
    }
    ln_front.exp() * h / a
}
