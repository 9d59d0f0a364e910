use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{predict_svm, train_svm_on, Class, Diagnosis, LabeledDataset, SvmParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSelection {
    pub first: usize,
    pub second: usize,
    pub correct: usize,
    pub total: usize,
}

impl PairSelection {
    pub fn columns(&self) -> [usize; 2] {
        [self.first, self.second]
    }

    pub fn accuracy(&self) -> f64 {
        self.correct as f64 / self.total as f64
    }
}

/// Fold index per row; each class is shuffled and dealt round-robin.
fn stratified_folds(labels: &[Class], folds: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; labels.len()];
    for class in [Class::Benign, Class::Malignant] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng);
        for (k, i) in idx.into_iter().enumerate() {
            assignment[i] = k % folds;
        }
    }
    assignment
}

/// Number of held-out rows classified correctly by k-fold SVMs on `columns`.
pub fn cross_validated_correct(
    data: &LabeledDataset,
    columns: &[usize],
    params: &SvmParams,
    folds: usize,
    seed: u64,
) -> Result<usize> {
    if folds < 2 || folds > data.len() {
        return Err(Error::InvalidArgument(format!(
            "fold count must be in [2, {}], got {folds}",
            data.len()
        )));
    }
    let assignment = stratified_folds(data.labels(), folds, seed);
    let mut correct = 0;
    for fold in 0..folds {
        let (test, train): (Vec<usize>, Vec<usize>) = (0..data.len()).partition(|&i| assignment[i] == fold);
        let model = train_svm_on(&data.subset(&train), columns, params)?;
        for &i in &test {
            let p = predict_svm(&model, &data.rows()[i])?;
            let truth = match data.labels()[i] {
                Class::Benign => Diagnosis::Benign,
                Class::Malignant => Diagnosis::Malignant,
            };
            correct += usize::from(p.label == truth);
        }
    }
    Ok(correct)
}

/// Best column pair by cross-validated accuracy; ties go to the
/// lexicographically smallest `(i, j)`.
pub fn select_feature_pair(
    data: &LabeledDataset,
    params: &SvmParams,
    folds: usize,
    seed: u64,
) -> Result<PairSelection> {
    let d = data.dim();
    if d < 2 {
        return Err(Error::InvalidArgument(format!("pair selection needs at least 2 features, got {d}")));
    }
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
    let scores: Vec<usize> = pairs
        .par_iter()
        .map(|&(i, j)| cross_validated_correct(data, &[i, j], params, folds, seed))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (k, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = k;
        }
    }
    Ok(PairSelection {
        first: pairs[best].0,
        second: pairs[best].1,
        correct: scores[best],
        total: data.len(),
    })
}
