use super::{BinaryMask, GrayImage};
use crate::error::{Error, Result};

/// Settings for [`optimal_threshold`]. `t0 = None` seeds with the global mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdConfig {
    pub t0: Option<f64>,
    pub epsilon: f64,
    pub max_iters: usize,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self {
            t0: None,
            epsilon: 1e-4,
            max_iters: 100,
        }
    }
}

impl ThresholdConfig {
    pub fn apply(&self, img: &GrayImage) -> Result<f64> {
        let t0 = self.t0.unwrap_or_else(|| img.mean());
        optimal_threshold(img, t0, self.epsilon, self.max_iters)
    }
}

/// Iterative optimal threshold: `T <- (mean below T + mean at/above T) / 2`
/// until successive thresholds differ by less than `epsilon` or `max_iters`
/// updates have been made. When either class is empty the current threshold
/// is returned as-is.
pub fn optimal_threshold(img: &GrayImage, t0: f64, epsilon: f64, max_iters: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&t0) {
        return Err(Error::InvalidArgument(format!("t0 = {t0} outside [0, 1]")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if img.is_empty() {
        return Err(Error::EmptyInput("optimal_threshold on zero-sized image"));
    }

    let mut t = t0;
    for _ in 0..max_iters {
        let (mut lo_sum, mut lo_n, mut hi_sum, mut hi_n) = (0.0, 0usize, 0.0, 0usize);
        for &v in img.pixels() {
            if v < t {
                lo_sum += v;
                lo_n += 1;
            } else {
                hi_sum += v;
                hi_n += 1;
            }
        }
        if lo_n == 0 || hi_n == 0 {
            return Ok(t);
        }
        let next = 0.5 * (lo_sum / lo_n as f64 + hi_sum / hi_n as f64);
        let delta = (next - t).abs();
        t = next;
        if delta < epsilon {
            break;
        }
    }
    Ok(t)
}

/// Pixels strictly darker than `t` become foreground.
pub fn binarize(img: &GrayImage, t: f64) -> BinaryMask {
    let bits = img.pixels().iter().map(|&v| v < t).collect();
    BinaryMask::new(img.width(), img.height(), bits).expect("same dimensions")
}
