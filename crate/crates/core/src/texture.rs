//! Gray-level co-occurrence matrices and the nine nodule features
//! (four region-shape, four GLCM texture, plus eccentricity).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::{hull_lattice_count, GrayImage, Roi, SecondMoments};

/// Pixel displacement between the two members of a co-occurring pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlcmOffset {
    d_row: i32,
    d_col: i32,
}

impl GlcmOffset {
    pub fn new(d_row: i32, d_col: i32) -> Result<Self> {
        if d_row == 0 && d_col == 0 {
            return Err(Error::InvalidArgument("GLCM offset must be non-zero".into()));
        }
        Ok(Self { d_row, d_col })
    }

    pub fn d_row(&self) -> i32 {
        self.d_row
    }

    pub fn d_col(&self) -> i32 {
        self.d_col
    }
}

impl Default for GlcmOffset {
    fn default() -> Self {
        Self { d_row: 0, d_col: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlcmParams {
    pub offset: GlcmOffset,
    pub levels: usize,
    /// Also count each pair in reverse, making the matrix symmetric.
    pub symmetric: bool,
}

impl Default for GlcmParams {
    fn default() -> Self {
        Self {
            offset: GlcmOffset::default(),
            levels: 8,
            symmetric: true,
        }
    }
}

/// Normalized co-occurrence matrix with its marginal statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Glcm {
    levels: usize,
    counts: Vec<u64>,
    p: Vec<f64>,
    mu_r: f64,
    mu_c: f64,
    sigma_r: f64,
    sigma_c: f64,
}

impl Glcm {
    /// Builds the normalized matrix from raw `levels x levels` counts.
    pub fn from_counts(levels: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != levels * levels {
            return Err(Error::DimensionMismatch {
                expected: levels * levels,
                actual: counts.len(),
            });
        }
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptyGlcm);
        }
        let p: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
        let (mut mu_r, mut mu_c) = (0.0, 0.0);
        for i in 0..levels {
            for j in 0..levels {
                let v = p[i * levels + j];
                mu_r += i as f64 * v;
                mu_c += j as f64 * v;
            }
        }
        let (mut var_r, mut var_c) = (0.0, 0.0);
        for i in 0..levels {
            for j in 0..levels {
                let v = p[i * levels + j];
                var_r += (i as f64 - mu_r).powi(2) * v;
                var_c += (j as f64 - mu_c).powi(2) * v;
            }
        }
        Ok(Self {
            levels,
            counts,
            p,
            mu_r,
            mu_c,
            sigma_r: var_r.max(0.0).sqrt(),
            sigma_c: var_c.max(0.0).sqrt(),
        })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.levels + j]
    }

    pub fn p(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.levels + j]
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn mu_r(&self) -> f64 {
        self.mu_r
    }

    pub fn mu_c(&self) -> f64 {
        self.mu_c
    }

    pub fn sigma_r(&self) -> f64 {
        self.sigma_r
    }

    pub fn sigma_c(&self) -> f64 {
        self.sigma_c
    }
}

/// Uniform quantization of `[0, 1]` into `levels` bins; 1.0 lands in the top bin.
pub fn quantize(v: f64, levels: usize) -> usize {
    ((v * levels as f64) as usize).min(levels - 1)
}

pub fn compute_glcm(img: &GrayImage, roi: &Roi, params: &GlcmParams) -> Result<Glcm> {
    let levels = params.levels;
    if levels < 2 {
        return Err(Error::InvalidArgument(format!(
            "GLCM needs at least 2 levels, got {levels}"
        )));
    }
    let (r0, c0) = roi.offset();
    let (mw, mh) = (roi.mask().width(), roi.mask().height());
    if r0 + mh > img.height() || c0 + mw > img.width() {
        return Err(Error::OutOfBounds("ROI extends past the image".into()));
    }

    let (dr, dc) = (params.offset.d_row as isize, params.offset.d_col as isize);
    let mut counts = vec![0u64; levels * levels];
    for (r, c) in roi.mask().true_pixels() {
        let (nr, nc) = (r as isize + dr, c as isize + dc);
        if !roi.mask().get_signed(nr, nc) {
            continue;
        }
        let a = quantize(img.get(r + r0, c + c0), levels);
        let b = quantize(img.get(nr as usize + r0, nc as usize + c0), levels);
        counts[a * levels + b] += 1;
        if params.symmetric {
            counts[b * levels + a] += 1;
        }
    }
    Glcm::from_counts(levels, counts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlcmFeatures {
    pub energy: f64,
    pub contrast: f64,
    pub homogeneity: f64,
    pub correlation: f64,
}

pub fn glcm_features(g: &Glcm) -> GlcmFeatures {
    let n = g.levels();
    let (mut energy, mut contrast, mut homogeneity, mut cov) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let p = g.p(i, j);
            if p == 0.0 {
                continue;
            }
            let d = i as f64 - j as f64;
            energy += p * p;
            contrast += d * d * p;
            homogeneity += p / (1.0 + d.abs());
            cov += (i as f64 - g.mu_r()) * (j as f64 - g.mu_c()) * p;
        }
    }
    let denom = g.sigma_r() * g.sigma_c();
    // zero marginal variance: correlation is defined as 0
    let correlation = if denom > 0.0 {
        (cov / denom).clamp(-1.0, 1.0)
    } else {
        0.0
    };
    GlcmFeatures {
        energy,
        contrast,
        homogeneity,
        correlation,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionFeatures {
    pub area: f64,
    pub convex_area: f64,
    pub equivalent_diameter: f64,
    pub solidity: f64,
    pub eccentricity: f64,
}

pub fn equivalent_diameter(area: f64) -> f64 {
    (4.0 * area / std::f64::consts::PI).sqrt()
}

pub fn region_features(roi: &Roi) -> Result<RegionFeatures> {
    if roi.pixel_count() == 0 {
        return Err(Error::DegenerateRegion("empty ROI".into()));
    }
    let points: Vec<(i64, i64)> = roi.pixels().map(|(r, c)| (r as i64, c as i64)).collect();
    let area = roi.pixel_count() as f64;
    let convex_area = hull_lattice_count(&points) as f64;
    let moments = SecondMoments::from_pixels(roi.pixels()).expect("non-empty ROI");
    Ok(RegionFeatures {
        area,
        convex_area,
        equivalent_diameter: equivalent_diameter(area),
        solidity: area / convex_area,
        eccentricity: moments.eccentricity(),
    })
}

pub const LUNG_FEATURE_NAMES: [&str; 9] = [
    "area",
    "convex_area",
    "equivalent_diameter",
    "solidity",
    "energy",
    "contrast",
    "eccentricity",
    "homogeneity",
    "correlation",
];

/// The nine nodule features in table order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LungFeatureVector {
    pub area: f64,
    pub convex_area: f64,
    pub equivalent_diameter: f64,
    pub solidity: f64,
    pub energy: f64,
    pub contrast: f64,
    pub eccentricity: f64,
    pub homogeneity: f64,
    pub correlation: f64,
}

impl LungFeatureVector {
    pub fn names() -> &'static [&'static str] {
        &LUNG_FEATURE_NAMES
    }

    pub fn to_vec(&self) -> Vec<f64> {
        vec![
            self.area,
            self.convex_area,
            self.equivalent_diameter,
            self.solidity,
            self.energy,
            self.contrast,
            self.eccentricity,
            self.homogeneity,
            self.correlation,
        ]
    }

    pub fn from_parts(region: RegionFeatures, tex: GlcmFeatures) -> Self {
        Self {
            area: region.area,
            convex_area: region.convex_area,
            equivalent_diameter: region.equivalent_diameter,
            solidity: region.solidity,
            energy: tex.energy,
            contrast: tex.contrast,
            eccentricity: region.eccentricity,
            homogeneity: tex.homogeneity,
            correlation: tex.correlation,
        }
    }
}

pub fn extract_lung_features(img: &GrayImage, roi: &Roi, params: &GlcmParams) -> Result<LungFeatureVector> {
    let region = region_features(roi)?;
    let glcm = compute_glcm(img, roi, params)?;
    Ok(LungFeatureVector::from_parts(region, glcm_features(&glcm)))
}
