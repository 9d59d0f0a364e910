//! Lesion descriptors for dermoscopy images: asymmetry about the principal
//! axes, border irregularity, color variation, diameter and intensity entropy.

use std::collections::HashSet;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::{
    connected_components, convex_hull, BinaryMask, GrayImage, RgbImage, Roi, SecondMoments,
};
use crate::texture::quantize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalAxes {
    /// `(row, col)`.
    pub centroid: (f64, f64),
    /// Radians in `[0, pi)` from the column axis toward the row axis.
    pub major_angle: f64,
    pub major_len: f64,
    pub minor_len: f64,
}

pub fn principal_axes(mask: &BinaryMask) -> Result<PrincipalAxes> {
    if mask.count() < 2 {
        return Err(Error::DegenerateRegion(format!(
            "principal axes need at least 2 pixels, got {}",
            mask.count()
        )));
    }
    let m = SecondMoments::from_pixels(mask.true_pixels()).expect("non-empty");
    let (major_len, minor_len) = m.axis_lengths();
    Ok(PrincipalAxes {
        centroid: m.centroid,
        major_angle: m.orientation(),
        major_len,
        minor_len,
    })
}

/// Mismatch between the mask and its mirror image across the line through
/// `centroid` with direction `angle`, as `|M xor R| / (2 |M|)`.
///
/// `R` holds every lattice point whose mirror rounds into `M`; pulling back
/// through the mirror, rather than pushing pixels forward, leaves no
/// rounding holes at oblique angles.
fn reflection_mismatch(mask: &BinaryMask, centroid: (f64, f64), angle: f64) -> f64 {
    let (ux, uy) = (angle.cos(), angle.sin());
    let (cy, cx) = centroid;
    let mirror = |r: i64, c: i64| {
        let (dx, dy) = (c as f64 - cx, r as f64 - cy);
        let along = dx * ux + dy * uy;
        let (rx, ry) = (2.0 * along * ux - dx, 2.0 * along * uy - dy);
        ((cy + ry).round() as i64, (cx + rx).round() as i64)
    };
    let original: HashSet<(i64, i64)> = mask
        .true_pixels()
        .map(|(r, c)| (r as i64, c as i64))
        .collect();
    // every point of R lies within one step of a forward image of M
    let mut candidates: HashSet<(i64, i64)> = original.clone();
    for &(r, c) in &original {
        let (mr, mc) = mirror(r, c);
        for dr in -1..=1 {
            for dc in -1..=1 {
                candidates.insert((mr + dr, mc + dc));
            }
        }
    }
    let xor = candidates
        .iter()
        .filter(|&&(r, c)| original.contains(&(r, c)) != original.contains(&mirror(r, c)))
        .count();
    (xor as f64 / (2.0 * original.len() as f64)).clamp(0.0, 1.0)
}

/// `(a_major, a_minor)`: mismatch after mirroring across the major and the
/// minor axis respectively. 0 for a perfectly symmetric region.
pub fn asymmetry(mask: &BinaryMask) -> Result<(f64, f64)> {
    let axes = principal_axes(mask)?;
    let a_major = reflection_mismatch(mask, axes.centroid, axes.major_angle);
    let a_minor = reflection_mismatch(mask, axes.centroid, axes.major_angle + PI / 2.0);
    Ok((a_major, a_minor))
}

/// Length of a closed 8-connected contour using the corner-corrected chain
/// estimator (even steps 0.980, odd steps 1.406, corners -0.091), plus `pi`
/// for the half-pixel outward offset from pixel centers to the region edge.
pub fn contour_perimeter(contour: &[(usize, usize)]) -> f64 {
    let n = contour.len();
    if n < 2 {
        return PI;
    }
    let steps: Vec<(i64, i64)> = (0..n)
        .map(|i| {
            let (a, b) = (contour[i], contour[(i + 1) % n]);
            (b.0 as i64 - a.0 as i64, b.1 as i64 - a.1 as i64)
        })
        .collect();
    let mut even = 0usize;
    let mut odd = 0usize;
    let mut corners = 0usize;
    for (i, &s) in steps.iter().enumerate() {
        if s.0 == 0 || s.1 == 0 {
            even += 1;
        } else {
            odd += 1;
        }
        if s != steps[(i + n - 1) % n] {
            corners += 1;
        }
    }
    0.980 * even as f64 + 1.406 * odd as f64 - 0.091 * corners as f64 + PI
}

/// Compactness `P^2 / (4 pi A)`: about 1 for a disk, larger for ragged or
/// elongated borders. Never below 1.
pub fn border_irregularity(roi: &Roi) -> Result<f64> {
    if roi.boundary().is_empty() {
        return Err(Error::DegenerateRegion("ROI has no traced boundary".into()));
    }
    let p = contour_perimeter(roi.boundary());
    let a = roi.pixel_count() as f64;
    Ok((p * p / (4.0 * PI * a)).max(1.0))
}

/// Mean over the three channels of the population standard deviation inside the mask.
pub fn color_variation(img: &RgbImage, mask: &BinaryMask) -> Result<f64> {
    check_same_size(img.width(), img.height(), mask)?;
    let idx: Vec<usize> = mask
        .true_pixels()
        .map(|(r, c)| r * mask.width() + c)
        .collect();
    if idx.is_empty() {
        return Err(Error::DegenerateRegion("empty lesion mask".into()));
    }
    let n = idx.len() as f64;
    let mut total = 0.0;
    for ch in 0..3 {
        let plane = img.plane(ch);
        let mean = idx.iter().map(|&i| plane[i]).sum::<f64>() / n;
        let var = idx.iter().map(|&i| (plane[i] - mean).powi(2)).sum::<f64>() / n;
        total += var.sqrt();
    }
    Ok(total / 3.0)
}

/// Shannon entropy in bits of the `bins`-bin intensity histogram inside the mask.
pub fn lesion_entropy(img: &GrayImage, mask: &BinaryMask, bins: usize) -> Result<f64> {
    if bins < 2 {
        return Err(Error::InvalidArgument(format!("entropy needs >= 2 bins, got {bins}")));
    }
    check_same_size(img.width(), img.height(), mask)?;
    let mut hist = vec![0usize; bins];
    let mut n = 0usize;
    for (r, c) in mask.true_pixels() {
        hist[quantize(img.get(r, c), bins)] += 1;
        n += 1;
    }
    if n == 0 {
        return Err(Error::DegenerateRegion("empty lesion mask".into()));
    }
    let entropy = hist
        .iter()
        .filter(|&&k| k > 0)
        .map(|&k| {
            let q = k as f64 / n as f64;
            -q * q.log2()
        })
        .sum::<f64>();
    Ok(entropy.max(0.0))
}

/// Maximum Feret diameter over the boundary pixels, optionally in millimetres.
pub fn lesion_diameter(roi: &Roi, mm_per_pixel: Option<f64>) -> f64 {
    let pts: Vec<(i64, i64)> = roi
        .boundary()
        .iter()
        .map(|&(r, c)| (r as i64, c as i64))
        .collect();
    // the farthest pair of a point set is a pair of hull vertices
    let hull = convex_hull(&pts);
    let mut best = 0i64;
    for (i, a) in hull.iter().enumerate() {
        for b in &hull[i + 1..] {
            let d = (a.0 - b.0).pow(2) + (a.1 - b.1).pow(2);
            best = best.max(d);
        }
    }
    (best as f64).sqrt() * mm_per_pixel.unwrap_or(1.0)
}

fn check_same_size(width: usize, height: usize, mask: &BinaryMask) -> Result<()> {
    if width != mask.width() || height != mask.height() {
        return Err(Error::DimensionMismatch {
            expected: width * height,
            actual: mask.width() * mask.height(),
        });
    }
    Ok(())
}

pub const LESION_FEATURE_NAMES: [&str; 6] = [
    "asymmetry_major",
    "asymmetry_minor",
    "border_irregularity",
    "color_variation",
    "diameter",
    "entropy",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LesionFeatures {
    pub asymmetry_major: f64,
    pub asymmetry_minor: f64,
    pub border_irregularity: f64,
    pub color_variation: f64,
    pub diameter: f64,
    pub entropy: f64,
}

impl LesionFeatures {
    pub fn names() -> &'static [&'static str] {
        &LESION_FEATURE_NAMES
    }

    pub fn to_vec(&self) -> Vec<f64> {
        vec![
            self.asymmetry_major,
            self.asymmetry_minor,
            self.border_irregularity,
            self.color_variation,
            self.diameter,
            self.entropy,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LesionConfig {
    pub entropy_bins: usize,
    pub mm_per_pixel: Option<f64>,
}

impl Default for LesionConfig {
    fn default() -> Self {
        Self {
            entropy_bins: 64,
            mm_per_pixel: None,
        }
    }
}

/// Features of the largest 4-connected lesion in `mask`.
pub fn extract_lesion_features(img: &RgbImage, mask: &BinaryMask, config: &LesionConfig) -> Result<LesionFeatures> {
    check_same_size(img.width(), img.height(), mask)?;
    let roi = connected_components(mask, 1)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::DegenerateRegion("empty lesion mask".into()))?;
    let lesion = roi.to_mask(mask.width(), mask.height());
    let (asymmetry_major, asymmetry_minor) = asymmetry(&lesion)?;
    Ok(LesionFeatures {
        asymmetry_major,
        asymmetry_minor,
        border_irregularity: border_irregularity(&roi)?,
        color_variation: color_variation(img, &lesion)?,
        diameter: lesion_diameter(&roi, config.mm_per_pixel),
        entropy: lesion_entropy(&img.to_gray(), &lesion, config.entropy_bins)?,
    })
}
