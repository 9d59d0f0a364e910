//! Raster containers and the CT preprocessing chain: total-variation
//! denoising, iterative optimal thresholding, binarization, morphological
//! closing and connected-region extraction.

mod components;
mod denoise;
mod hull;
mod moments;
mod morphology;
mod threshold;

pub use components::{connected_components, trace_boundary};
pub use denoise::{total_variation, tv_denoise};
pub use hull::{convex_hull, hull_contains, hull_lattice_count, Point};
pub use moments::SecondMoments;
pub use morphology::{dilate, erode, morphological_close};
pub use threshold::{binarize, optimal_threshold, ThresholdConfig};

use crate::error::{Error, Result};

/// Grayscale raster, row-major, intensities normalized to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                actual: data.len(),
            });
        }
        if let Some(v) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidArgument(format!(
                "intensity {v} outside [0, 1]"
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds an image from a per-pixel function; values are clamped to `[0, 1]`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                data.push(clamp_unit(f(r, c)));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self::from_fn(width, height, |_, _| value)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn pixels(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    pub fn min_max(&self) -> Option<(f64, f64)> {
        self.data.iter().fold(None, |acc, &v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
    }

    pub fn mean(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }
}

/// Three-plane color raster, each plane row-major in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    planes: [Vec<f64>; 3],
}

impl RgbImage {
    pub fn new(width: usize, height: usize, planes: [Vec<f64>; 3]) -> Result<Self> {
        for plane in &planes {
            if plane.len() != width * height {
                return Err(Error::DimensionMismatch {
                    expected: width * height,
                    actual: plane.len(),
                });
            }
            if let Some(v) = plane.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::InvalidArgument(format!(
                    "intensity {v} outside [0, 1]"
                )));
            }
        }
        Ok(Self {
            width,
            height,
            planes,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [f64; 3],
    ) -> Self {
        let mut planes = [
            Vec::with_capacity(width * height),
            Vec::with_capacity(width * height),
            Vec::with_capacity(width * height),
        ];
        for r in 0..height {
            for c in 0..width {
                let px = f(r, c);
                for (plane, v) in planes.iter_mut().zip(px) {
                    plane.push(clamp_unit(v));
                }
            }
        }
        Self {
            width,
            height,
            planes,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn plane(&self, channel: usize) -> &[f64] {
        &self.planes[channel]
    }

    pub fn get(&self, row: usize, col: usize) -> [f64; 3] {
        let i = row * self.width + col;
        [self.planes[0][i], self.planes[1][i], self.planes[2][i]]
    }

    /// Channel mean.
    pub fn to_gray(&self) -> GrayImage {
        let data = (0..self.width * self.height)
            .map(|i| (self.planes[0][i] + self.planes[1][i] + self.planes[2][i]) / 3.0)
            .collect();
        GrayImage {
            width: self.width,
            height: self.height,
            data,
        }
    }
}

/// Row-major boolean raster; `true` marks a body (foreground) pixel.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                actual: bits.len(),
            });
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                bits.push(f(r, c));
            }
        }
        Self {
            width,
            height,
            bits,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.width + col]
    }

    /// Bounds-checked lookup on signed coordinates; outside the raster is `false`.
    #[inline]
    pub fn get_signed(&self, row: isize, col: isize) -> bool {
        row >= 0
            && col >= 0
            && (row as usize) < self.height
            && (col as usize) < self.width
            && self.bits[row as usize * self.width + col as usize]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.bits[row * self.width + col] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Coordinates `(row, col)` of every true pixel in scan order.
    pub fn true_pixels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i / w, i % w))
    }

    /// True when every pixel set here is also set in `other`.
    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    pub fn complement(&self) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeShape {
    Square,
    Disk,
}

/// Flat, symmetric structuring element centered on the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructuringElement {
    radius: usize,
    shape: SeShape,
}

impl StructuringElement {
    pub fn new(radius: usize, shape: SeShape) -> Result<Self> {
        if radius == 0 {
            return Err(Error::InvalidArgument(
                "structuring element radius must be >= 1".into(),
            ));
        }
        Ok(Self { radius, shape })
    }

    pub fn square(radius: usize) -> Result<Self> {
        Self::new(radius, SeShape::Square)
    }

    pub fn disk(radius: usize) -> Result<Self> {
        Self::new(radius, SeShape::Disk)
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn shape(&self) -> SeShape {
        self.shape
    }

    /// Offsets `(d_row, d_col)` covered by the element.
    pub fn offsets(&self) -> Vec<(isize, isize)> {
        let r = self.radius as isize;
        let mut out = Vec::new();
        for dr in -r..=r {
            for dc in -r..=r {
                let inside = match self.shape {
                    SeShape::Square => true,
                    SeShape::Disk => dr * dr + dc * dc <= r * r,
                };
                if inside {
                    out.push((dr, dc));
                }
            }
        }
        out
    }
}

/// A single 4-connected region, stored cropped to its bounding box.
#[derive(Debug, Clone, PartialEq)]
pub struct Roi {
    mask: BinaryMask,
    offset: (usize, usize),
    pixel_count: usize,
    boundary: Vec<(usize, usize)>,
}

impl Roi {
    /// Builds a region from absolute pixel coordinates. The caller guarantees
    /// the pixels form one 4-connected component.
    pub(crate) fn from_pixels(pixels: &[(usize, usize)]) -> Self {
        debug_assert!(!pixels.is_empty());
        let (mut r0, mut c0, mut r1, mut c1) = (usize::MAX, usize::MAX, 0, 0);
        for &(r, c) in pixels {
            r0 = r0.min(r);
            c0 = c0.min(c);
            r1 = r1.max(r);
            c1 = c1.max(c);
        }
        let mut mask = BinaryMask::empty(c1 - c0 + 1, r1 - r0 + 1);
        for &(r, c) in pixels {
            mask.set(r - r0, c - c0, true);
        }
        let boundary = trace_boundary(&mask)
            .into_iter()
            .map(|(r, c)| (r + r0, c + c0))
            .collect();
        Self {
            mask,
            offset: (r0, c0),
            pixel_count: pixels.len(),
            boundary,
        }
    }

    /// Region covering every true pixel of `mask`; errors unless the mask is a
    /// single non-empty 4-connected component.
    pub fn from_mask(mask: &BinaryMask) -> Result<Self> {
        let mut rois = connected_components(mask, 1)?;
        match rois.len() {
            0 => Err(Error::DegenerateRegion("mask has no foreground pixels".into())),
            1 => Ok(rois.remove(0)),
            n => Err(Error::DegenerateRegion(format!(
                "mask has {n} connected components, expected 1"
            ))),
        }
    }

    /// Mask cropped to the bounding box.
    pub fn mask(&self) -> &BinaryMask {
        &self.mask
    }

    /// `(row, col)` of the bounding box's top-left corner in the source image.
    pub fn offset(&self) -> (usize, usize) {
        self.offset
    }

    pub fn pixel_count(&self) -> usize {
        self.pixel_count
    }

    /// Closed 8-connected contour in absolute coordinates, start pixel not repeated.
    pub fn boundary(&self) -> &[(usize, usize)] {
        &self.boundary
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        let (r0, c0) = self.offset;
        row >= r0
            && col >= c0
            && row - r0 < self.mask.height()
            && col - c0 < self.mask.width()
            && self.mask.get(row - r0, col - c0)
    }

    /// Absolute coordinates of every region pixel in scan order.
    pub fn pixels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let (r0, c0) = self.offset;
        self.mask.true_pixels().map(move |(r, c)| (r + r0, c + c0))
    }

    /// Re-embeds the region in a full-size mask.
    pub fn to_mask(&self, width: usize, height: usize) -> BinaryMask {
        let mut out = BinaryMask::empty(width, height);
        for (r, c) in self.pixels() {
            if r < height && c < width {
                out.set(r, c, true);
            }
        }
        out
    }
}

#[inline]
pub(crate) fn clamp_unit(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}
