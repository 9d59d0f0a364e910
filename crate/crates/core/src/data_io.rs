//! Loaders, writers and seeded synthetic corpora.

use std::io::{Cursor, Write as _};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::classifiers::{Class, LabeledDataset};
use crate::error::{Error, Result};
use crate::imaging::{BinaryMask, GrayImage, RgbImage};

pub const WBC_FEATURE_NAMES: [&str; 9] = [
    "clump_thickness",
    "uniformity_cell_size",
    "uniformity_cell_shape",
    "marginal_adhesion",
    "single_epithelial_cell_size",
    "bare_nuclei",
    "bland_chromatin",
    "normal_nucleoli",
    "mitoses",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WbcRecord {
    pub sample_id: u64,
    /// `None` where the file has `?`.
    pub features: [Option<u8>; 9],
    pub class_code: u8,
}

impl WbcRecord {
    pub fn is_complete(&self) -> bool {
        self.features.iter().all(Option::is_some)
    }
}

#[derive(Debug, Clone)]
pub struct WbcData {
    pub dataset: LabeledDataset,
    /// Records dropped for a missing feature.
    pub dropped: usize,
}

pub fn parse_wbc_records(text: &str) -> Result<Vec<WbcRecord>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let no = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 11 {
            return Err(Error::parse(no, format!("expected 11 fields, got {}", fields.len())));
        }
        let sample_id = fields[0]
            .parse()
            .map_err(|_| Error::parse(no, format!("bad sample id `{}`", fields[0])))?;
        let mut features = [None; 9];
        for (k, f) in fields[1..10].iter().enumerate() {
            if *f == "?" {
                continue;
            }
            let v: u8 = f
                .parse()
                .map_err(|_| Error::parse(no, format!("{}: bad value `{f}`", WBC_FEATURE_NAMES[k])))?;
            if !(1..=10).contains(&v) {
                return Err(Error::parse(no, format!("{}: {v} outside 1..=10", WBC_FEATURE_NAMES[k])));
            }
            features[k] = Some(v);
        }
        let class_code = match fields[10] {
            "2" => 2,
            "4" => 4,
            other => return Err(Error::parse(no, format!("class must be 2 or 4, got `{other}`"))),
        };
        out.push(WbcRecord {
            sample_id,
            features,
            class_code,
        });
    }
    Ok(out)
}

/// Class 2 is benign, 4 malignant; records with `?` are dropped and counted.
pub fn parse_wbc(text: &str) -> Result<WbcData> {
    let records = parse_wbc_records(text)?;
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut dropped = 0;
    for r in &records {
        if !r.is_complete() {
            dropped += 1;
            continue;
        }
        rows.push(r.features.iter().map(|v| f64::from(v.unwrap())).collect());
        labels.push(if r.class_code == 4 { Class::Malignant } else { Class::Benign });
    }
    let names = WBC_FEATURE_NAMES.iter().map(|s| s.to_string()).collect();
    Ok(WbcData {
        dataset: LabeledDataset::new(names, rows, labels)?,
        dropped,
    })
}

pub fn load_wbc_csv(path: impl AsRef<Path>) -> Result<WbcData> {
    let path = path.as_ref();
    parse_wbc(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

/// Whether `text` looks like the headerless 11-field WBC layout.
pub fn looks_like_wbc(text: &str) -> bool {
    text.lines()
        .find(|l| !l.trim().is_empty())
        .is_some_and(|l| l.split(',').count() == 11 && l.split(',').next().is_some_and(|f| f.trim().parse::<u64>().is_ok()))
}

// ---- images ----

struct Pnm {
    magic: u8,
    width: usize,
    height: usize,
    maxval: u32,
    samples: Vec<u32>,
}

fn pnm_error(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

fn parse_pnm(bytes: &[u8]) -> Result<Pnm> {
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(pnm_error("not a PNM file"));
    }
    let magic = bytes[1];
    if !matches!(magic, b'2' | b'3' | b'5' | b'6') {
        return Err(pnm_error(format!("unsupported magic P{}", magic as char)));
    }
    let mut pos = 2;
    let mut header = [0usize; 3];
    for slot in header.iter_mut() {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        *slot = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| pnm_error("truncated or malformed header"))?;
    }
    let [width, height, maxval] = header;
    let maxval_u32 = maxval as u32;
    if width == 0 || height == 0 || maxval == 0 || maxval > 65535 {
        return Err(pnm_error(format!("bad header {width}x{height} maxval {maxval}")));
    }
    let channels = if matches!(magic, b'3' | b'6') { 3 } else { 1 };
    let n = width
        .checked_mul(height)
        .and_then(|p| p.checked_mul(channels))
        .ok_or_else(|| pnm_error("image too large"))?;
    let samples = if matches!(magic, b'5' | b'6') {
        // exactly one whitespace byte separates header and raster
        pos += 1;
        let wide = maxval > 255;
        let need = n * if wide { 2 } else { 1 };
        let raster = bytes
            .get(pos..pos + need)
            .ok_or_else(|| pnm_error(format!("truncated raster: need {need} bytes")))?;
        if wide {
            raster.chunks_exact(2).map(|b| u32::from(u16::from_be_bytes([b[0], b[1]]))).collect()
        } else {
            raster.iter().map(|&b| u32::from(b)).collect()
        }
    } else {
        let text = std::str::from_utf8(&bytes[pos..]).map_err(|_| pnm_error("non-ASCII plain raster"))?;
        let samples: Vec<u32> = text
            .split_ascii_whitespace()
            .take(n)
            .map(|t| t.parse().map_err(|_| pnm_error(format!("bad sample `{t}`"))))
            .collect::<Result<_>>()?;
        if samples.len() < n {
            return Err(pnm_error(format!("truncated raster: {} of {n} samples", samples.len())));
        }
        samples
    };
    if let Some(&bad) = samples.iter().find(|&&s| s > maxval_u32) {
        return Err(pnm_error(format!("sample {bad} exceeds maxval {maxval}")));
    }
    Ok(Pnm {
        magic,
        width,
        height,
        maxval: maxval_u32,
        samples,
    })
}

/// Decoded pixels scaled to `[0, 1]`, with 1 or 3 interleaved channels.
struct Decoded {
    width: usize,
    height: usize,
    channels: usize,
    values: Vec<f64>,
}

fn decode_png(bytes: &[u8]) -> Result<Decoded> {
    let fmt = |e: png::DecodingError| pnm_error(format!("PNG: {e}"));
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder.read_info().map_err(fmt)?;
    let size = reader.output_buffer_size().ok_or_else(|| pnm_error("PNG too large"))?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf).map_err(fmt)?;
    if info.bit_depth != png::BitDepth::Eight {
        return Err(pnm_error("only 8-bit PNG is supported"));
    }
    let (src_channels, channels) = match info.color_type {
        png::ColorType::Grayscale => (1, 1),
        png::ColorType::GrayscaleAlpha => (2, 1),
        png::ColorType::Rgb => (3, 3),
        png::ColorType::Rgba => (4, 3),
        other => return Err(pnm_error(format!("unsupported PNG color type {other:?}"))),
    };
    let (width, height) = (info.width as usize, info.height as usize);
    let mut values = Vec::with_capacity(width * height * channels);
    for row in buf.chunks_exact(info.line_size).take(height) {
        for px in row.chunks_exact(src_channels).take(width) {
            values.extend(px[..channels].iter().map(|&b| f64::from(b) / 255.0));
        }
    }
    Ok(Decoded {
        width,
        height,
        channels,
        values,
    })
}

fn decode(bytes: &[u8]) -> Result<Decoded> {
    if bytes.starts_with(b"\x89PNG") {
        return decode_png(bytes);
    }
    let p = parse_pnm(bytes)?;
    let channels = if matches!(p.magic, b'3' | b'6') { 3 } else { 1 };
    let scale = f64::from(p.maxval);
    Ok(Decoded {
        width: p.width,
        height: p.height,
        channels,
        values: p.samples.iter().map(|&s| f64::from(s) / scale).collect(),
    })
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

/// Grayscale from bytes; color input becomes the channel mean.
pub fn decode_gray(bytes: &[u8]) -> Result<GrayImage> {
    let d = decode(bytes)?;
    if d.channels == 1 {
        GrayImage::new(d.width, d.height, d.values)
    } else {
        Ok(rgb_from(d)?.to_gray())
    }
}

fn rgb_from(d: Decoded) -> Result<RgbImage> {
    let planes = if d.channels == 1 {
        [d.values.clone(), d.values.clone(), d.values]
    } else {
        let mut planes = [Vec::new(), Vec::new(), Vec::new()];
        for px in d.values.chunks_exact(3) {
            for (plane, &v) in planes.iter_mut().zip(px) {
                plane.push(v);
            }
        }
        planes
    };
    RgbImage::new(d.width, d.height, planes)
}

/// Color from bytes; grayscale input is replicated to three channels.
pub fn decode_rgb(bytes: &[u8]) -> Result<RgbImage> {
    rgb_from(decode(bytes)?)
}

pub fn load_gray_image(path: impl AsRef<Path>) -> Result<GrayImage> {
    decode_gray(&read_bytes(path.as_ref())?)
}

pub fn load_rgb_image(path: impl AsRef<Path>) -> Result<RgbImage> {
    decode_rgb(&read_bytes(path.as_ref())?)
}

fn to_byte(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Binary (P5) PGM, 8 bits.
pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.pixels().iter().map(|&v| to_byte(v)));
    out
}

/// Plain (P2) PGM, 8 bits.
pub fn encode_pgm_plain(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P2\n{} {}\n255\n", img.width(), img.height());
    for row in img.pixels().chunks(img.width().max(1)) {
        let line: Vec<String> = row.iter().map(|&v| to_byte(v).to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out.into_bytes()
}

/// Binary (P6) PPM, 8 bits.
pub fn encode_ppm(img: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    for i in 0..img.width() * img.height() {
        out.extend((0..3).map(|ch| to_byte(img.plane(ch)[i])));
    }
    out
}

pub fn encode_mask_pgm(mask: &BinaryMask) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", mask.width(), mask.height()).into_bytes();
    out.extend(mask.bits().iter().map(|&b| if b { 255 } else { 0 }));
    out
}

fn encode_png_raw(width: usize, height: usize, color: png::ColorType, data: &[u8]) -> Result<Vec<u8>> {
    let fmt = |e: png::EncodingError| pnm_error(format!("PNG: {e}"));
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, width as u32, height as u32);
        enc.set_color(color);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header().map_err(fmt)?;
        writer.write_image_data(data).map_err(fmt)?;
        writer.finish().map_err(fmt)?;
    }
    Ok(out)
}

pub fn encode_png_gray(img: &GrayImage) -> Result<Vec<u8>> {
    let data: Vec<u8> = img.pixels().iter().map(|&v| to_byte(v)).collect();
    encode_png_raw(img.width(), img.height(), png::ColorType::Grayscale, &data)
}

pub fn encode_png_rgb(img: &RgbImage) -> Result<Vec<u8>> {
    let n = img.width() * img.height();
    let data: Vec<u8> = (0..n).flat_map(|i| (0..3).map(move |ch| to_byte(img.plane(ch)[i]))).collect();
    encode_png_raw(img.width(), img.height(), png::ColorType::Rgb, &data)
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

fn is_png(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("png"))
}

/// PNG for `.png` paths, binary PGM otherwise.
pub fn save_gray_image(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = if is_png(path) { encode_png_gray(img)? } else { encode_pgm(img) };
    write_bytes(path, &bytes)
}

/// PNG for `.png` paths, binary PPM otherwise.
pub fn save_rgb_image(img: &RgbImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = if is_png(path) { encode_png_rgb(img)? } else { encode_ppm(img) };
    write_bytes(path, &bytes)
}

pub fn save_mask(mask: &BinaryMask, path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path.as_ref(), &encode_mask_pgm(mask))
}

/// Pixels above one half are set.
pub fn load_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    let img = load_gray_image(path)?;
    BinaryMask::new(img.width(), img.height(), img.pixels().iter().map(|&v| v > 0.5).collect())
}

// ---- synthetic corpora ----

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub count: usize,
    pub image_size: usize,
    /// Fraction of malignant samples.
    pub class_balance: f64,
}

impl SyntheticSpec {
    pub fn new(seed: u64, count: usize, image_size: usize) -> Self {
        Self {
            seed,
            count,
            image_size,
            class_balance: 0.5,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::InvalidArgument(format!("count must be >= 2, got {}", self.count)));
        }
        if !(self.class_balance > 0.0 && self.class_balance < 1.0) {
            return Err(Error::InvalidArgument("class balance must be in (0, 1)".into()));
        }
        if self.image_size < 32 {
            return Err(Error::InvalidArgument(format!(
                "image size must be >= 32, got {}",
                self.image_size
            )));
        }
        Ok(())
    }

    /// Labels in sample order: malignant count is `round(count * balance)`,
    /// positions shuffled by the seed.
    fn labels(&self) -> Vec<Class> {
        use rand::seq::SliceRandom;
        let m = ((self.count as f64 * self.class_balance).round() as usize).clamp(1, self.count - 1);
        let mut labels: Vec<Class> = (0..self.count)
            .map(|i| if i < m { Class::Malignant } else { Class::Benign })
            .collect();
        labels.shuffle(&mut ChaCha8Rng::seed_from_u64(self.seed));
        labels
    }

    fn sample_rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64 + 1);
        rng
    }
}

fn point_in_polygon(poly: &[(f64, f64)], x: f64, y: f64) -> bool {
    let mut inside = false;
    let mut j = poly.len() - 1;
    for i in 0..poly.len() {
        let (xi, yi) = poly[i];
        let (xj, yj) = poly[j];
        if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
            inside = !inside;
        }
        j = i;
    }
    inside
}

fn lung_sample(rng: &mut ChaCha8Rng, size: usize, label: Class) -> GrayImage {
    let s = size as f64;
    let (cy, cx) = (s / 2.0 + rng.random_range(-0.08..0.08) * s, s / 2.0 + rng.random_range(-0.08..0.08) * s);
    let radius = rng.random_range(0.18..0.24) * s;
    let noise: Vec<f64> = (0..size * size).map(|_| rng.random_range(-0.05..0.05)).collect();
    let inside: Box<dyn Fn(f64, f64) -> bool> = match label {
        Class::Benign => {
            let (a, b) = (radius, radius * rng.random_range(0.7..1.0));
            let theta: f64 = rng.random_range(0.0..std::f64::consts::PI);
            let (sin, cos) = theta.sin_cos();
            Box::new(move |y, x| {
                let (dy, dx) = (y - cy, x - cx);
                let u = dx * cos + dy * sin;
                let v = -dx * sin + dy * cos;
                (u / a).powi(2) + (v / b).powi(2) <= 1.0
            })
        }
        Class::Malignant => {
            let points = rng.random_range(5..=6);
            let outer = radius * 1.3;
            let inner = outer * rng.random_range(0.38..0.45);
            let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let poly: Vec<(f64, f64)> = (0..2 * points)
                .map(|k| {
                    let r = if k % 2 == 0 { outer } else { inner };
                    let a = phase + k as f64 * std::f64::consts::PI / points as f64;
                    (cx + r * a.cos(), cy + r * a.sin())
                })
                .collect();
            Box::new(move |y, x| point_in_polygon(&poly, x, y))
        }
    };
    // high-contrast interior texture for malignant nodules
    let blobs: Vec<(f64, f64, f64)> = (0..8)
        .map(|_| {
            (
                cy + rng.random_range(-1.0..1.0) * radius,
                cx + rng.random_range(-1.0..1.0) * radius,
                rng.random_range(0.15..0.35) * radius,
            )
        })
        .collect();
    GrayImage::from_fn(size, size, |r, c| {
        let (y, x) = (r as f64, c as f64);
        let n = noise[r * size + c];
        if !inside(y, x) {
            return 0.15 + n;
        }
        match label {
            Class::Benign => 0.72 + 0.4 * n,
            Class::Malignant => {
                let spot = blobs
                    .iter()
                    .any(|&(by, bx, br)| (y - by).powi(2) + (x - bx).powi(2) <= br * br);
                (if spot { 0.9 } else { 0.58 }) + 1.2 * n
            }
        }
    })
}

/// Dark noisy field with one bright nodule: a smooth ellipse when benign,
/// a textured star polygon when malignant.
pub fn synthesize_lung_dataset(spec: &SyntheticSpec) -> Result<Vec<(GrayImage, Class)>> {
    spec.validate()?;
    Ok(spec
        .labels()
        .into_par_iter()
        .enumerate()
        .map(|(i, label)| (lung_sample(&mut spec.sample_rng(i), spec.image_size, label), label))
        .collect())
}

const SKIN: [f64; 3] = [0.85, 0.7, 0.6];
const LESION_DARK: [f64; 3] = [0.12, 0.07, 0.05];
const LESION_LIGHT: [f64; 3] = [0.55, 0.37, 0.28];
const LESION_BENIGN: [f64; 3] = [0.36, 0.23, 0.16];

fn lesion_sample(rng: &mut ChaCha8Rng, size: usize, label: Class) -> (RgbImage, BinaryMask) {
    let s = size as f64;
    let (cy, cx) = (s / 2.0 + rng.random_range(-0.04..0.04) * s, s / 2.0 + rng.random_range(-0.04..0.04) * s);
    let radius = rng.random_range(0.17..0.22) * s;
    // boundary radius as a function of angle: constant when benign, lopsided
    // and wavy when malignant
    let (lopside, twist, wave, lobes) = match label {
        Class::Benign => ((0.0, 0.0), (0.0, 0.0), (0.0, 0.0), 0),
        Class::Malignant => (
            (rng.random_range(0.2..0.3), rng.random_range(0.0..std::f64::consts::TAU)),
            (rng.random_range(0.08..0.15), rng.random_range(0.0..std::f64::consts::TAU)),
            (rng.random_range(0.18..0.25), rng.random_range(0.0..std::f64::consts::TAU)),
            rng.random_range(7..=10),
        ),
    };
    let boundary = move |theta: f64| {
        radius
            * (1.0
                + lopside.0 * (theta - lopside.1).cos()
                + twist.0 * (2.0 * theta - twist.1).cos()
                + wave.0 * (lobes as f64 * theta + wave.1).sin())
    };
    let mask = BinaryMask::from_fn(size, size, |r, c| {
        let (dy, dx) = (r as f64 - cy, c as f64 - cx);
        (dy * dy + dx * dx).sqrt() <= boundary(dy.atan2(dx))
    });
    let spots: Vec<(f64, f64, f64)> = (0..9)
        .map(|_| {
            (
                cy + rng.random_range(-1.2..1.2) * radius,
                cx + rng.random_range(-1.2..1.2) * radius,
                rng.random_range(0.25..0.45) * radius,
            )
        })
        .collect();
    let noise: Vec<[f64; 3]> = (0..size * size)
        .map(|_| {
            let n = rng.random_range(-0.02..0.02);
            [n, n, n]
        })
        .collect();
    let img = RgbImage::from_fn(size, size, |r, c| {
        let n = noise[r * size + c];
        let base = if !mask.get(r, c) {
            SKIN
        } else if label == Class::Benign {
            LESION_BENIGN
        } else {
            let (y, x) = (r as f64, c as f64);
            let light = spots
                .iter()
                .any(|&(sy, sx, sr)| (y - sy).powi(2) + (x - sx).powi(2) <= sr * sr);
            if light {
                LESION_LIGHT
            } else {
                LESION_DARK
            }
        };
        [base[0] + n[0], base[1] + n[1], base[2] + n[2]]
    });
    (img, mask)
}

/// Bright skin with one dark lesion: a uniform disk when benign, a mottled
/// lopsided blob with a wavy border when malignant. Masks are exact.
pub fn synthesize_lesion_dataset(spec: &SyntheticSpec) -> Result<Vec<(RgbImage, BinaryMask, Class)>> {
    spec.validate()?;
    Ok(spec
        .labels()
        .into_par_iter()
        .enumerate()
        .map(|(i, label)| {
            let (img, mask) = lesion_sample(&mut spec.sample_rng(i), spec.image_size, label);
            (img, mask, label)
        })
        .collect())
}

// ---- index and feature tables ----

#[derive(Debug, Clone, PartialEq)]
pub struct IndexEntry {
    pub path: PathBuf,
    pub label: Option<Class>,
    pub mask: Option<PathBuf>,
}

fn parse_label(s: &str, line: usize) -> Result<Class> {
    match s.trim() {
        "0" => Ok(Class::Benign),
        "1" => Ok(Class::Malignant),
        other => Err(Error::parse(line, format!("label must be 0 or 1, got `{other}`"))),
    }
}

/// Reads `path[,label[,mask]]` rows with a header; relative paths resolve
/// against the index's directory.
pub fn read_index(path: impl AsRef<Path>) -> Result<Vec<IndexEntry>> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or(Path::new(""));
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::parse(1, e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let path_col = col("path").ok_or_else(|| Error::parse(1, "index needs a `path` column"))?;
    let (label_col, mask_col) = (col("label"), col("mask"));
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::parse(line, e.to_string()))?;
        let field = |c: usize| rec.get(c).map(str::trim).filter(|s| !s.is_empty());
        let p = field(path_col).ok_or_else(|| Error::parse(line, "empty path"))?;
        out.push(IndexEntry {
            path: base.join(p),
            label: label_col.and_then(field).map(|s| parse_label(s, line)).transpose()?,
            mask: mask_col.and_then(field).map(|m| base.join(m)),
        });
    }
    Ok(out)
}

pub fn write_lung_dataset(spec: &SyntheticSpec, dir: impl AsRef<Path>) -> Result<PathBuf> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut index = String::from("path,label\n");
    for (i, (img, label)) in synthesize_lung_dataset(spec)?.iter().enumerate() {
        let name = format!("lung_{i:04}.pgm");
        save_gray_image(img, dir.join(&name))?;
        index.push_str(&format!("{name},{}\n", label.code()));
    }
    let path = dir.join("index.csv");
    write_bytes(&path, index.as_bytes())?;
    Ok(path)
}

pub fn write_lesion_dataset(spec: &SyntheticSpec, dir: impl AsRef<Path>) -> Result<PathBuf> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut index = String::from("path,label,mask\n");
    for (i, (img, mask, label)) in synthesize_lesion_dataset(spec)?.iter().enumerate() {
        let name = format!("lesion_{i:04}.ppm");
        let mask_name = format!("lesion_{i:04}_mask.pgm");
        save_rgb_image(img, dir.join(&name))?;
        save_mask(mask, dir.join(&mask_name))?;
        index.push_str(&format!("{name},{},{mask_name}\n", label.code()));
    }
    let path = dir.join("index.csv");
    write_bytes(&path, index.as_bytes())?;
    Ok(path)
}

/// Named feature rows, labelled or not.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Option<Vec<Class>>,
}

impl FeatureTable {
    pub fn into_dataset(self) -> Result<LabeledDataset> {
        let labels = self
            .labels
            .ok_or_else(|| Error::Format("feature table has no `label` column".into()))?;
        LabeledDataset::new(self.names, self.rows, labels)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.names.join(",");
        if self.labels.is_some() {
            out.push_str(",label");
        }
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            let mut fields: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            if let Some(labels) = &self.labels {
                fields.push(labels[i].code().to_string());
            }
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

impl From<&LabeledDataset> for FeatureTable {
    fn from(d: &LabeledDataset) -> Self {
        Self {
            names: d.feature_names().to_vec(),
            rows: d.rows().to_vec(),
            labels: Some(d.labels().to_vec()),
        }
    }
}

/// Header row of names; a column named `label` holds 0/1.
pub fn parse_feature_csv(text: &str) -> Result<FeatureTable> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::parse(1, e.to_string()))?.clone();
    if headers.is_empty() || headers.iter().all(|h| h.trim().is_empty()) {
        return Err(Error::parse(1, "missing header row"));
    }
    let label_col = headers.iter().position(|h| h.trim() == "label");
    let names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| Some(i) != label_col)
        .map(|(_, h)| h.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::parse(line, e.to_string()))?;
        let mut row = Vec::with_capacity(names.len());
        for (c, field) in rec.iter().enumerate() {
            if Some(c) == label_col {
                labels.push(parse_label(field, line)?);
            } else {
                let v: f64 = field
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(line, format!("column `{}`: bad number `{field}`", headers[c].trim())))?;
                if !v.is_finite() {
                    return Err(Error::parse(line, format!("column `{}`: non-finite value", headers[c].trim())));
                }
                row.push(v);
            }
        }
        rows.push(row);
    }
    Ok(FeatureTable {
        names,
        rows,
        labels: label_col.map(|_| labels),
    })
}

pub fn load_feature_csv(path: impl AsRef<Path>) -> Result<FeatureTable> {
    let path = path.as_ref();
    parse_feature_csv(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}
