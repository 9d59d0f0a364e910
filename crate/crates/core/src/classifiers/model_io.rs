//! Line-oriented model files.
//!
//! ```text
//! # cadx model
//! format_version	1
//! model_kind	svm
//! feature_names	area	solidity
//! normalization_min	0.0	1.5
//! normalization_max	1.0	9.25
//! inconclusive_delta	0.0
//! parameters.weights	0.25	-1.0
//! ...
//! end
//! ```
//!
//! Fields are tab separated. Floats use Rust's shortest round-trip form, so
//! a loaded model predicts bit-identically. The trailing `end` line makes
//! truncation detectable.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{GdModel, GdStepMode, LinearSvmModel, MlpModel, Model, ModelKind, Normalization};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;
const HEADER: &str = "# cadx model";

fn floats(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join("\t")
}

fn usizes(values: &[usize]) -> String {
    values.iter().map(usize::to_string).collect::<Vec<_>>().join("\t")
}

pub fn render_model(model: &Model) -> String {
    let mut out = String::new();
    let mut line = |key: &str, value: String| {
        if value.is_empty() {
            writeln!(out, "{key}").unwrap();
        } else {
            writeln!(out, "{key}\t{value}").unwrap();
        }
    };
    line(HEADER, String::new());
    line("format_version", FORMAT_VERSION.to_string());
    line("model_kind", model.kind().as_str().to_string());
    line("feature_names", model.feature_names().join("\t"));
    let normalization = match model {
        Model::Svm(m) => m.normalization.as_ref(),
        Model::Mlp(m) => m.normalization.as_ref(),
        Model::Gd(m) => Some(&m.normalization),
    };
    if let Some(n) = normalization {
        line("normalization_min", floats(&n.mins));
        line("normalization_max", floats(&n.maxs));
    }
    line("inconclusive_delta", format!("{:?}", model.inconclusive_delta()));
    match model {
        Model::Svm(m) => {
            line("parameters.feature_indices", usizes(&m.feature_indices));
            line("parameters.weights", floats(&m.weights));
            line("parameters.bias", format!("{:?}", m.bias));
            line("parameters.c", format!("{:?}", m.c));
        }
        Model::Mlp(m) => {
            line("parameters.layer_sizes", usizes(&m.layer_sizes));
            for (l, (w, b)) in m.weights.iter().zip(&m.biases).enumerate() {
                line(&format!("parameters.weights.{l}"), floats(w));
                line(&format!("parameters.biases.{l}"), floats(b));
            }
        }
        Model::Gd(m) => {
            line("parameters.weights", floats(&m.weights));
            line("parameters.bias", format!("{:?}", m.bias));
            line("parameters.iterations", m.iterations.to_string());
            line("parameters.step", format!("{:?}", m.step));
            line("parameters.step_mode", m.mode.as_str().to_string());
        }
    }
    line("end", String::new());
    out
}

struct Fields {
    map: HashMap<String, (usize, Vec<String>)>,
    last_line: usize,
}

impl Fields {
    fn raw(&self, key: &str) -> Result<(usize, &[String])> {
        self.map
            .get(key)
            .map(|(l, v)| (*l, v.as_slice()))
            .ok_or_else(|| Error::parse(self.last_line, format!("missing field `{key}`")))
    }

    fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    fn floats(&self, key: &str) -> Result<Vec<f64>> {
        let (line, values) = self.raw(key)?;
        values
            .iter()
            .map(|v| {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::parse(line, format!("field `{key}`: bad number `{v}`")))
            })
            .collect()
    }

    fn usizes(&self, key: &str) -> Result<Vec<usize>> {
        let (line, values) = self.raw(key)?;
        values
            .iter()
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| Error::parse(line, format!("field `{key}`: bad count `{v}`")))
            })
            .collect()
    }

    fn scalar(&self, key: &str) -> Result<f64> {
        let (line, _) = self.raw(key)?;
        match self.floats(key)?.as_slice() {
            [v] => Ok(*v),
            other => Err(Error::parse(line, format!("field `{key}`: expected 1 value, got {}", other.len()))),
        }
    }

    fn single(&self, key: &str) -> Result<&str> {
        let (line, values) = self.raw(key)?;
        match values {
            [v] => Ok(v),
            other => Err(Error::parse(line, format!("field `{key}`: expected 1 value, got {}", other.len()))),
        }
    }

    fn check_len(&self, key: &str, len: usize, expected: usize) -> Result<()> {
        if len != expected {
            let (line, _) = self.raw(key)?;
            return Err(Error::parse(line, format!("field `{key}`: expected {expected} values, got {len}")));
        }
        Ok(())
    }
}

pub fn parse_model(text: &str) -> Result<Model> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, l)) if l.trim_end() == HEADER => {}
        _ => return Err(Error::parse(1, format!("expected header `{HEADER}`"))),
    }
    let mut map = HashMap::new();
    let mut ended = false;
    let mut last_line = 1;
    for (no, raw) in lines {
        last_line = no;
        let l = raw.trim_end_matches('\r');
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        if ended {
            return Err(Error::parse(no, "content after `end`"));
        }
        let mut parts = l.split('\t');
        let key = parts.next().unwrap_or_default().to_string();
        if key == "end" {
            ended = true;
            continue;
        }
        let values: Vec<String> = parts.map(str::to_string).collect();
        if map.insert(key.clone(), (no, values)).is_some() {
            return Err(Error::parse(no, format!("duplicate field `{key}`")));
        }
    }
    if !ended {
        return Err(Error::parse(last_line, "truncated model: missing `end` line"));
    }
    let f = Fields { map, last_line };

    let (vline, _) = f.raw("format_version")?;
    let version: u32 = f
        .single("format_version")?
        .parse()
        .map_err(|_| Error::parse(vline, "format_version is not an integer"))?;
    if version != FORMAT_VERSION {
        return Err(Error::UnsupportedVersion {
            found: version,
            supported: FORMAT_VERSION,
        });
    }
    let (kline, _) = f.raw("model_kind")?;
    let kind: ModelKind = f
        .single("model_kind")?
        .parse()
        .map_err(|e: Error| Error::parse(kline, e.to_string()))?;
    let feature_names = f.raw("feature_names")?.1.to_vec();
    let d = feature_names.len();
    if d == 0 {
        return Err(Error::parse(f.raw("feature_names")?.0, "no feature names"));
    }
    let normalization = if f.has("normalization_min") || f.has("normalization_max") {
        let mins = f.floats("normalization_min")?;
        let maxs = f.floats("normalization_max")?;
        f.check_len("normalization_min", mins.len(), d)?;
        f.check_len("normalization_max", maxs.len(), d)?;
        if mins.iter().zip(&maxs).any(|(lo, hi)| lo > hi) {
            return Err(Error::parse(f.raw("normalization_max")?.0, "normalization min exceeds max"));
        }
        Some(Normalization { mins, maxs })
    } else {
        None
    };
    let delta = f.scalar("inconclusive_delta")?;
    if !(0.0..0.5).contains(&delta) {
        return Err(Error::parse(f.raw("inconclusive_delta")?.0, "inconclusive_delta must be in [0, 0.5)"));
    }

    Ok(match kind {
        ModelKind::Svm => {
            let feature_indices = f.usizes("parameters.feature_indices")?;
            let weights = f.floats("parameters.weights")?;
            f.check_len("parameters.weights", weights.len(), feature_indices.len())?;
            if feature_indices.iter().any(|&i| i >= d) {
                return Err(Error::parse(
                    f.raw("parameters.feature_indices")?.0,
                    "feature index out of range",
                ));
            }
            Model::Svm(LinearSvmModel {
                feature_names,
                feature_indices,
                weights,
                bias: f.scalar("parameters.bias")?,
                c: f.scalar("parameters.c")?,
                normalization,
            })
        }
        ModelKind::Ann => {
            let layer_sizes = f.usizes("parameters.layer_sizes")?;
            let sizes_line = f.raw("parameters.layer_sizes")?.0;
            if layer_sizes.len() < 2 || layer_sizes.contains(&0) || *layer_sizes.last().unwrap() != 1 {
                return Err(Error::parse(sizes_line, "invalid layer sizes"));
            }
            if layer_sizes[0] != d {
                return Err(Error::parse(sizes_line, "input layer does not match feature_names"));
            }
            let mut weights = Vec::new();
            let mut biases = Vec::new();
            for (l, pair) in layer_sizes.windows(2).enumerate() {
                let wk = format!("parameters.weights.{l}");
                let bk = format!("parameters.biases.{l}");
                let w = f.floats(&wk)?;
                let b = f.floats(&bk)?;
                f.check_len(&wk, w.len(), pair[0] * pair[1])?;
                f.check_len(&bk, b.len(), pair[1])?;
                weights.push(w);
                biases.push(b);
            }
            Model::Mlp(MlpModel {
                feature_names,
                layer_sizes,
                weights,
                biases,
                inconclusive_delta: delta,
                normalization,
            })
        }
        ModelKind::Gd => {
            let weights = f.floats("parameters.weights")?;
            f.check_len("parameters.weights", weights.len(), d)?;
            let (mline, _) = f.raw("parameters.step_mode")?;
            let mode: GdStepMode = f
                .single("parameters.step_mode")?
                .parse()
                .map_err(|e: Error| Error::parse(mline, e.to_string()))?;
            let (iline, _) = f.raw("parameters.iterations")?;
            let iterations = f
                .single("parameters.iterations")?
                .parse()
                .map_err(|_| Error::parse(iline, "iterations is not a count"))?;
            Model::Gd(GdModel {
                feature_names,
                weights,
                bias: f.scalar("parameters.bias")?,
                iterations,
                step: f.scalar("parameters.step")?,
                mode,
                normalization: normalization
                    .ok_or_else(|| Error::parse(f.last_line, "gd model requires normalization"))?,
            })
        }
    })
}

pub fn save_model(model: &Model, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, render_model(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Model> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_model(&text)
}
