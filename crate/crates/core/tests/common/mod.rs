//! Independent oracles and seeded case generators shared by the integration
//! tests and the acceptance harness. Each `check_*` returns a one-line
//! summary on success and the first counterexample on failure.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cadx::classifiers::{
    mlp_gradient_targets, parse_model, predict_mlp, render_model, train_svm, Class, Classifier, GdModel, GdStepMode,
    LabeledDataset, LinearSvmModel, MlpModel, Model, Normalization, SvmParams,
};
use cadx::dermoscopy::lesion_diameter;
use cadx::evaluation::{metrics, welch_t_test, ConfusionCounts};
use cadx::imaging::{
    connected_components, hull_lattice_count, morphological_close, total_variation, tv_denoise, BinaryMask, GrayImage,
    Roi, SeShape, StructuringElement,
};
use cadx::texture::{compute_glcm, GlcmOffset, GlcmParams};

pub type Check = Result<String, String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn names(d: usize) -> Vec<String> {
    (0..d).map(|i| format!("f{i}")).collect()
}

pub fn random_mask(rng: &mut ChaCha8Rng, w: usize, h: usize, density: f64) -> BinaryMask {
    BinaryMask::from_fn(w, h, |_, _| rng.random_bool(density))
}

/// Largest 4-connected component of a dense random mask.
pub fn random_region(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Roi {
    loop {
        let mask = random_mask(rng, w, h, 0.65);
        if let Some(roi) = connected_components(&mask, 1).unwrap().into_iter().next() {
            return roi;
        }
    }
}

pub fn random_image(rng: &mut ChaCha8Rng, w: usize, h: usize) -> GrayImage {
    GrayImage::from_fn(w, h, |_, _| rng.random::<f64>())
}

// ---- geometry oracles ----

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Lattice points in the convex hull: intersect every half-plane through a
/// pair of points that holds all points, then the bounding box. O(n^3).
pub fn convex_area_oracle(points: &[(i64, i64)]) -> usize {
    let mut support = Vec::new();
    for &a in points {
        for &b in points {
            if a != b && points.iter().all(|&p| cross(a, b, p) >= 0) {
                support.push((a, b));
            }
        }
    }
    let (r0, r1) = (points.iter().map(|p| p.0).min().unwrap(), points.iter().map(|p| p.0).max().unwrap());
    let (c0, c1) = (points.iter().map(|p| p.1).min().unwrap(), points.iter().map(|p| p.1).max().unwrap());
    let mut n = 0;
    for r in r0..=r1 {
        for c in c0..=c1 {
            if support.iter().all(|&(a, b)| cross(a, b, (r, c)) >= 0) {
                n += 1;
            }
        }
    }
    n
}

/// Largest distance between any two region pixels. O(n^2).
pub fn diameter_oracle(points: &[(i64, i64)]) -> f64 {
    let mut best = 0i64;
    for a in points {
        for b in points {
            best = best.max((a.0 - b.0).pow(2) + (a.1 - b.1).pow(2));
        }
    }
    (best as f64).sqrt()
}

/// 4-connected components by depth-first flood fill, each as a sorted pixel list.
pub fn components_oracle(mask: &BinaryMask) -> Vec<Vec<(usize, usize)>> {
    let (w, h) = (mask.width(), mask.height());
    let mut label = vec![usize::MAX; w * h];
    let mut out = Vec::new();
    for r in 0..h {
        for c in 0..w {
            if !mask.get(r, c) || label[r * w + c] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut pixels = Vec::new();
            let mut stack = vec![(r, c)];
            label[r * w + c] = id;
            while let Some((y, x)) = stack.pop() {
                pixels.push((y, x));
                let mut push = |yy: usize, xx: usize| {
                    if mask.get(yy, xx) && label[yy * w + xx] == usize::MAX {
                        label[yy * w + xx] = id;
                        stack.push((yy, xx));
                    }
                };
                if y > 0 {
                    push(y - 1, x);
                }
                if y + 1 < h {
                    push(y + 1, x);
                }
                if x > 0 {
                    push(y, x - 1);
                }
                if x + 1 < w {
                    push(y, x + 1);
                }
            }
            pixels.sort_unstable();
            out.push(pixels);
        }
    }
    out
}

/// Co-occurrence counts by enumerating every ordered pixel pair of the image.
pub fn glcm_oracle(img: &GrayImage, roi: &Roi, dr: i64, dc: i64, levels: usize, symmetric: bool) -> Vec<u64> {
    let level = |v: f64| ((v * levels as f64).floor() as usize).min(levels - 1);
    let (w, h) = (img.width(), img.height());
    let all: Vec<(usize, usize)> = (0..h).flat_map(|r| (0..w).map(move |c| (r, c))).collect();
    let mut counts = vec![0u64; levels * levels];
    for &p in &all {
        for &q in &all {
            if q.0 as i64 - p.0 as i64 != dr || q.1 as i64 - p.1 as i64 != dc {
                continue;
            }
            if roi.contains(p.0, p.1) && roi.contains(q.0, q.1) {
                let (a, b) = (level(img.get(p.0, p.1)), level(img.get(q.0, q.1)));
                counts[a * levels + b] += 1;
                if symmetric {
                    counts[b * levels + a] += 1;
                }
            }
        }
    }
    counts
}

fn roi_points(roi: &Roi) -> Vec<(i64, i64)> {
    roi.pixels().map(|(r, c)| (r as i64, c as i64)).collect()
}

pub fn check_glcm_oracle() -> Check {
    let mut r = rng(501);
    let mut cases = 0;
    for h in 1..=12 {
        for w in 1..=12 {
            let img = random_image(&mut r, w, h);
            let roi = random_region(&mut r, w, h);
            for (dr, dc) in [(0, 1), (1, 0), (1, 1), (-1, 1), (2, -3)] {
                for symmetric in [true, false] {
                    let levels = r.random_range(2..=9);
                    let params = GlcmParams {
                        offset: GlcmOffset::new(dr, dc).unwrap(),
                        levels,
                        symmetric,
                    };
                    let oracle = glcm_oracle(&img, &roi, dr as i64, dc as i64, levels, symmetric);
                    match compute_glcm(&img, &roi, &params) {
                        Ok(g) if g.counts() == oracle.as_slice() => {}
                        Ok(g) => return Err(format!("{w}x{h} offset ({dr},{dc}): {:?} != {oracle:?}", g.counts())),
                        // no valid pair: the oracle must agree that nothing was counted
                        Err(_) if oracle.iter().all(|&c| c == 0) => {}
                        Err(e) => return Err(format!("{w}x{h} offset ({dr},{dc}): {e}")),
                    }
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} GLCMs on every mask size up to 12x12 match pair enumeration"))
}

pub fn check_geometry_oracles() -> Check {
    let mut r = rng(502);
    for case in 0..100 {
        let (w, h) = (r.random_range(1..=14), r.random_range(1..=14));
        let roi = random_region(&mut r, w, h);
        let pts = roi_points(&roi);
        let (got, want) = (hull_lattice_count(&pts), convex_area_oracle(&pts));
        if got != want {
            return Err(format!("case {case}: convex area {got} != oracle {want}"));
        }
        let (got, want) = (lesion_diameter(&roi, None), diameter_oracle(&pts));
        if (got - want).abs() > 1e-12 {
            return Err(format!("case {case}: diameter {got} != oracle {want}"));
        }
    }
    Ok("convex area and diameter match oracles on 100 regions".into())
}

pub fn check_components_oracle() -> Check {
    let mut r = rng(503);
    for case in 0..100 {
        let (w, h) = (r.random_range(1..=24), r.random_range(1..=24));
        let density = r.random_range(0.2..0.7);
        let mask = random_mask(&mut r, w, h, density);
        let rois = connected_components(&mask, 1).map_err(|e| e.to_string())?;
        let got: BTreeSet<Vec<(usize, usize)>> = rois.iter().map(|roi| roi.pixels().collect()).collect();
        let want: BTreeSet<Vec<(usize, usize)>> = components_oracle(&mask).into_iter().collect();
        if got != want || rois.len() != want.len() {
            return Err(format!("case {case}: components differ from flood fill"));
        }
        if rois.windows(2).any(|p| p[0].pixel_count() < p[1].pixel_count()) {
            return Err(format!("case {case}: components not sorted by size"));
        }
    }
    Ok("connected components match flood fill on 100 masks".into())
}

// ---- SVM ----

/// Best achievable margin for 2-D data: for a unit normal at angle `t` the
/// best offset is the midpoint of the class gap, so only the angle needs
/// searching. Dense grid, then golden-section refinement around the winner.
pub fn max_margin_oracle(data: &LabeledDataset) -> f64 {
    let half_gap = |t: f64| {
        let (s, c) = t.sin_cos();
        let (mut lo_pos, mut hi_neg) = (f64::INFINITY, f64::NEG_INFINITY);
        for (x, y) in data.rows().iter().zip(data.labels()) {
            let v = c * x[0] + s * x[1];
            match y {
                Class::Malignant => lo_pos = lo_pos.min(v),
                Class::Benign => hi_neg = hi_neg.max(v),
            }
        }
        (lo_pos - hi_neg) / 2.0
    };
    let steps = 7200;
    let dt = std::f64::consts::TAU / steps as f64;
    let (mut best_t, mut best) = (0.0, f64::NEG_INFINITY);
    for i in 0..steps {
        let t = i as f64 * dt;
        let m = half_gap(t);
        if m > best {
            (best_t, best) = (t, m);
        }
    }
    // half_gap is a minimum of sinusoids, hence unimodal near its maximum
    let (mut a, mut b) = (best_t - dt, best_t + dt);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let (x1, x2) = (b - g * (b - a), a + g * (b - a));
        if half_gap(x1) < half_gap(x2) {
            a = x1;
        } else {
            b = x2;
        }
    }
    best.max(half_gap((a + b) / 2.0))
}

pub fn separable_dataset(seed: u64) -> LabeledDataset {
    let mut r = rng(seed);
    let t: f64 = r.random_range(0.0..std::f64::consts::TAU);
    let b: f64 = r.random_range(-0.3..0.3);
    let n = r.random_range(6..=30);
    loop {
        let (mut rows, mut labels) = (Vec::new(), Vec::new());
        while rows.len() < n {
            let x = [r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)];
            let f = t.cos() * x[0] + t.sin() * x[1] + b;
            if f.abs() < 0.05 {
                continue;
            }
            rows.push(x.to_vec());
            labels.push(if f > 0.0 { Class::Malignant } else { Class::Benign });
        }
        let data = LabeledDataset::new(names(2), rows, labels).unwrap();
        if data.has_both_classes() {
            return data;
        }
    }
}

pub fn hard_margin() -> SvmParams {
    SvmParams {
        c: 1e6,
        tol: 1e-6,
        max_passes: 10_000,
    }
}

pub fn check_svm_margins() -> Check {
    let mut worst: f64 = 1.0;
    for seed in 0..50 {
        let data = separable_dataset(1000 + seed);
        let model = train_svm(&data, &hard_margin()).map_err(|e| format!("seed {seed}: {e}"))?;
        let got = model.geometric_margin(&data).map_err(|e| e.to_string())?;
        let best = max_margin_oracle(&data);
        let ratio = got / best;
        if !(ratio >= 0.99 && got <= best * (1.0 + 1e-9)) {
            return Err(format!("seed {seed}: margin {got} vs oracle {best} (n = {})", data.len()));
        }
        worst = worst.min(ratio);
    }
    Ok(format!("50 separable sets, worst margin ratio {worst:.6}"))
}

/// `(w, b)` divided by `|w|`.
pub fn unit_hyperplane(m: &LinearSvmModel) -> (Vec<f64>, f64) {
    let n = m.weights.iter().map(|w| w * w).sum::<f64>().sqrt();
    (m.weights.iter().map(|w| w / n).collect(), m.bias / n)
}

pub fn check_svm_toys() -> Check {
    let one = LabeledDataset::new(vec!["x".into()], vec![vec![-1.0], vec![1.0]], vec![Class::Benign, Class::Malignant])
        .unwrap();
    let m = train_svm(&one, &hard_margin()).map_err(|e| e.to_string())?;
    let (w, b) = unit_hyperplane(&m);
    let margin = m.geometric_margin(&one).map_err(|e| e.to_string())?;
    if (w[0] - 1.0).abs() > 1e-9 || b.abs() >= 1e-6 || (margin - 1.0).abs() > 1e-6 {
        return Err(format!("1-D toy: w {w:?}, b {b}, margin {margin}"));
    }
    let two = LabeledDataset::new(names(2), vec![vec![0.0, 0.0], vec![2.0, 2.0]], vec![Class::Benign, Class::Malignant])
        .unwrap();
    let m = train_svm(&two, &hard_margin()).map_err(|e| e.to_string())?;
    let (w, _) = unit_hyperplane(&m);
    // hyperplane through (1, 1): shift to the midpoint and compare
    let at_mid = m.decision(&[1.0, 1.0]).map_err(|e| e.to_string())? / m.weights.iter().map(|w| w * w).sum::<f64>().sqrt();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    if (w[0] - r).abs() > 1e-9 || (w[1] - r).abs() > 1e-9 || at_mid.abs() >= 1e-6 {
        return Err(format!("2-D toy: w {w:?}, offset at midpoint {at_mid}"));
    }
    Ok("both analytic toy hyperplanes recovered".into())
}

// ---- MLP gradient ----

pub fn random_architecture(r: &mut ChaCha8Rng) -> Vec<usize> {
    let depth = r.random_range(2..=7);
    let mut sizes: Vec<usize> = (0..depth - 1).map(|_| r.random_range(1..=9)).collect();
    sizes.push(1);
    sizes
}

/// Worst relative error of backprop against central differences. Components
/// below `floor` in magnitude are compared absolutely against `floor`, which
/// sits above the finite-difference roundoff for `h = 1e-5`.
pub fn gradient_error(layers: &[usize], seed: u64) -> f64 {
    let floor = 1e-4;
    let h = 1e-5;
    let mut r = rng(seed);
    let mut model = MlpModel::init(names(layers[0]), layers, seed, 0.05).unwrap();
    // spread weights wider than the init range to exercise saturation
    let params: Vec<f64> = model.parameters().iter().map(|_| r.random_range(-1.5..1.5)).collect();
    model.set_parameters(&params).unwrap();
    let inputs: Vec<Vec<f64>> = (0..10).map(|_| (0..layers[0]).map(|_| r.random::<f64>()).collect()).collect();
    let targets: Vec<f64> = (0..10).map(|_| r.random_range(0..2) as f64).collect();
    let analytic = mlp_gradient_targets(&model, &inputs, &targets).unwrap().flatten();
    let mut worst: f64 = 0.0;
    for (k, &a) in analytic.iter().enumerate() {
        let mut p = params.clone();
        p[k] = params[k] + h;
        model.set_parameters(&p).unwrap();
        let up = model.mse(&inputs, &targets).unwrap();
        p[k] = params[k] - h;
        model.set_parameters(&p).unwrap();
        let down = model.mse(&inputs, &targets).unwrap();
        let fd = (up - down) / (2.0 * h);
        worst = worst.max((a - fd).abs() / a.abs().max(fd.abs()).max(floor));
    }
    worst
}

pub fn check_gradients() -> Check {
    let mut r = rng(504);
    let mut archs = vec![vec![9, 16, 12, 8, 8, 4, 1], vec![5, 8, 8, 1], vec![3, 4, 1]];
    while archs.len() < 20 {
        archs.push(random_architecture(&mut r));
    }
    let mut worst: f64 = 0.0;
    for (i, layers) in archs.iter().enumerate() {
        let e = gradient_error(layers, 600 + i as u64);
        if !(e <= 1e-5) {
            return Err(format!("{layers:?}: relative error {e:e}"));
        }
        worst = worst.max(e);
    }
    Ok(format!("20 architectures, worst relative error {worst:.2e}"))
}

// ---- statistics ----

/// Two-sided Student-t tail by quadrature: with `x = sqrt(v) tan u` the
/// density becomes proportional to `cos^(v-1) u` on `(-pi/2, pi/2)`, so no
/// gamma function is needed. Measuring from the pole, `s = pi/2 - u = z^4`
/// removes the endpoint singularity of `sin^(v-1) s` before Simpson's rule.
pub fn t_tail_oracle(t: f64, dof: f64) -> f64 {
    let f = |z: f64| 4.0 * z.powi(3) * (z.powi(4)).sin().powf(dof - 1.0);
    let simpson = |b: f64| {
        let n = 20_000;
        let h = b / n as f64;
        let mut s = f(b);
        for i in 1..n {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    let u0 = (t.abs() / dof.sqrt()).atan();
    let half = std::f64::consts::FRAC_PI_2;
    simpson((half - u0).powf(0.25)) / simpson(half.powf(0.25))
}

pub fn check_t_test_oracle() -> Check {
    let mut r = rng(505);
    for case in 0..100 {
        let (na, nb) = (r.random_range(2..15), r.random_range(2..15));
        let shift = r.random_range(-1.5..1.5);
        let a: Vec<f64> = (0..na).map(|_| r.random::<f64>()).collect();
        let b: Vec<f64> = (0..nb).map(|_| r.random::<f64>() * r.random_range(0.5..2.0) + shift).collect();
        let res = welch_t_test(&a, &b).map_err(|e| e.to_string())?;
        let (t, dof, p) = (res.t_statistic.unwrap(), res.degrees_of_freedom.unwrap(), res.p_value.unwrap());
        let want = t_tail_oracle(t, dof);
        if (p - want).abs() > 1e-7 * want.max(1e-3) {
            return Err(format!("case {case}: p {p} vs quadrature {want} (t {t}, dof {dof})"));
        }
        let rev = welch_t_test(&b, &a).map_err(|e| e.to_string())?;
        if rev.t_statistic.unwrap() != -t || rev.p_value.unwrap() != p {
            return Err(format!("case {case}: swapping samples is not antisymmetric"));
        }
    }
    Ok("100 Welch tests match quadrature and are antisymmetric".into())
}

pub fn check_metric_properties() -> Check {
    let mut r = rng(506);
    let in_unit = |v: Option<f64>| v.is_none_or(|x| (0.0..=1.0).contains(&x));
    for case in 0..1000 {
        let mut k = || r.random_range(0..40usize);
        let c = ConfusionCounts::new(k(), k(), k(), k(), k());
        let m = metrics(&c);
        let rates = [m.sensitivity, m.specificity, m.ppv, m.npv, m.accuracy, m.inconclusive_rate];
        if !rates.into_iter().all(in_unit) || !m.mcc.is_none_or(|x| (-1.0..=1.0).contains(&x)) {
            return Err(format!("case {case}: out-of-range metric for {c:?}"));
        }
        let swapped = metrics(&ConfusionCounts::new(c.tn, c.fn_, c.tp, c.fp, c.inconclusive));
        if swapped.sensitivity != m.specificity
            || swapped.ppv != m.npv
            || swapped.accuracy != m.accuracy
            || swapped.mcc.map(|x| (x * 1e12).round()) != m.mcc.map(|x| (x * 1e12).round())
        {
            return Err(format!("case {case}: class swap symmetry fails for {c:?}"));
        }
    }
    Ok("1000 confusion tables: rates in range, class-swap symmetric".into())
}

// ---- invariants ----

pub fn check_tv_non_increase() -> Check {
    let mut r = rng(507);
    for case in 0..100 {
        let (w, h) = (r.random_range(1..20), r.random_range(1..20));
        let img = random_image(&mut r, w, h);
        let weight = r.random_range(0.01..0.5);
        let out = tv_denoise(&img, weight, r.random_range(0..40)).map_err(|e| e.to_string())?;
        if total_variation(&out) > total_variation(&img) + 1e-12 {
            return Err(format!("case {case}: total variation increased"));
        }
    }
    Ok("TV never increases over 100 images".into())
}

pub fn check_closing() -> Check {
    let mut r = rng(508);
    for case in 0..100 {
        let (w, h) = (r.random_range(1..24), r.random_range(1..24));
        let density = r.random_range(0.1..0.6);
        let mask = random_mask(&mut r, w, h, density);
        let shape = if r.random_bool(0.5) { SeShape::Disk } else { SeShape::Square };
        let se = StructuringElement::new(r.random_range(1..4), shape).unwrap();
        let once = morphological_close(&mask, &se);
        if !mask.is_subset_of(&once) {
            return Err(format!("case {case}: closing is not extensive"));
        }
        if morphological_close(&once, &se) != once {
            return Err(format!("case {case}: closing is not idempotent"));
        }
    }
    Ok("closing extensive and idempotent over 100 masks".into())
}

pub fn check_glcm_normalization() -> Check {
    let mut r = rng(509);
    let mut cases = 0;
    while cases < 100 {
        let (w, h) = (r.random_range(2..20), r.random_range(2..20));
        let img = random_image(&mut r, w, h);
        let roi = random_region(&mut r, w, h);
        let params = GlcmParams {
            levels: r.random_range(2..16),
            ..GlcmParams::default()
        };
        let Ok(g) = compute_glcm(&img, &roi, &params) else { continue };
        let total: f64 = g.probabilities().iter().sum();
        if (total - 1.0).abs() > 1e-12 || g.probabilities().iter().any(|&p| p < 0.0) {
            return Err(format!("case {cases}: probabilities sum to {total}"));
        }
        cases += 1;
    }
    Ok("GLCM probabilities sum to 1 over 100 regions".into())
}

pub fn random_model(r: &mut ChaCha8Rng) -> Model {
    let d = r.random_range(1..8);
    let norm = |r: &mut ChaCha8Rng| {
        let mins: Vec<f64> = (0..d).map(|_| r.random_range(-5.0..0.0)).collect();
        let maxs: Vec<f64> = mins.iter().map(|m| m + r.random_range(0.0..10.0)).collect();
        Normalization { mins, maxs }
    };
    match r.random_range(0..3) {
        0 => {
            let k = r.random_range(1..=d);
            Model::Svm(LinearSvmModel {
                feature_names: names(d),
                feature_indices: (0..k).map(|_| r.random_range(0..d)).collect(),
                weights: (0..k).map(|_| r.random_range(-3.0..3.0)).collect(),
                bias: r.random_range(-1.0..1.0),
                c: r.random_range(0.1..100.0),
                normalization: r.random_bool(0.5).then(|| norm(r)),
            })
        }
        1 => {
            let mut layers = random_architecture(r);
            layers[0] = d;
            let mut m = MlpModel::init(names(d), &layers, r.random(), r.random_range(0.0..0.4)).unwrap();
            if r.random_bool(0.5) {
                m = m.with_normalization(norm(r));
            }
            Model::Mlp(m)
        }
        _ => Model::Gd(GdModel {
            feature_names: names(d),
            weights: (0..d).map(|_| r.random_range(-3.0..3.0)).collect(),
            bias: r.random_range(-1.0..1.0),
            iterations: r.random_range(0..10_000),
            step: r.random_range(1e-9..1.0),
            mode: if r.random_bool(0.5) { GdStepMode::Practical } else { GdStepMode::Paper },
            normalization: norm(r),
        }),
    }
}

pub fn check_model_round_trip() -> Check {
    let mut r = rng(510);
    for case in 0..100 {
        let model = random_model(&mut r);
        let back = parse_model(&render_model(&model)).map_err(|e| format!("case {case}: {e}"))?;
        for _ in 0..100 {
            let x: Vec<f64> = (0..model.input_dim()).map(|_| r.random_range(-10.0..10.0)).collect();
            let (a, b) = (model.predict(&x).unwrap(), back.predict(&x).unwrap());
            if a.score.to_bits() != b.score.to_bits() || a.label != b.label {
                return Err(format!("case {case}: prediction changed after round-trip"));
            }
        }
        if let (Model::Mlp(a), Model::Mlp(b)) = (&model, &back) {
            let x = vec![0.5; a.input_dim()];
            if predict_mlp(a, &x).unwrap() != predict_mlp(b, &x).unwrap() {
                return Err(format!("case {case}: MLP mismatch"));
            }
        }
    }
    Ok("100 models round-trip with bit-identical predictions".into())
}
