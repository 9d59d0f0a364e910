use super::{clamp_unit, GrayImage};
use crate::error::{Error, Result};

/// Dual step size; convergence of the projection iteration needs `tau <= 1/8`.
const DUAL_STEP: f64 = 0.125;

/// Isotropic total variation with forward differences and reflective
/// (zero-derivative) boundaries.
pub fn total_variation(img: &GrayImage) -> f64 {
    tv_of(img.pixels(), img.width(), img.height())
}

fn tv_of(u: &[f64], w: usize, h: usize) -> f64 {
    let mut tv = 0.0;
    for r in 0..h {
        for c in 0..w {
            let v = u[r * w + c];
            let gx = if c + 1 < w { u[r * w + c + 1] - v } else { 0.0 };
            let gy = if r + 1 < h { u[(r + 1) * w + c] - v } else { 0.0 };
            tv += (gx * gx + gy * gy).sqrt();
        }
    }
    tv
}

fn rof_energy(u: &[f64], f: &[f64], weight: f64, w: usize, h: usize) -> f64 {
    let fidelity: f64 = u.iter().zip(f).map(|(a, b)| (a - b) * (a - b)).sum();
    0.5 * fidelity + weight * tv_of(u, w, h)
}

/// Forward-difference gradient, zero across the last row/column.
fn gradient(u: &[f64], w: usize, h: usize, gx: &mut [f64], gy: &mut [f64]) {
    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            gx[i] = if c + 1 < w { u[i + 1] - u[i] } else { 0.0 };
            gy[i] = if r + 1 < h { u[i + w] - u[i] } else { 0.0 };
        }
    }
}

/// Negative adjoint of [`gradient`].
fn divergence(px: &[f64], py: &[f64], w: usize, h: usize, out: &mut [f64]) {
    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            let dx = if w == 1 {
                0.0
            } else if c == 0 {
                px[i]
            } else if c + 1 == w {
                -px[i - 1]
            } else {
                px[i] - px[i - 1]
            };
            let dy = if h == 1 {
                0.0
            } else if r == 0 {
                py[i]
            } else if r + 1 == h {
                -py[i - w]
            } else {
                py[i] - py[i - w]
            };
            out[i] = dx + dy;
        }
    }
}

/// Total-variation (ROF) denoising.
///
/// Minimizes `0.5 * ||u - f||^2 + weight * TV(u)` with Chambolle's fixed-step
/// dual projection iteration. Every primal iterate is clamped to `[0, 1]` and
/// the lowest-energy one is returned; the input itself is the starting
/// candidate, so the result never has higher energy than the input and its
/// total variation never exceeds the input's.
pub fn tv_denoise(img: &GrayImage, weight: f64, iterations: usize) -> Result<GrayImage> {
    if img.is_empty() {
        return Err(Error::EmptyInput("tv_denoise on zero-sized image"));
    }
    if !(weight > 0.0) || !weight.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "TV weight must be positive, got {weight}"
        )));
    }
    if iterations == 0 {
        return Ok(img.clone());
    }

    let (w, h) = (img.width(), img.height());
    let n = w * h;
    let f = img.pixels();

    let mut px = vec![0.0; n];
    let mut py = vec![0.0; n];
    let mut div = vec![0.0; n];
    let mut term = vec![0.0; n];
    let mut gx = vec![0.0; n];
    let mut gy = vec![0.0; n];
    let mut u = vec![0.0; n];

    let mut best = f.to_vec();
    let mut best_energy = rof_energy(f, f, weight, w, h);

    for _ in 0..iterations {
        divergence(&px, &py, w, h, &mut div);
        for i in 0..n {
            term[i] = div[i] - f[i] / weight;
        }
        gradient(&term, w, h, &mut gx, &mut gy);
        for i in 0..n {
            let norm = (gx[i] * gx[i] + gy[i] * gy[i]).sqrt();
            let denom = 1.0 + DUAL_STEP * norm;
            px[i] = (px[i] + DUAL_STEP * gx[i]) / denom;
            py[i] = (py[i] + DUAL_STEP * gy[i]) / denom;
        }

        divergence(&px, &py, w, h, &mut div);
        for i in 0..n {
            u[i] = clamp_unit(f[i] - weight * div[i]);
        }
        let energy = rof_energy(&u, f, weight, w, h);
        if energy < best_energy {
            best_energy = energy;
            best.copy_from_slice(&u);
        }
    }

    GrayImage::new(w, h, best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noisy_step(seed: u64) -> (GrayImage, GrayImage) {
        let clean = GrayImage::from_fn(32, 32, |_, c| if c < 16 { 0.3 } else { 0.7 });
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noisy = GrayImage::from_fn(32, 32, |r, c| {
            clean.get(r, c) + rng.random_range(-0.1..=0.1)
        });
        (clean, noisy)
    }

    fn mse(a: &GrayImage, b: &GrayImage) -> f64 {
        a.pixels()
            .iter()
            .zip(b.pixels())
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            / a.pixels().len() as f64
    }

    /// Reference: plain primal gradient descent on the smoothed ROF energy
    /// `0.5||u-f||^2 + weight * sum sqrt(|grad u|^2 + eps^2)`.
    fn reference_rof(f: &GrayImage, weight: f64, steps: usize) -> GrayImage {
        let (w, h) = (f.width(), f.height());
        let eps = 0.05;
        let step = 1.0 / (1.0 + 8.0 * weight / eps);
        let at = |u: &Vec<f64>, r: isize, c: isize| {
            let r = r.clamp(0, h as isize - 1) as usize;
            let c = c.clamp(0, w as isize - 1) as usize;
            u[r * w + c]
        };
        let mut u = f.pixels().to_vec();
        for _ in 0..steps {
            let mut grad = vec![0.0; w * h];
            for r in 0..h as isize {
                for c in 0..w as isize {
                    // d/du of sum_k phi(grad_k) over the three terms touching (r, c)
                    let phi = |dx: f64, dy: f64| (dx * dx + dy * dy + eps * eps).sqrt();
                    let v = at(&u, r, c);
                    let own_dx = if c + 1 < w as isize { at(&u, r, c + 1) - v } else { 0.0 };
                    let own_dy = if r + 1 < h as isize { at(&u, r + 1, c) - v } else { 0.0 };
                    let mut g = -(own_dx + own_dy) / phi(own_dx, own_dy);
                    if c > 0 {
                        let lv = at(&u, r, c - 1);
                        let dx = v - lv;
                        let dy = if r + 1 < h as isize { at(&u, r + 1, c - 1) - lv } else { 0.0 };
                        g += dx / phi(dx, dy);
                    }
                    if r > 0 {
                        let uv = at(&u, r - 1, c);
                        let dy = v - uv;
                        let dx = if c + 1 < w as isize { at(&u, r - 1, c + 1) - uv } else { 0.0 };
                        g += dy / phi(dx, dy);
                    }
                    let i = r as usize * w + c as usize;
                    grad[i] = (u[i] - f.pixels()[i]) + weight * g;
                }
            }
            for (ui, gi) in u.iter_mut().zip(&grad) {
                *ui -= step * gi;
            }
        }
        GrayImage::from_fn(w, h, |r, c| u[r * w + c])
    }

    #[test]
    fn constant_image_is_fixed_point() {
        let img = GrayImage::filled(16, 12, 0.5);
        let out = tv_denoise(&img, 0.3, 50).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn zero_iterations_is_identity() {
        let (_, noisy) = noisy_step(1);
        assert_eq!(tv_denoise(&noisy, 0.1, 0).unwrap(), noisy);
    }

    #[test]
    fn rejects_empty_and_bad_weight() {
        let empty = GrayImage::new(0, 0, vec![]).unwrap();
        assert!(matches!(tv_denoise(&empty, 0.1, 5), Err(Error::EmptyInput(_))));
        let img = GrayImage::filled(2, 2, 0.1);
        assert!(tv_denoise(&img, 0.0, 5).is_err());
    }

    #[test]
    fn step_edge_mse_drops() {
        let (clean, noisy) = noisy_step(42);
        let before = mse(&noisy, &clean);
        let ours = tv_denoise(&noisy, 0.1, 100).unwrap();
        let reference = reference_rof(&noisy, 0.1, 400);
        let after = mse(&ours, &clean);
        assert!(mse(&reference, &clean) < before);
        assert!(after < before, "mse {after} !< {before}");
        // both minimize (nearly) the same energy
        assert!(mse(&ours, &reference) < 0.25 * before);
    }

    #[test]
    fn tv_never_increases() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for case in 0..100 {
            let w = rng.random_range(1..20);
            let h = rng.random_range(1..20);
            let img = GrayImage::from_fn(w, h, |_, _| rng.random::<f64>());
            let weight = rng.random_range(0.01..0.5);
            let iters = [1, 2, 5, 30][case % 4];
            let out = tv_denoise(&img, weight, iters).unwrap();
            assert!(total_variation(&out) <= total_variation(&img) + 1e-12);
        }
    }
}
