/// Centroid and second central moments of a pixel set, with each pixel
/// treated as a unit square (adds 1/12 to both axis variances).
///
/// Axes: `x` runs along columns, `y` along rows (downwards).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondMoments {
    pub count: usize,
    pub centroid: (f64, f64),
    pub var_x: f64,
    pub var_y: f64,
    pub cov_xy: f64,
}

impl SecondMoments {
    /// `None` for an empty pixel set.
    pub fn from_pixels(pixels: impl IntoIterator<Item = (usize, usize)>) -> Option<Self> {
        let pts: Vec<(f64, f64)> = pixels
            .into_iter()
            .map(|(r, c)| (r as f64, c as f64))
            .collect();
        if pts.is_empty() {
            return None;
        }
        let n = pts.len() as f64;
        let (sr, sc) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
        let (cr, cc) = (sr / n, sc / n);
        let (mut vx, mut vy, mut cxy) = (0.0, 0.0, 0.0);
        for &(r, c) in &pts {
            let (dy, dx) = (r - cr, c - cc);
            vx += dx * dx;
            vy += dy * dy;
            cxy += dx * dy;
        }
        Some(Self {
            count: pts.len(),
            centroid: (cr, cc),
            var_x: vx / n + 1.0 / 12.0,
            var_y: vy / n + 1.0 / 12.0,
            cov_xy: cxy / n,
        })
    }

    /// Eigenvalues of the covariance matrix, larger first.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.var_x + self.var_y);
        let half_diff = 0.5 * (self.var_x - self.var_y);
        let root = (half_diff * half_diff + self.cov_xy * self.cov_xy).sqrt();
        (mean + root, (mean - root).max(0.0))
    }

    /// Angle of the major axis from the column axis toward the row axis, in `[0, pi)`.
    pub fn orientation(&self) -> f64 {
        let theta = 0.5 * (2.0 * self.cov_xy).atan2(self.var_x - self.var_y);
        let theta = theta.rem_euclid(std::f64::consts::PI);
        // round-off on a horizontal axis can land just below pi
        if std::f64::consts::PI - theta < 1e-12 {
            0.0
        } else {
            theta
        }
    }

    /// Full axis lengths of the ellipse with the same second moments.
    pub fn axis_lengths(&self) -> (f64, f64) {
        let (l1, l2) = self.eigenvalues();
        (4.0 * l1.sqrt(), 4.0 * l2.sqrt())
    }

    /// Focal distance over major axis length of the moment-equivalent ellipse.
    pub fn eccentricity(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let (l1, l2) = self.eigenvalues();
        if l1 <= 0.0 {
            return 0.0;
        }
        (1.0 - l2 / l1).max(0.0).sqrt()
    }
}
