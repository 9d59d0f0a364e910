use std::collections::VecDeque;

use super::{BinaryMask, Roi};
use crate::error::{Error, Result};

/// Clockwise neighbor ring in image coordinates (row axis points down).
const RING: [(isize, isize); 8] = [
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
    (-1, 0),
    (-1, 1),
];
const WEST: usize = 4;

/// 4-connected components with at least `min_pixels` pixels, largest first.
/// Equal-sized components keep scan order of their first pixel.
pub fn connected_components(mask: &BinaryMask, min_pixels: usize) -> Result<Vec<Roi>> {
    if min_pixels == 0 {
        return Err(Error::InvalidArgument("min_pixels must be >= 1".into()));
    }
    let (w, h) = (mask.width(), mask.height());
    let mut seen = vec![false; w * h];
    let mut queue = VecDeque::new();
    let mut regions: Vec<Vec<(usize, usize)>> = Vec::new();

    for start in 0..w * h {
        if seen[start] || !mask.bits()[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut pixels = Vec::new();
        while let Some(i) = queue.pop_front() {
            let (r, c) = (i / w, i % w);
            pixels.push((r, c));
            let mut visit = |j: usize| {
                if !seen[j] && mask.bits()[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            };
            if r > 0 {
                visit(i - w);
            }
            if r + 1 < h {
                visit(i + w);
            }
            if c > 0 {
                visit(i - 1);
            }
            if c + 1 < w {
                visit(i + 1);
            }
        }
        if pixels.len() >= min_pixels {
            regions.push(pixels);
        }
    }

    regions.sort_by_key(|r| std::cmp::Reverse(r.len()));
    Ok(regions.iter().map(|p| Roi::from_pixels(p)).collect())
}

/// Moore-neighbor (8-connected) contour of the first foreground object in
/// scan order. Returns the closed contour without repeating its start pixel;
/// a lone pixel yields a one-element contour and an empty mask yields none.
pub fn trace_boundary(mask: &BinaryMask) -> Vec<(usize, usize)> {
    let Some(start) = mask.true_pixels().next() else {
        return Vec::new();
    };
    let on = |p: (isize, isize)| mask.get_signed(p.0, p.1);
    let start = (start.0 as isize, start.1 as isize);

    // Clockwise search around `cur` beginning just after the backtrack slot.
    let step = |cur: (isize, isize), back: usize| -> Option<((isize, isize), usize)> {
        for k in 1..=8 {
            let d = (back + k) % 8;
            let cand = (cur.0 + RING[d].0, cur.1 + RING[d].1);
            if on(cand) {
                let prev_dir = (d + 7) % 8;
                let prev = (cur.0 + RING[prev_dir].0, cur.1 + RING[prev_dir].1);
                let rel = (prev.0 - cand.0, prev.1 - cand.1);
                let new_back = RING.iter().position(|&o| o == rel).expect("adjacent cells");
                return Some((cand, new_back));
            }
        }
        None
    };

    let mut contour = vec![start];
    let mut cur = start;
    let mut back = WEST;
    let mut second = None;
    let limit = 8 * mask.count() + 16;
    for _ in 0..limit {
        let Some((next, nb)) = step(cur, back) else {
            break;
        };
        match second {
            None => second = Some(next),
            Some(s) if cur == start && next == s => {
                contour.pop();
                break;
            }
            Some(_) => {}
        }
        contour.push(next);
        cur = next;
        back = nb;
    }
    if contour.len() > 1 && contour.last() == Some(&start) {
        contour.pop();
    }
    contour
        .into_iter()
        .map(|(r, c)| (r as usize, c as usize))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn flood_fill_sizes(mask: &BinaryMask) -> Vec<usize> {
        let (w, h) = (mask.width() as isize, mask.height() as isize);
        let mut label = vec![0usize; (w * h) as usize];
        let mut sizes = Vec::new();
        for r in 0..h {
            for c in 0..w {
                if !mask.get_signed(r, c) || label[(r * w + c) as usize] != 0 {
                    continue;
                }
                sizes.push(0);
                let id = sizes.len();
                let mut stack = vec![(r, c)];
                while let Some((y, x)) = stack.pop() {
                    if !mask.get_signed(y, x) || label[(y * w + x) as usize] != 0 {
                        continue;
                    }
                    label[(y * w + x) as usize] = id;
                    sizes[id - 1] += 1;
                    stack.extend([(y + 1, x), (y - 1, x), (y, x + 1), (y, x - 1)]);
                }
            }
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }

    #[test]
    fn empty_mask_has_no_components() {
        assert!(connected_components(&BinaryMask::empty(4, 4), 1).unwrap().is_empty());
        assert!(connected_components(&BinaryMask::empty(4, 4), 0).is_err());
    }

    #[test]
    fn two_blocks_sorted_by_size() {
        let m = BinaryMask::from_fn(10, 10, |r, c| {
            (r < 2 && c < 2) || ((5..8).contains(&r) && (5..8).contains(&c))
        });
        let rois = connected_components(&m, 1).unwrap();
        let counts: Vec<_> = rois.iter().map(|r| r.pixel_count()).collect();
        assert_eq!(counts, vec![9, 4]);
        assert_eq!(rois[0].offset(), (5, 5));
        assert_eq!(connected_components(&m, 5).unwrap().len(), 1);
    }

    #[test]
    fn diagonal_pixels_are_separate_components() {
        let m = BinaryMask::from_fn(2, 2, |r, c| r == c);
        assert_eq!(connected_components(&m, 1).unwrap().len(), 2);
    }

    #[test]
    fn matches_flood_fill_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100 {
            let (w, h) = (rng.random_range(1..30), rng.random_range(1..30));
            let p = rng.random_range(0.2..0.7);
            let m = BinaryMask::from_fn(w, h, |_, _| rng.random_bool(p));
            let rois = connected_components(&m, 1).unwrap();
            let sizes: Vec<_> = rois.iter().map(|r| r.pixel_count()).collect();
            assert_eq!(sizes, flood_fill_sizes(&m));
            assert_eq!(sizes.iter().sum::<usize>(), m.count());
            for roi in &rois {
                assert_eq!(roi.mask().count(), roi.pixel_count());
                assert!(roi.boundary().iter().all(|&(r, c)| roi.contains(r, c)));
            }
        }
    }

    #[test]
    fn square_contour_walks_the_rim() {
        let m = BinaryMask::from_fn(6, 6, |r, c| (1..5).contains(&r) && (1..5).contains(&c));
        let contour = trace_boundary(&m);
        assert_eq!(contour.len(), 12);
        assert_eq!(contour[0], (1, 1));
        assert_eq!(contour[1], (1, 2));
        let mut unique = contour.clone();
        unique.sort();
        unique.dedup();
        assert_eq!(unique.len(), 12);
    }

    #[test]
    fn line_contour_goes_out_and_back() {
        let m = BinaryMask::from_fn(5, 1, |_, _| true);
        let contour = trace_boundary(&m);
        assert_eq!(contour, vec![(0, 0), (0, 1), (0, 2), (0, 3), (0, 4), (0, 3), (0, 2), (0, 1)]);
    }
}
