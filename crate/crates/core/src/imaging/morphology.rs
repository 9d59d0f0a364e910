use super::{BinaryMask, StructuringElement};

/// Binary dilation; pixels outside the raster are background.
pub fn dilate(mask: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    let offsets = se.offsets();
    BinaryMask::from_fn(mask.width(), mask.height(), |r, c| {
        offsets
            .iter()
            .any(|&(dr, dc)| mask.get_signed(r as isize - dr, c as isize - dc))
    })
}

/// Binary erosion; pixels outside the raster are background, so foreground
/// touching the border within the element's reach is removed.
pub fn erode(mask: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    let offsets = se.offsets();
    BinaryMask::from_fn(mask.width(), mask.height(), |r, c| {
        offsets
            .iter()
            .all(|&(dr, dc)| mask.get_signed(r as isize + dr, c as isize + dc))
    })
}

fn pad(mask: &BinaryMask, margin: usize) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    BinaryMask::from_fn(w + 2 * margin, h + 2 * margin, |r, c| {
        r >= margin && c >= margin && r - margin < h && c - margin < w && mask.get(r - margin, c - margin)
    })
}

fn crop(mask: &BinaryMask, margin: usize, width: usize, height: usize) -> BinaryMask {
    BinaryMask::from_fn(width, height, |r, c| mask.get(r + margin, c + margin))
}

/// Morphological closing (dilation then erosion).
///
/// The mask is treated as embedded in an unbounded background plane: the
/// dilation may spill past the raster edge and the erosion sees that spill,
/// which keeps closing extensive and idempotent at the border.
pub fn morphological_close(mask: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    let margin = 2 * se.radius();
    let padded = pad(mask, margin);
    let closed = erode(&dilate(&padded, se), se);
    crop(&closed, margin, mask.width(), mask.height())
}
