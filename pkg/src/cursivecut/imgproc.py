"""Word-image preprocessing: binarization, slant correction, thinning.

The chain is Otsu binarization (ink = dark), shear-search slant correction,
then Zhang-Suen thinning down to a one-pixel skeleton.
"""

import math

import numpy as np

from .images import BinaryImage, GrayImage, SkeletonImage


def otsu_threshold(img: GrayImage):
    """Pick the threshold maximizing between-class variance; binarize.

    A pixel is foreground iff its intensity is strictly below the threshold.
    Ties go to the lowest threshold, so a constant image yields threshold 0
    and an all-background output.

    Returns (threshold, BinaryImage).
    """
    hist = np.bincount(img.pixels.ravel(), minlength=256).astype(np.float64)
    total = hist.sum()
    # class 0 = intensities < t, cumulatives indexed by t in 0..255
    w0 = np.concatenate(([0.0], np.cumsum(hist)[:-1]))
    sum0 = np.concatenate(([0.0], np.cumsum(hist * np.arange(256))[:-1]))
    w1 = total - w0
    sum1 = sum0[-1] + hist[-1] * 255 - sum0
    with np.errstate(divide="ignore", invalid="ignore"):
        mu0 = np.where(w0 > 0, sum0 / w0, 0.0)
        mu1 = np.where(w1 > 0, sum1 / w1, 0.0)
    between = np.where((w0 > 0) & (w1 > 0), w0 * w1 * (mu0 - mu1) ** 2, 0.0)
    threshold = int(np.argmax(between))  # argmax takes the first (lowest) tie
    out = BinaryImage(img.pixels < threshold)
    return threshold, out


def _shear(px: np.ndarray, angle_deg: float) -> np.ndarray:
    """Horizontal shear by `angle_deg`, nearest-neighbor, bottom row fixed.

    Positive angles push upper rows to the right.  The canvas is widened so
    nothing falls off; no crop is applied here.
    """
    h, w = px.shape
    t = math.tan(math.radians(angle_deg))
    rows, cols = np.nonzero(px)
    if rows.size == 0:
        return px.copy()
    offsets = np.floor(t * (h - 1 - rows) + 0.5).astype(np.int64)
    new_cols = cols + offsets
    shift = -new_cols.min() if new_cols.min() < 0 else 0
    new_cols += shift
    out = np.zeros((h, int(new_cols.max()) + 1), dtype=bool)
    out[rows, new_cols] = True
    return out


def _crop_to_content(px: np.ndarray):
    """Crop to the ink bounding box. Returns (cropped, top, left)."""
    rows = np.flatnonzero(px.any(axis=1))
    cols = np.flatnonzero(px.any(axis=0))
    if rows.size == 0:
        return px, 0, 0
    return px[rows[0] : rows[-1] + 1, cols[0] : cols[-1] + 1], int(rows[0]), int(cols[0])


def slant_angle(img: BinaryImage, max_angle: int = 45) -> int:
    """Estimate the corrective shear angle in degrees.

    Every angle in -max_angle..max_angle (1 degree steps) is tried; the one
    whose shear maximizes the variance of the vertical projection profile
    wins.  Candidates are visited in order of increasing magnitude and only a
    strictly better score replaces the incumbent, so an already upright image
    scores angle 0.
    """
    if not img.pixels.any():
        return 0
    candidates = sorted(range(-max_angle, max_angle + 1), key=lambda a: (abs(a), a))
    best_angle, best_score = 0, -1.0
    for angle in candidates:
        sheared = _shear(img.pixels, angle)
        cropped, _, _ = _crop_to_content(sheared)
        profile = cropped.sum(axis=0).astype(np.float64)
        score = float(np.var(profile))
        if score > best_score:
            best_angle, best_score = angle, score
    return best_angle


def deslant(img: BinaryImage):
    """Correct slant and crop to content.

    Returns (corrected, angle, crop_top, crop_left) where the crop offsets
    map corrected coordinates back into the sheared canvas; the shear leaves
    bottom-row columns in place, so `col + crop_left` recovers the input
    column at the baseline.
    """
    if not img.pixels.any():
        return img, 0, 0, 0
    angle = slant_angle(img)
    sheared = _shear(img.pixels, angle)
    cropped, top, left = _crop_to_content(sheared)
    return BinaryImage(cropped), angle, top, left


def correct_slant(img: BinaryImage) -> BinaryImage:
    """Shear the word upright and crop to its content bounding box."""
    corrected, _, _, _ = deslant(img)
    return corrected


def _neighborhoods(px: np.ndarray):
    """Eight shifted copies (P2..P9 clockwise from north) of a padded raster."""
    p = np.pad(px, 1).astype(np.uint8)
    p2 = p[:-2, 1:-1]
    p3 = p[:-2, 2:]
    p4 = p[1:-1, 2:]
    p5 = p[2:, 2:]
    p6 = p[2:, 1:-1]
    p7 = p[2:, :-2]
    p8 = p[1:-1, :-2]
    p9 = p[:-2, :-2]
    return p2, p3, p4, p5, p6, p7, p8, p9


def _thin_pass(px: np.ndarray, second: bool) -> np.ndarray:
    p2, p3, p4, p5, p6, p7, p8, p9 = _neighborhoods(px)
    ring = [p2, p3, p4, p5, p6, p7, p8, p9, p2]
    b = sum(ring[:-1])  # neighbor count
    a = sum((ring[i] == 0) & (ring[i + 1] == 1) for i in range(8))  # 0->1 turns
    if not second:
        cond = (p2 * p4 * p6 == 0) & (p4 * p6 * p8 == 0)
    else:
        cond = (p2 * p4 * p8 == 0) & (p2 * p6 * p8 == 0)
    deletable = px & (b >= 2) & (b <= 6) & (a == 1) & cond
    return px & ~deletable


def thin(img: BinaryImage) -> SkeletonImage:
    """Zhang-Suen two-subiteration thinning, run to a fixed point."""
    px = img.pixels.copy()
    while True:
        after = _thin_pass(_thin_pass(px, second=False), second=True)
        if np.array_equal(after, px):
            break
        px = after
    return SkeletonImage(px)
