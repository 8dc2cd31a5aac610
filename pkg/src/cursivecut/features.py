"""Fixed-length numeric description of a cut's image neighborhood.

The networks judge a candidate boundary from exactly the quantities the
heuristics look at: local ink layout (a g x g density grid over a window
centered on the cut), run-crossing counts, and cut geometry.  All components
land in [0, 1].
"""

from dataclasses import dataclass

import numpy as np

from .images import SkeletonImage
from .segmenter import CandidateCut, crossing_count


@dataclass(frozen=True)
class FeatureConfig:
    """Window geometry: `window_cols` columns around the cut, g x g grid."""

    window_cols: int = 32
    grid: int = 8

    def __post_init__(self):
        if self.window_cols < 2:
            raise ValueError("window_cols must be >= 2")
        if self.grid < 2:
            raise ValueError("grid must be >= 2")

    @classmethod
    def for_char_width(cls, char_width: float, grid: int = 8) -> "FeatureConfig":
        """Scale-adaptive window: twice the estimated character width."""
        return cls(window_cols=max(2, int(round(2 * char_width))), grid=grid)

    @property
    def dim(self) -> int:
        return self.grid * self.grid + 6


def _window(img: SkeletonImage, column: int, window_cols: int) -> np.ndarray:
    """Full-height window centered at `column`, zero-padded past the borders."""
    h = img.height
    left = column - window_cols // 2
    out = np.zeros((h, window_cols), dtype=bool)
    src_lo = max(0, left)
    src_hi = min(img.width, left + window_cols)
    if src_lo < src_hi:
        out[:, src_lo - left : src_hi - left] = img.pixels[:, src_lo:src_hi]
    return out


def _density_grid(window: np.ndarray, g: int) -> np.ndarray:
    h, w = window.shape
    cells = np.zeros((g, g), dtype=np.float64)
    for i in range(g):
        r0, r1 = i * h // g, (i + 1) * h // g
        for j in range(g):
            c0, c1 = j * w // g, (j + 1) * w // g
            area = (r1 - r0) * (c1 - c0)
            if area > 0:
                cells[i, j] = window[r0:r1, c0:c1].sum() / area
    return np.clip(cells, 0.0, 1.0)


def extract_features(
    img: SkeletonImage,
    cut: CandidateCut,
    cuts: list[CandidateCut],
    cfg: FeatureConfig,
) -> np.ndarray:
    """Feature vector for one cut: grid densities then six scalars.

    Scalars, in order: crossing count / 10 (clamped), minimum crossing count
    within +-2 columns / 10 (clamped), distance to nearest other cut / image
    width (1.0 when the cut is alone), ink density of the window half left of
    the cut, density of the half right of it, cut column / image width.
    """
    if not (0 <= cut.column < img.width):
        raise ValueError(f"cut column {cut.column} outside image width {img.width}")
    window = _window(img, cut.column, cfg.window_cols)
    grid = _density_grid(window, cfg.grid).ravel()

    cc = crossing_count(img, cut.column)
    lo = max(0, cut.column - 2)
    hi = min(img.width, cut.column + 3)
    min_cc = min(crossing_count(img, c) for c in range(lo, hi))

    other = [c.column for c in cuts if c is not cut and c.column != cut.column]
    nearest = min(abs(cut.column - c) for c in other) / img.width if other else 1.0

    half = cfg.window_cols // 2
    left_cols = window[:, :half]
    right_cols = window[:, half + 1 :] if half + 1 < cfg.window_cols else window[:, :0]
    left_density = left_cols.sum() / left_cols.size if left_cols.size else 0.0
    right_density = right_cols.sum() / right_cols.size if right_cols.size else 0.0

    scalars = np.array(
        [
            min(cc / 10.0, 1.0),
            min(min_cc / 10.0, 1.0),
            min(nearest, 1.0),
            left_density,
            right_density,
            cut.column / img.width,
        ]
    )
    return np.clip(np.concatenate([grid, scalars]), 0.0, 1.0)
