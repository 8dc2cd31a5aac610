"""Non-linear segmentation paths and per-character extraction.

A segmentation path is a row-monotone polyline (one column per row, drifting
at most one column between rows) threaded through a validated cut.  Crossing
ink is not forbidden outright; it costs a large finite penalty, so the
minimum-cost path avoids character bodies whenever any ink-free route exists
and otherwise crosses as little as possible.
"""

import json
from dataclasses import dataclass

import numpy as np

from .images import BinaryImage, GrayImage, SkeletonImage, save_pgm
from .segmenter import CandidateCut, CoreZone, CutStatus

INK_PENALTY = 1e6

# overlay gray levels
_LEVEL_REJECTED = 192
_LEVEL_VALID = 128
_LEVEL_PATH = 64


class PathCrossingError(ValueError):
    """Segmentation paths intersect; segments would not tile the word."""


@dataclass(frozen=True)
class SegmentationPath:
    columns: np.ndarray  # one column per image row
    seed_column: int

    def __post_init__(self):
        cols = np.asarray(self.columns, dtype=np.int64)
        if cols.ndim != 1 or cols.size == 0:
            raise ValueError("path needs one column per row")
        if cols.size > 1 and np.abs(np.diff(cols)).max() > 1:
            raise ValueError("path drifts more than one column between rows")
        if cols.min() < 0:
            raise ValueError("path column out of range")
        object.__setattr__(self, "columns", cols)


@dataclass(frozen=True)
class CharacterSegment:
    index: int
    image: BinaryImage
    top: int  # crop offset within the word
    left: int
    left_path: SegmentationPath | None  # None = image edge
    right_path: SegmentationPath | None


def path_cost_grid(img: BinaryImage, seed_column: int, lam: float = 1.0) -> np.ndarray:
    """Per-cell cost: lam * |col - seed_column| + INK_PENALTY * ink."""
    cols = np.arange(img.width, dtype=np.float64)
    deviation = lam * np.abs(cols - seed_column)
    return deviation[None, :] + INK_PENALTY * img.pixels.astype(np.float64)


def _dp_forward(costs: np.ndarray) -> np.ndarray:
    """Cumulative min path cost row by row (moves -1/0/+1 columns)."""
    h, w = costs.shape
    acc = np.empty_like(costs)
    acc[0] = costs[0]
    inf = np.inf
    for r in range(1, h):
        prev = acc[r - 1]
        left = np.concatenate(([inf], prev[:-1]))
        right = np.concatenate((prev[1:], [inf]))
        acc[r] = costs[r] + np.minimum(prev, np.minimum(left, right))
    return acc


def _backtrack(acc: np.ndarray, row: int, col: int) -> list[int]:
    """Walk from (row, col) back to row 0, smallest column on ties."""
    cols = [col]
    for r in range(row, 0, -1):
        prev = acc[r - 1]
        c = cols[-1]
        best = None
        for cand in (c - 1, c, c + 1):
            if 0 <= cand < acc.shape[1] and (best is None or prev[cand] < prev[best]):
                best = cand
        cols.append(best)
    cols.reverse()
    return cols


def _seed_row(img: BinaryImage, column: int, zone: CoreZone) -> int:
    """Background row nearest the core-zone center in the cut column."""
    center = min(zone.center_row, img.height - 1)
    bg = np.flatnonzero(~img.pixels[:, column])
    if bg.size == 0 or bg.size == img.height:
        return center
    return int(bg[np.abs(bg - center).argmin()])


def trace_path(
    img: SkeletonImage,
    cut: CandidateCut,
    zone: CoreZone,
    lam: float = 1.0,
) -> SegmentationPath:
    """Minimum-cost top-to-bottom path forced through the cut's seed cell.

    The dynamic program runs once downward from the top and once upward from
    the bottom; both halves are backtracked from the seed cell, giving the
    cheapest full path constrained to pass through it.
    """
    if cut.status not in (CutStatus.NN_VALID, CutStatus.HEURISTIC_VALID):
        raise ValueError(f"cannot trace a cut with status {cut.status.value}")
    if not (0 <= cut.column < img.width):
        raise ValueError("cut column outside image")
    costs = path_cost_grid(img, cut.column, lam)
    seed_r = _seed_row(img, cut.column, zone)

    upper = _backtrack(_dp_forward(costs[: seed_r + 1]), seed_r, cut.column)
    lower = _backtrack(_dp_forward(costs[seed_r:][::-1]), img.height - 1 - seed_r, cut.column)
    columns = upper + lower[::-1][1:]
    return SegmentationPath(columns=np.array(columns), seed_column=cut.column)


def path_cost(img: BinaryImage, path: SegmentationPath, lam: float = 1.0) -> float:
    costs = path_cost_grid(img, path.seed_column, lam)
    return float(costs[np.arange(img.height), path.columns].sum())


def segment_characters(
    img: BinaryImage, paths: list[SegmentationPath]
) -> list[CharacterSegment]:
    """Split the word along the paths; one cropped sub-image per slice.

    Row r, column c lands in slice i when paths[i-1].columns[r] <= c <
    paths[i].columns[r] (word edges bound the first and last slice), so the
    slices tile the word exactly.  Slices holding no ink are dropped.
    """
    paths = sorted(paths, key=lambda p: p.seed_column)
    h, w = img.height, img.width
    for p in paths:
        if p.columns.size != h:
            raise ValueError("path length does not match image height")
        if p.columns.max() >= w:
            raise ValueError("path column out of range")
    for a, b in zip(paths, paths[1:]):
        if (a.columns > b.columns).any():
            raise PathCrossingError(
                f"paths seeded at {a.seed_column} and {b.seed_column} cross"
            )

    col_grid = np.arange(w)[None, :]
    bounds = [p.columns[:, None] for p in paths]
    segments = []
    for i in range(len(paths) + 1):
        mask = np.ones((h, w), dtype=bool)
        if i > 0:
            mask &= col_grid >= bounds[i - 1]
        if i < len(paths):
            mask &= col_grid < bounds[i]
        piece = img.pixels & mask
        rows = np.flatnonzero(piece.any(axis=1))
        cols = np.flatnonzero(piece.any(axis=0))
        if rows.size == 0:
            continue
        crop = piece[rows[0] : rows[-1] + 1, cols[0] : cols[-1] + 1]
        segments.append(
            CharacterSegment(
                index=len(segments),
                image=BinaryImage(crop),
                top=int(rows[0]),
                left=int(cols[0]),
                left_path=paths[i - 1] if i > 0 else None,
                right_path=paths[i] if i < len(paths) else None,
            )
        )
    return segments


def render_overlay(
    img: BinaryImage,
    cuts: list[CandidateCut],
    paths: list[SegmentationPath],
    out_path,
) -> None:
    """Write a grayscale PGM with cuts and paths over the word.

    Rejected cuts paint full columns at one gray level, accepted cuts at a
    brighter one, and traced paths on top of both; identical inputs produce
    identical bytes.
    """
    canvas = np.where(img.pixels, 0, 255).astype(np.uint8)
    accepted = (CutStatus.HEURISTIC_VALID, CutStatus.NN_VALID)
    for cut in cuts:
        if cut.status not in accepted:
            canvas[:, cut.column] = _LEVEL_REJECTED
    for cut in cuts:
        if cut.status in accepted:
            canvas[:, cut.column] = _LEVEL_VALID
    for path in paths:
        canvas[np.arange(img.height), path.columns] = _LEVEL_PATH
    save_pgm(GrayImage(canvas), out_path)


def paths_to_json(paths: list[SegmentationPath]) -> str:
    return json.dumps(
        [{"seed_column": p.seed_column, "columns": p.columns.tolist()} for p in paths],
        indent=2,
    )


def paths_from_json(text: str) -> list[SegmentationPath]:
    return [
        SegmentationPath(columns=np.array(r["columns"]), seed_column=int(r["seed_column"]))
        for r in json.loads(text)
    ]
