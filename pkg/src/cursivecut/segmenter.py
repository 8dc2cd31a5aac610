"""Heuristic cut proposal: over-segment, reject loop crossings, merge by width.

A cut is a candidate character boundary column.  The rule sequence only ever
moves a cut's status forward: proposed -> loop_rejected | width_merged |
heuristic_valid, and heuristic_valid -> nn_valid | nn_invalid once the
ensemble votes (see `neural`).
"""

import json
import statistics
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .images import SkeletonImage


class CutStatus(str, Enum):
    PROPOSED = "proposed"
    LOOP_REJECTED = "loop_rejected"
    WIDTH_MERGED = "width_merged"
    HEURISTIC_VALID = "heuristic_valid"
    NN_VALID = "nn_valid"
    NN_INVALID = "nn_invalid"


# pipeline order; a status may only move to a later one
_STATUS_ORDER = {s: i for i, s in enumerate(CutStatus)}


@dataclass(frozen=True)
class CandidateCut:
    column: int
    status: CutStatus = CutStatus.PROPOSED
    crossing_count: int = 0

    def advanced(self, status: CutStatus, **changes) -> "CandidateCut":
        if _STATUS_ORDER[status] < _STATUS_ORDER[self.status]:
            raise ValueError(f"cut status cannot move back: {self.status} -> {status}")
        return replace(self, status=status, **changes)


@dataclass(frozen=True)
class SegParams:
    """Over-segmentation divisor, character width, core-zone sensitivity."""

    n: int = 20
    char_width: float | None = None  # None = estimate from surviving cuts
    core_fraction: float = 0.2

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if not (0.0 < self.core_fraction < 1.0):
            raise ValueError("core_fraction must be in (0, 1)")
        if self.char_width is not None and self.char_width <= 0:
            raise ValueError("char_width must be positive")


@dataclass(frozen=True)
class CoreZone:
    top_row: int
    bottom_row: int

    def __post_init__(self):
        if not (0 <= self.top_row <= self.bottom_row):
            raise ValueError("core zone rows out of order")

    @property
    def center_row(self) -> int:
        return (self.top_row + self.bottom_row) // 2


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def oversegment(img: SkeletonImage, params: SegParams) -> list[CandidateCut]:
    """Propose cuts every width/n pixels: columns round(k*w/n), k = 1..n-1."""
    w = img.width
    if w < params.n:
        raise ValueError(f"image width {w} smaller than divisor n={params.n}")
    return [
        CandidateCut(column=_round_half_up(k * w / params.n))
        for k in range(1, params.n)
    ]


def crossing_count(img: SkeletonImage, column: int) -> int:
    """Count the maximal vertical ink runs a column intersects."""
    if not (0 <= column < img.width):
        raise ValueError(f"column {column} outside image width {img.width}")
    col = img.pixels[:, column]
    # a run starts wherever ink follows background
    starts = col & ~np.concatenate(([False], col[:-1]))
    return int(starts.sum())


def filter_loops(cuts: list[CandidateCut], img: SkeletonImage) -> list[CandidateCut]:
    """Reject cuts crossing more than one run (loop / multi-stroke body)."""
    out = []
    for cut in cuts:
        count = crossing_count(img, cut.column)
        if count > 1:
            out.append(cut.advanced(CutStatus.LOOP_REJECTED, crossing_count=count))
        else:
            out.append(replace(cut, crossing_count=count))
    return out


def _surviving(cuts: list[CandidateCut]) -> list[CandidateCut]:
    return [c for c in cuts if c.status in (CutStatus.PROPOSED, CutStatus.HEURISTIC_VALID)]


def estimate_char_width(img: SkeletonImage, cuts: list[CandidateCut]) -> float:
    """Median gap between consecutive surviving cuts.

    With fewer than two survivors there is no gap to measure; fall back to
    the image height (square-character assumption).
    """
    cols = sorted(c.column for c in _surviving(cuts))
    if len(cols) < 2:
        return float(img.height)
    gaps = [b - a for a, b in zip(cols, cols[1:])]
    return float(statistics.median(gaps))


def merge_by_width(cuts: list[CandidateCut], char_width: float) -> list[CandidateCut]:
    """Cluster surviving cuts closer than char_width; keep one center each.

    Maximal clusters of consecutive survivors with gaps < char_width collapse
    to a single heuristic_valid cut at the rounded mean column; the original
    members become width_merged.  Isolated survivors pass through unchanged
    except for the heuristic_valid status.  Rejected cuts are untouched.
    """
    if char_width <= 0:
        raise ValueError("char_width must be positive")
    survivors = sorted(_surviving(cuts), key=lambda c: c.column)
    rest = [c for c in cuts if c.status not in (CutStatus.PROPOSED, CutStatus.HEURISTIC_VALID)]

    clusters: list[list[CandidateCut]] = []
    for cut in survivors:
        if clusters and cut.column - clusters[-1][-1].column < char_width:
            clusters[-1].append(cut)
        else:
            clusters.append([cut])

    out = list(rest)
    for cluster in clusters:
        if len(cluster) == 1:
            out.append(cluster[0].advanced(CutStatus.HEURISTIC_VALID))
        else:
            center = _round_half_up(sum(c.column for c in cluster) / len(cluster))
            out.extend(c.advanced(CutStatus.WIDTH_MERGED) for c in cluster)
            out.append(
                CandidateCut(
                    column=center,
                    status=CutStatus.HEURISTIC_VALID,
                    crossing_count=min(c.crossing_count for c in cluster),
                )
            )
    out.sort(key=lambda c: (c.column, _STATUS_ORDER[c.status]))
    return out


def detect_core_zone(img: SkeletonImage, core_fraction: float = 0.2) -> CoreZone:
    """Largest row band whose projection stays above core_fraction * peak.

    The horizontal projection profile of a script word peaks over the
    character bodies; ascender and descender rows fall below the fraction
    cutoff and are excluded.  Ties on band length go to the topmost band.
    """
    profile = img.pixels.sum(axis=1)
    peak = profile.max()
    if peak == 0:
        raise ValueError("cannot detect core zone of an empty image")
    qualifying = profile >= core_fraction * peak
    best = None
    row = 0
    h = img.height
    while row < h:
        if qualifying[row]:
            start = row
            while row < h and qualifying[row]:
                row += 1
            if best is None or (row - start) > (best[1] - best[0] + 1):
                best = (start, row - 1)
        else:
            row += 1
    return CoreZone(top_row=best[0], bottom_row=best[1])


def cuts_to_json(cuts: list[CandidateCut]) -> str:
    """Serialize to the interchange form: array of {column, status, crossing_count}."""
    return json.dumps(
        [
            {"column": c.column, "status": c.status.value, "crossing_count": c.crossing_count}
            for c in cuts
        ],
        indent=2,
    )


def cuts_from_json(text: str) -> list[CandidateCut]:
    records = json.loads(text)
    return [
        CandidateCut(
            column=int(r["column"]),
            status=CutStatus(r["status"]),
            crossing_count=int(r.get("crossing_count", 0)),
        )
        for r in records
    ]
