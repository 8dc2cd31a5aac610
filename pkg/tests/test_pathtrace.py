import numpy as np
import pytest

from oracles import count_components_8, ink_free_path_exists, min_path_cost_through

from cursivecut.images import BinaryImage, SkeletonImage, load_image
from cursivecut.pathtrace import (
    INK_PENALTY,
    PathCrossingError,
    SegmentationPath,
    path_cost,
    path_cost_grid,
    paths_from_json,
    paths_to_json,
    render_overlay,
    segment_characters,
    trace_path,
)
from cursivecut.segmenter import CandidateCut, CoreZone, CutStatus


def skel(px) -> SkeletonImage:
    return SkeletonImage(np.asarray(px, dtype=bool))


def valid_cut(column: int) -> CandidateCut:
    return CandidateCut(column=column, status=CutStatus.HEURISTIC_VALID)


def ink_crossings(img, path) -> int:
    return int(sum(img.pixels[r, c] for r, c in enumerate(path.columns)))


# -- trace_path --------------------------------------------------------------

def test_blank_image_straight_path():
    img = skel(np.zeros((12, 60)))
    path = trace_path(img, valid_cut(30), CoreZone(0, 11))
    assert np.all(path.columns == 30)
    assert path.seed_column == 30


def test_path_detours_through_gap():
    # bar two rows below the seed so the path can shift over to the gap
    px = np.zeros((9, 60), dtype=bool)
    px[6, :] = True
    px[6, 28] = False  # 1-px gap left of the cut
    img = skel(px)
    path = trace_path(img, valid_cut(30), CoreZone(0, 8))
    assert ink_crossings(img, path) == 0
    assert path.columns[6] == 28
    assert path.columns[0] == 30 and path.columns[-1] == 30


def test_solid_wall_crossed_exactly_once():
    px = np.zeros((10, 40), dtype=bool)
    px[5, :] = True
    img = skel(px)
    path = trace_path(img, valid_cut(20), CoreZone(0, 9))
    assert ink_crossings(img, path) == 1
    cost = path_cost(img, path)
    assert INK_PENALTY <= cost < 2 * INK_PENALTY


def test_path_continuity_and_span(rng):
    for _ in range(50):
        h, w = int(rng.integers(3, 25)), int(rng.integers(3, 50))
        img = skel(rng.random((h, w)) < 0.3)
        col = int(rng.integers(0, w))
        path = trace_path(img, valid_cut(col), CoreZone(0, h - 1))
        assert path.columns.size == h
        if h > 1:
            assert np.abs(np.diff(path.columns)).max() <= 1
        assert path.columns.min() >= 0 and path.columns.max() < w


def test_dp_cost_matches_dijkstra_oracle(rng):
    for case in range(20):
        h, w = int(rng.integers(3, 16)), int(rng.integers(3, 24))
        px = rng.random((h, w)) < 0.35
        img = skel(px)
        col = int(rng.integers(0, w))
        zone = CoreZone(0, h - 1)
        path = trace_path(img, valid_cut(col), zone)
        got = path_cost(img, path)

        # reproduce the forced seed cell, then ask the oracle
        center = zone.center_row if zone.center_row < h else h - 1
        bg = np.flatnonzero(~px[:, col])
        if bg.size in (0, h):
            seed_row = center
        else:
            seed_row = int(bg[np.abs(bg - center).argmin()])
        costs = path_cost_grid(img, col)
        expect = min_path_cost_through(costs, seed_row, col)
        assert got == pytest.approx(expect, rel=1e-12), f"case {case}"


def test_ink_free_whenever_possible(rng):
    found_free, found_blocked = 0, 0
    for _ in range(200):
        h, w = int(rng.integers(4, 14)), int(rng.integers(4, 20))
        px = rng.random((h, w)) < 0.45
        img = skel(px)
        col = int(rng.integers(0, w))
        zone = CoreZone(0, h - 1)
        path = trace_path(img, valid_cut(col), zone)

        center = zone.center_row if zone.center_row < h else h - 1
        bg = np.flatnonzero(~px[:, col])
        seed_row = center if bg.size in (0, h) else int(bg[np.abs(bg - center).argmin()])
        possible = ink_free_path_exists(px, seed_row, col)
        crossings = ink_crossings(img, path)
        if possible:
            found_free += 1
            assert crossings == 0
        else:
            found_blocked += 1
            assert crossings > 0
    assert found_free > 10 and found_blocked > 10  # both regimes exercised


def test_ties_break_toward_smaller_column():
    # symmetric wall with gaps equidistant left and right of the cut;
    # both detours cost the same, so the left one must win
    px = np.zeros((9, 21), dtype=bool)
    px[7, :] = True
    px[7, 8] = False
    px[7, 12] = False  # gaps at 10-2 and 10+2
    img = skel(px)
    path = trace_path(img, valid_cut(10), CoreZone(0, 8))
    assert ink_crossings(img, path) == 0
    assert path.columns[7] == 8


def test_trace_rejects_unvalidated_cut():
    img = skel(np.zeros((5, 10)))
    with pytest.raises(ValueError):
        trace_path(img, CandidateCut(column=3), CoreZone(0, 4))
    with pytest.raises(ValueError):
        trace_path(img, valid_cut(99), CoreZone(0, 4))


def test_path_validation():
    with pytest.raises(ValueError):
        SegmentationPath(columns=np.array([0, 2, 3]), seed_column=0)
    with pytest.raises(ValueError):
        SegmentationPath(columns=np.array([-1, 0]), seed_column=0)


# -- segment_characters ------------------------------------------------------

def test_no_paths_single_segment():
    px = np.zeros((6, 20), dtype=bool)
    px[2:5, 3:17] = True
    segs = segment_characters(BinaryImage(px), [])
    assert len(segs) == 1
    assert segs[0].image.foreground_count() == BinaryImage(px).foreground_count()
    assert segs[0].left_path is None and segs[0].right_path is None


def test_straight_path_splits_word():
    px = np.ones((4, 60), dtype=bool)
    path = SegmentationPath(columns=np.full(4, 30), seed_column=30)
    segs = segment_characters(BinaryImage(px), [path])
    assert len(segs) == 2
    assert segs[0].image.width == 30 and segs[1].image.width == 30
    assert segs[0].left_path is None and segs[0].right_path is path
    assert segs[1].left_path is path and segs[1].right_path is None


def test_partition_property(rng):
    for _ in range(50):
        h, w = int(rng.integers(4, 16)), int(rng.integers(10, 40))
        px = rng.random((h, w)) < 0.35
        cols = sorted(rng.choice(np.arange(2, w - 2), size=min(3, w - 4), replace=False))
        paths = [SegmentationPath(columns=np.full(h, int(c)), seed_column=int(c)) for c in cols]
        segs = segment_characters(BinaryImage(px), paths)
        rebuilt = np.zeros((h, w), dtype=int)
        for seg in segs:
            sh, sw = seg.image.pixels.shape
            rebuilt[seg.top : seg.top + sh, seg.left : seg.left + sw] += seg.image.pixels
        assert np.array_equal(rebuilt.astype(bool), px)
        assert rebuilt.max() <= 1  # no pixel claimed twice


def test_rings_stay_whole():
    # two rings joined by a baseline ligature; trace a path through the join
    px = np.zeros((20, 46), dtype=bool)
    theta = np.linspace(0, 2 * np.pi, 160, endpoint=False)
    for cx in (10, 35):
        px[np.round(10 + 6 * np.sin(theta)).astype(int), np.round(cx + 6 * np.cos(theta)).astype(int)] = True
    px[16, 16:30] = True  # ligature
    img = skel(px)
    path = trace_path(img, valid_cut(22), CoreZone(4, 16))
    segs = segment_characters(img, [path])
    assert len(segs) == 2
    for seg in segs:
        assert count_components_8(seg.image.pixels) <= 2  # ring (+ ligature stub)
    # each ring's pixel count intact on its own side
    left_count = segs[0].image.foreground_count()
    right_count = segs[1].image.foreground_count()
    assert left_count + right_count == img.foreground_count()
    assert abs(left_count - right_count) <= px[16, 16:30].sum()


def test_crossing_paths_rejected():
    down = SegmentationPath(columns=np.array([10, 11, 12, 13]), seed_column=10)
    up = SegmentationPath(columns=np.array([13, 12, 11, 10]), seed_column=13)
    img = BinaryImage(np.ones((4, 20), dtype=bool))
    with pytest.raises(PathCrossingError):
        segment_characters(img, [down, up])


def test_path_length_must_match_height():
    img = BinaryImage(np.ones((5, 10), dtype=bool))
    short = SegmentationPath(columns=np.array([4, 4, 4]), seed_column=4)
    with pytest.raises(ValueError):
        segment_characters(img, [short])


# -- overlay -----------------------------------------------------------------

def test_overlay_empty_inputs_reencodes_image(tmp_path):
    px = np.zeros((6, 10), dtype=bool)
    px[3, 2:8] = True
    img = skel(px)
    out = tmp_path / "plain.pgm"
    render_overlay(img, [], [], out)
    back = load_image(out)
    assert np.array_equal(back.pixels == 0, px)


def test_overlay_single_path_alters_height_pixels(tmp_path):
    img = skel(np.zeros((8, 12)))
    path = SegmentationPath(columns=np.full(8, 5), seed_column=5)
    out = tmp_path / "one.pgm"
    render_overlay(img, [], [path], out)
    back = load_image(out)
    assert int((back.pixels != 255).sum()) == 8


def test_overlay_distinct_levels_and_determinism(tmp_path):
    px = np.zeros((10, 30), dtype=bool)
    px[4, 5:25] = True
    img = skel(px)
    cuts = [
        CandidateCut(column=8, status=CutStatus.LOOP_REJECTED, crossing_count=2),
        CandidateCut(column=15, status=CutStatus.NN_VALID, crossing_count=1),
    ]
    path = SegmentationPath(columns=np.full(10, 20), seed_column=20)
    a, b = tmp_path / "a.pgm", tmp_path / "b.pgm"
    render_overlay(img, cuts, [path], a)
    render_overlay(img, cuts, [path], b)
    assert a.read_bytes() == b.read_bytes()
    back = load_image(a)
    levels = {int(v) for v in np.unique(back.pixels)}
    assert {0, 255}.issubset(levels)
    assert len(levels & {64, 128, 192}) == 3


# -- serialization -----------------------------------------------------------

def test_paths_json_round_trip():
    paths = [
        SegmentationPath(columns=np.array([3, 4, 4, 5]), seed_column=4),
        SegmentationPath(columns=np.array([9, 9, 8, 8]), seed_column=9),
    ]
    back = paths_from_json(paths_to_json(paths))
    assert len(back) == 2
    for orig, copy in zip(paths, back):
        assert copy.seed_column == orig.seed_column
        assert np.array_equal(copy.columns, orig.columns)
