import numpy as np
import pytest

from cursivecut.images import BinaryImage, GrayImage, save_pgm


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def random_gray(rng, h=24, w=40) -> GrayImage:
    return GrayImage(rng.integers(0, 256, size=(h, w), dtype=np.uint8))


def stroke_blobs(rng, h=48, w=48, strokes=4, discs=2) -> BinaryImage:
    """Random strokes and filled discs; no isolated 2x2 squares.

    Thinning legitimately erases a lone 2x2 block, so the generator sticks
    to line segments (length >= 5) and discs (radius >= 2) that survive it.
    """
    px = np.zeros((h, w), dtype=bool)
    for _ in range(strokes):
        r, c = int(rng.integers(2, h - 2)), int(rng.integers(2, w - 2))
        dr, dc = [(0, 1), (1, 0), (1, 1), (1, -1)][int(rng.integers(0, 4))]
        for step in range(int(rng.integers(5, 14))):
            rr, cc = r + dr * step, c + dc * step
            if not (0 <= rr < h and 0 <= cc < w):
                break
            px[rr, cc] = True
    for _ in range(discs):
        r, c = int(rng.integers(4, h - 4)), int(rng.integers(4, w - 4))
        radius = int(rng.integers(2, 4))
        yy, xx = np.ogrid[:h, :w]
        px |= (yy - r) ** 2 + (xx - c) ** 2 <= radius**2
    if not px.any():
        px[h // 2, w // 2 - 3 : w // 2 + 3] = True
    return BinaryImage(px)


def write_word_pgm(path, pixels: np.ndarray) -> None:
    """Persist a boolean ink mask as a dark-on-light PGM."""
    save_pgm(BinaryImage(pixels), path)
