"""Word image containers and netpbm file I/O.

Images are thin wrappers around 2-D numpy arrays: uint8 intensities for
grayscale, booleans (True = ink) for binary and skeleton rasters.  Scanned
script is dark-on-light, so every conversion in this package treats low
intensity as foreground.
"""

from dataclasses import dataclass

import numpy as np


class PgmError(ValueError):
    """Malformed or unsupported netpbm content."""


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Row-major 8-bit grayscale raster."""

    pixels: np.ndarray  # (height, width) uint8

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.uint8)
        if px.ndim != 2 or px.size == 0:
            raise ValueError("gray image must be a nonempty 2-D array")
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True, eq=False)
class BinaryImage:
    """Row-major boolean raster, True = foreground ink."""

    pixels: np.ndarray  # (height, width) bool

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=bool)
        if px.ndim != 2 or px.size == 0:
            raise ValueError("binary image must be a nonempty 2-D array")
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def foreground_count(self) -> int:
        return int(self.pixels.sum())

    def content_bbox(self):
        """(top, left, bottom, right) inclusive bounds of ink, or None if empty."""
        rows = np.flatnonzero(self.pixels.any(axis=1))
        cols = np.flatnonzero(self.pixels.any(axis=0))
        if rows.size == 0:
            return None
        return int(rows[0]), int(cols[0]), int(rows[-1]), int(cols[-1])


@dataclass(frozen=True, eq=False)
class SkeletonImage(BinaryImage):
    """Binary raster that is a thinning fixed point (re-thinning changes nothing)."""


def _read_tokens(data: bytes, count: int):
    """Pull `count` whitespace-separated header tokens, skipping # comments.

    Returns (tokens, offset_of_first_raster_byte).
    """
    tokens = []
    i = 0
    n = len(data)
    while len(tokens) < count:
        while i < n and data[i : i + 1].isspace():
            i += 1
        if i < n and data[i] == ord("#"):
            while i < n and data[i] != ord("\n"):
                i += 1
            continue
        start = i
        while i < n and not data[i : i + 1].isspace() and data[i] != ord("#"):
            i += 1
        if i == start:
            raise PgmError("truncated header")
        tokens.append(data[start:i])
    if i >= n or not data[i : i + 1].isspace():
        raise PgmError("missing whitespace after header")
    return tokens, i + 1


def load_image(path) -> GrayImage:
    """Read a binary PGM (P5, maxval <= 255) file."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:2] != b"P5":
        raise PgmError(f"not a binary PGM (P5) file: {path}")
    tokens, offset = _read_tokens(data[2:], 3)
    offset += 2
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise PgmError(f"non-numeric PGM header in {path}") from exc
    if width < 1 or height < 1:
        raise PgmError(f"bad PGM dimensions {width}x{height} in {path}")
    if maxval > 255:
        raise PgmError(f"unsupported PGM maxval {maxval} in {path} (16-bit not supported)")
    if maxval < 1:
        raise PgmError(f"bad PGM maxval {maxval} in {path}")
    raster = data[offset : offset + width * height]
    if len(raster) < width * height:
        raise PgmError(f"truncated PGM raster in {path}")
    px = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return GrayImage(px.copy())


def save_pgm(img, path) -> None:
    """Write P5. Binary images are encoded ink=0, background=255."""
    if isinstance(img, BinaryImage):
        px = np.where(img.pixels, 0, 255).astype(np.uint8)
    else:
        px = img.pixels
    header = f"P5\n{px.shape[1]} {px.shape[0]}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(px.tobytes())


def save_pbm(img: BinaryImage, path) -> None:
    """Write P4 (packed bits, 1 = ink, per the PBM black-is-one convention)."""
    packed = np.packbits(img.pixels.astype(np.uint8), axis=1)
    header = f"P4\n{img.width} {img.height}\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(packed.tobytes())


def to_gray(img: BinaryImage) -> GrayImage:
    """Render a binary image as grayscale (ink=0 on white)."""
    return GrayImage(np.where(img.pixels, 0, 255).astype(np.uint8))
