import numpy as np
import pytest

from cursivecut.images import (
    BinaryImage,
    GrayImage,
    PgmError,
    load_image,
    save_pbm,
    save_pgm,
    to_gray,
)


def test_pgm_round_trip(tmp_path, rng):
    px = rng.integers(0, 256, size=(17, 31), dtype=np.uint8)
    path = tmp_path / "img.pgm"
    save_pgm(GrayImage(px), path)
    back = load_image(path)
    assert back.width == 31 and back.height == 17
    assert np.array_equal(back.pixels, px)


def test_pgm_header_comments_and_whitespace(tmp_path):
    raster = bytes(range(8))
    data = b"P5 # a comment\n# another\n 4\t2 # trailing\n255\n" + raster
    path = tmp_path / "c.pgm"
    path.write_bytes(data)
    img = load_image(path)
    assert (img.height, img.width) == (2, 4)
    assert img.pixels[1, 3] == 7


def test_pgm_rejects_other_magic(tmp_path):
    path = tmp_path / "p2.pgm"
    path.write_bytes(b"P2\n2 2\n255\n0 1 2 3\n")
    with pytest.raises(PgmError):
        load_image(path)


def test_pgm_rejects_16_bit(tmp_path):
    path = tmp_path / "deep.pgm"
    path.write_bytes(b"P5\n2 2\n65535\n" + bytes(8))
    with pytest.raises(PgmError):
        load_image(path)


def test_pgm_rejects_truncated_raster(tmp_path):
    path = tmp_path / "short.pgm"
    path.write_bytes(b"P5\n4 4\n255\n" + bytes(7))
    with pytest.raises(PgmError):
        load_image(path)


def test_pgm_rejects_bad_dimensions(tmp_path):
    path = tmp_path / "zero.pgm"
    path.write_bytes(b"P5\n0 3\n255\n")
    with pytest.raises(PgmError):
        load_image(path)


def test_binary_saves_as_ink_zero(tmp_path):
    px = np.zeros((3, 3), dtype=bool)
    px[1, 1] = True
    path = tmp_path / "b.pgm"
    save_pgm(BinaryImage(px), path)
    back = load_image(path)
    assert back.pixels[1, 1] == 0
    assert back.pixels[0, 0] == 255


def test_pbm_packs_bits(tmp_path):
    px = np.zeros((2, 10), dtype=bool)
    px[0, 0] = px[0, 9] = px[1, 4] = True
    path = tmp_path / "b.pbm"
    save_pbm(BinaryImage(px), path)
    data = path.read_bytes()
    assert data.startswith(b"P4\n10 2\n")
    raster = data[len(b"P4\n10 2\n") :]
    # row-aligned packing: 10 bits -> 2 bytes per row
    assert raster == bytes([0b10000000, 0b01000000, 0b00001000, 0b00000000])


def test_to_gray_inverts_ink():
    px = np.array([[True, False]])
    g = to_gray(BinaryImage(px))
    assert g.pixels[0, 0] == 0 and g.pixels[0, 1] == 255


def test_content_bbox():
    px = np.zeros((5, 6), dtype=bool)
    assert BinaryImage(px).content_bbox() is None
    px[1, 2] = px[3, 4] = True
    assert BinaryImage(px).content_bbox() == (1, 2, 3, 4)
    assert BinaryImage(px).foreground_count() == 2


def test_images_reject_empty_and_1d():
    with pytest.raises(ValueError):
        GrayImage(np.zeros((0, 4), dtype=np.uint8))
    with pytest.raises(ValueError):
        BinaryImage(np.zeros(4, dtype=bool))
