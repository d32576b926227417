import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hsmatch.errors import DimensionMismatch, PGMDepthError, PGMHeaderError, PGMTruncatedError
from hsmatch.image import GrayImage, load_pgm, mse, mse_exact, psnr, save_pgm, sse


def write(tmp_path, data, name="x.pgm"):
    p = tmp_path / name
    p.write_bytes(data)
    return p


def test_load_minimal_pgm(tmp_path):
    img = load_pgm(write(tmp_path, b"P5 1 1 255 \x80"))
    assert (img.width, img.height) == (1, 1)
    assert img.flat() == [128]


def test_load_row_major(tmp_path):
    img = load_pgm(write(tmp_path, b"P5\n2 2\n255\n\x00\x01\x02\x03"))
    assert img.flat() == [0, 1, 2, 3]
    assert img.pixels.tolist() == [[0, 1], [2, 3]]


def test_header_comments(tmp_path):
    img = load_pgm(write(tmp_path, b"P5\n# made by hand\n3 1\n# depth\n255\n\x07\x08\x09"))
    assert img.flat() == [7, 8, 9]


def test_sixteen_bit_rejected(tmp_path):
    with pytest.raises(PGMDepthError):
        load_pgm(write(tmp_path, b"P5 1 1 65535 \x00\x80"))


def test_bad_magic(tmp_path):
    with pytest.raises(PGMHeaderError):
        load_pgm(write(tmp_path, b"P2 1 1 255 \x80"))


def test_truncated(tmp_path):
    with pytest.raises(PGMTruncatedError):
        load_pgm(write(tmp_path, b"P5 2 2 255 \x00\x01\x02"))


def test_parse_errors_are_distinct():
    assert len({PGMHeaderError, PGMDepthError, PGMTruncatedError}) == 3
    assert len({PGMHeaderError.code, PGMDepthError.code, PGMTruncatedError.code}) == 3


def test_save_single_black_pixel(tmp_path):
    p = tmp_path / "b.pgm"
    save_pgm(GrayImage.from_list(1, 1, [0]), p)
    assert load_pgm(p).flat() == [0]


@settings(max_examples=40, deadline=None)
@given(arrays(np.uint8, st.tuples(st.integers(1, 9), st.integers(1, 9))))
def test_pgm_roundtrip(tmp_path_factory, px):
    p = tmp_path_factory.mktemp("rt") / "r.pgm"
    img = GrayImage(px)
    save_pgm(img, p)
    back = load_pgm(p)
    assert back == img
    assert back.pixels.dtype == np.uint8


def test_pixels_read_only():
    img = GrayImage.from_list(2, 1, [1, 2])
    with pytest.raises(ValueError):
        img.pixels[0, 0] = 5


def test_mse_examples():
    a = GrayImage.from_list(2, 2, [10, 10, 10, 10])
    assert mse(a, a) == 0
    b = GrayImage.from_list(2, 2, [10, 12, 10, 10])
    assert mse(a, b) == 1.0
    assert mse_exact(a, b) == 1


def test_mse_against_pixel_loop(rng):
    for _ in range(100):
        a = rng.integers(0, 256, (8, 8), dtype=np.uint8)
        b = rng.integers(0, 256, (8, 8), dtype=np.uint8)
        total = 0
        for x, y in zip(a.ravel().tolist(), b.ravel().tolist()):
            total += (x - y) ** 2
        assert sse(GrayImage(a), GrayImage(b)) == total
        assert mse_exact(GrayImage(a), GrayImage(b)) * 64 == total
        assert mse(GrayImage(a), GrayImage(b)) == total / 64


@settings(max_examples=50, deadline=None)
@given(arrays(np.uint8, (4, 5)), arrays(np.uint8, (4, 5)))
def test_mse_symmetric_nonnegative(a, b):
    A, B = GrayImage(a), GrayImage(b)
    assert mse(A, B) == mse(B, A) >= 0
    assert (mse(A, B) == 0) == (A == B)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        mse(GrayImage.from_list(2, 1, [0, 0]), GrayImage.from_list(1, 2, [0, 0]))
    with pytest.raises(DimensionMismatch):
        psnr(GrayImage.from_list(2, 1, [0, 0]), GrayImage.from_list(1, 1, [0]))


def test_psnr_values():
    a = GrayImage.from_list(1, 1, [0])
    assert psnr(a, GrayImage.from_list(1, 1, [255])) == 0.0
    assert psnr(a, a) == math.inf
    one = psnr(GrayImage.from_list(1, 1, [7]), GrayImage.from_list(1, 1, [8]))
    assert one == pytest.approx(48.1308036, abs=1e-6)
