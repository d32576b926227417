"""8-bit grayscale images, binary PGM I/O and distortion metrics."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import (DimensionMismatch, PGMDepthError, PGMHeaderError,
                     PGMTruncatedError)

BIT_DEPTH = 8
MAX_VALUE = 255

# magic, width, height, maxval, then exactly one whitespace byte
_HEADER = re.compile(
    rb"P5(?:\s|#[^\n]*\n)+(\d+)(?:\s|#[^\n]*\n)+(\d+)(?:\s|#[^\n]*\n)+(\d+)\s")


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Row-major 8-bit pixel grid. ``pixels`` is a read-only (height, width) uint8 array."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"expected a non-empty 2-D array, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            if arr.size and (arr.min() < 0 or arr.max() > MAX_VALUE):
                raise ValueError("pixel values must lie in [0, 255]")
            arr = arr.astype(np.uint8)
        arr = np.array(arr, dtype=np.uint8, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @classmethod
    def from_list(cls, width: int, height: int, values) -> "GrayImage":
        values = list(values)
        if len(values) != width * height:
            raise ValueError(f"need {width * height} pixels, got {len(values)}")
        return cls(np.array(values, dtype=np.int64).reshape(height, width))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def bit_depth(self) -> int:
        return BIT_DEPTH

    @property
    def size(self) -> int:
        return self.pixels.size

    def flat(self) -> list[int]:
        return self.pixels.ravel().tolist()

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(np.array_equal(self.pixels, other.pixels))

    def __repr__(self):
        return f"GrayImage({self.width}x{self.height})"


def load_pgm(path) -> GrayImage:
    data = Path(path).read_bytes()
    if not data.startswith(b"P5"):
        raise PGMHeaderError(f"{path}: not a binary PGM (P5) file")
    m = _HEADER.match(data)
    if m is None:
        raise PGMHeaderError(f"{path}: malformed PGM header")
    width, height, maxval = (int(g) for g in m.groups())
    if width < 1 or height < 1:
        raise PGMHeaderError(f"{path}: invalid dimensions {width}x{height}")
    if maxval != MAX_VALUE:
        raise PGMDepthError(f"{path}: unsupported maxval {maxval} (only 255)")
    body = data[m.end():]
    n = width * height
    if len(body) < n:
        raise PGMTruncatedError(f"{path}: expected {n} pixel bytes, found {len(body)}")
    arr = np.frombuffer(body, dtype=np.uint8, count=n).reshape(height, width)
    return GrayImage(arr)


def save_pgm(img: GrayImage, path) -> None:
    header = f"P5\n{img.width} {img.height}\n{MAX_VALUE}\n".encode("ascii")
    Path(path).write_bytes(header + img.pixels.tobytes())


def _check_same_shape(a: GrayImage, b: GrayImage):
    if a.pixels.shape != b.pixels.shape:
        raise DimensionMismatch(f"{a!r} vs {b!r}")


def sse(a: GrayImage, b: GrayImage) -> int:
    """Exact integer sum of squared pixel differences."""
    _check_same_shape(a, b)
    d = a.pixels.astype(np.int64) - b.pixels.astype(np.int64)
    return int(np.sum(d * d))


def mse_exact(a: GrayImage, b: GrayImage) -> Fraction:
    return Fraction(sse(a, b), a.size)


def mse(a: GrayImage, b: GrayImage) -> float:
    """Mean squared error, computed from an exact integer numerator."""
    return float(mse_exact(a, b))


def psnr(a: GrayImage, b: GrayImage) -> float:
    """PSNR in dB; ``math.inf`` for identical images."""
    err = mse_exact(a, b)
    if err == 0:
        return math.inf
    return 10.0 * math.log10(MAX_VALUE ** 2 / float(err))
