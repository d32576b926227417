"""Seeded synthetic test images.

The classic test pictures are not shipped; these cover the useful range of
histogram shapes: nearly flat, smooth ramps, white noise and natural-looking
multi-octave value noise.
"""
from __future__ import annotations

import numpy as np

from .image import GrayImage

KINDS = ("flat", "gradient", "noise", "perlin")


def _to_image(a: np.ndarray) -> GrayImage:
    return GrayImage(np.clip(np.rint(a), 0, 255).astype(np.uint8))


def flat(width: int, height: int, seed: int = 0, level: float = 128.0, jitter: float = 0.6) -> GrayImage:
    # a perfectly constant image has a single occupied bin and nothing to pair it with
    rng = np.random.default_rng(seed)
    return _to_image(level + rng.normal(0.0, jitter, (height, width)))


def gradient(width: int, height: int, seed: int = 0, jitter: float = 1.0) -> GrayImage:
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:height, 0:width]
    ramp = 40 + 170 * (x / max(width - 1, 1) * 0.7 + y / max(height - 1, 1) * 0.3)
    return _to_image(ramp + rng.normal(0.0, jitter, (height, width)))


def noise(width: int, height: int, seed: int = 0, sigma: float = 3.0) -> GrayImage:
    rng = np.random.default_rng(seed)
    return _to_image(128 + rng.normal(0.0, sigma, (height, width)))


def perlin(width: int, height: int, seed: int = 0, octaves: int = 5, contrast: float = 90.0) -> GrayImage:
    """Smoothly interpolated value noise summed over octaves (1/f-like spectrum)."""
    rng = np.random.default_rng(seed)
    out = np.zeros((height, width))
    amp, total = 1.0, 0.0
    cells = 2
    for _ in range(octaves):
        grid = rng.random((cells + 1, cells + 1))
        gy = np.linspace(0, cells, height, endpoint=False)
        gx = np.linspace(0, cells, width, endpoint=False)
        y0, x0 = gy.astype(int), gx.astype(int)
        ty, tx = gy - y0, gx - x0
        # smoothstep fade
        ty = ty * ty * (3 - 2 * ty)
        tx = tx * tx * (3 - 2 * tx)
        a = grid[np.ix_(y0, x0)]
        b = grid[np.ix_(y0, x0 + 1)]
        c = grid[np.ix_(y0 + 1, x0)]
        d = grid[np.ix_(y0 + 1, x0 + 1)]
        top = a + (b - a) * tx
        bot = c + (d - c) * tx
        out += amp * (top + (bot - top) * ty[:, None])
        total += amp
        amp *= 0.5
        cells *= 2
    out /= total
    return _to_image(128 + contrast * (out - out.mean()) / max(out.std(), 1e-9) / 3)


GENERATORS = {"flat": flat, "gradient": gradient, "noise": noise, "perlin": perlin}


def generate(kind: str, width: int, height: int, seed: int = 0) -> GrayImage:
    try:
        gen = GENERATORS[kind]
    except KeyError:
        raise ValueError(f"unknown image kind {kind!r}; choose from {KINDS}") from None
    return gen(width, height, seed)
