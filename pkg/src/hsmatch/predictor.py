"""Checkerboard pass partition and the rhombus (4-neighbour mean) predictor.

Sites of one pass only ever have neighbours from the other pass or from the
image border, so predictions stay computable while a pass is being decoded.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ImageTooSmall
from .image import GrayImage

N_PASSES = 2


@dataclass(frozen=True, eq=False)
class PredictionSet:
    """Per-site arrays for one pass, all of equal length.

    ``sites`` are flat pixel indices. ``ring`` flags sites that have at least one
    border neighbour; the codec visits those last.
    """

    pass_id: int
    sites: np.ndarray
    cover_values: np.ndarray
    predictions: np.ndarray
    errors: np.ndarray
    originals: np.ndarray
    ring: np.ndarray

    def __len__(self):
        return len(self.sites)

    @property
    def residuals(self) -> np.ndarray:
        """c - o, the drift of each cover pixel away from the original image."""
        return self.cover_values - self.originals

    def reordered(self, order: np.ndarray) -> "PredictionSet":
        order = np.asarray(order)
        return PredictionSet(self.pass_id, self.sites[order], self.cover_values[order],
                             self.predictions[order], self.errors[order],
                             self.originals[order], self.ring[order])


def _check_size(img: GrayImage):
    if img.width < 3 or img.height < 3:
        raise ImageTooSmall(f"need at least 3x3 pixels, got {img.width}x{img.height}")


def partition_passes(img: GrayImage) -> np.ndarray:
    """Pass id per pixel: 0 where (x + y) is even, 1 where odd, -1 on the border."""
    _check_size(img)
    h, w = img.height, img.width
    yy, xx = np.mgrid[0:h, 0:w]
    passes = ((xx + yy) % 2).astype(np.int8)
    passes[0, :] = passes[-1, :] = -1
    passes[:, 0] = passes[:, -1] = -1
    return passes


def pass_sites(img: GrayImage, pass_id: int) -> np.ndarray:
    """Flat indices of the pass, raster order."""
    return np.flatnonzero(partition_passes(img).ravel() == pass_id)


def border_indices(width: int, height: int) -> np.ndarray:
    """Flat indices of the border ring, raster order."""
    mask = np.zeros((height, width), dtype=bool)
    mask[0, :] = mask[-1, :] = True
    mask[:, 0] = mask[:, -1] = True
    return np.flatnonzero(mask.ravel())


def rhombus_predict(pixels: np.ndarray, sites: np.ndarray) -> np.ndarray:
    """Half-up rounded mean of the up/down/left/right neighbours."""
    w = pixels.shape[1]
    flat = pixels.ravel().astype(np.int64)
    total = flat[sites - w] + flat[sites + w] + flat[sites - 1] + flat[sites + 1]
    return (total + 2) // 4


def predict(img: GrayImage, pass_id: int, original: GrayImage | None = None) -> PredictionSet:
    """Predictions and errors for every site of ``pass_id``, raster order.

    ``original`` is the layer-0 image the ``originals`` are read from; it
    defaults to ``img`` itself (first layer).
    """
    if pass_id not in range(N_PASSES):
        raise ValueError(f"pass_id must be 0 or 1, got {pass_id}")
    original = img if original is None else original
    if original.pixels.shape != img.pixels.shape:
        raise ValueError("original image has different dimensions")
    sites = pass_sites(img, pass_id)
    h, w = img.height, img.width
    ys, xs = np.divmod(sites, w)
    ring = (ys == 1) | (ys == h - 2) | (xs == 1) | (xs == w - 2)
    cover = img.pixels.ravel()[sites].astype(np.int64)
    z = rhombus_predict(img.pixels, sites)
    return PredictionSet(
        pass_id=pass_id,
        sites=sites,
        cover_values=cover,
        predictions=z,
        errors=cover - z,
        originals=original.pixels.ravel()[sites].astype(np.int64),
        ring=ring,
    )
