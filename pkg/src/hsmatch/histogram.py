"""Prediction-error histogram and its bin universes."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidPeak

LEVELS = 256


@dataclass(frozen=True, eq=False)
class PEHistogram:
    """Occurrence counts over the signed bins (-levels, levels).

    ``counts[v + offset]`` is h(v). ``levels`` is the size of the pixel range;
    it is 256 for real images and smaller only for hand-built fixtures.
    """

    counts: np.ndarray
    levels: int = LEVELS

    @property
    def offset(self) -> int:
        return self.levels - 1

    @property
    def lo(self) -> int:
        return -(self.levels - 1)

    @property
    def hi(self) -> int:
        return self.levels - 1

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __getitem__(self, v: int) -> int:
        if not self.lo <= v <= self.hi:
            return 0
        return int(self.counts[v + self.offset])

    def all_bins(self) -> range:
        """The universe A of every representable bin."""
        return range(self.lo, self.hi + 1)

    def occupied(self) -> list[int]:
        """The set B of bins with h(v) > 0, ascending."""
        return (np.flatnonzero(self.counts) - self.offset).tolist()

    def in_universe(self, v: int) -> bool:
        return self.lo <= v <= self.hi

    @classmethod
    def from_errors(cls, errors, levels: int = LEVELS) -> "PEHistogram":
        e = np.asarray(errors, dtype=np.int64)
        if e.size and (e.min() <= -levels or e.max() >= levels):
            raise ValueError("prediction error outside (-levels, levels)")
        counts = np.bincount(e + (levels - 1), minlength=2 * levels - 1)
        return cls(counts.astype(np.int64), levels)

    @classmethod
    def from_counts(cls, counts: dict[int, int], levels: int = LEVELS) -> "PEHistogram":
        arr = np.zeros(2 * levels - 1, dtype=np.int64)
        for v, c in counts.items():
            if c < 0:
                raise ValueError("negative count")
            arr[v + levels - 1] = c
        return cls(arr, levels)

    def dump(self) -> str:
        """Two-column ``bin count`` listing of the occupied bins."""
        return "".join(f"{v} {self[v]}\n" for v in self.occupied())


def build_histogram(pred, levels: int = LEVELS) -> PEHistogram:
    return PEHistogram.from_errors(pred.errors, levels)


def capacity(hist: PEHistogram, peaks) -> int:
    total = 0
    for p in peaks:
        c = hist[p]
        if c == 0:
            raise InvalidPeak(f"peak bin {p} is empty")
        total += c
    return total
