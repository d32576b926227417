"""Shifting-cost tables that become the bigraph edge weights.

For a bin y and shift k the reversibility cost is

    C_k(y) = sum over sites with e = y of (k + c - o)^2
           = k^2 h(y) + 2k S1(y) + S2(y)

with S1, S2 the first and second moments of the residual c - o in that bin.
Everything is kept in exact integers; peak costs under the random-bit model
are half of C_k and returned as Fractions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .histogram import LEVELS, PEHistogram


@dataclass(frozen=True, eq=False)
class Moments:
    """Per-bin count and residual moments over the (-levels, levels) bins."""

    h: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    levels: int = LEVELS

    @property
    def offset(self) -> int:
        return self.levels - 1

    def cost(self, y: int, k: int) -> int:
        i = y + self.offset
        if not 0 <= i < len(self.h):
            return 0
        return int(k * k * self.h[i] + 2 * k * self.s1[i] + self.s2[i])

    @classmethod
    def from_sites(cls, errors, residuals, levels: int = LEVELS) -> "Moments":
        e = np.asarray(errors, dtype=np.int64) + (levels - 1)
        r = np.asarray(residuals, dtype=np.int64)
        n = 2 * levels - 1
        h = np.bincount(e, minlength=n).astype(np.int64)
        # np.add.at keeps int64; bincount(weights=) would go through float64
        s1 = np.zeros(n, dtype=np.int64)
        s2 = np.zeros(n, dtype=np.int64)
        np.add.at(s1, e, r)
        np.add.at(s2, e, r * r)
        return cls(h, s1, s2, levels)


@dataclass(frozen=True, eq=False)
class CostTable:
    """C_k(y) for every occupied bin y and every |k| <= T.

    ``site_index`` maps each occupied bin to the positions (into the
    PredictionSet it was built from) of its sites; empty for tables built
    straight from a histogram.
    """

    T: int
    moments: Moments
    site_index: dict = field(default_factory=dict)

    @property
    def levels(self) -> int:
        return self.moments.levels

    def shift_cost(self, y: int, k: int) -> int:
        if abs(k) > self.T:
            raise ValueError(f"shift {k} exceeds bound T={self.T}")
        return self.moments.cost(y, k)

    def peak_cost(self, p: int, k: int) -> Fraction:
        """Random-bit estimate: half of the sites at ``p`` move by ``k``."""
        return Fraction(self.shift_cost(p, k), 2)

    def table(self, bins) -> dict:
        """Materialized {(y, k): C_k(y)} over ``bins`` and k in [-T, T]."""
        return {(y, k): self.shift_cost(y, k) for y in bins for k in range(-self.T, self.T + 1)}

    @classmethod
    def from_histogram(cls, hist: PEHistogram, T: int) -> "CostTable":
        """First-layer table (cover equals original, so C_k(y) = k^2 h(y))."""
        zeros = np.zeros_like(hist.counts)
        return cls(T, Moments(hist.counts.copy(), zeros, zeros.copy(), hist.levels))


def compute_shift_costs(pred, hist: PEHistogram, T: int) -> CostTable:
    if T < 1:
        raise ValueError("T must be >= 1")
    moments = Moments.from_sites(pred.errors, pred.residuals, hist.levels)
    if not np.array_equal(moments.h, hist.counts):
        raise ValueError("histogram does not match the prediction set")
    order = np.argsort(pred.errors, kind="stable")
    sorted_e = pred.errors[order]
    bins, starts = np.unique(sorted_e, return_index=True)
    ends = list(starts[1:]) + [len(order)]
    site_index = {int(b): order[s:t] for b, s, t in zip(bins, starts, ends)}
    return CostTable(T, moments, site_index)


def assign_peak_bits(errors, peaks, bits) -> tuple[np.ndarray, np.ndarray]:
    """Positions of the peak sites (in site order) and the bit each one carries.

    Payload bits are consumed in site order by sites whose error is a peak;
    sites beyond the payload carry 0.
    """
    errors = np.asarray(errors)
    idx = np.flatnonzero(np.isin(errors, list(peaks)))
    carried = np.zeros(len(idx), dtype=np.int8)
    bits = np.asarray(bits if bits is not None else [], dtype=np.int8)
    if len(bits) > len(idx):
        raise ValueError(f"{len(bits)} bits exceed peak capacity {len(idx)}")
    carried[:len(bits)] = bits
    return idx, carried


@dataclass(frozen=True)
class PeakBitMoments:
    """Exact per-bit moments of the peak bins for a known payload.

    ``by_bit[b][p]`` is (count, S1, S2) over the sites of peak ``p`` carrying bit ``b``.
    """

    by_bit: tuple

    def cost(self, p: int, k: int, bit: int) -> int:
        h, s1, s2 = self.by_bit[bit].get(p, (0, 0, 0))
        return k * k * h + 2 * k * s1 + s2


def peak_bit_moments(pred, peaks, bits) -> PeakBitMoments:
    idx, carried = assign_peak_bits(pred.errors, peaks, bits)
    e = pred.errors[idx]
    r = pred.residuals[idx]
    out = ({}, {})
    for b in (0, 1):
        sel = carried == b
        for p in peaks:
            m = sel & (e == p)
            rp = r[m]
            out[b][p] = (int(m.sum()), int(rp.sum()), int((rp * rp).sum()))
    return PeakBitMoments(out)


def compute_peak_costs(pred, peaks, T: int, message=None) -> dict:
    """Peak-bin message-shift costs keyed by (peak, k).

    Without a message this is the half-weight estimate; with one it is the
    exact cost over the sites that carry a 1.
    """
    if message is None:
        moments = Moments.from_sites(pred.errors, pred.residuals)
        return {(p, k): Fraction(moments.cost(p, k), 2)
                for p in peaks for k in range(-T, T + 1)}
    pbm = peak_bit_moments(pred, peaks, message)
    return {(p, k): pbm.cost(p, k, 1) for p in peaks for k in range(-T, T + 1)}
