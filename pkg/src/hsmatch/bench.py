"""Payload/distortion sweeps comparing optimized plans with step-1 shifting."""
from __future__ import annotations

import csv
import logging
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .codec import OPTIMIZED, TRADITIONAL, EmbedConfig, multi_layer_embed, multi_layer_extract
from .errors import HSMatchError
from .image import GrayImage, mse, psnr

log = logging.getLogger(__name__)

CSV_HEADER = ("image", "method", "bpp", "layers", "mse", "psnr_db", "ms", "plan")


@dataclass(frozen=True)
class SweepRow:
    image: str
    method: str
    bpp: float
    layers: int | None
    mse: float | None
    psnr_db: float | None
    ms: int
    plan: str

    @property
    def ok(self) -> bool:
        return self.mse is not None

    def as_csv(self):
        fmt = lambda v, spec: "" if v is None else format(v, spec)
        return (self.image, self.method, f"{self.bpp:g}", "" if self.layers is None else str(self.layers),
                fmt(self.mse, ".6f"), fmt(self.psnr_db, ".4f"), str(self.ms), self.plan)


@dataclass(frozen=True)
class DominanceCheck:
    image: str
    bpp: float
    layers: int
    optimized: float
    traditional: float

    @property
    def holds(self) -> bool:
        return self.optimized <= self.traditional

    @property
    def strict(self) -> bool:
        return self.optimized < self.traditional


@dataclass
class SweepResult:
    rows: list

    def cell(self, image: str, bpp: float, method: str):
        for r in self.rows:
            if (r.image, r.bpp, r.method) == (image, bpp, method):
                return r
        return None

    def dominance(self) -> list:
        """One check per (image, bpp) where both methods succeeded."""
        checks = []
        seen = set()
        for r in self.rows:
            key = (r.image, r.bpp)
            if key in seen:
                continue
            seen.add(key)
            a, b = self.cell(*key, OPTIMIZED), self.cell(*key, TRADITIONAL)
            if a is None or b is None or not (a.ok and b.ok):
                continue
            checks.append(DominanceCheck(r.image, r.bpp, max(a.layers, b.layers), a.mse, b.mse))
        return checks

    def violations(self) -> list:
        return [c for c in self.dominance() if not c.holds]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for r in self.rows:
                w.writerow(r.as_csv())


def read_csv(path) -> SweepResult:
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            num = lambda k, t: t(rec[k]) if rec[k] != "" else None
            rows.append(SweepRow(rec["image"], rec["method"], float(rec["bpp"]), num("layers", int),
                                 num("mse", float), num("psnr_db", float), int(rec["ms"]), rec["plan"]))
    return SweepResult(rows)


def sweep_message(seed: int, image_id: str, n_bits: int) -> np.ndarray:
    """Uniform bits, shared by both methods of a cell."""
    rng = np.random.default_rng([seed, zlib.crc32(image_id.encode()), n_bits])
    return rng.integers(0, 2, n_bits, dtype=np.uint8)


def payload_bits(img: GrayImage, bpp: float) -> int:
    return int(round(bpp * img.size))


def run_cell(image_id: str, img: GrayImage, bpp: float, method: str, config: EmbedConfig,
             seed: int, timing: bool = True, verify: bool = False) -> SweepRow:
    n = payload_bits(img, bpp)
    message = sweep_message(seed, image_id, n)
    cfg = replace(config, method=method)
    key = f"sweep-{seed}"
    t0 = time.perf_counter()
    try:
        marked = multi_layer_embed(img, message, key, cfg)
        if verify:
            back, bits = multi_layer_extract(marked.image, key)
            if back != img or not np.array_equal(bits, message):
                raise RuntimeError("roundtrip mismatch")
    except HSMatchError as exc:
        log.info("%s %s %.3g bpp failed: %s", image_id, method, bpp, exc)
        ms = int(round((time.perf_counter() - t0) * 1000)) if timing else 0
        return SweepRow(image_id, method, bpp, None, None, None, ms, f"error:{exc.code}")
    ms = int(round((time.perf_counter() - t0) * 1000)) if timing else 0
    plan = "" if marked.trajectory == method else f"via:{marked.trajectory};"
    plan += ";".join(f"u{r.unit}:{r.plan.summary()} sse={r.realized_sse} est={float(r.estimated_sse):.1f}"
                    for r in marked.units)
    return SweepRow(image_id, method, bpp, marked.layers_embedded, mse(img, marked.image),
                    psnr(img, marked.image), ms, plan)


def _run_cell_args(args):
    return run_cell(*args)


def run_sweep(images, bpp_grid, methods=(OPTIMIZED, TRADITIONAL), config: EmbedConfig = EmbedConfig(),
              seed: int = 0, jobs: int = 1, timing: bool = True, verify: bool = False) -> SweepResult:
    """Every (image, bpp, method) cell; rows come back in that nested order whatever ``jobs`` is.

    ``images`` is a sequence of (image_id, GrayImage).
    """
    cells = [(name, img, float(bpp), method, config, seed, timing, verify)
             for name, img in images for bpp in bpp_grid for method in methods]
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_cell_args, cells))
    else:
        rows = [_run_cell_args(c) for c in cells]
    return SweepResult(rows)
